// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used as test oracles. None of these call
// into the library.
#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace rcl::testing {

/// Eigenpairs of the symmetric matrix [[a, b], [b, d]] in closed form.
struct Eig2 {
  double lo = 0.0;
  double hi = 0.0;
  Eigen::Vector2d v_lo;  // unit, largest entry positive
  Eigen::Vector2d v_hi;
};

inline Eigen::Vector2d canonical(Eigen::Vector2d v) {
  v.normalize();
  const int lead = std::abs(v(0)) >= std::abs(v(1)) ? 0 : 1;
  return v(lead) < 0.0 ? Eigen::Vector2d(-v) : v;
}

inline Eig2 eig2(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), b);
  Eig2 out;
  out.lo = mean - radius;
  out.hi = mean + radius;
  // (H - mu) v = 0 gives v = (b, mu - a), or (mu - d, b) when b = 0.
  const auto vec = [&](double mu) {
    if (b == 0.0) return std::abs(a - mu) < std::abs(d - mu) ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
    return canonical(Eigen::Vector2d(b, mu - a));
  };
  out.v_lo = vec(out.lo);
  out.v_hi = vec(out.hi);
  return out;
}

/// Composite Simpson rule with `panels` (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels = 2000) {
  const double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// |estimate - expected| in units of the standard error.
inline double z_score(double estimate, double expected, double std_error) {
  return std::abs(estimate - expected) / std_error;
}

}  // namespace rcl::testing
