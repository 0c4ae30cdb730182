// SPDX-License-Identifier: Apache-2.0
#include "rcl/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rcl/error.hpp"

using Quad = boost::multiprecision::cpp_bin_float_quad;

// Boost's own Eigen adapter predates Eigen 3.4; the generic traits suffice.
template <>
struct Eigen::NumTraits<Quad> : Eigen::GenericNumTraits<Quad> {
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  using Real = Quad;
  using NonInteger = Quad;
  using Nested = Quad;
  using Literal = Quad;
  static Quad dummy_precision() { return Quad(1e-30); }
};

namespace rcl {

void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  Eigen::Index lead = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak * (1.0 - 1e-12)) {
      lead = i;
      break;
    }
  }
  if (v(lead) < 0.0) v = -v;
}

EigenDecomposition eigendecompose(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw DimensionError("eigendecompose needs a nonempty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");

  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors(),
                         std::numeric_limits<double>::infinity(), false};
  for (Eigen::Index k = 0; k < out.eigenvectors.cols(); ++k) canonicalize_sign(out.eigenvectors.col(k));
  for (Eigen::Index k = 0; k + 1 < out.eigenvalues.size(); ++k) {
    out.min_gap = std::min(out.min_gap, out.eigenvalues(k + 1) - out.eigenvalues(k));
  }
  out.degenerate = out.min_gap < kDegeneracyTolerance;
  return out;
}

ResolventColumn resolvent_column(const Hamiltonian& h0, double lambda, std::size_t x) {
  const auto n = static_cast<Eigen::Index>(h0.size());
  if (x >= h0.size()) {
    throw SiteError("site " + std::to_string(x) + " outside a " + std::to_string(n) + "-site matrix");
  }
  Eigen::MatrixXd shifted = h0.matrix;
  shifted.diagonal().array() -= lambda;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
  const double rcond = lu.rcond();
  if (!(rcond * kSingularConditionLimit > 1.0)) {
    throw NearSingularError("energy " + std::to_string(lambda) +
                            " is within the singular tolerance of the spectrum");
  }

  ResolventColumn col;
  col.source = x;
  col.energy = lambda;
  col.g = lu.solve(Eigen::VectorXd::Unit(n, static_cast<Eigen::Index>(x)));
  col.norm = col.g.norm();

  const double residual = (shifted * col.g - Eigen::VectorXd::Unit(n, static_cast<Eigen::Index>(x))).norm();
  if (!(col.norm > 0.0) || !(residual <= 1e-9 * col.norm)) {
    throw NumericError("resolvent solve failed its residual check");
  }
  return col;
}

Reconstruction reconstruct_at_site(const ModelSpec& model, double lambda, std::size_t x,
                                   const Eigen::VectorXd& values) {
  model.require_site(x);
  if (!std::isfinite(lambda)) throw PreconditionError("energy must be finite");
  if (!values.allFinite()) throw PreconditionError("off-center potentials must be finite");

  Reconstruction out;
  out.column = resolvent_column(assemble_zeroed(model, values, x), lambda, x);
  const double gx = out.column.g(static_cast<Eigen::Index>(x));
  if (std::abs(gx) < kNoSolutionTolerance * out.column.norm) {
    throw NoSolutionError("resolvent vanishes at the center; no finite center potential exists");
  }
  out.center_value = -1.0 / gx;
  out.phi = out.column.g / out.column.norm;
  canonicalize_sign(out.phi);
  return out;
}

Reconstruction lemma1_reconstruct(const ModelSpec& model, double lambda, std::size_t x,
                                  const Eigen::VectorXd& off_values) {
  model.require_site(x);
  if (static_cast<std::size_t>(off_values.size()) + 1 != model.size()) {
    throw DimensionError("expected " + std::to_string(model.size() - 1) + " off-center potentials");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw PreconditionError("energy must lie in [0, 1]");
  const auto xi = static_cast<Eigen::Index>(x);
  Eigen::VectorXd values(off_values.size() + 1);
  values.head(xi) = off_values.head(xi);
  values(xi) = 0.0;
  values.tail(off_values.size() - xi) = off_values.tail(off_values.size() - xi);
  return reconstruct_at_site(model, lambda, x, values);
}

Eigen::VectorXd interlaced_bounds(const Hamiltonian& h, std::size_t x) {
  const auto n = static_cast<Eigen::Index>(h.size());
  if (n < 2) throw SizeError("interlacing needs at least two sites");
  if (x >= h.size()) throw SiteError("site " + std::to_string(x) + " outside the matrix");
  const auto xi = static_cast<Eigen::Index>(x);

  Eigen::MatrixXd sub(n - 1, n - 1);
  for (Eigen::Index i = 0, si = 0; i < n; ++i) {
    if (i == xi) continue;
    for (Eigen::Index j = 0, sj = 0; j < n; ++j) {
      if (j == xi) continue;
      sub(si, sj++) = h.matrix(i, j);
    }
    ++si;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolve of the restricted matrix failed");

  Eigen::VectorXd brackets(n + 1);
  brackets(0) = 0.0;
  brackets.segment(1, n - 1) = solver.eigenvalues();
  brackets(n) = 1.0;
  return brackets;
}

std::size_t interlacing_violations(const Eigen::VectorXd& eigenvalues,
                                   const Eigen::VectorXd& brackets, double slack) {
  if (brackets.size() != eigenvalues.size() + 1) {
    throw DimensionError("bracket list must have one more entry than the spectrum");
  }
  std::size_t bad = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) < brackets(i) - slack || eigenvalues(i) > brackets(i + 1) + slack) ++bad;
  }
  return bad;
}

FiniteDifference eigenvalue_derivative_fd(const ModelSpec& model, const Eigen::VectorXd& values,
                                          std::size_t i, std::size_t x, double h) {
  model.require_site(x);
  if (i >= model.size()) throw SiteError("eigenvalue index out of range");
  if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
  const auto xi = static_cast<Eigen::Index>(x);
  const auto ii = static_cast<Eigen::Index>(i);

  // The perturbed spectra are computed in 113-bit arithmetic. In double
  // precision the difference quotient carries an absolute round-off of order
  // eps / h, which swamps derivatives of tiny eigenvector components.
  using QuadMatrix = Eigen::Matrix<Quad, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::MatrixXd h0 = assemble_hamiltonian(model, values).matrix;
  const auto eigenvalue_at = [&](int direction) {
    QuadMatrix m = h0.cast<Quad>();
    m(xi, xi) += Quad(direction) * Quad(h);
    Eigen::SelfAdjointEigenSolver<QuadMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("extended-precision eigensolver failed");
    return Quad(solver.eigenvalues()(ii));
  };
  const Eigen::VectorXd base = eigendecompose(h0).eigenvalues;
  const Quad up = eigenvalue_at(1);
  const Quad down = eigenvalue_at(-1);

  FiniteDifference out;
  out.derivative = static_cast<double>((up - down) / (Quad(2) * Quad(h)));
  double gap = std::numeric_limits<double>::infinity();
  if (ii > 0) gap = std::min(gap, base(ii) - base(ii - 1));
  if (ii + 1 < base.size()) gap = std::min(gap, base(ii + 1) - base(ii));
  out.ill_conditioned = gap < 1e3 * h;
  return out;
}

}  // namespace rcl
