// SPDX-License-Identifier: Apache-2.0
#include "rcl/presets.hpp"

#include <algorithm>
#include <cmath>

#include "rcl/error.hpp"
#include "rcl/parallel.hpp"
#include "rcl/spectral.hpp"

namespace rcl {
namespace {

ModelSpec finish(SiteSet sites, Eigen::MatrixXd t, std::vector<PotentialDistribution> laws, bool rescale) {
  ModelSpec model(std::move(sites), std::move(t), std::move(laws));
  return rescale ? rescale_to_unit_interval(model) : model;
}

SiteSet line_sites(std::size_t n) {
  SiteSet s{n, {}};
  for (std::size_t i = 0; i < n; ++i) s.coords.push_back({static_cast<double>(i)});
  return s;
}

}  // namespace

ModelSpec anderson_1d(std::size_t n, double hopping, const PotentialDistribution& dist, bool rescale) {
  if (n < 1) throw PreconditionError("chain needs at least one site");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = hopping;
  return finish(line_sites(n), std::move(t), std::vector<PotentialDistribution>(n, dist), rescale);
}

ModelSpec anderson_2d(std::size_t side, double hopping, const PotentialDistribution& dist, bool rescale) {
  if (side < 1) throw PreconditionError("grid needs at least one site per side");
  const std::size_t n = side * side;
  const auto m = static_cast<Eigen::Index>(n);
  const auto l = static_cast<Eigen::Index>(side);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  SiteSet sites{n, {}};
  for (Eigen::Index r = 0; r < l; ++r) {
    for (Eigen::Index c = 0; c < l; ++c) {
      const Eigen::Index i = r * l + c;
      if (c + 1 < l) t(i, i + 1) = t(i + 1, i) = hopping;
      if (r + 1 < l) t(i, i + l) = t(i + l, i) = hopping;
      sites.coords.push_back({static_cast<double>(r), static_cast<double>(c)});
    }
  }
  return finish(std::move(sites), std::move(t), std::vector<PotentialDistribution>(n, dist), rescale);
}

ModelSpec critical_1d(std::size_t n, const PotentialDistribution& dist, bool rescale) {
  if (n < 2) throw PreconditionError("critical chain needs at least two sites");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = 2.0;
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = -1.0;
  }
  const PotentialDistribution scaled = dist.affine(0.0, std::sqrt(static_cast<double>(n)));
  return finish(line_sites(n), std::move(t), std::vector<PotentialDistribution>(n, scaled), rescale);
}

ProfileData eigenvector_profile(const OmegaPoint& point, std::size_t n) {
  if (n == 0 || static_cast<std::size_t>(point.phi.size()) != n || point.x_star >= n) {
    throw DimensionError("profile length does not match the point");
  }
  ProfileData out;
  out.t_grid.resize(n);
  out.profile.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.t_grid[i] = static_cast<double>(i) / static_cast<double>(n);
    const double c = point.phi(static_cast<Eigen::Index>(i));
    out.profile[i] = c * c;
  }
  out.center_t = static_cast<double>(point.x_star) / static_cast<double>(n);
  out.lambda = point.lambda;
  return out;
}

std::vector<double> resolvent_profile(const ModelSpec& model, const OmegaPoint& point) {
  const ResolventColumn col =
      resolvent_column(assemble_zeroed(model, point.potential, point.x_star), point.lambda, point.x_star);
  std::vector<double> out(static_cast<std::size_t>(col.g.size()));
  for (Eigen::Index y = 0; y < col.g.size(); ++y) out[static_cast<std::size_t>(y)] = col.g(y) * col.g(y);
  return out;
}

double window_mass(const std::vector<double>& profile, std::size_t center, std::size_t half_width) {
  if (profile.empty()) return 0.0;
  const std::size_t lo = center > half_width ? center - half_width : 0;
  const std::size_t hi = std::min(profile.size() - 1, center + half_width);
  double mass = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) mass += profile[i];
  return mass;
}

CenterStatistics center_statistics(std::span<const OmegaPoint> points, std::size_t n) {
  if (points.empty()) throw PreconditionError("center statistics need at least one point");
  if (n == 0) throw PreconditionError("site count must be positive");
  CenterStatistics out;
  out.counts.assign(n, 0);
  for (const auto& p : points) {
    if (p.x_star >= n) throw SiteError("center outside the site range");
    ++out.counts[p.x_star];
    out.centers.push_back(static_cast<double>(p.x_star) / static_cast<double>(n));
  }
  std::sort(out.centers.begin(), out.centers.end());
  const double total = static_cast<double>(out.centers.size());
  out.ecdf.resize(out.centers.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < out.centers.size(); ++i) {
    std::size_t j = i;
    while (j + 1 < out.centers.size() && out.centers[j + 1] == out.centers[i]) ++j;
    const double t = out.centers[i];
    const double below = static_cast<double>(i) / total;       // F just left of t
    const double at = static_cast<double>(j + 1) / total;      // F at t
    ks = std::max({ks, std::abs(t - below), std::abs(at - t)});
    for (std::size_t k = i; k <= j; ++k) out.ecdf[k] = at;
    i = j;
  }
  out.ks_distance = ks;
  return out;
}

double chi_square_uniform(std::span<const std::size_t> counts) {
  if (counts.empty()) throw PreconditionError("need at least one category");
  double total = 0.0;
  for (const auto c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (const auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

ConcentrationCheck concentration_frequency(const ModelSpec& model, std::size_t samples,
                                           std::size_t half_width, double threshold,
                                           const RunOptions& opts) {
  if (samples == 0) throw PreconditionError("need at least one sample");
  const std::size_t n = model.size();
  const auto factory = opts.streams.fork("concentration");
  const auto parts = run_tasks((samples + kTaskSize - 1) / kTaskSize, opts.workers, [&](std::size_t task) {
    Rng rng = factory.stream(task);
    ConcentrationCheck c;
    const std::size_t count = std::min(kTaskSize, samples - task * kTaskSize);
    for (std::size_t i = 0; i < count; ++i) {
      const OmegaPoint p = sample_mu1(model, rng);
      const ProfileData prof = eigenvector_profile(p, n);
      const std::size_t null_site = rng.index(n);
      ++c.samples;
      if (window_mass(prof.profile, p.x_star, half_width) >= threshold) ++c.center_hits;
      if (window_mass(prof.profile, null_site, half_width) >= threshold) ++c.null_hits;
    }
    return c;
  });
  ConcentrationCheck total;
  for (const auto& c : parts) {
    total.samples += c.samples;
    total.center_hits += c.center_hits;
    total.null_hits += c.null_hits;
  }
  return total;
}

}  // namespace rcl
