// SPDX-License-Identifier: Apache-2.0
#include "rcl/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcl/error.hpp"

namespace rcl {
namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kWindowTolerance = 1e-12;

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

}  // namespace

void SiteSet::validate() const {
  if (size == 0) throw ModelError("site set must contain at least one site");
  if (!coords.empty()) {
    if (coords.size() != size) {
      throw ModelError("site coordinates: expected " + std::to_string(size) + " tuples, got " +
                       std::to_string(coords.size()));
    }
    const std::size_t dim = coords.front().size();
    for (const auto& c : coords) {
      if (c.size() != dim || dim == 0) throw ModelError("site coordinates must share one dimension");
      if (!all_finite(c)) throw ModelError("site coordinates must be finite");
    }
  }
}

double SiteSet::distance(std::size_t x, std::size_t y) const {
  if (coords.empty()) return x > y ? static_cast<double>(x - y) : static_cast<double>(y - x);
  double acc = 0.0;
  for (std::size_t k = 0; k < coords[x].size(); ++k) {
    const double d = coords[x][k] - coords[y][k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// PotentialDistribution

PotentialDistribution::PotentialDistribution(DistributionKind kind, std::vector<double> knots,
                                             std::vector<double> density)
    : kind_(kind), knots_(std::move(knots)), density_(std::move(density)) {
  if (knots_.size() < 2 || knots_.size() != density_.size()) {
    throw ModelError("potential law needs matching knots and densities (at least two)");
  }
  if (!all_finite(knots_) || !all_finite(density_)) {
    throw ModelError("potential law must have a bounded support and finite density");
  }
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (!(knots_[i] < knots_[i + 1])) throw ModelError("potential law knots must increase strictly");
  }
  if (std::any_of(density_.begin(), density_.end(), [](double d) { return d < 0.0; })) {
    throw ModelError("potential density must be nonnegative");
  }

  if (kind_ == DistributionKind::Uniform) {
    const double h = 1.0 / (knots_.back() - knots_.front());
    density_.assign(2, h);
    cumulative_ = {0.0, 1.0};
    sup_density_ = h;
    return;
  }

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    area += 0.5 * (density_[i] + density_[i + 1]) * (knots_[i + 1] - knots_[i]);
  }
  if (!(area > 0.0)) throw ModelError("potential density must have positive mass");
  // Already-normalized input (e.g. a reloaded model) is kept bit for bit.
  if (std::abs(area - 1.0) > 1e-14) {
    for (double& d : density_) d /= area;
  }

  cumulative_.assign(knots_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    cumulative_[i + 1] =
        cumulative_[i] + 0.5 * (density_[i] + density_[i + 1]) * (knots_[i + 1] - knots_[i]);
  }
  sup_density_ = *std::max_element(density_.begin(), density_.end());
}

PotentialDistribution PotentialDistribution::uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw ModelError("uniform law needs finite lo < hi");
  }
  return {DistributionKind::Uniform, {lo, hi}, {1.0, 1.0}};
}

PotentialDistribution PotentialDistribution::piecewise_linear(std::vector<double> knots,
                                                              std::vector<double> density) {
  return {DistributionKind::PiecewiseLinear, std::move(knots), std::move(density)};
}

PotentialDistribution PotentialDistribution::tent(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw ModelError("tent law needs finite lo < hi");
  }
  return piecewise_linear({lo, 0.5 * (lo + hi), hi}, {0.0, 1.0, 0.0});
}

double PotentialDistribution::pdf(double v) const noexcept {
  if (!(v >= knots_.front() && v <= knots_.back())) return 0.0;
  if (kind_ == DistributionKind::Uniform) return density_.front();
  auto it = std::upper_bound(knots_.begin(), knots_.end(), v);
  if (it == knots_.end()) return density_.back();
  const auto j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double w = (v - knots_[j]) / (knots_[j + 1] - knots_[j]);
  return density_[j] + w * (density_[j + 1] - density_[j]);
}

double PotentialDistribution::sample(Rng& rng) const {
  const double u = rng.uniform01();
  if (kind_ == DistributionKind::Uniform) return knots_.front() + (knots_.back() - knots_.front()) * u;

  // Inverse cdf: locate the segment, then solve the quadratic for the offset.
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t j = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  if (j + 1 >= knots_.size()) j = knots_.size() - 2;
  const double width = knots_[j + 1] - knots_[j];
  const double left = density_[j];
  const double slope = (density_[j + 1] - left) / width;
  const double mass = u - cumulative_[j];
  const double disc = std::max(0.0, left * left + 2.0 * slope * mass);
  const double denom = left + std::sqrt(disc);
  const double offset = denom > 0.0 ? 2.0 * mass / denom : 0.0;
  return knots_[j] + std::clamp(offset, 0.0, width);
}

double PotentialDistribution::mean() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double a = knots_[i];
    const double b = knots_[i + 1];
    m += (b - a) / 6.0 * (density_[i] * (2.0 * a + b) + density_[i + 1] * (a + 2.0 * b));
  }
  return m;
}

PotentialDistribution PotentialDistribution::affine(double shift, double scale) const {
  if (!(scale > 0.0 && std::isfinite(scale) && std::isfinite(shift))) {
    throw ModelError("affine map of a potential law needs a finite positive scale");
  }
  std::vector<double> knots(knots_.size());
  std::transform(knots_.begin(), knots_.end(), knots.begin(),
                 [&](double v) { return (v - shift) / scale; });
  if (kind_ == DistributionKind::Uniform) return uniform(knots.front(), knots.back());
  std::vector<double> density(density_.size());
  std::transform(density_.begin(), density_.end(), density.begin(),
                 [&](double d) { return d * scale; });
  return piecewise_linear(std::move(knots), std::move(density));
}

// ---------------------------------------------------------------------------
// ModelSpec

ModelSpec::ModelSpec(SiteSet sites, Eigen::MatrixXd hopping,
                     std::vector<PotentialDistribution> potentials, bool rescaled)
    : sites_(std::move(sites)),
      hopping_(std::move(hopping)),
      potentials_(std::move(potentials)),
      rescaled_(rescaled) {
  sites_.validate();
  const auto n = static_cast<Eigen::Index>(sites_.size);
  if (hopping_.rows() != n || hopping_.cols() != n) {
    throw ModelError("hopping matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (!hopping_.allFinite()) throw ModelError("hopping matrix must be finite");
  if ((hopping_ - hopping_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw ModelError("hopping matrix must be symmetric");
  }
  if (potentials_.size() != sites_.size) {
    throw ModelError("expected one potential law per site (" + std::to_string(sites_.size) +
                     "), got " + std::to_string(potentials_.size()));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hopping_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolve of the hopping matrix failed");
  t_min_ = solver.eigenvalues()(0);
  t_max_ = solver.eigenvalues()(n - 1);

  if (rescaled_ &&
      (spectral_lower_bound() < -kWindowTolerance || spectral_upper_bound() > 1.0 + kWindowTolerance)) {
    throw ModelError("model flagged as rescaled but its spectral window [" +
                     std::to_string(spectral_lower_bound()) + ", " +
                     std::to_string(spectral_upper_bound()) + "] is not inside [0, 1]");
  }
}

const PotentialDistribution& ModelSpec::potential(std::size_t x) const {
  require_site(x);
  return potentials_[x];
}

double ModelSpec::sup_density() const noexcept {
  double s = 0.0;
  for (const auto& p : potentials_) s = std::max(s, p.sup_density());
  return s;
}

double ModelSpec::spectral_lower_bound() const noexcept {
  double lo = potentials_.front().lo();
  for (const auto& p : potentials_) lo = std::min(lo, p.lo());
  return t_min_ + lo;
}

double ModelSpec::spectral_upper_bound() const noexcept {
  double hi = potentials_.front().hi();
  for (const auto& p : potentials_) hi = std::max(hi, p.hi());
  return t_max_ + hi;
}

Eigen::VectorXd ModelSpec::sample_potential(Rng& rng) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
  for (std::size_t x = 0; x < size(); ++x) v(static_cast<Eigen::Index>(x)) = potentials_[x].sample(rng);
  return v;
}

void ModelSpec::require_site(std::size_t x) const {
  if (x >= size()) {
    throw SiteError("site " + std::to_string(x) + " outside a model of " + std::to_string(size()) +
                    " sites");
  }
}

void ModelSpec::require_rescaled() const {
  if (!rescaled_) throw PreconditionError("model must be rescaled to the unit spectral window");
}

// ---------------------------------------------------------------------------

Hamiltonian assemble_hamiltonian(const ModelSpec& model, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != model.size()) {
    throw DimensionError("potential vector has length " + std::to_string(values.size()) +
                         ", model has " + std::to_string(model.size()) + " sites");
  }
  Hamiltonian h{model.hopping(), values};
  h.matrix.diagonal() += values;
  return h;
}

Hamiltonian assemble_zeroed(const ModelSpec& model, const Eigen::VectorXd& values, std::size_t x) {
  model.require_site(x);
  Eigen::VectorXd zeroed = values;
  if (static_cast<std::size_t>(zeroed.size()) == model.size()) zeroed(static_cast<Eigen::Index>(x)) = 0.0;
  return assemble_hamiltonian(model, zeroed);
}

ModelSpec rescale_to_unit_interval(const ModelSpec& model) {
  const double m = model.spectral_lower_bound();
  const double big_m = model.spectral_upper_bound();
  const double width = big_m - m;
  if (!(width > 0.0)) {
    throw DegenerateModelError("spectral window has zero width; nothing to rescale");
  }
  std::vector<PotentialDistribution> laws;
  laws.reserve(model.size());
  for (const auto& p : model.potentials()) laws.push_back(p.affine(m, width));
  return ModelSpec(model.sites(), model.hopping() / width, std::move(laws), true);
}

}  // namespace rcl
