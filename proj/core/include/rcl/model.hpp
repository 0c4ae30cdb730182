// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rcl/random.hpp"

namespace rcl {

/// The finite index set of the lattice, optionally with geometric coordinates
/// used by distance-based decay profiles.
struct SiteSet {
  std::size_t size = 0;
  std::vector<std::vector<double>> coords;  // empty, or one tuple per site

  /// Throws ModelError when size is zero or coords has the wrong length.
  void validate() const;
  bool has_coords() const noexcept { return !coords.empty(); }

  /// Euclidean distance of the coordinates, or |x - y| on indices.
  double distance(std::size_t x, std::size_t y) const;
};

enum class DistributionKind { Uniform, PiecewiseLinear };

/// Absolutely continuous law with bounded support.
///
/// Uniform laws are stored by their endpoints. Piecewise-linear laws are
/// stored as density values at increasing knots and are normalized on
/// construction, so any nonnegative shape with positive area is accepted.
class PotentialDistribution {
 public:
  static PotentialDistribution uniform(double lo, double hi);
  static PotentialDistribution piecewise_linear(std::vector<double> knots,
                                                std::vector<double> density);
  /// Symmetric triangular law on [lo, hi].
  static PotentialDistribution tent(double lo, double hi);

  DistributionKind kind() const noexcept { return kind_; }
  double lo() const noexcept { return knots_.front(); }
  double hi() const noexcept { return knots_.back(); }
  double sup_density() const noexcept { return sup_density_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& density() const noexcept { return density_; }

  /// Density at v; zero outside [lo, hi].
  double pdf(double v) const noexcept;
  double sample(Rng& rng) const;
  double mean() const noexcept;

  /// Law of (v - shift) / scale for v drawn from this law; scale > 0.
  PotentialDistribution affine(double shift, double scale) const;

  friend bool operator==(const PotentialDistribution&, const PotentialDistribution&) = default;

 private:
  PotentialDistribution(DistributionKind kind, std::vector<double> knots,
                        std::vector<double> density);

  DistributionKind kind_;
  std::vector<double> knots_;
  std::vector<double> density_;
  std::vector<double> cumulative_;  // mass to the left of each knot
  double sup_density_ = 0.0;
};

inline double potential_pdf(const PotentialDistribution& dist, double v) { return dist.pdf(v); }
inline double potential_sample(const PotentialDistribution& dist, Rng& rng) {
  return dist.sample(rng);
}

/// H = T + diag(V) for a fixed symmetric hopping T and independent site laws.
class ModelSpec {
 public:
  /// Validates every invariant and throws ModelError on violation. With
  /// rescaled = true the unit-interval condition on T and the supports is
  /// checked to 1e-12.
  ModelSpec(SiteSet sites, Eigen::MatrixXd hopping,
            std::vector<PotentialDistribution> potentials, bool rescaled = false);

  std::size_t size() const noexcept { return sites_.size; }
  const SiteSet& sites() const noexcept { return sites_; }
  const Eigen::MatrixXd& hopping() const noexcept { return hopping_; }
  const std::vector<PotentialDistribution>& potentials() const noexcept { return potentials_; }
  const PotentialDistribution& potential(std::size_t x) const;
  bool rescaled() const noexcept { return rescaled_; }

  double hopping_min_eigenvalue() const noexcept { return t_min_; }
  double hopping_max_eigenvalue() const noexcept { return t_max_; }
  /// max over sites of the density supremum.
  double sup_density() const noexcept;
  /// m = lambda_min(T) + min lo and M = lambda_max(T) + max hi.
  double spectral_lower_bound() const noexcept;
  double spectral_upper_bound() const noexcept;

  /// One potential vector drawn site-independently.
  Eigen::VectorXd sample_potential(Rng& rng) const;

  void require_site(std::size_t x) const;
  void require_rescaled() const;

 private:
  SiteSet sites_;
  Eigen::MatrixXd hopping_;
  std::vector<PotentialDistribution> potentials_;
  bool rescaled_;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
};

struct Hamiltonian {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd potential_values;

  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

Hamiltonian assemble_hamiltonian(const ModelSpec& model, const Eigen::VectorXd& values);

/// The Hamiltonian with the potential at site x set to zero.
Hamiltonian assemble_zeroed(const ModelSpec& model, const Eigen::VectorXd& values, std::size_t x);

/// Affine map H -> (H - m) / (M - m) expressed on T and on the site laws.
ModelSpec rescale_to_unit_interval(const ModelSpec& model);

}  // namespace rcl
