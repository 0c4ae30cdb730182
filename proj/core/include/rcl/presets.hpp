// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcl/estimators.hpp"
#include "rcl/model.hpp"
#include "rcl/samplers.hpp"

namespace rcl {

/// Nearest-neighbour chain with uniform hopping and i.i.d. site laws.
ModelSpec anderson_1d(std::size_t n, double hopping, const PotentialDistribution& dist,
                      bool rescale = true);

/// L x L square grid; site (r, c) has index r * L + c and coordinates (r, c).
ModelSpec anderson_2d(std::size_t side, double hopping, const PotentialDistribution& dist,
                      bool rescale = true);

/// -Laplacian on [1, n] with Dirichlet ends (diagonal 2, off-diagonals -1)
/// plus potentials scaled by 1 / sqrt(n).
ModelSpec critical_1d(std::size_t n, const PotentialDistribution& dist, bool rescale = true);

struct ProfileData {
  std::vector<double> t_grid;   // site / n
  std::vector<double> profile;  // |phi(site)|^2
  double center_t = 0.0;        // x* / n
  double lambda = 0.0;
};

ProfileData eigenvector_profile(const OmegaPoint& point, std::size_t n);

/// |(H_{v_x*=0} - lambda)^{-1}_{x* y}|^2 for every y, unnormalized.
std::vector<double> resolvent_profile(const ModelSpec& model, const OmegaPoint& point);

/// Mass of the profile within `half_width` sites of `center`.
double window_mass(const std::vector<double>& profile, std::size_t center, std::size_t half_width);

struct CenterStatistics {
  std::vector<double> centers;  // sorted x*/n
  std::vector<double> ecdf;     // ecdf at each sorted center
  double ks_distance = 0.0;     // sup |F_n(t) - t| on [0, 1]
  std::vector<std::size_t> counts;  // per site
};

CenterStatistics center_statistics(std::span<const OmegaPoint> points, std::size_t n);

/// Pearson statistic of site counts against the uniform law.
double chi_square_uniform(std::span<const std::size_t> counts);

struct ConcentrationCheck {
  std::size_t samples = 0;
  std::size_t center_hits = 0;  // window around x* holds >= threshold mass
  std::size_t null_hits = 0;    // same for a window at an independent uniform site
  double center_frequency() const noexcept {
    return samples ? static_cast<double>(center_hits) / static_cast<double>(samples) : 0.0;
  }
  double null_frequency() const noexcept {
    return samples ? static_cast<double>(null_hits) / static_cast<double>(samples) : 0.0;
  }
};

/// Draws `samples` spectral-construction points and compares how often the
/// window around the random center captures `threshold` of the eigenvector
/// mass against a window at a uniformly placed position.
ConcentrationCheck concentration_frequency(const ModelSpec& model, std::size_t samples,
                                           std::size_t half_width, double threshold,
                                           const RunOptions& opts);

}  // namespace rcl
