// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "rcl/model.hpp"
#include "rcl/random.hpp"

namespace rcl {

/// Retry budget for degenerate, near-singular and no-solution draws.
inline constexpr std::size_t kRetryCap = 1000;

/// A point (V, lambda, phi, x*) of the sample space.
struct OmegaPoint {
  Eigen::VectorXd potential;
  double lambda = 0.0;
  Eigen::VectorXd phi;  // unit norm, canonical sign
  std::size_t x_star = 0;
};

struct WeightedOmegaPoint {
  OmegaPoint point;
  double weight = 0.0;      // density of the center law at V[x*]
  std::size_t retries = 0;  // draws discarded before this one was accepted
};

/// Counters for discarded draws; summed across tasks.
struct SamplerStats {
  std::size_t degenerate_resamples = 0;
  std::size_t no_solution_retries = 0;
  std::size_t near_singular_retries = 0;

  std::size_t total() const noexcept {
    return degenerate_resamples + no_solution_retries + near_singular_retries;
  }
  SamplerStats& operator+=(const SamplerStats& other) noexcept {
    degenerate_resamples += other.degenerate_resamples;
    no_solution_retries += other.no_solution_retries;
    near_singular_retries += other.near_singular_retries;
    return *this;
  }
};

/// Draws x with probability |phi(x)|^2 / ||phi||^2.
std::size_t draw_center(const Eigen::VectorXd& phi, Rng& rng);

/// Spectral construction: draw V, diagonalize, pick an eigenvalue uniformly,
/// then a center with probability |phi(x)|^2. Degenerate spectra are redrawn.
OmegaPoint sample_mu1(const ModelSpec& model, Rng& rng, SamplerStats* stats = nullptr);

/// Deterministic tail of the resolvent construction: given the energy, the
/// center and the off-center potentials (entry x_star of `values` ignored),
/// reconstruct the center potential and eigenvector and attach the weight.
/// Propagates NoSolutionError and NearSingularError.
WeightedOmegaPoint construct_mu2_point(const ModelSpec& model, double lambda, std::size_t x_star,
                                       const Eigen::VectorXd& values);

/// Resolvent construction: lambda uniform on [0, 1], x* uniform on sites,
/// off-center potentials from their laws, center potential from the
/// resolvent. Failed draws are replaced by entirely fresh ones. Points whose
/// center potential falls outside the support are kept with weight 0.
WeightedOmegaPoint sample_mu2(const ModelSpec& model, Rng& rng, SamplerStats* stats = nullptr);

/// d mu1 / d mu2 at the point: the density of the center law at V[x*].
double rn_weight(const ModelSpec& model, const OmegaPoint& point);

/// ||(T + diag(V) - lambda) phi||.
double eigen_residual(const ModelSpec& model, const OmegaPoint& point);

}  // namespace rcl
