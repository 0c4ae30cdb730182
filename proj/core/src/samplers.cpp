// SPDX-License-Identifier: Apache-2.0
#include "rcl/samplers.hpp"

#include "rcl/error.hpp"
#include "rcl/spectral.hpp"

namespace rcl {

std::size_t draw_center(const Eigen::VectorXd& phi, Rng& rng) {
  const double total = phi.squaredNorm();
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  for (Eigen::Index x = 0; x < phi.size(); ++x) {
    acc += phi(x) * phi(x);
    if (target < acc) return static_cast<std::size_t>(x);
  }
  // Round-off can leave target == acc at the end; fall back to the last
  // site that carries mass.
  for (Eigen::Index x = phi.size() - 1; x > 0; --x) {
    if (phi(x) != 0.0) return static_cast<std::size_t>(x);
  }
  return 0;
}

OmegaPoint sample_mu1(const ModelSpec& model, Rng& rng, SamplerStats* stats) {
  model.require_rescaled();
  for (std::size_t attempt = 0; attempt <= kRetryCap; ++attempt) {
    Eigen::VectorXd v = model.sample_potential(rng);
    const EigenDecomposition eig = eigendecompose(assemble_hamiltonian(model, v));
    if (eig.degenerate) {
      if (stats) ++stats->degenerate_resamples;
      continue;
    }
    const auto i = static_cast<Eigen::Index>(rng.index(model.size()));
    OmegaPoint p;
    p.potential = std::move(v);
    p.lambda = eig.eigenvalues(i);
    p.phi = eig.eigenvectors.col(i);
    p.x_star = draw_center(p.phi, rng);
    return p;
  }
  throw SamplingError("spectral sampler: degenerate spectrum persisted past the retry cap");
}

WeightedOmegaPoint construct_mu2_point(const ModelSpec& model, double lambda, std::size_t x_star,
                                       const Eigen::VectorXd& values) {
  Reconstruction r = reconstruct_at_site(model, lambda, x_star, values);
  WeightedOmegaPoint out;
  out.point.potential = values;
  out.point.potential(static_cast<Eigen::Index>(x_star)) = r.center_value;
  out.point.lambda = lambda;
  out.point.phi = std::move(r.phi);
  out.point.x_star = x_star;
  out.weight = model.potentials()[x_star].pdf(r.center_value);
  return out;
}

WeightedOmegaPoint sample_mu2(const ModelSpec& model, Rng& rng, SamplerStats* stats) {
  model.require_rescaled();
  for (std::size_t attempt = 0; attempt <= kRetryCap; ++attempt) {
    const double lambda = rng.uniform01();
    const std::size_t x = rng.index(model.size());
    Eigen::VectorXd v(static_cast<Eigen::Index>(model.size()));
    for (std::size_t y = 0; y < model.size(); ++y) {
      v(static_cast<Eigen::Index>(y)) = y == x ? 0.0 : model.potentials()[y].sample(rng);
    }
    try {
      WeightedOmegaPoint out = construct_mu2_point(model, lambda, x, v);
      out.retries = attempt;
      return out;
    } catch (const NoSolutionError&) {
      if (stats) ++stats->no_solution_retries;
    } catch (const NearSingularError&) {
      if (stats) ++stats->near_singular_retries;
    }
  }
  throw SamplingError("resolvent sampler: retry cap exhausted");
}

double rn_weight(const ModelSpec& model, const OmegaPoint& point) {
  return model.potential(point.x_star).pdf(point.potential(static_cast<Eigen::Index>(point.x_star)));
}

double eigen_residual(const ModelSpec& model, const OmegaPoint& point) {
  Hamiltonian h = assemble_hamiltonian(model, point.potential);
  h.matrix.diagonal().array() -= point.lambda;
  return (h.matrix * point.phi).norm();
}

}  // namespace rcl
