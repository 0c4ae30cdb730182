// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rcl/error.hpp"
#include "rcl/presets.hpp"
#include "rcl/spectral.hpp"

using namespace rcl;
using rcl::testing::eig2;

namespace {

ModelSpec two_site() {
  Eigen::MatrixXd t(2, 2);
  t << 0.0, 0.1, 0.1, 0.0;
  return ModelSpec(SiteSet{2, {}}, t,
                   {PotentialDistribution::uniform(0.1, 0.9), PotentialDistribution::uniform(0.1, 0.9)}, true);
}

ModelSpec single() {
  return ModelSpec(SiteSet{1, {}}, Eigen::MatrixXd::Zero(1, 1), {PotentialDistribution::uniform(0, 1)}, true);
}

Eigen::MatrixXd m2(double a, double b, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, b, d;
  return m;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST(CanonicalSign, LargestEntryPositiveLowestIndexOnTies) {
  Eigen::VectorXd v = vec({0.1, -0.9, 0.3});
  canonicalize_sign(v);
  EXPECT_EQ(v, vec({-0.1, 0.9, -0.3}));
  Eigen::VectorXd tie = vec({-0.5, 0.5});
  canonicalize_sign(tie);
  EXPECT_EQ(tie, vec({0.5, -0.5}));
}

TEST(Eigendecompose, Examples) {
  const EigenDecomposition d = eigendecompose(m2(0.2, 0.0, 0.7));
  EXPECT_EQ(d.eigenvalues, vec({0.2, 0.7}));
  EXPECT_TRUE(d.eigenvectors.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_NEAR(d.min_gap, 0.5, 1e-15);
  EXPECT_FALSE(d.degenerate);

  const auto oracle = eig2(0.35, 0.1, 0.5);
  const EigenDecomposition e = eigendecompose(m2(0.35, 0.1, 0.5));
  EXPECT_NEAR(e.eigenvalues(0), 0.3, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 0.55, 1e-14);
  EXPECT_NEAR(oracle.lo, 0.3, 1e-14);
  EXPECT_LT((e.eigenvectors.col(0) - oracle.v_lo).norm(), 1e-13);
  EXPECT_LT((e.eigenvectors.col(1) - oracle.v_hi).norm(), 1e-13);

  const EigenDecomposition z = eigendecompose(Eigen::MatrixXd::Zero(3, 3));
  EXPECT_EQ(z.min_gap, 0.0);
  EXPECT_TRUE(z.degenerate);

  EXPECT_TRUE(std::isinf(eigendecompose(Eigen::MatrixXd::Constant(1, 1, 0.4)).min_gap));
}

TEST(Eigendecompose, ResidualAndOrthonormality) {
  const ModelSpec model = anderson_1d(20, 0.3, PotentialDistribution::uniform(0, 1));
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const Hamiltonian h = assemble_hamiltonian(model, model.sample_potential(rng));
    const EigenDecomposition d = eigendecompose(h);
    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
      const double r = (h.matrix * d.eigenvectors.col(i) - d.eigenvalues(i) * d.eigenvectors.col(i)).norm();
      EXPECT_LE(r, 1e-9 * (1.0 + std::abs(d.eigenvalues(i))));
      if (i > 0) EXPECT_LE(d.eigenvalues(i - 1), d.eigenvalues(i));
    }
    EXPECT_LE((d.eigenvectors.transpose() * d.eigenvectors - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff(),
              1e-9);
  }
}

TEST(ResolventColumn, Examples) {
  const ResolventColumn s = resolvent_column(Hamiltonian{Eigen::MatrixXd::Zero(1, 1), vec({0.0})}, 0.4, 0);
  EXPECT_NEAR(s.g(0), -2.5, 1e-15);
  EXPECT_NEAR(s.norm, 2.5, 1e-15);

  const Hamiltonian h0{m2(0.0, 0.1, 0.5), vec({0.0, 0.5})};
  const ResolventColumn c = resolvent_column(h0, 0.3, 0);
  const double det = -0.07;
  EXPECT_NEAR(c.g(0), 0.2 / det, 1e-12);
  EXPECT_NEAR(c.g(1), -0.1 / det, 1e-12);
  EXPECT_EQ(c.source, 0u);
  EXPECT_EQ(c.energy, 0.3);

  const double eig = eig2(0.0, 0.1, 0.5).lo;
  EXPECT_THROW(resolvent_column(h0, eig, 0), NearSingularError);
  EXPECT_THROW(resolvent_column(h0, 0.3, 2), SiteError);
}

TEST(ResolventColumn, ResidualOnRandomChains) {
  const ModelSpec model = anderson_1d(16, 0.1, PotentialDistribution::uniform(0, 1));
  Rng rng(12);
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd v = model.sample_potential(rng);
    const std::size_t x = rng.index(model.size());
    const Hamiltonian h0 = assemble_zeroed(model, v, x);
    const ResolventColumn c = resolvent_column(h0, rng.uniform01(), x);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(16);
    e(static_cast<Eigen::Index>(x)) = 1.0;
    const Eigen::VectorXd shifted = h0.matrix * c.g - c.energy * c.g;
    EXPECT_LE((shifted - e).norm(), 1e-9 * c.norm);
    EXPECT_GT(c.norm, 0.0);
  }
}

TEST(Lemma, ScalarCase) {
  const Reconstruction r = lemma1_reconstruct(single(), 0.4, 0, Eigen::VectorXd(0));
  EXPECT_NEAR(r.center_value, 0.4, 1e-15);
  EXPECT_EQ(r.phi, vec({1.0}));
}

TEST(Lemma, TwoSiteClosedForm) {
  const Reconstruction r = lemma1_reconstruct(two_site(), 0.3, 0, vec({0.5}));
  EXPECT_NEAR(r.center_value, 0.35, 1e-12);
  EXPECT_LT((r.phi - vec({2.0, -1.0}) / std::sqrt(5.0)).norm(), 1e-12);
  // The reconstructed matrix has 0.3 in its spectrum.
  const auto oracle = eig2(r.center_value, 0.1, 0.5);
  EXPECT_NEAR(oracle.lo, 0.3, 1e-12);
  EXPECT_LT((oracle.v_lo - r.phi).norm(), 1e-12);
}

TEST(Lemma, NoSolutionWhenEnergyHitsNeighbour) {
  EXPECT_THROW(lemma1_reconstruct(two_site(), 0.5, 0, vec({0.5})), NoSolutionError);
}

TEST(Lemma, Preconditions) {
  EXPECT_THROW(lemma1_reconstruct(two_site(), 1.5, 0, vec({0.5})), PreconditionError);
  EXPECT_THROW(lemma1_reconstruct(two_site(), 0.3, 0, vec({0.5, 0.2})), DimensionError);
  EXPECT_THROW(lemma1_reconstruct(two_site(), 0.3, 3, vec({0.5})), SiteError);
}

TEST(Lemma, ReconstructedValueMakesLambdaAnEigenvalue) {
  const ModelSpec model = anderson_1d(10, 0.2, PotentialDistribution::uniform(0, 1));
  Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd v = model.sample_potential(rng);
    const std::size_t x = rng.index(model.size());
    const double lambda = rng.uniform01();
    const Reconstruction r = reconstruct_at_site(model, lambda, x, v);
    v(static_cast<Eigen::Index>(x)) = r.center_value;
    const Hamiltonian h = assemble_hamiltonian(model, v);
    EXPECT_LE((h.matrix * r.phi - lambda * r.phi).norm(), 1e-8 * (1.0 + std::abs(r.center_value)));
    EXPECT_NEAR(r.phi.norm(), 1.0, 1e-12);
  }
}

TEST(Interlacing, Examples) {
  const Hamiltonian h{m2(0.35, 0.1, 0.5), vec({0.35, 0.5})};
  const Eigen::VectorXd b = interlaced_bounds(h, 0);
  ASSERT_EQ(b.size(), 3);
  EXPECT_EQ(b(0), 0.0);
  EXPECT_EQ(b(1), 0.5);
  EXPECT_EQ(b(2), 1.0);
  EXPECT_EQ(interlacing_violations(eigendecompose(h).eigenvalues, b, 1e-10), 0u);

  const Hamiltonian d{m2(0.2, 0.0, 0.7), vec({0.2, 0.7})};
  EXPECT_EQ(interlaced_bounds(d, 1), vec({0.0, 0.2, 1.0}));
  EXPECT_EQ(interlacing_violations(vec({0.2, 0.7}), interlaced_bounds(d, 1), 0.0), 0u);
  EXPECT_EQ(interlacing_violations(vec({0.3, 0.7}), interlaced_bounds(d, 1), 1e-10), 1u);

  EXPECT_THROW(interlaced_bounds(Hamiltonian{Eigen::MatrixXd::Zero(1, 1), vec({0.0})}, 0), SizeError);
}

TEST(Interlacing, HoldsOnRandomChains) {
  const ModelSpec model = anderson_1d(8, 0.1, PotentialDistribution::uniform(0, 1));
  Rng rng(14);
  for (int k = 0; k < 1000; ++k) {
    const Hamiltonian h = assemble_hamiltonian(model, model.sample_potential(rng));
    const Eigen::VectorXd ev = eigendecompose(h).eigenvalues;
    for (std::size_t x = 0; x < model.size(); ++x) {
      ASSERT_EQ(interlacing_violations(ev, interlaced_bounds(h, x), 1e-10), 0u);
    }
  }
}

TEST(HellmannFeynman, Examples) {
  EXPECT_NEAR(eigenvalue_derivative_fd(single(), vec({0.4}), 0, 0, 1e-6).derivative, 1.0, 1e-9);

  const FiniteDifference fd = eigenvalue_derivative_fd(two_site(), vec({0.35, 0.5}), 0, 0, 1e-6);
  const auto oracle = eig2(0.35, 0.1, 0.5);
  const double expected = oracle.v_lo(0) * oracle.v_lo(0);
  EXPECT_NEAR(expected, 0.8, 1e-12);
  EXPECT_NEAR(fd.derivative / expected, 1.0, 1e-6);
  EXPECT_FALSE(fd.ill_conditioned);

  const ModelSpec decoupled(SiteSet{2, {}}, Eigen::MatrixXd::Zero(2, 2),
                            {PotentialDistribution::uniform(0, 1), PotentialDistribution::uniform(0, 1)}, true);
  EXPECT_NEAR(eigenvalue_derivative_fd(decoupled, vec({0.2, 0.7}), 0, 1, 1e-6).derivative, 0.0, 1e-12);
}

TEST(HellmannFeynman, MatchesEigenvectorWeights) {
  const ModelSpec model = anderson_1d(8, 0.1, PotentialDistribution::uniform(0, 1));
  Rng rng(15);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd v = model.sample_potential(rng);
    const EigenDecomposition d = eigendecompose(assemble_hamiltonian(model, v));
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t x = 0; x < 8; ++x) {
        const double c = d.eigenvectors(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i));
        const double fd = eigenvalue_derivative_fd(model, v, i, x, 1e-6).derivative;
        EXPECT_LE(std::abs(fd - c * c), 1e-5 * c * c) << "config " << k << " i=" << i << " x=" << x;
      }
    }
  }
}

TEST(HellmannFeynman, FlagsNearDegenerateLevels) {
  const ModelSpec decoupled(SiteSet{2, {}}, Eigen::MatrixXd::Zero(2, 2),
                            {PotentialDistribution::uniform(0, 1), PotentialDistribution::uniform(0, 1)}, true);
  EXPECT_TRUE(eigenvalue_derivative_fd(decoupled, vec({0.5, 0.5 + 1e-4}), 0, 0, 1e-6).ill_conditioned);
  EXPECT_THROW(eigenvalue_derivative_fd(decoupled, vec({0.5, 0.6}), 0, 0, 0.0), PreconditionError);
  EXPECT_THROW(eigenvalue_derivative_fd(decoupled, vec({0.5, 0.6}), 2, 0, 1e-6), SiteError);
}
