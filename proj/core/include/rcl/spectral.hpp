// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "rcl/model.hpp"

namespace rcl {

/// Consecutive eigenvalues closer than this flag the spectrum as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-10;
/// Linear solves with an estimated condition number above this are rejected.
inline constexpr double kSingularConditionLimit = 1e12;
/// |g(x)| / ||g|| below this means no finite center potential exists.
inline constexpr double kNoSolutionTolerance = 1e-12;

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, canonical sign
  double min_gap = 0.0;          // +inf for a single site
  bool degenerate = false;       // min_gap < kDegeneracyTolerance
};

/// Flips v so that its largest-magnitude entry is positive. Entries within a
/// relative 1e-12 of the maximum count as ties; the lowest index wins.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v);

EigenDecomposition eigendecompose(const Eigen::MatrixXd& matrix);
inline EigenDecomposition eigendecompose(const Hamiltonian& h) { return eigendecompose(h.matrix); }

/// g = (H0 - lambda)^{-1} 1_x.
struct ResolventColumn {
  Eigen::VectorXd g;
  std::size_t source = 0;
  double energy = 0.0;
  double norm = 0.0;
};

/// Dense LU solve of (H0 - lambda) g = 1_x. Throws NearSingularError when the
/// reciprocal condition estimate is below 1 / kSingularConditionLimit.
ResolventColumn resolvent_column(const Hamiltonian& h0, double lambda, std::size_t x);

struct Reconstruction {
  double center_value = 0.0;  // v_x
  Eigen::VectorXd phi;        // unit eigenvector, canonical sign
  ResolventColumn column;
};

/// Given the energy, a site and the potentials off that site, returns the
/// unique center potential making `lambda` an eigenvalue with phi(x) != 0,
/// together with the eigenvector. `off_values` lists the potentials of the
/// other sites in increasing site order (length |Lambda| - 1).
///
/// Throws NoSolutionError when g(x) vanishes relative to ||g||, and
/// NearSingularError when lambda sits on the spectrum of the zeroed matrix.
Reconstruction lemma1_reconstruct(const ModelSpec& model, double lambda, std::size_t x,
                                  const Eigen::VectorXd& off_values);

/// Same, reading the off-center potentials from a full-length vector whose
/// entry at x is ignored.
Reconstruction reconstruct_at_site(const ModelSpec& model, double lambda, std::size_t x,
                                   const Eigen::VectorXd& values);

/// Eigenvalues of H with row and column x deleted, bracketed by the sentinels
/// 0 and 1: the result has |Lambda| + 1 entries b_0 = 0 <= ... <= b_|Lambda| = 1
/// and eigenvalue i (0-based) of H should lie in [b_i, b_{i+1}].
Eigen::VectorXd interlaced_bounds(const Hamiltonian& h, std::size_t x);

/// Number of eigenvalues falling outside their bracket by more than `slack`.
std::size_t interlacing_violations(const Eigen::VectorXd& eigenvalues,
                                   const Eigen::VectorXd& brackets, double slack);

struct FiniteDifference {
  double derivative = 0.0;
  bool ill_conditioned = false;  // a neighbouring level within 1e3 * h
};

/// Central difference of the i-th (0-based, ascending) eigenvalue with
/// respect to the potential at site x. Test oracle for d lambda_i / d v_x.
FiniteDifference eigenvalue_derivative_fd(const ModelSpec& model, const Eigen::VectorXd& values,
                                          std::size_t i, std::size_t x, double h);

}  // namespace rcl
