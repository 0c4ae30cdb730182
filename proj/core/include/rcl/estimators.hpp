// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcl/model.hpp"
#include "rcl/random.hpp"
#include "rcl/samplers.hpp"

namespace rcl {

/// Samples per parallel task. Fixed so results do not depend on worker count.
inline constexpr std::size_t kTaskSize = 1000;

/// Where randomness comes from and how many workers may run.
struct RunOptions {
  StreamFactory streams{kDefaultSeed};
  std::size_t workers = 0;  // 0: RCL_THREADS or hardware concurrency
};

/// Running (count, sum, sum of squares). Merged in task order.
struct Moments {
  std::size_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double value) noexcept {
    ++count;
    sum += value;
    sum_sq += value * value;
  }
  Moments& operator+=(const Moments& other) noexcept {
    count += other.count;
    sum += other.sum;
    sum_sq += other.sum_sq;
    return *this;
  }
  double mean() const noexcept { return count ? sum / static_cast<double>(count) : 0.0; }
  double variance() const noexcept;  // unbiased, clamped at zero
  double std_error() const noexcept;
};

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double zero_weight_fraction = 0.0;
  std::size_t retries = 0;
  std::map<std::string, std::string> metadata;
};

MonteCarloResult to_result(const Moments& m);

using TestFunction = std::function<double(const OmegaPoint&)>;

struct NamedTestFunction {
  std::string name;
  TestFunction f;
};

/// Built-in test functions for a model of `sites` sites:
///   one, lambda, lambda2, phi_center2 (|phi(x*)|^2), participation
///   (sum |phi|^4), left_half (x* < sites / 2).
std::optional<NamedTestFunction> test_function_by_name(const std::string& name, std::size_t sites);
std::vector<NamedTestFunction> default_test_functions(std::size_t sites);

MonteCarloResult expectation_mu1(const ModelSpec& model, const TestFunction& f, std::size_t n,
                                 const RunOptions& opts);

/// Mean of f * weight over resolvent-construction points, zero weights included.
MonteCarloResult expectation_mu2_weighted(const ModelSpec& model, const TestFunction& f,
                                          std::size_t n, const RunOptions& opts);

struct RnIdentityEntry {
  std::string name;
  MonteCarloResult mu1;
  MonteCarloResult mu2;
  double difference = 0.0;
  double combined_std_error = 0.0;
  bool pass = false;  // |difference| <= 3 * combined_std_error
};

struct RnIdentityReport {
  std::vector<RnIdentityEntry> entries;
  SamplerStats mu1_stats;
  SamplerStats mu2_stats;
  bool all_pass = false;
};

/// Both sides of E_mu1[f] = E_mu2[f w] for every f, evaluated on one shared
/// batch of n points per measure.
RnIdentityReport rn_identity_report(const ModelSpec& model, std::span<const NamedTestFunction> fs,
                                    std::size_t n, const RunOptions& opts);

struct Histogram {
  std::vector<double> edges;      // bins + 1 entries over [0, 1]
  std::vector<double> density;    // per bin
  std::vector<double> std_error;  // per bin
  std::size_t draws = 0;

  std::size_t bins() const noexcept { return density.size(); }
  std::size_t bin_of(double lambda) const noexcept;
  double integral() const noexcept;
};

/// Normalized histogram of every eigenvalue of n sampled Hamiltonians.
/// Eigenvalues outside [0, 1] by round-off are counted in the edge bins.
Histogram dos_empirical(const ModelSpec& model, std::size_t n, std::size_t bins,
                        const RunOptions& opts);

/// Density of states at lambda through the resolvent: the mean over a uniform
/// site x and the off-x potentials of rho_x(-1 / g(x)), g the resolvent column
/// of the x-zeroed Hamiltonian.
MonteCarloResult dos_resolvent_at(const ModelSpec& model, double lambda, std::size_t n,
                                  const RunOptions& opts);

/// Event on eigenvectors. The center site is passed along for events that
/// refer to it.
using EigenvectorEvent = std::function<bool(const Eigen::VectorXd& phi, std::size_t center)>;

/// P(phi_lambda in U | lambda in Spec(H)) as the ratio of the weighted
/// indicator mean to the weighted mean on shared draws. Throws
/// ConditioningError when the denominator is indistinguishable from zero.
MonteCarloResult eigenvector_law_probability(const ModelSpec& model, double lambda,
                                             const EigenvectorEvent& event, std::size_t n,
                                             const RunOptions& opts);

enum class EtaKind { Exponential, Polynomial, Constant, Custom };

/// Decay profile eta(x, y) >= 0 evaluated on the model's site distance.
class EtaFunction {
 public:
  using Custom = std::function<double(std::size_t x, std::size_t y, double distance)>;

  static EtaFunction exponential(double c);
  static EtaFunction polynomial(double k);
  static EtaFunction constant(double value);
  static EtaFunction custom(Custom fn, std::string label = "custom");
  /// "exp:c=0.2", "poly:k=2", "const:v=1". Throws PreconditionError.
  static EtaFunction parse(const std::string& spec);

  double operator()(const SiteSet& sites, std::size_t x, std::size_t y) const;
  EtaKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

 private:
  EtaFunction(EtaKind kind, double param, std::string label, Custom fn = {});

  EtaKind kind_;
  double param_;
  std::string label_;
  Custom fn_;
};

/// Membership of phi in the localization event: some x has |phi(y)| <= eta(x, y)
/// for every y.
bool in_localization_event(const Eigen::VectorXd& phi, const EtaFunction& eta, const SiteSet& sites);

struct AlphaEtaResult {
  std::vector<MonteCarloResult> per_site;
  double alpha = 0.0;  // max over sites
  std::size_t argmax = 0;
  double std_error = 0.0;  // of the maximizing site
};

/// For each x, the probability over off-x potentials that some |g(y)| exceeds
/// eta(x, y) ||g||; n draws per site.
AlphaEtaResult alpha_eta_estimate(const ModelSpec& model, double lambda, const EtaFunction& eta,
                                  std::size_t n, const RunOptions& opts);

struct LocalizationReport {
  MonteCarloResult left;  // P(phi not in U_loc | lambda)
  double right = 0.0;     // sup_density * alpha / dos
  double right_std_error = 0.0;
  MonteCarloResult dos;
  AlphaEtaResult alpha;
  double sup_density = 0.0;
  double combined_std_error = 0.0;
  bool pass = false;  // left <= right + 3 * combined
};

LocalizationReport localization_bound_report(const ModelSpec& model, double lambda,
                                             const EtaFunction& eta, std::size_t n,
                                             const RunOptions& opts);

/// Which matrix the fractional moment is taken of.
enum class ResolventMatrix {
  ZeroedAtSource,  // potential at the source site fixed to 0
  Full,            // potential at the source drawn like every other site
};

/// Mean of |(H - lambda)^{-1}_{xy}|^s over potential draws; 0 < s < 1.
MonteCarloResult fractional_moment_estimate(const ModelSpec& model, double lambda, double s,
                                            std::size_t x, std::size_t y, std::size_t n,
                                            const RunOptions& opts,
                                            ResolventMatrix matrix = ResolventMatrix::ZeroedAtSource);

struct DecayFit {
  std::vector<std::size_t> distances;
  std::vector<MonteCarloResult> moments;
  double slope = 0.0;  // least squares of log mean against distance
  double intercept = 0.0;
  double slope_std_error = 0.0;  // from the fit residuals; 0 with two points
};

/// Fractional moments from `source` to source + d for d = 1..max_distance on
/// a chain, plus the fitted exponential rate.
DecayFit fractional_moment_decay(const ModelSpec& model, double lambda, double s,
                                 std::size_t source, std::size_t max_distance, std::size_t n,
                                 const RunOptions& opts,
                                 ResolventMatrix matrix = ResolventMatrix::ZeroedAtSource);

}  // namespace rcl
