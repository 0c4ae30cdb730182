// SPDX-License-Identifier: Apache-2.0
#include "rcl/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "rcl/error.hpp"
#include "rcl/parallel.hpp"
#include "rcl/spectral.hpp"

namespace rcl {
namespace {

std::size_t task_count(std::size_t n) { return (n + kTaskSize - 1) / kTaskSize; }

std::size_t task_length(std::size_t n, std::size_t task) {
  return std::min(kTaskSize, n - task * kTaskSize);
}

/// Splits n samples into fixed-size tasks, each with its own substream of
/// `factory`, and returns the per-task outputs in task order.
template <class Fn>
auto run_chunked(std::size_t n, const RunOptions& opts, const StreamFactory& factory, Fn&& fn) {
  return run_tasks(task_count(n), opts.workers, [&](std::size_t task) {
    Rng rng = factory.stream(task);
    return fn(rng, task_length(n, task));
  });
}

void require_samples(std::size_t n) {
  if (n < 2) throw PreconditionError("Monte Carlo estimators need at least 2 samples");
}

void require_open_energy(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw PreconditionError("energy must lie in (0, 1)");
}

std::uint64_t energy_key(double lambda) { return std::bit_cast<std::uint64_t>(lambda); }

/// Potentials for every site except x (entry x is 0).
Eigen::VectorXd draw_off_site(const ModelSpec& model, std::size_t x, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(model.size()));
  for (std::size_t y = 0; y < model.size(); ++y) {
    v(static_cast<Eigen::Index>(y)) = y == x ? 0.0 : model.potentials()[y].sample(rng);
  }
  return v;
}

/// One draw of (x, off-x potentials) and the resolvent column of the zeroed
/// Hamiltonian at lambda. Near-singular draws are redrawn.
struct SiteDraw {
  std::size_t x = 0;
  ResolventColumn column;
  double weight = 0.0;  // rho_x(-1 / g(x)); 0 when g(x) vanishes
};

SiteDraw draw_site_resolvent(const ModelSpec& model, double lambda, Rng& rng, std::size_t& retries,
                             std::optional<std::size_t> fixed_site = std::nullopt) {
  for (std::size_t attempt = 0; attempt <= kRetryCap; ++attempt) {
    const std::size_t x = fixed_site ? *fixed_site : rng.index(model.size());
    const Eigen::VectorXd v = draw_off_site(model, x, rng);
    try {
      SiteDraw d;
      d.x = x;
      d.column = resolvent_column(assemble_hamiltonian(model, v), lambda, x);
      const double gx = d.column.g(static_cast<Eigen::Index>(x));
      if (std::abs(gx) >= kNoSolutionTolerance * d.column.norm) {
        d.weight = model.potentials()[x].pdf(-1.0 / gx);
      }
      return d;
    } catch (const NearSingularError&) {
      ++retries;
    }
  }
  throw SamplingError("resolvent draw: retry cap exhausted");
}

MonteCarloResult with_stats(MonteCarloResult r, const SamplerStats& stats) {
  r.retries = stats.total();
  r.metadata["degenerate_resamples"] = std::to_string(stats.degenerate_resamples);
  r.metadata["no_solution_retries"] = std::to_string(stats.no_solution_retries);
  r.metadata["near_singular_retries"] = std::to_string(stats.near_singular_retries);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

double Moments::variance() const noexcept {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double centered = sum_sq - sum * sum / n;
  // Differences at the rounding level of sum_sq are cancellation noise.
  if (centered <= 64.0 * std::numeric_limits<double>::epsilon() * sum_sq) return 0.0;
  return centered / (n - 1.0);
}

double Moments::std_error() const noexcept {
  return count ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

MonteCarloResult to_result(const Moments& m) {
  MonteCarloResult r;
  r.estimate = m.mean();
  r.std_error = m.std_error();
  r.n = m.count;
  return r;
}

// ---------------------------------------------------------------------------
// Test functions

std::optional<NamedTestFunction> test_function_by_name(const std::string& name, std::size_t sites) {
  if (name == "one") return NamedTestFunction{name, [](const OmegaPoint&) { return 1.0; }};
  if (name == "lambda") return NamedTestFunction{name, [](const OmegaPoint& p) { return p.lambda; }};
  if (name == "lambda2") {
    return NamedTestFunction{name, [](const OmegaPoint& p) { return p.lambda * p.lambda; }};
  }
  if (name == "phi_center2") {
    return NamedTestFunction{name, [](const OmegaPoint& p) {
                               const double c = p.phi(static_cast<Eigen::Index>(p.x_star));
                               return c * c;
                             }};
  }
  if (name == "participation") {
    return NamedTestFunction{name, [](const OmegaPoint& p) { return p.phi.array().square().square().sum(); }};
  }
  if (name == "left_half") {
    const std::size_t half = sites / 2;
    return NamedTestFunction{name, [half](const OmegaPoint& p) { return p.x_star < half ? 1.0 : 0.0; }};
  }
  return std::nullopt;
}

std::vector<NamedTestFunction> default_test_functions(std::size_t sites) {
  std::vector<NamedTestFunction> out;
  for (const char* name : {"lambda", "lambda2", "phi_center2", "participation", "left_half"}) {
    out.push_back(*test_function_by_name(name, sites));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Change of measure

MonteCarloResult expectation_mu1(const ModelSpec& model, const TestFunction& f, std::size_t n,
                                 const RunOptions& opts) {
  require_samples(n);
  model.require_rescaled();
  struct Out {
    Moments m;
    SamplerStats stats;
  };
  const auto parts = run_chunked(n, opts, opts.streams.fork("mu1"), [&](Rng& rng, std::size_t count) {
    Out o;
    for (std::size_t i = 0; i < count; ++i) o.m.add(f(sample_mu1(model, rng, &o.stats)));
    return o;
  });
  Moments total;
  SamplerStats stats;
  for (const auto& p : parts) {
    total += p.m;
    stats += p.stats;
  }
  return with_stats(to_result(total), stats);
}

MonteCarloResult expectation_mu2_weighted(const ModelSpec& model, const TestFunction& f,
                                          std::size_t n, const RunOptions& opts) {
  require_samples(n);
  model.require_rescaled();
  struct Out {
    Moments m;
    SamplerStats stats;
    std::size_t zero = 0;
  };
  const auto parts = run_chunked(n, opts, opts.streams.fork("mu2"), [&](Rng& rng, std::size_t count) {
    Out o;
    for (std::size_t i = 0; i < count; ++i) {
      const WeightedOmegaPoint wp = sample_mu2(model, rng, &o.stats);
      if (wp.weight == 0.0) {
        ++o.zero;
        o.m.add(0.0);
      } else {
        o.m.add(f(wp.point) * wp.weight);
      }
    }
    return o;
  });
  Moments total;
  SamplerStats stats;
  std::size_t zero = 0;
  for (const auto& p : parts) {
    total += p.m;
    stats += p.stats;
    zero += p.zero;
  }
  MonteCarloResult r = with_stats(to_result(total), stats);
  r.zero_weight_fraction = static_cast<double>(zero) / static_cast<double>(n);
  return r;
}

RnIdentityReport rn_identity_report(const ModelSpec& model, std::span<const NamedTestFunction> fs,
                                    std::size_t n, const RunOptions& opts) {
  if (fs.empty()) throw PreconditionError("need at least one test function");
  require_samples(n);
  model.require_rescaled();

  struct Out {
    std::vector<Moments> m;
    SamplerStats stats;
    std::size_t zero = 0;
  };
  const auto mu1_parts =
      run_chunked(n, opts, opts.streams.fork("mu1"), [&](Rng& rng, std::size_t count) {
        Out o;
        o.m.resize(fs.size());
        for (std::size_t i = 0; i < count; ++i) {
          const OmegaPoint p = sample_mu1(model, rng, &o.stats);
          if (rn_weight(model, p) == 0.0) ++o.zero;
          for (std::size_t k = 0; k < fs.size(); ++k) o.m[k].add(fs[k].f(p));
        }
        return o;
      });
  const auto mu2_parts =
      run_chunked(n, opts, opts.streams.fork("mu2"), [&](Rng& rng, std::size_t count) {
        Out o;
        o.m.resize(fs.size());
        for (std::size_t i = 0; i < count; ++i) {
          const WeightedOmegaPoint wp = sample_mu2(model, rng, &o.stats);
          if (wp.weight == 0.0) ++o.zero;
          for (std::size_t k = 0; k < fs.size(); ++k) {
            o.m[k].add(wp.weight == 0.0 ? 0.0 : fs[k].f(wp.point) * wp.weight);
          }
        }
        return o;
      });

  const auto reduce = [&](const std::vector<Out>& parts, SamplerStats& stats, std::size_t& zero) {
    std::vector<Moments> total(fs.size());
    for (const auto& p : parts) {
      for (std::size_t k = 0; k < fs.size(); ++k) total[k] += p.m[k];
      stats += p.stats;
      zero += p.zero;
    }
    return total;
  };

  RnIdentityReport report;
  std::size_t zero1 = 0;
  std::size_t zero2 = 0;
  const auto m1 = reduce(mu1_parts, report.mu1_stats, zero1);
  const auto m2 = reduce(mu2_parts, report.mu2_stats, zero2);
  report.all_pass = true;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    RnIdentityEntry e;
    e.name = fs[k].name;
    e.mu1 = with_stats(to_result(m1[k]), report.mu1_stats);
    e.mu1.zero_weight_fraction = static_cast<double>(zero1) / static_cast<double>(n);
    e.mu2 = with_stats(to_result(m2[k]), report.mu2_stats);
    e.mu2.zero_weight_fraction = static_cast<double>(zero2) / static_cast<double>(n);
    e.difference = e.mu1.estimate - e.mu2.estimate;
    e.combined_std_error = std::hypot(e.mu1.std_error, e.mu2.std_error);
    e.pass = std::abs(e.difference) <= 3.0 * e.combined_std_error;
    report.all_pass = report.all_pass && e.pass;
    report.entries.push_back(std::move(e));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Density of states

std::size_t Histogram::bin_of(double lambda) const noexcept {
  const auto b = static_cast<double>(bins());
  const double pos = std::floor(lambda * b);
  if (!(pos > 0.0)) return 0;
  return std::min(bins() - 1, static_cast<std::size_t>(pos));
}

double Histogram::integral() const noexcept {
  double total = 0.0;
  for (std::size_t b = 0; b < bins(); ++b) total += density[b] * (edges[b + 1] - edges[b]);
  return total;
}

Histogram dos_empirical(const ModelSpec& model, std::size_t n, std::size_t bins,
                        const RunOptions& opts) {
  if (bins < 1) throw PreconditionError("histogram needs at least one bin");
  require_samples(n);
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = static_cast<double>(b) / static_cast<double>(bins);
  h.density.assign(bins, 0.0);
  h.std_error.assign(bins, 0.0);
  const double width = 1.0 / static_cast<double>(bins);
  const double unit = 1.0 / (static_cast<double>(model.size()) * width);

  const auto parts =
      run_chunked(n, opts, opts.streams.fork("dos_empirical"), [&](Rng& rng, std::size_t count) {
        std::vector<Moments> m(bins);
        std::vector<std::size_t> counts(bins);
        for (std::size_t i = 0; i < count; ++i) {
          const Eigen::VectorXd v = model.sample_potential(rng);
          const EigenDecomposition eig = eigendecompose(assemble_hamiltonian(model, v));
          std::fill(counts.begin(), counts.end(), 0);
          for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) ++counts[h.bin_of(eig.eigenvalues(k))];
          for (std::size_t b = 0; b < bins; ++b) m[b].add(static_cast<double>(counts[b]) * unit);
        }
        return m;
      });

  std::vector<Moments> total(bins);
  for (const auto& p : parts) {
    for (std::size_t b = 0; b < bins; ++b) total[b] += p[b];
  }
  for (std::size_t b = 0; b < bins; ++b) {
    h.density[b] = total[b].mean();
    h.std_error[b] = total[b].std_error();
  }
  h.draws = n;
  return h;
}

MonteCarloResult dos_resolvent_at(const ModelSpec& model, double lambda, std::size_t n,
                                  const RunOptions& opts) {
  require_open_energy(lambda);
  require_samples(n);
  struct Out {
    Moments m;
    std::size_t retries = 0;
    std::size_t zero = 0;
  };
  const auto factory = opts.streams.fork("dos_resolvent").fork(energy_key(lambda));
  const auto parts = run_chunked(n, opts, factory, [&](Rng& rng, std::size_t count) {
    Out o;
    for (std::size_t i = 0; i < count; ++i) {
      const SiteDraw d = draw_site_resolvent(model, lambda, rng, o.retries);
      if (d.weight == 0.0) ++o.zero;
      o.m.add(d.weight);
    }
    return o;
  });
  Moments total;
  std::size_t retries = 0;
  std::size_t zero = 0;
  for (const auto& p : parts) {
    total += p.m;
    retries += p.retries;
    zero += p.zero;
  }
  MonteCarloResult r = to_result(total);
  r.retries = retries;
  r.zero_weight_fraction = static_cast<double>(zero) / static_cast<double>(n);
  return r;
}

// ---------------------------------------------------------------------------
// Eigenvector law

MonteCarloResult eigenvector_law_probability(const ModelSpec& model, double lambda,
                                             const EigenvectorEvent& event, std::size_t n,
                                             const RunOptions& opts) {
  require_open_energy(lambda);
  require_samples(n);
  struct Out {
    Moments num;
    Moments den;
    double cross = 0.0;
    std::size_t retries = 0;
    std::size_t zero = 0;
  };
  const auto factory = opts.streams.fork("evec_law").fork(energy_key(lambda));
  const auto parts = run_chunked(n, opts, factory, [&](Rng& rng, std::size_t count) {
    Out o;
    for (std::size_t i = 0; i < count; ++i) {
      const SiteDraw d = draw_site_resolvent(model, lambda, rng, o.retries);
      double hit = 0.0;
      if (d.weight > 0.0) {
        Eigen::VectorXd phi = d.column.g / d.column.norm;
        canonicalize_sign(phi);
        hit = event(phi, d.x) ? d.weight : 0.0;
      } else {
        ++o.zero;
      }
      o.num.add(hit);
      o.den.add(d.weight);
      o.cross += hit * d.weight;
    }
    return o;
  });

  Moments num;
  Moments den;
  double cross = 0.0;
  std::size_t retries = 0;
  std::size_t zero = 0;
  for (const auto& p : parts) {
    num += p.num;
    den += p.den;
    cross += p.cross;
    retries += p.retries;
    zero += p.zero;
  }
  const double den_mean = den.mean();
  if (!(den.sum > 0.0) || den_mean <= 3.0 * den.std_error()) {
    throw ConditioningError("density of states at this energy is indistinguishable from zero");
  }

  // Delta-method variance of the ratio estimator.
  const double ratio = num.sum / den.sum;
  const double nn = static_cast<double>(n);
  const double spread =
      std::max(0.0, (num.sum_sq - 2.0 * ratio * cross + ratio * ratio * den.sum_sq) / (nn - 1.0));

  MonteCarloResult r;
  r.estimate = ratio;
  r.std_error = std::sqrt(spread / nn) / den_mean;
  r.n = n;
  r.retries = retries;
  r.zero_weight_fraction = static_cast<double>(zero) / nn;
  r.metadata["dos_estimate"] = std::to_string(den_mean);
  r.metadata["dos_std_error"] = std::to_string(den.std_error());
  return r;
}

// ---------------------------------------------------------------------------
// Localization

EtaFunction::EtaFunction(EtaKind kind, double param, std::string label, Custom fn)
    : kind_(kind), param_(param), label_(std::move(label)), fn_(std::move(fn)) {}

EtaFunction EtaFunction::exponential(double c) {
  if (!(c >= 0.0 && std::isfinite(c))) throw PreconditionError("exp eta needs a finite c >= 0");
  return {EtaKind::Exponential, c, "exp:c=" + std::to_string(c)};
}

EtaFunction EtaFunction::polynomial(double k) {
  if (!(k >= 0.0 && std::isfinite(k))) throw PreconditionError("poly eta needs a finite k >= 0");
  return {EtaKind::Polynomial, k, "poly:k=" + std::to_string(k)};
}

EtaFunction EtaFunction::constant(double value) {
  if (!(value >= 0.0 && std::isfinite(value))) throw PreconditionError("const eta needs a finite v >= 0");
  return {EtaKind::Constant, value, "const:v=" + std::to_string(value)};
}

EtaFunction EtaFunction::custom(Custom fn, std::string label) {
  return {EtaKind::Custom, 0.0, std::move(label), std::move(fn)};
}

EtaFunction EtaFunction::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const auto eq = spec.find('=');
  if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
    throw PreconditionError("eta spec must look like exp:c=0.2, poly:k=2 or const:v=1");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string key = spec.substr(colon + 1, eq - colon - 1);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(spec.substr(eq + 1), &used);
    if (used != spec.size() - eq - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw PreconditionError("eta spec '" + spec + "' has a malformed number");
  }
  if (kind == "exp" && key == "c") return exponential(value);
  if (kind == "poly" && key == "k") return polynomial(value);
  if (kind == "const" && key == "v") return constant(value);
  throw PreconditionError("unknown eta spec '" + spec + "'");
}

double EtaFunction::operator()(const SiteSet& sites, std::size_t x, std::size_t y) const {
  const double d = sites.distance(x, y);
  switch (kind_) {
    case EtaKind::Exponential: return std::exp(-param_ * d);
    case EtaKind::Polynomial: return std::pow(1.0 + d, -param_);
    case EtaKind::Constant: return param_;
    case EtaKind::Custom: return fn_(x, y, d);
  }
  return 0.0;
}

namespace {

Eigen::MatrixXd eta_table(const EtaFunction& eta, const SiteSet& sites) {
  const auto n = static_cast<Eigen::Index>(sites.size);
  Eigen::MatrixXd table(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      const double value = eta(sites, static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      if (!(value >= 0.0)) throw PreconditionError("eta must be nonnegative");
      table(x, y) = value;
    }
  }
  return table;
}

bool localized_in_table(const Eigen::VectorXd& phi, const Eigen::MatrixXd& table) {
  for (Eigen::Index x = 0; x < table.rows(); ++x) {
    if ((phi.cwiseAbs().array() <= table.row(x).transpose().array()).all()) return true;
  }
  return false;
}

}  // namespace

bool in_localization_event(const Eigen::VectorXd& phi, const EtaFunction& eta, const SiteSet& sites) {
  return localized_in_table(phi, eta_table(eta, sites));
}

AlphaEtaResult alpha_eta_estimate(const ModelSpec& model, double lambda, const EtaFunction& eta,
                                  std::size_t n, const RunOptions& opts) {
  require_open_energy(lambda);
  require_samples(n);
  const Eigen::MatrixXd table = eta_table(eta, model.sites());
  const std::size_t sites = model.size();
  const std::size_t per_site = task_count(n);
  const auto base = opts.streams.fork("alpha").fork(energy_key(lambda));

  struct Out {
    Moments m;
    std::size_t retries = 0;
  };
  const auto parts = run_tasks(sites * per_site, opts.workers, [&](std::size_t job) {
    const std::size_t x = job / per_site;
    const std::size_t task = job % per_site;
    Rng rng = base.fork(static_cast<std::uint64_t>(x)).stream(task);
    Out o;
    const auto xi = static_cast<Eigen::Index>(x);
    for (std::size_t i = 0; i < task_length(n, task); ++i) {
      const SiteDraw d = draw_site_resolvent(model, lambda, rng, o.retries, x);
      const bool exceeds =
          (d.column.g.cwiseAbs().array() > table.row(xi).transpose().array() * d.column.norm).any();
      o.m.add(exceeds ? 1.0 : 0.0);
    }
    return o;
  });

  AlphaEtaResult out;
  out.per_site.resize(sites);
  for (std::size_t x = 0; x < sites; ++x) {
    Moments m;
    std::size_t retries = 0;
    for (std::size_t t = 0; t < per_site; ++t) {
      m += parts[x * per_site + t].m;
      retries += parts[x * per_site + t].retries;
    }
    out.per_site[x] = to_result(m);
    out.per_site[x].retries = retries;
    if (x == 0 || out.per_site[x].estimate > out.alpha) {
      out.alpha = out.per_site[x].estimate;
      out.argmax = x;
      out.std_error = out.per_site[x].std_error;
    }
  }
  return out;
}

LocalizationReport localization_bound_report(const ModelSpec& model, double lambda,
                                             const EtaFunction& eta, std::size_t n,
                                             const RunOptions& opts) {
  require_open_energy(lambda);
  const Eigen::MatrixXd table = eta_table(eta, model.sites());

  LocalizationReport rep;
  rep.left = eigenvector_law_probability(
      model, lambda,
      [&](const Eigen::VectorXd& phi, std::size_t) { return !localized_in_table(phi, table); }, n, opts);
  rep.dos = dos_resolvent_at(model, lambda, n, opts);
  rep.alpha = alpha_eta_estimate(model, lambda, eta, n, opts);
  rep.sup_density = model.sup_density();
  if (!(rep.dos.estimate > 0.0)) {
    throw ConditioningError("density of states estimate is zero at this energy");
  }

  const double dos = rep.dos.estimate;
  rep.right = rep.sup_density * rep.alpha.alpha / dos;
  rep.right_std_error =
      rep.sup_density * std::hypot(rep.alpha.std_error / dos, rep.alpha.alpha * rep.dos.std_error / (dos * dos));
  rep.combined_std_error = std::hypot(rep.left.std_error, rep.right_std_error);
  rep.pass = rep.left.estimate <= rep.right + 3.0 * rep.combined_std_error;
  return rep;
}

// ---------------------------------------------------------------------------
// Fractional moments

namespace {

std::vector<MonteCarloResult> fractional_moments(const ModelSpec& model, double lambda, double s,
                                                 std::size_t x, const std::vector<std::size_t>& targets,
                                                 std::size_t n, const RunOptions& opts,
                                                 ResolventMatrix matrix) {
  if (!(s > 0.0 && s < 1.0)) throw PreconditionError("fractional moment exponent s must lie in (0, 1)");
  require_open_energy(lambda);
  require_samples(n);
  model.require_site(x);
  for (const std::size_t y : targets) model.require_site(y);

  struct Out {
    std::vector<Moments> m;
    std::size_t retries = 0;
  };
  const auto factory = opts.streams.fork("fracmom").fork(energy_key(lambda)).fork(static_cast<std::uint64_t>(x));
  const auto parts = run_chunked(n, opts, factory, [&](Rng& rng, std::size_t count) {
    Out o;
    o.m.resize(targets.size());
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t attempt = 0;; ++attempt) {
        if (attempt > kRetryCap) throw SamplingError("fractional moment: retry cap exhausted");
        Eigen::VectorXd v = model.sample_potential(rng);
        if (matrix == ResolventMatrix::ZeroedAtSource) v(static_cast<Eigen::Index>(x)) = 0.0;
        try {
          const ResolventColumn col = resolvent_column(assemble_hamiltonian(model, v), lambda, x);
          for (std::size_t k = 0; k < targets.size(); ++k) {
            o.m[k].add(std::pow(std::abs(col.g(static_cast<Eigen::Index>(targets[k]))), s));
          }
          break;
        } catch (const NearSingularError&) {
          ++o.retries;
        }
      }
    }
    return o;
  });

  std::vector<Moments> total(targets.size());
  std::size_t retries = 0;
  for (const auto& p : parts) {
    for (std::size_t k = 0; k < targets.size(); ++k) total[k] += p.m[k];
    retries += p.retries;
  }
  std::vector<MonteCarloResult> out;
  for (const auto& m : total) {
    out.push_back(to_result(m));
    out.back().retries = retries;
    out.back().metadata["matrix"] = matrix == ResolventMatrix::Full ? "full" : "zeroed_at_source";
  }
  return out;
}

}  // namespace

MonteCarloResult fractional_moment_estimate(const ModelSpec& model, double lambda, double s,
                                            std::size_t x, std::size_t y, std::size_t n,
                                            const RunOptions& opts, ResolventMatrix matrix) {
  return fractional_moments(model, lambda, s, x, {y}, n, opts, matrix).front();
}

DecayFit fractional_moment_decay(const ModelSpec& model, double lambda, double s,
                                 std::size_t source, std::size_t max_distance, std::size_t n,
                                 const RunOptions& opts, ResolventMatrix matrix) {
  if (max_distance < 2) throw PreconditionError("decay fit needs at least two distances");
  if (source + max_distance >= model.size()) {
    throw SiteError("source + max_distance exceeds the chain length");
  }
  DecayFit fit;
  std::vector<std::size_t> targets;
  for (std::size_t d = 1; d <= max_distance; ++d) {
    fit.distances.push_back(d);
    targets.push_back(source + d);
  }
  fit.moments = fractional_moments(model, lambda, s, source, targets, n, opts, matrix);

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double k = static_cast<double>(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double xd = static_cast<double>(fit.distances[i]);
    const double yl = std::log(fit.moments[i].estimate);
    sx += xd;
    sy += yl;
    sxx += xd * xd;
    sxy += xd * yl;
  }
  fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / k;
  if (targets.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const double r = std::log(fit.moments[i].estimate) -
                       (fit.intercept + fit.slope * static_cast<double>(fit.distances[i]));
      ssr += r * r;
    }
    fit.slope_std_error = std::sqrt(ssr / (k - 2.0) / (sxx - sx * sx / k));
  }
  return fit;
}

}  // namespace rcl
