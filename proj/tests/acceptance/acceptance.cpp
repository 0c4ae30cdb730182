// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. One line per criterion:
//
//   [PASS] 03 closed-form-2x2: ...
//
// Exit status is 0 only when every criterion passes. Pass a list of criterion
// numbers to run a subset.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "rcl/commands.hpp"
#include "rcl/estimators.hpp"
#include "rcl/parallel.hpp"
#include "rcl/presets.hpp"
#include "rcl/samplers.hpp"
#include "rcl/spectral.hpp"

namespace fs = std::filesystem;
using namespace rcl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

ModelSpec chain8() { return anderson_1d(8, 0.1, PotentialDistribution::uniform(0.0, 1.0)); }

ModelSpec two_site() {
  Eigen::MatrixXd t(2, 2);
  t << 0.0, 0.1, 0.1, 0.0;
  return ModelSpec(SiteSet{2, {}}, t,
                   {PotentialDistribution::uniform(0.1, 0.9), PotentialDistribution::uniform(0.1, 0.9)},
                   true);
}

ModelSpec single_site() {
  return ModelSpec(SiteSet{1, {}}, Eigen::MatrixXd::Zero(1, 1), {PotentialDistribution::uniform(0.0, 1.0)},
                   true);
}

RunOptions seeded(std::uint64_t seed, std::size_t workers = 0) {
  return RunOptions{StreamFactory(seed), workers};
}

// ---------------------------------------------------------------------------

Outcome rn_identity() {
  const ModelSpec model = chain8();
  std::vector<NamedTestFunction> fs;
  for (const char* name : {"lambda", "lambda2", "phi_center2", "participation", "left_half"}) {
    fs.push_back(*test_function_by_name(name, model.size()));
  }
  const auto start = std::chrono::steady_clock::now();
  const RnIdentityReport rep = rn_identity_report(model, fs, 100000, seeded(101, 1));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string detail;
  double worst = 0.0;
  for (const auto& e : rep.entries) {
    const double z = std::abs(e.difference) / e.combined_std_error;
    worst = std::max(worst, z);
    detail += fmt("%s z=%.2f ", e.name.c_str(), z);
  }
  detail += fmt("| worst z=%.2f, %.1fs single-threaded", worst, seconds);
  return {rep.all_pass && seconds <= 120.0, detail};
}

Outcome lemma_round_trip() {
  const ModelSpec model = chain8();
  Rng rng = StreamFactory(102).stream(0);
  std::size_t skipped = 0;
  double worst_v = 0.0;
  double worst_phi = 0.0;
  const std::size_t n = 1000;
  for (std::size_t k = 0; k < n; ++k) {
    const OmegaPoint p = sample_mu1(model, rng);
    const auto xs = static_cast<Eigen::Index>(p.x_star);
    if (std::abs(p.phi(xs)) < 1e-12) {
      ++skipped;
      continue;
    }
    Eigen::VectorXd off(model.size() - 1);
    for (Eigen::Index i = 0, j = 0; i < p.potential.size(); ++i) {
      if (i != xs) off(j++) = p.potential(i);
    }
    const Reconstruction r = lemma1_reconstruct(model, p.lambda, p.x_star, off);
    worst_v = std::max(worst_v, std::abs(r.center_value - p.potential(xs)));
    worst_phi = std::max(worst_phi, std::min((r.phi - p.phi).norm(), (r.phi + p.phi).norm()));
  }
  const double skip_rate = static_cast<double>(skipped) / static_cast<double>(n);
  return {worst_v <= 1e-8 && worst_phi <= 1e-8 && skip_rate < 0.01,
          fmt("max |dv|=%.2e, max phi error=%.2e, skipped %zu/%zu", worst_v, worst_phi, skipped, n)};
}

Outcome closed_form_2x2() {
  // Oracle: (H0 - lambda)^{-1} e_0 for the 2x2 matrix [[a, b], [b, d]] is
  // (d, -b) / (a d - b^2); the center potential is -1 / g_0.
  const double lambda = 0.3;
  const double a = -lambda;
  const double b = 0.1;
  const double d = 0.5 - lambda;
  const double det = a * d - b * b;
  const double g0 = d / det;
  const double g1 = -b / det;
  const double v_expected = -1.0 / g0;
  const double norm = std::hypot(g0, g1);
  Eigen::Vector2d phi_expected(g0 / norm, g1 / norm);
  if (phi_expected(std::abs(g0) >= std::abs(g1) ? 0 : 1) < 0.0) phi_expected = -phi_expected;

  Eigen::VectorXd off(1);
  off << 0.5;
  const Reconstruction r = lemma1_reconstruct(two_site(), lambda, 0, off);
  const Eigen::Vector2d literal = Eigen::Vector2d(2.0, -1.0) / std::sqrt(5.0);
  const double dv = std::abs(r.center_value - 0.35);
  const double dv_oracle = std::abs(r.center_value - v_expected);
  const double dphi = std::min((r.phi - literal).norm(), (r.phi + literal).norm());
  const double dphi_oracle = (r.phi - phi_expected).norm();
  return {dv <= 1e-12 && dv_oracle <= 1e-12 && dphi <= 1e-12 && dphi_oracle <= 1e-12,
          fmt("v0=%.15f (|dv|=%.1e), phi=(%.12f, %.12f) (err %.1e)", r.center_value, dv, r.phi(0),
              r.phi(1), dphi)};
}

Outcome interlacing() {
  const ModelSpec model = chain8();
  Rng rng = StreamFactory(104).stream(0);
  std::size_t violations = 0;
  std::size_t checks = 0;
  for (int k = 0; k < 1000; ++k) {
    const Hamiltonian h = assemble_hamiltonian(model, model.sample_potential(rng));
    const EigenDecomposition ed = eigendecompose(h);
    for (std::size_t x = 0; x < model.size(); ++x) {
      violations += interlacing_violations(ed.eigenvalues, interlaced_bounds(h, x), 1e-10);
      checks += model.size();
    }
  }
  return {violations == 0, fmt("%zu violations in %zu eigenvalue brackets", violations, checks)};
}

Outcome hellmann_feynman() {
  const ModelSpec model = chain8();
  Rng rng = StreamFactory(105).stream(0);
  const double h = 1e-6;
  std::size_t failures = 0;
  std::size_t checks = 0;
  std::size_t ill = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd v = model.sample_potential(rng);
    const EigenDecomposition ed = eigendecompose(assemble_hamiltonian(model, v));
    for (std::size_t i = 0; i < model.size(); ++i) {
      for (std::size_t x = 0; x < model.size(); ++x) {
        const double c = ed.eigenvectors(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i));
        const double expected = c * c;
        const FiniteDifference fd = eigenvalue_derivative_fd(model, v, i, x, h);
        if (fd.ill_conditioned) ++ill;
        const double rel = std::abs(fd.derivative - expected) / expected;
        worst = std::max(worst, rel);
        if (!(rel <= 1e-5)) ++failures;
        ++checks;
      }
    }
  }
  return {failures == 0, fmt("%zu/%zu outside relative 1e-5, worst relative error %.2e, %zu near-degenerate",
                             failures, checks, worst, ill)};
}

Outcome dos_consistency() {
  const ModelSpec model = two_site();
  const std::size_t n = 100000;
  const Histogram hist = dos_empirical(model, n, 50, seeded(106));
  std::string detail;
  bool pass = true;
  for (const double lambda : {0.21, 0.35, 0.49, 0.65, 0.81}) {
    const MonteCarloResult r = dos_resolvent_at(model, lambda, n, seeded(106));
    const std::size_t b = hist.bin_of(lambda);
    const double combined = std::hypot(r.std_error, hist.std_error[b]);
    const double z = std::abs(r.estimate - hist.density[b]) / combined;
    pass = pass && z <= 3.0;
    detail += fmt("%.2f:z=%.2f ", lambda, z);
  }
  const ModelSpec single = single_site();
  double worst = 0.0;
  for (const double lambda : {0.01, 0.25, 0.5, 0.75, 0.99}) {
    const MonteCarloResult r = dos_resolvent_at(single, lambda, 1000, seeded(106));
    worst = std::max(worst, std::abs(r.estimate - 1.0));
    pass = pass && r.estimate == 1.0 && r.std_error == 0.0;
  }
  detail += fmt("| 1x1 max |dos-1|=%.1e", worst);
  return {pass, detail};
}

Outcome wegner() {
  const ModelSpec model = chain8();
  double worst_margin = -INFINITY;
  double at = 0.0;
  bool pass = true;
  for (int k = 0; k < 50; ++k) {
    const double lambda = (k + 0.5) / 50.0;
    const MonteCarloResult r = dos_resolvent_at(model, lambda, 20000, seeded(107));
    const double margin = r.estimate - (model.sup_density() + 3.0 * r.std_error);
    if (margin > worst_margin) {
      worst_margin = margin;
      at = lambda;
    }
    pass = pass && margin <= 0.0;
  }
  return {pass, fmt("sup density %.4f, closest approach %.4f at lambda=%.2f", model.sup_density(),
                    worst_margin, at)};
}

Outcome mean_weight() {
  const std::size_t n = 100000;
  const auto one = *test_function_by_name("one", 8);
  const MonteCarloResult r = expectation_mu2_weighted(chain8(), one.f, n, seeded(108));
  const double bound = 4.0 / std::sqrt(static_cast<double>(n));
  const double dev = std::abs(r.estimate - 1.0);
  return {dev <= bound, fmt("E[w]=%.5f, |E[w]-1|=%.5f <= %.5f, zero-weight fraction %.3f", r.estimate, dev,
                            bound, r.zero_weight_fraction)};
}

Outcome localization() {
  const ModelSpec model = anderson_1d(12, 0.05, PotentialDistribution::uniform(0.0, 1.0));
  const double width = model.potential(0).hi() - model.potential(0).lo();
  const double ratio = std::abs(model.hopping()(0, 1)) / width;
  const LocalizationReport rep =
      localization_bound_report(model, 0.5, EtaFunction::exponential(0.2), 20000, seeded(109));
  const LocalizationReport flat =
      localization_bound_report(model, 0.5, EtaFunction::constant(1.0), 2000, seeded(109));
  const bool pass = ratio <= 0.05 + 1e-12 && rep.pass && flat.left.estimate == 0.0 && flat.right == 0.0;
  return {pass, fmt("ratio %.3f, left %.4f +- %.4f <= right %.4f + 3*%.4f; eta=1 gives (%g, %g)", ratio,
                    rep.left.estimate, rep.left.std_error, rep.right, rep.combined_std_error,
                    flat.left.estimate, flat.right)};
}

Outcome fractional_moment() {
  const MonteCarloResult one = fractional_moment_estimate(single_site(), 0.5, 0.5, 0, 0, 100000, seeded(110),
                                                          ResolventMatrix::Full);
  const double exact = 2.0 * std::numbers::sqrt2;
  const double z = std::abs(one.estimate - exact) / one.std_error;
  const ModelSpec chain = anderson_1d(16, 0.05, PotentialDistribution::uniform(0.0, 1.0));
  const DecayFit fit = fractional_moment_decay(chain, 0.5, 0.5, 0, 8, 20000, seeded(110));
  return {z <= 3.0 && fit.slope < 0.0,
          fmt("1x1 mean %.4f vs %.4f (z=%.2f); 16-site slope %.3f +- %.3f", one.estimate, exact, z, fit.slope,
              fit.slope_std_error)};
}

Outcome center_uniformity() {
  const ModelSpec model = chain8();
  const std::size_t draws = 10000;
  const StreamFactory f = StreamFactory(111).fork("centers");
  const auto parts = run_tasks(draws / kTaskSize, 0, [&](std::size_t task) {
    Rng rng = f.stream(task);
    std::vector<OmegaPoint> pts;
    for (std::size_t i = 0; i < kTaskSize; ++i) pts.push_back(sample_mu2(model, rng).point);
    return pts;
  });
  std::vector<OmegaPoint> points;
  for (const auto& p : parts) points.insert(points.end(), p.begin(), p.end());
  const CenterStatistics stats = center_statistics(points, model.size());
  const double chi2 = chi_square_uniform(stats.counts);
  const boost::math::chi_squared law(static_cast<double>(model.size() - 1));
  const double q999 = boost::math::quantile(law, 0.999);

  const ModelSpec critical = critical_1d(200, PotentialDistribution::uniform(-1.0, 1.0));
  const ConcentrationCheck conc = concentration_frequency(critical, 200, 40, 0.5, seeded(111));
  return {chi2 <= q999 && conc.center_hits > conc.null_hits,
          fmt("chi2=%.2f <= %.2f (df %zu); critical n=200 window mass >= 0.5: center %.3f vs null %.3f", chi2,
              q999, model.size() - 1, conc.center_frequency(), conc.null_frequency())};
}

// Runs the driver in-process with RCL_THREADS set and returns the files it
// wrote, concatenated with stdout.
std::string run_driver(const std::vector<std::string>& args, const fs::path& dir, const char* threads) {
  ::setenv("RCL_THREADS", threads, 1);
  fs::remove_all(dir);
  std::vector<std::string> full{"rcl"};
  full.insert(full.end(), args.begin(), args.end());
  full.push_back("--out-dir");
  full.push_back(dir.string());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(full, out, err);
  std::string blob = "exit " + std::to_string(code) + "\n" + out.str();
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    blob += "== " + file.filename().string() + "\n";
    blob.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return blob;
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--preset", "anderson1d:n=8", "--measure", "mu1", "--samples", "2500", "--full"},
      {"sample", "--preset", "anderson1d:n=8", "--measure", "mu2", "--samples", "2500", "--full"},
      {"verify-rn", "--preset", "anderson1d:n=8", "--samples", "3000"},
      {"dos", "--preset", "twosite", "--samples", "2000", "--lambda-grid", "10"},
      {"evec-law", "--preset", "anderson1d:n=6", "--samples", "3000", "--lambda", "0.4"},
      {"localization", "--preset", "anderson1d:n=8,t=0.05", "--samples", "1500"},
      {"fracmom", "--preset", "anderson1d:n=10,t=0.05", "--samples", "2000", "--max-distance", "5"},
      {"profile", "--preset", "critical1d:n=50", "--samples", "1500"},
  };
  const fs::path root = fs::temp_directory_path() / ("rcl_acceptance_" + std::to_string(::getpid()));
  const char* saved = std::getenv("RCL_THREADS");
  const std::string restore = saved ? saved : "";
  std::size_t identical = 0;
  std::string mismatched;
  for (const auto& args : commands) {
    const std::string a = run_driver(args, root / "a", "1");
    const std::string b = run_driver(args, root / "b", "1");
    const std::string c = run_driver(args, root / "c", "4");
    if (a == b && a == c) {
      ++identical;
    } else {
      mismatched += args.front() + " ";
    }
  }
  if (saved) {
    ::setenv("RCL_THREADS", restore.c_str(), 1);
  } else {
    ::unsetenv("RCL_THREADS");
  }
  fs::remove_all(root);
  return {identical == commands.size(),
          fmt("%zu/%zu commands byte-identical across reruns and 1 vs 4 workers%s%s", identical, commands.size(),
              mismatched.empty() ? "" : "; differing: ", mismatched.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "rn-identity", rn_identity},
      {2, "lemma-round-trip", lemma_round_trip},
      {3, "closed-form-2x2", closed_form_2x2},
      {4, "interlacing", interlacing},
      {5, "hellmann-feynman", hellmann_feynman},
      {6, "dos-consistency", dos_consistency},
      {7, "wegner", wegner},
      {8, "mean-weight", mean_weight},
      {9, "localization-bound", localization},
      {10, "fractional-moment", fractional_moment},
      {11, "center-uniformity", center_uniformity},
      {12, "determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %02d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
