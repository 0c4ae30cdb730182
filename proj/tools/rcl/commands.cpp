// SPDX-License-Identifier: Apache-2.0
#include "rcl/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rcl/error.hpp"
#include "rcl/estimators.hpp"
#include "rcl/model_io.hpp"
#include "rcl/output.hpp"
#include "rcl/parallel.hpp"
#include "rcl/presets.hpp"
#include "rcl/presets_parse.hpp"
#include "rcl/samplers.hpp"
#include "rcl/spectral.hpp"

namespace rcl::cli {
namespace {

using Json = nlohmann::ordered_json;

struct Common {
  std::string preset;
  std::string model_json;
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 10000;
  std::string out_dir;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--preset", c.preset, "Preset model, e.g. anderson1d:n=8,t=0.1");
  sub->add_option("--model-json", c.model_json, "Model config as a JSON file");
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--samples", c.samples, "Sample budget")->capture_default_str();
  sub->add_option("--out-dir", c.out_dir, "Directory for CSV/JSON outputs");
}

ModelSpec load_model(const Common& c) {
  if (!c.preset.empty() && !c.model_json.empty()) {
    throw UsageError("give either --preset or --model-json, not both");
  }
  if (!c.preset.empty()) return parse_preset(c.preset);
  if (!c.model_json.empty()) {
    std::ifstream in(c.model_json);
    if (!in) throw UsageError("cannot read model config " + c.model_json);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("model config is not valid JSON: ") + e.what());
    }
    return model_from_json(j);
  }
  throw UsageError("no model: pass --preset or --model-json");
}

void require_min_samples(const Common& c) {
  if (c.samples < 2) throw UsageError("--samples must be at least 2");
}

RunOptions options(const Common& c) { return RunOptions{StreamFactory(c.seed), 0}; }

Json report(const std::string& estimator, const ModelSpec& model, const Common& c) {
  Json j;
  j["estimator"] = estimator;
  j["model_hash"] = model_hash(model);
  j["seed"] = c.seed;
  j["n"] = c.samples;
  j["estimate"] = 0.0;
  j["stderr"] = 0.0;
  j["diagnostics"] = Json::object();
  return j;
}

void emit_json(const Context& ctx, const Common& c, const std::string& file, const Json& j) {
  const std::string text = j.dump(2) + "\n";
  ctx.out << text;
  if (!c.out_dir.empty()) write_file(c.out_dir, file, text);
}

void emit_csv(const Common& c, const std::string& file, const CsvWriter& csv) {
  if (!c.out_dir.empty()) write_file(c.out_dir, file, csv.str());
}

// ---------------------------------------------------------------------------

int cmd_sample(const Context& ctx, const Common& c, const std::string& measure, bool full) {
  const ModelSpec model = load_model(c);
  if (c.samples < 1) throw UsageError("--samples must be positive");
  model.require_rescaled();
  const std::size_t n = model.size();
  const StreamFactory factory = StreamFactory(c.seed).fork("sample/" + measure);
  const bool mu1 = measure == "mu1";

  struct Chunk {
    std::string text;
    SamplerStats stats;
  };
  const std::size_t tasks = (c.samples + kTaskSize - 1) / kTaskSize;
  const auto chunks = run_tasks(tasks, 0, [&](std::size_t task) {
    Rng rng = factory.stream(task);
    Chunk chunk;
    CsvWriter rows({});
    const std::size_t first = task * kTaskSize;
    const std::size_t count = std::min(kTaskSize, c.samples - first);
    for (std::size_t i = 0; i < count; ++i) {
      OmegaPoint p;
      double w = 0.0;
      if (mu1) {
        p = sample_mu1(model, rng, &chunk.stats);
        w = rn_weight(model, p);
      } else {
        WeightedOmegaPoint wp = sample_mu2(model, rng, &chunk.stats);
        p = std::move(wp.point);
        w = wp.weight;
      }
      std::vector<std::string> cells{std::to_string(first + i), format_double(p.lambda),
                                     std::to_string(p.x_star),
                                     format_double(p.potential(static_cast<Eigen::Index>(p.x_star))),
                                     format_double(w)};
      if (full) {
        for (Eigen::Index k = 0; k < p.phi.size(); ++k) cells.push_back(format_double(p.phi(k)));
      }
      rows.row(cells);
    }
    chunk.text = rows.str();
    return chunk;
  });

  std::vector<std::string> header{"seed_index", "lambda", "x_star", "v_at_center", "weight"};
  if (full) {
    for (std::size_t k = 0; k < n; ++k) header.push_back("phi_" + std::to_string(k));
  }
  CsvWriter head(header);
  head.header();
  std::string csv = head.str();
  SamplerStats stats;
  for (const auto& ch : chunks) {
    csv += ch.text;
    stats += ch.stats;
  }

  if (c.out_dir.empty()) {
    ctx.out << csv;
  } else {
    write_file(c.out_dir, "samples.csv", csv);
    Json j = report("sample_" + measure, model, c);
    j["diagnostics"]["degenerate_resamples"] = stats.degenerate_resamples;
    j["diagnostics"]["no_solution_retries"] = stats.no_solution_retries;
    j["diagnostics"]["near_singular_retries"] = stats.near_singular_retries;
    emit_json(ctx, c, "summary.json", j);
  }
  return kExitOk;
}

int cmd_verify_rn(const Context& ctx, const Common& c, const std::vector<std::string>& names) {
  const ModelSpec model = load_model(c);
  require_min_samples(c);
  std::vector<NamedTestFunction> fs;
  if (names.empty()) {
    fs = default_test_functions(model.size());
  } else {
    for (const auto& name : names) {
      auto f = test_function_by_name(name, model.size());
      if (!f) throw UsageError("unknown test function '" + name + "'");
      fs.push_back(std::move(*f));
    }
  }
  const RnIdentityReport rep = rn_identity_report(model, fs, c.samples, options(c));

  Json j = report("rn_identity", model, c);
  Json entries = Json::array();
  double worst_z = -1.0;
  for (const auto& e : rep.entries) {
    Json row;
    row["function"] = e.name;
    row["mu1"] = result_json(e.mu1);
    row["mu2_weighted"] = result_json(e.mu2);
    row["difference"] = e.difference;
    row["combined_stderr"] = e.combined_std_error;
    row["pass"] = e.pass;
    entries.push_back(std::move(row));
    const double z = e.combined_std_error > 0.0 ? std::abs(e.difference) / e.combined_std_error
                                                : (e.difference == 0.0 ? 0.0 : INFINITY);
    if (z > worst_z) {
      worst_z = z;
      j["estimate"] = e.difference;
      j["stderr"] = e.combined_std_error;
    }
  }
  j["diagnostics"]["all_pass"] = rep.all_pass;
  j["diagnostics"]["sigma_level"] = 3.0;
  j["diagnostics"]["mu2_zero_weight_fraction"] = rep.entries.front().mu2.zero_weight_fraction;
  j["diagnostics"]["mu1_degenerate_resamples"] = rep.mu1_stats.degenerate_resamples;
  j["diagnostics"]["mu2_no_solution_retries"] = rep.mu2_stats.no_solution_retries;
  j["diagnostics"]["mu2_near_singular_retries"] = rep.mu2_stats.near_singular_retries;
  j["diagnostics"]["entries"] = std::move(entries);
  emit_json(ctx, c, "verify_rn.json", j);
  return rep.all_pass ? kExitOk : kExitFailure;
}

int cmd_dos(const Context& ctx, const Common& c, std::size_t grid, std::size_t bins) {
  const ModelSpec model = load_model(c);
  require_min_samples(c);
  if (grid < 1) throw UsageError("--lambda-grid must be positive");
  if (bins < 1) throw UsageError("--bins must be positive");
  const RunOptions opts = options(c);

  CsvWriter dos_csv({"lambda", "dos", "stderr"});
  dos_csv.header();
  const double h = 1.0 / static_cast<double>(grid);
  double integral = 0.0;
  double var = 0.0;
  double wegner_max = -1.0;
  double wegner_se = 0.0;
  std::size_t retries = 0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double lambda = (static_cast<double>(k) + 0.5) * h;
    const MonteCarloResult r = dos_resolvent_at(model, lambda, c.samples, opts);
    dos_csv.row(lambda, r.estimate, r.std_error);
    integral += r.estimate * h;
    var += r.std_error * r.std_error * h * h;
    retries += r.retries;
    if (r.estimate > wegner_max) {
      wegner_max = r.estimate;
      wegner_se = r.std_error;
    }
  }
  const Histogram hist = dos_empirical(model, c.samples, bins, opts);
  CsvWriter hist_csv({"bin_lo", "bin_hi", "density", "stderr"});
  hist_csv.header();
  for (std::size_t b = 0; b < hist.bins(); ++b) {
    hist_csv.row(hist.edges[b], hist.edges[b + 1], hist.density[b], hist.std_error[b]);
  }
  emit_csv(c, "dos.csv", dos_csv);
  emit_csv(c, "histogram.csv", hist_csv);

  const bool wegner_pass = wegner_max <= model.sup_density() + 3.0 * wegner_se;
  Json j = report("dos_resolvent", model, c);
  j["estimate"] = integral;
  j["stderr"] = std::sqrt(var);
  j["diagnostics"]["lambda_grid"] = grid;
  j["diagnostics"]["integration"] = "midpoint";
  j["diagnostics"]["wegner_max"] = wegner_max;
  j["diagnostics"]["wegner_max_stderr"] = wegner_se;
  j["diagnostics"]["sup_density"] = model.sup_density();
  j["diagnostics"]["wegner_pass"] = wegner_pass;
  j["diagnostics"]["histogram_bins"] = bins;
  j["diagnostics"]["histogram_integral"] = hist.integral();
  j["diagnostics"]["near_singular_retries"] = retries;
  emit_json(ctx, c, "dos.json", j);
  return wegner_pass ? kExitOk : kExitFailure;
}

EigenvectorEvent parse_event(const std::string& spec, const ModelSpec& model) {
  if (spec == "all") return [](const Eigen::VectorXd&, std::size_t) { return true; };
  if (spec == "center-max") {
    return [](const Eigen::VectorXd& phi, std::size_t x) {
      Eigen::Index arg = 0;
      phi.cwiseAbs().maxCoeff(&arg);
      return static_cast<std::size_t>(arg) == x;
    };
  }
  const std::string weight_prefix = "center-weight:p=";
  if (spec.rfind(weight_prefix, 0) == 0) {
    double p = 0.0;
    try {
      p = std::stod(spec.substr(weight_prefix.size()));
    } catch (const std::exception&) {
      throw UsageError("bad event threshold in '" + spec + "'");
    }
    return [p](const Eigen::VectorXd& phi, std::size_t x) {
      const double c = phi(static_cast<Eigen::Index>(x));
      return c * c > p;
    };
  }
  const std::string loc_prefix = "localized:";
  if (spec.rfind(loc_prefix, 0) == 0) {
    const EtaFunction eta = EtaFunction::parse(spec.substr(loc_prefix.size()));
    const SiteSet sites = model.sites();
    return [eta, sites](const Eigen::VectorXd& phi, std::size_t) {
      return in_localization_event(phi, eta, sites);
    };
  }
  throw UsageError("unknown event '" + spec + "'");
}

int cmd_evec_law(const Context& ctx, const Common& c, double lambda, const std::string& event) {
  const ModelSpec model = load_model(c);
  require_min_samples(c);
  const MonteCarloResult r =
      eigenvector_law_probability(model, lambda, parse_event(event, model), c.samples, options(c));
  Json j = report("eigenvector_law", model, c);
  j["estimate"] = r.estimate;
  j["stderr"] = r.std_error;
  j["diagnostics"]["lambda"] = lambda;
  j["diagnostics"]["event"] = event;
  j["diagnostics"]["zero_weight_fraction"] = r.zero_weight_fraction;
  j["diagnostics"]["near_singular_retries"] = r.retries;
  for (const auto& [k, v] : r.metadata) j["diagnostics"][k] = v;
  emit_json(ctx, c, "evec_law.json", j);
  return kExitOk;
}

int cmd_localization(const Context& ctx, const Common& c, double lambda, const std::string& eta_spec) {
  const ModelSpec model = load_model(c);
  require_min_samples(c);
  const EtaFunction eta = EtaFunction::parse(eta_spec);
  const LocalizationReport rep = localization_bound_report(model, lambda, eta, c.samples, options(c));

  CsvWriter alpha_csv({"site", "alpha", "stderr"});
  alpha_csv.header();
  for (std::size_t x = 0; x < rep.alpha.per_site.size(); ++x) {
    alpha_csv.row(x, rep.alpha.per_site[x].estimate, rep.alpha.per_site[x].std_error);
  }
  emit_csv(c, "alpha.csv", alpha_csv);

  Json j = report("localization_bound", model, c);
  j["estimate"] = rep.left.estimate;
  j["stderr"] = rep.left.std_error;
  j["left"] = rep.left.estimate;
  j["left_stderr"] = rep.left.std_error;
  j["right"] = rep.right;
  j["right_stderr"] = rep.right_std_error;
  j["verdict"] = rep.pass ? "pass" : "fail";
  j["diagnostics"]["lambda"] = lambda;
  j["diagnostics"]["eta"] = eta.label();
  j["diagnostics"]["dos"] = rep.dos.estimate;
  j["diagnostics"]["dos_stderr"] = rep.dos.std_error;
  j["diagnostics"]["alpha"] = rep.alpha.alpha;
  j["diagnostics"]["alpha_stderr"] = rep.alpha.std_error;
  j["diagnostics"]["alpha_argmax"] = rep.alpha.argmax;
  j["diagnostics"]["sup_density"] = rep.sup_density;
  j["diagnostics"]["combined_stderr"] = rep.combined_std_error;
  emit_json(ctx, c, "localization.json", j);
  return rep.pass ? kExitOk : kExitFailure;
}

int cmd_fracmom(const Context& ctx, const Common& c, double lambda, double s, std::size_t source,
                std::optional<std::size_t> max_distance, bool full_hamiltonian) {
  if (!(s > 0.0 && s < 1.0)) throw UsageError("--s must lie strictly between 0 and 1");
  const ModelSpec model = load_model(c);
  require_min_samples(c);
  model.require_site(source);
  const std::size_t room = model.size() - 1 - source;
  const std::size_t dmax = max_distance.value_or(std::min<std::size_t>(8, room));
  if (dmax < 2 || dmax > room) throw UsageError("--max-distance must lie in [2, sites - 1 - source]");
  const ResolventMatrix matrix = full_hamiltonian ? ResolventMatrix::Full : ResolventMatrix::ZeroedAtSource;
  const DecayFit fit = fractional_moment_decay(model, lambda, s, source, dmax, c.samples, options(c), matrix);

  CsvWriter csv({"distance", "mean", "stderr", "log_mean"});
  csv.header();
  for (std::size_t i = 0; i < fit.distances.size(); ++i) {
    csv.row(fit.distances[i], fit.moments[i].estimate, fit.moments[i].std_error,
            std::log(fit.moments[i].estimate));
  }
  emit_csv(c, "decay.csv", csv);

  Json j = report("fractional_moment_decay", model, c);
  j["estimate"] = fit.slope;
  j["stderr"] = fit.slope_std_error;
  j["diagnostics"]["lambda"] = lambda;
  j["diagnostics"]["s"] = s;
  j["diagnostics"]["source"] = source;
  j["diagnostics"]["max_distance"] = dmax;
  j["diagnostics"]["matrix"] = full_hamiltonian ? "full" : "zeroed_at_source";
  j["diagnostics"]["intercept"] = fit.intercept;
  j["diagnostics"]["decay_rate"] = -fit.slope;
  j["diagnostics"]["near_singular_retries"] = fit.moments.front().retries;
  emit_json(ctx, c, "fracmom.json", j);
  return kExitOk;
}

int cmd_profile(const Context& ctx, const Common& c, double window, double threshold) {
  const ModelSpec model = load_model(c);
  if (c.samples < 1) throw UsageError("--samples must be positive");
  if (!(window > 0.0 && window <= 1.0)) throw UsageError("--window must lie in (0, 1]");
  const std::size_t n = model.size();
  const RunOptions opts = options(c);

  const StreamFactory factory = opts.streams.fork("profile");
  const std::size_t tasks = (c.samples + kTaskSize - 1) / kTaskSize;
  const auto parts = run_tasks(tasks, 0, [&](std::size_t task) {
    Rng rng = factory.stream(task);
    std::vector<OmegaPoint> pts;
    const std::size_t count = std::min(kTaskSize, c.samples - task * kTaskSize);
    for (std::size_t i = 0; i < count; ++i) pts.push_back(sample_mu1(model, rng));
    return pts;
  });
  std::vector<OmegaPoint> points;
  for (const auto& p : parts) points.insert(points.end(), p.begin(), p.end());

  const ProfileData prof = eigenvector_profile(points.front(), n);
  CsvWriter prof_csv({"t", "profile"});
  prof_csv.comment("center_t=" + format_double(prof.center_t) + ",lambda=" + format_double(prof.lambda));
  prof_csv.header();
  for (std::size_t i = 0; i < n; ++i) prof_csv.row(prof.t_grid[i], prof.profile[i]);
  emit_csv(c, "profile.csv", prof_csv);

  const std::vector<double> res = resolvent_profile(model, points.front());
  CsvWriter res_csv({"t", "resolvent_sq"});
  res_csv.comment("center_t=" + format_double(prof.center_t) + ",lambda=" + format_double(prof.lambda));
  res_csv.header();
  for (std::size_t i = 0; i < n; ++i) res_csv.row(prof.t_grid[i], res[i]);
  emit_csv(c, "resolvent_profile.csv", res_csv);

  const CenterStatistics stats = center_statistics(points, n);
  CsvWriter centers_csv({"center_t", "ecdf"});
  centers_csv.header();
  for (std::size_t i = 0; i < stats.centers.size(); ++i) centers_csv.row(stats.centers[i], stats.ecdf[i]);
  emit_csv(c, "centers.csv", centers_csv);

  const auto half_width = static_cast<std::size_t>(std::lround(window * static_cast<double>(n)));
  const ConcentrationCheck conc = concentration_frequency(model, c.samples, half_width, threshold, opts);

  Json j = report("eigenvector_profile", model, c);
  j["estimate"] = stats.ks_distance;
  j["stderr"] = 0.0;
  j["diagnostics"]["first_center_t"] = prof.center_t;
  j["diagnostics"]["first_lambda"] = prof.lambda;
  j["diagnostics"]["center_ks_distance"] = stats.ks_distance;
  j["diagnostics"]["window_half_width"] = half_width;
  j["diagnostics"]["mass_threshold"] = threshold;
  j["diagnostics"]["center_window_frequency"] = conc.center_frequency();
  j["diagnostics"]["null_window_frequency"] = conc.null_frequency();
  emit_json(ctx, c, "profile.json", j);
  return kExitOk;
}

bool is_usage_error(const std::exception& e) {
  return dynamic_cast<const UsageError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
         dynamic_cast<const ModelError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
         dynamic_cast<const SiteError*>(&e) || dynamic_cast<const SizeError*>(&e);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random eigenvector constructions for finite random operators H = T + V", "rcl"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults");

  Common common;
  Context ctx{out, err};
  std::function<int()> action;

  auto* sample = app.add_subcommand("sample", "Dump spectral or resolvent construction points as CSV");
  add_common(sample, common);
  std::string measure;
  bool full = false;
  sample->add_option("--measure", measure, "mu1 (spectral) or mu2 (resolvent)")
      ->required()
      ->check(CLI::IsMember({"mu1", "mu2"}));
  sample->add_flag("--full", full, "Append eigenvector components phi_0..phi_{n-1}");
  sample->callback([&] { action = [&] { return cmd_sample(ctx, common, measure, full); }; });

  auto* verify = app.add_subcommand("verify-rn", "Check E_mu1[f] = E_mu2[f w] for test functions");
  add_common(verify, common);
  std::vector<std::string> functions;
  verify->add_option("--functions", functions,
                     "Subset of lambda, lambda2, phi_center2, participation, left_half, one");
  verify->callback([&] { action = [&] { return cmd_verify_rn(ctx, common, functions); }; });

  auto* dos = app.add_subcommand("dos", "Density of states: resolvent formula and eigenvalue histogram");
  add_common(dos, common);
  std::size_t grid = 50;
  std::size_t bins = 50;
  dos->add_option("--lambda-grid", grid, "Number of midpoint energies")->capture_default_str();
  dos->add_option("--bins", bins, "Histogram bins over [0, 1]")->capture_default_str();
  dos->callback([&] { action = [&] { return cmd_dos(ctx, common, grid, bins); }; });

  auto* evec = app.add_subcommand("evec-law", "Conditional law of the eigenvector at a fixed energy");
  add_common(evec, common);
  double lambda = 0.5;
  std::string event = "center-max";
  evec->add_option("--lambda", lambda, "Energy in (0, 1)")->capture_default_str();
  evec->add_option("--event", event,
                   "all | center-max | center-weight:p=<p> | localized:<eta>")
      ->capture_default_str();
  evec->callback([&] { action = [&] { return cmd_evec_law(ctx, common, lambda, event); }; });

  auto* loc = app.add_subcommand("localization", "Eigenvector localization bound from the resolvent");
  add_common(loc, common);
  std::string eta = "exp:c=0.2";
  loc->add_option("--lambda", lambda, "Energy in (0, 1)")->capture_default_str();
  loc->add_option("--eta", eta, "exp:c=<c> | poly:k=<k> | const:v=<v>")->capture_default_str();
  loc->callback([&] { action = [&] { return cmd_localization(ctx, common, lambda, eta); }; });

  auto* frac = app.add_subcommand("fracmom", "Fractional moments of the resolvent and their decay");
  add_common(frac, common);
  double s = 0.5;
  std::size_t source = 0;
  std::optional<std::size_t> max_distance;
  bool full_hamiltonian = false;
  frac->add_option("--lambda", lambda, "Energy in (0, 1)")->capture_default_str();
  frac->add_option("--s", s, "Exponent in (0, 1)")->capture_default_str();
  frac->add_option("--source", source, "Source site x")->capture_default_str();
  frac->add_option("--max-distance", max_distance, "Largest |x - y| (default min(8, room))");
  frac->add_flag("--full-hamiltonian", full_hamiltonian, "Draw the source potential instead of zeroing it");
  frac->callback([&] {
    action = [&] { return cmd_fracmom(ctx, common, lambda, s, source, max_distance, full_hamiltonian); };
  });

  auto* prof = app.add_subcommand("profile", "Eigenvector profile and random-center statistics");
  add_common(prof, common);
  double window = 0.2;
  double threshold = 0.5;
  prof->add_option("--window", window, "Window half-width as a fraction of n")->capture_default_str();
  prof->add_option("--mass-threshold", threshold, "Mass the window must capture")->capture_default_str();
  prof->callback([&] { action = [&] { return cmd_profile(ctx, common, window, threshold); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rcl: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const std::exception& e) {
    err << "rcl: " << e.what() << "\n";
    return is_usage_error(e) ? kExitUsage : kExitFailure;
  }
}

}  // namespace rcl::cli
