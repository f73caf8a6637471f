/*
   Copyright 2026 The rmtratio Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// rmtratio: sample Gaussian beta-ensembles, form order-k spacing ratios and
// check them against the generalized surmise.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rmtratio/rmtratio.hpp"

namespace {

using namespace rmtratio;

enum ExitCode : int { kOk = 0, kThresholdViolated = 1, kUsage = 2, kRuntime = 3 };

struct RunConfig {
  std::string command;
  double beta = 1.0;
  std::size_t k = 1;
  std::size_t n = 0;  // 0: 2k + 1
  std::string trials_text = "10000";
  std::size_t trials = 10000;
  std::optional<double> bulk;
  std::uint64_t seed = 0;
  std::string model = "tridiagonal";
  std::string mode = "surmise";
  double scale_a = 0.5;
  std::string small_window = "0.02:0.2";
  std::string large_window = "5:50";
  std::size_t min_count = 500;
  std::string tail_model = "analytic_correction";
  std::string out_path;
  std::string in_path;
  std::string format = "json";
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::size_t bootstrap = 0;
  // curves
  std::optional<double> curve_beta_prime;
  std::optional<std::size_t> curve_poisson_k;
  std::string grid_log = "1e-3:1e3:200";
  // verify threshold overrides
  std::optional<double> beta_tol, slope_tol, ks_max, duality_max;
};

/// Accepts plain or scientific notation ("1e6") for integral counts.
std::size_t parse_count(const std::string& text, const char* what) {
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must be a number, got '" + text + "'");
  }
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must be a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> parse_colon_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, std::string(what) + ": bad number '" + item + "'");
    }
  }
  if (parts.size() != expected) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " expects " + std::to_string(expected) +
                                         " colon-separated values, got '" + text + "'");
  }
  return parts;
}

TailWindow parse_window(const std::string& text, std::size_t min_count, const char* what) {
  const auto p = parse_colon_list(text, 2, what);
  require(p[0] > 0.0 && p[0] < p[1], ErrorCode::InvalidArgument, std::string(what) + " needs 0 < lo < hi");
  return {p[0], p[1], min_count};
}

TailModel parse_tail_model(const std::string& s) {
  if (s == "analytic_correction") return TailModel::AnalyticCorrection;
  if (s == "power_law") return TailModel::PowerLaw;
  fail(ErrorCode::InvalidArgument, "tail model must be analytic_correction or power_law");
}

EnsembleSpec ensemble_of(const RunConfig& c) {
  const EnsembleSpec spec{c.beta, c.n == 0 ? 2 * c.k + 1 : c.n, parse_matrix_model(c.model), c.scale_a};
  spec.validate();
  return spec;
}

/// Resolved configuration, echoed into every artifact. The worker count is
/// deliberately absent: outputs must not depend on it.
void write_config(JsonWriter& j, const RunConfig& c) {
  j.begin_object();
  j.field("command", c.command);
  j.field("beta", c.beta);
  j.field("k", static_cast<std::uint64_t>(c.k));
  j.field("n", static_cast<std::uint64_t>(c.n == 0 ? 2 * c.k + 1 : c.n));
  j.field("model", c.model);
  j.field("mode", c.mode);
  j.field("scale_a", c.scale_a);
  j.field("trials", static_cast<std::uint64_t>(c.trials));
  if (c.bulk) {
    j.field("bulk", *c.bulk);
  } else {
    j.key("bulk").null();
  }
  j.field("seed", static_cast<std::uint64_t>(c.seed));
  j.field("small_window", c.small_window);
  j.field("large_window", c.large_window);
  j.field("min_count", static_cast<std::uint64_t>(c.min_count));
  j.field("tail_model", c.tail_model);
  j.field("in", c.in_path);
  j.field("format", c.format);
  if (c.command == "curves") {
    if (c.curve_beta_prime) j.field("beta_prime", *c.curve_beta_prime);
    if (c.curve_poisson_k) j.field("poisson_k", static_cast<std::uint64_t>(*c.curve_poisson_k));
    j.field("grid_log", c.grid_log);
  }
  j.end_object();
}

std::string config_line(const RunConfig& c) {
  JsonWriter j;
  write_config(j, c);
  std::string s = j.str();
  // Collapse to a single line for CSV preambles.
  std::string flat;
  bool skipping = false;
  for (char ch : s) {
    if (ch == '\n') {
      skipping = true;
      if (!flat.empty() && flat.back() == ',') flat += ' ';
      continue;
    }
    if (ch == ' ' && skipping) continue;
    skipping = false;
    flat += ch;
  }
  return flat;
}

std::vector<std::string> preamble(const RunConfig& c) {
  return {"rmtratio " + std::string(kVersion), "config " + config_line(c)};
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file_atomic(path, content);
  }
}

RatioSeries load_or_sample_ratios(const RunConfig& c) {
  if (!c.in_path.empty()) {
    std::ifstream in(c.in_path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + c.in_path);
    return read_ratios_csv(in);
  }
  const EnsembleSpec spec = ensemble_of(c);
  return collect_ratios({spec, c.k, c.trials, c.bulk.value_or(1.0), c.seed, c.workers, 0}).series;
}

// Subcommands ---------------------------------------------------------------

int run_sample(const RunConfig& c) {
  const EnsembleSpec spec = ensemble_of(c);
  std::vector<Spectrum> spectra;
  spectra.reserve(c.trials);
  for (std::size_t t = 0; t < c.trials; ++t) {
    RngStream rng(c.seed, t);
    spectra.push_back(sample_spectrum(spec, rng));
  }
  std::ostringstream out;
  write_preamble(out, preamble(c));
  write_spectra_csv(out, spectra);
  emit(c.out_path, out.str());
  return kOk;
}

int run_ratios(const RunConfig& c) {
  RatioSeries series;
  series.k = c.k;
  std::size_t discarded = 0;
  if (!c.in_path.empty()) {
    std::ifstream in(c.in_path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + c.in_path);
    for (Spectrum& s : read_spectra_csv(in)) {
      if (c.bulk && *c.bulk < 1.0) s = bulk_filter(s, *c.bulk);
      try {
        append_kth_order_ratios(s.eigenvalues, c.k, series.values);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSpacing) throw;
        ++discarded;
      }
    }
  } else {
    Campaign campaign = collect_ratios({ensemble_of(c), c.k, c.trials, c.bulk.value_or(1.0), c.seed, c.workers, 0});
    series = std::move(campaign.series);
    discarded = campaign.discarded;
  }
  std::ostringstream out;
  auto lines = preamble(c);
  lines.push_back("discarded_realizations " + std::to_string(discarded));
  write_preamble(out, lines);
  write_ratios_csv(out, series);
  emit(c.out_path, out.str());
  return kOk;
}

/// Writes a flat key/value result in the requested format.
void emit_result(const RunConfig& c, const std::vector<std::pair<std::string, double>>& values) {
  if (c.format == "csv") {
    std::ostringstream out;
    write_preamble(out, preamble(c));
    out << "field,value\n";
    for (const auto& [k, v] : values) out << k << ',' << format_double(v) << '\n';
    emit(c.out_path, out.str());
    return;
  }
  JsonWriter j;
  j.begin_object();
  j.field("schema", 1).field("toolkit", "rmtratio").field("version", kVersion);
  j.key("config");
  write_config(j, c);
  for (const auto& [k, v] : values) j.field(k, v);
  j.end_object();
  emit(c.out_path, j.str());
}

int run_fit(const RunConfig& c) {
  const RatioSeries series = load_or_sample_ratios(c);
  const MleResult fit = fit_beta_prime_mle(series);
  std::vector<std::pair<std::string, double>> v{
      {"ratio_count", static_cast<double>(series.size())},
      {"beta_prime_hat", fit.beta_prime_hat},
      {"beta_prime_ci_halfwidth", fit.ci_halfwidth},
      {"ci_lower", fit.ci_lower},
      {"ci_upper", fit.ci_upper},
      {"converged", fit.converged ? 1.0 : 0.0},
      {"at_lower_bound", fit.at_lower_bound ? 1.0 : 0.0}};
  if (c.bootstrap > 0) v.emplace_back("bootstrap_ci_halfwidth", bootstrap_ci_halfwidth(series.values, c.bootstrap, c.seed));
  emit_result(c, v);
  return kOk;
}

int run_tails(const RunConfig& c) {
  const RatioSeries series = load_or_sample_ratios(c);
  const TailModel model = parse_tail_model(c.tail_model);
  const TailFit small = tail_exponent(series, TailSide::SmallR, parse_window(c.small_window, c.min_count, "--small-window"), model);
  const TailFit large = tail_exponent(series, TailSide::LargeR, parse_window(c.large_window, c.min_count, "--large-window"), model);
  emit_result(c, {{"ratio_count", static_cast<double>(series.size())},
                  {"slope_small_r", small.slope},
                  {"slope_small_r_stderr", small.stderr_slope},
                  {"samples_small_r", static_cast<double>(small.samples)},
                  {"slope_large_r", large.slope},
                  {"slope_large_r_stderr", large.stderr_slope},
                  {"samples_large_r", static_cast<double>(large.samples)}});
  return kOk;
}

int run_duality(const RunConfig& c) {
  const RatioSeries series = load_or_sample_ratios(c);
  const DualityResult d = duality_test(series);
  emit_result(c, {{"ratio_count", static_cast<double>(series.size())},
                  {"duality_ks", d.ks_statistic},
                  {"duality_p_value_nominal", d.p_value}});
  return kOk;
}

std::vector<CurvePoint> model_curve(std::optional<double> bp, std::optional<std::size_t> poisson_k, double lo, double hi,
                                    std::size_t points) {
  require(points >= 2 && lo > 0.0 && lo < hi, ErrorCode::InvalidArgument, "grid needs 0 < lo < hi and >= 2 points");
  std::vector<CurvePoint> curve;
  curve.reserve(points);
  std::optional<SurmiseModel> model;
  if (bp) model = SurmiseModel::make(*bp);
  for (std::size_t i = 0; i < points; ++i) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
    curve.push_back({r, model ? surmise_pdf(r, *model) : poisson_kth_pdf(r, *poisson_k)});
  }
  return curve;
}

int run_curves(const RunConfig& c) {
  require(c.curve_beta_prime.has_value() != c.curve_poisson_k.has_value(), ErrorCode::InvalidArgument,
          "give exactly one of --beta-prime or --poisson-k");
  if (c.curve_beta_prime) {
    require(*c.curve_beta_prime >= 0.0, ErrorCode::InvalidArgument, "--beta-prime must be >= 0");
  }
  if (c.curve_poisson_k) require(*c.curve_poisson_k >= 1, ErrorCode::InvalidArgument, "--poisson-k must be >= 1");
  const auto g = parse_colon_list(c.grid_log, 3, "--grid-log");
  const std::size_t points = parse_count(std::to_string(static_cast<long long>(g[2])), "grid points");
  require(g[2] == std::floor(g[2]), ErrorCode::InvalidArgument, "--grid-log point count must be an integer");
  const auto curve = model_curve(c.curve_beta_prime, c.curve_poisson_k, g[0], g[1], points);
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    mass += 0.5 * (curve[i].pdf + curve[i + 1].pdf) * (curve[i + 1].r - curve[i].r);
  }
  std::ostringstream out;
  auto lines = preamble(c);
  lines.push_back("trapezoid_mass " + format_double(mass));
  write_preamble(out, lines);
  write_curve_csv(out, curve);
  emit(c.out_path, out.str());
  std::cerr << "curve: " << curve.size() << " points, trapezoid mass over grid " << format_double(mass) << '\n';
  return kOk;
}

std::string sibling(const std::string& json_path, const std::string& suffix) {
  std::string stem = json_path;
  if (stem.size() > 5 && stem.compare(stem.size() - 5, 5, ".json") == 0) stem.resize(stem.size() - 5);
  return stem + suffix;
}

int run_verify(const RunConfig& c) {
  const EnsembleSpec spec{c.beta, c.n == 0 ? 2 * c.k + 1 : c.n, parse_matrix_model(c.model), c.scale_a};
  const VerifyMode mode = parse_verify_mode(c.mode);
  VerifyOptions opts;
  opts.seed = c.seed;
  opts.bulk_fraction = c.bulk;
  opts.small_window = parse_window(c.small_window, c.min_count, "--small-window");
  opts.large_window = parse_window(c.large_window, c.min_count, "--large-window");
  opts.tail_model = parse_tail_model(c.tail_model);
  opts.workers = c.workers;
  opts.bootstrap_replicates = c.bootstrap;

  opts.beta_tol = c.beta_tol;
  opts.slope_tol = c.slope_tol;
  opts.ks_max = c.ks_max;
  opts.duality_max = c.duality_max;

  RatioSeries series;
  const FitReport rep = verify_scaling(spec, c.k, c.trials, mode, opts, &series);

  JsonWriter j;
  j.begin_object();
  j.field("schema", 1).field("toolkit", "rmtratio").field("version", kVersion);
  j.key("config");
  write_config(j, c);
  write_fit_report_fields(j, rep);
  j.end_object();

  const std::string json_path = c.out_path.empty() ? "rmtratio_verify.json" : c.out_path;
  write_file_atomic(json_path, j.str());

  // Histogram and the reference curve for overlay plots.
  std::ostringstream hist;
  write_preamble(hist, preamble(c));
  write_histogram_csv(hist, histogram(series, default_tail_edges(), Binning::LogOnR));
  write_file_atomic(sibling(json_path, "_hist.csv"), hist.str());

  const bool poisson = spec.model == MatrixModel::PoissonUncorrelated;
  std::ostringstream curve;
  write_preamble(curve, preamble(c));
  write_curve_csv(curve, model_curve(poisson ? std::nullopt : std::optional<double>(rep.predicted_beta_prime),
                                     poisson ? std::optional<std::size_t>(c.k) : std::nullopt, 1e-3, 1e3, 200));
  write_file_atomic(sibling(json_path, "_curve.csv"), curve.str());

  std::cout << "rmtratio verify: " << describe(EnsembleSpec{spec.beta, rep.n_levels, spec.model, spec.scale_a})
            << " k=" << c.k << " mode=" << to_string(mode) << " trials=" << c.trials << " seed=" << c.seed << '\n';
  std::cout << "  predicted beta' = " << format_double(rep.predicted_beta_prime) << ", fitted = "
            << rep.beta_prime_hat << " +- " << rep.beta_prime_ci_halfwidth << '\n';
  for (const auto& chk : rep.checks) {
    std::cout << "  [" << to_string(chk.status) << "] " << chk.name << " = " << chk.value << " (allowed ["
              << chk.lower << ", " << chk.upper << "])";
    if (!chk.note.empty()) std::cout << "  " << chk.note;
    std::cout << '\n';
  }
  std::cout << "  report: " << json_path << '\n';
  return rep.passed() ? kOk : kThresholdViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rmtratio: higher-order spacing ratios of Gaussian beta-ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  RunConfig cfg;

  auto ensemble_opts = [&cfg](CLI::App* sub) {
    sub->add_option("--beta", cfg.beta, "Dyson index beta (> 0)");
    sub->add_option("--n", cfg.n, "levels per realization (default 2k+1)");
    sub->add_option("--model", cfg.model, "dense | tridiagonal | poisson")
        ->check(CLI::IsMember({"dense", "tridiagonal", "poisson"}));
    sub->add_option("--scale-a", cfg.scale_a, "Gaussian weight A in exp(-A sum E^2)");
    sub->add_option("--trials", cfg.trials_text, "number of realizations (accepts 1e6)");
    sub->add_option("--seed", cfg.seed, "RNG seed (recorded in every output)");
    sub->add_option("--workers", cfg.workers, "worker threads (results do not depend on it)");
  };
  auto ratio_opts = [&cfg](CLI::App* sub) {
    sub->add_option("--k", cfg.k, "ratio order k >= 1");
    sub->add_option("--bulk", cfg.bulk, "central fraction of levels kept, in (0, 1]");
  };
  auto io_opts = [&cfg](CLI::App* sub, bool with_in) {
    sub->add_option("--out", cfg.out_path, "output path ('-' or empty: stdout)");
    if (with_in) sub->add_option("--in", cfg.in_path, "input CSV instead of sampling");
  };
  auto format_opt = [&cfg](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto window_opts = [&cfg](CLI::App* sub) {
    sub->add_option("--small-window", cfg.small_window, "small-r window lo:hi");
    sub->add_option("--large-window", cfg.large_window, "large-r window lo:hi");
    sub->add_option("--min-count", cfg.min_count, "minimum samples inside a window");
    sub->add_option("--tail-model", cfg.tail_model, "analytic_correction | power_law")
        ->check(CLI::IsMember({"analytic_correction", "power_law"}));
  };

  auto* sample = app.add_subcommand("sample", "sample spectra to CSV (trial_index,E_1..E_n)");
  ensemble_opts(sample);
  sample->add_option("--k", cfg.k, "ratio order used for the default n = 2k+1");
  io_opts(sample, false);

  auto* ratios = app.add_subcommand("ratios", "order-k spacing ratios to CSV (k,value)");
  ensemble_opts(ratios);
  ratio_opts(ratios);
  io_opts(ratios, true);

  auto* fit = app.add_subcommand("fit", "maximum-likelihood beta' with profile interval");
  ensemble_opts(fit);
  ratio_opts(fit);
  io_opts(fit, true);
  format_opt(fit);
  fit->add_option("--bootstrap", cfg.bootstrap, "bootstrap replicates for a second interval");

  auto* tails = app.add_subcommand("tails", "log-log tail exponents");
  ensemble_opts(tails);
  ratio_opts(tails);
  io_opts(tails, true);
  format_opt(tails);
  window_opts(tails);

  auto* duality = app.add_subcommand("duality", "KS distance between r and 1/r");
  ensemble_opts(duality);
  ratio_opts(duality);
  io_opts(duality, true);
  format_opt(duality);

  auto* curves = app.add_subcommand("curves", "model density on a log grid to CSV (r,pdf)");
  curves->add_option("--beta-prime", cfg.curve_beta_prime, "surmise with this effective index");
  curves->add_option("--poisson-k", cfg.curve_poisson_k, "uncorrelated-level law of order k");
  curves->add_option("--grid-log", cfg.grid_log, "lo:hi:count");
  io_opts(curves, false);

  auto* verify = app.add_subcommand("verify", "full pipeline with pass/fail thresholds");
  ensemble_opts(verify);
  ratio_opts(verify);
  window_opts(verify);
  verify->add_option("--mode", cfg.mode, "surmise | large_n")->check(CLI::IsMember({"surmise", "large_n"}));
  verify->add_option("--out", cfg.out_path, "report JSON path (histogram/curve CSVs are written alongside)");
  verify->add_option("--bootstrap", cfg.bootstrap, "bootstrap replicates for a second interval");
  verify->add_option("--beta-tol", cfg.beta_tol, "override |beta_hat - beta'| tolerance");
  verify->add_option("--slope-tol", cfg.slope_tol, "override tail-slope tolerance");
  verify->add_option("--ks-max", cfg.ks_max, "override KS threshold");
  verify->add_option("--duality-max", cfg.duality_max, "override duality KS threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    cfg.trials = parse_count(cfg.trials_text, "--trials");
    require(cfg.trials >= 1, ErrorCode::InvalidArgument, "--trials must be >= 1");
    require(cfg.k >= 1, ErrorCode::InvalidArgument, "--k must be >= 1");
    require(cfg.workers >= 1, ErrorCode::InvalidArgument, "--workers must be >= 1");
    CLI::App* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    if (cfg.command == "sample") return run_sample(cfg);
    if (cfg.command == "ratios") return run_ratios(cfg);
    if (cfg.command == "fit") return run_fit(cfg);
    if (cfg.command == "tails") return run_tails(cfg);
    if (cfg.command == "duality") return run_duality(cfg);
    if (cfg.command == "curves") return run_curves(cfg);
    return run_verify(cfg);
  } catch (const Error& e) {
    std::cerr << "rmtratio: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::InsufficientLevels ||
                       e.code() == ErrorCode::TooFewLevels;
    return usage ? kUsage : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "rmtratio: " << e.what() << '\n';
    return kRuntime;
  }
}
