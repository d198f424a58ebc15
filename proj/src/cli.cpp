#include "crisk/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crisk/error.hpp"
#include "crisk/experiments.hpp"
#include "crisk/optimize.hpp"
#include "crisk/repro.hpp"
#include "crisk/report.hpp"

namespace crisk {
namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Estimator lists are comma separated, but kernel tokens may carry `:h=` values, so plain splitting is enough.
std::vector<LevelBackend> parse_estimators(const std::string& text) {
  std::vector<LevelBackend> out;
  for (const std::string& tok : split_list(text)) out.push_back(parse_backend_token(tok));
  if (out.empty()) fail(ErrorKind::UsageError, "no estimators given");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (const std::string& tok : split_list(text)) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size() || tok.empty()) fail(ErrorKind::UsageError, "bad sample size '" + tok + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

struct Output {
  std::string path;
  std::string format = "csv";
};

void emit(const Output& o, const std::string& text, std::ostream& out) {
  if (o.path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.path);
  if (!file) fail(ErrorKind::IoError, "cannot write '" + o.path + "'");
  file << text;
}

struct DistFlags {
  std::string dist = "normal";
  std::optional<double> mean;
  std::optional<double> scale;
  double df = 60.0;
};

void add_dist_flags(CLI::App* app, DistFlags& d) {
  app->add_option("--dist", d.dist, "normal | t")->check(CLI::IsMember({"normal", "t"}));
  app->add_option("--mean", d.mean, "location (default 10)");
  app->add_option("--scale", d.scale, "normal standard deviation (default: resolved reading of Normal(10, 3))");
  app->add_option("--df", d.df, "t degrees of freedom");
}

// Returns the distribution plus a note when the default Normal scale had to be resolved.
Distribution make_distribution(const DistFlags& d, const RiskSpec& risk, std::string* note) {
  const double mean = d.mean.value_or(10.0);
  if (d.dist == "t") return ShiftedT{d.df, mean};
  if (d.scale) return Normal{mean, *d.scale};
  const ScaleResolution res = resolve_normal_scale(mean, 3.0, risk, kPublishedTheta0, kPublishedUStar);
  if (note) *note = res.note;
  return Normal{mean, res.stddev};
}

RiskSpec hor_spec(double alpha, double q) {
  HigherOrderInverse h;
  h.alpha = alpha;
  h.q = q;
  validate(h);
  return RiskSpec{h, Orientation::Losses};
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::UsageError:
      case ErrorKind::IoError:
      case ErrorKind::BadParameters:
      case ErrorKind::BackendUnavailable:
      case ErrorKind::DimensionMismatch:
        return 1;
      default:
        return 2;
    }
  }
  return 2;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Composite risk estimators: plug-in, kernel-smoothed and wavelet-smoothed", "crisk"};
  app.require_subcommand(1);
  Output o;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", o.path, "output path (default stdout)");
    sub->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  };

  // risk-eval
  auto* eval = app.add_subcommand("risk-eval", "evaluate an estimator of a risk measure on a data file");
  std::string risk_text = "hor:q=2,alpha=0.05";
  std::string estimator = "plugin";
  std::string data_path;
  std::string weights_text;
  double opt_tol = 1e-8;
  std::size_t opt_budget = 100000;
  std::uint64_t seed = kReproSeed;
  eval->add_option("--risk", risk_text, "hor:q=<f>,alpha=<f> | msd:p=<f>,kappa=<f>");
  eval->add_option("--estimator", estimator, "backend token for the inner stage");
  eval->add_option("--data", data_path, "headerless CSV, one observation per row")->required();
  eval->add_option("--weights", weights_text, "portfolio weights for msd (default: optimize over the simplex)");
  eval->add_option("--opt-tol", opt_tol, "optimizer tolerance");
  eval->add_option("--opt-budget", opt_budget, "simplex search evaluation budget");
  eval->add_option("--seed", seed, "simplex restart seed");
  add_output(eval);

  // density-est
  auto* dens = app.add_subcommand("density-est", "kernel or wavelet density estimate on a grid");
  std::string dens_estimator = "gaussian";
  double grid_lo = std::nan("");
  double grid_hi = std::nan("");
  std::size_t grid_n = 201;
  dens->add_option("--data", data_path, "headerless CSV with one column")->required();
  dens->add_option("--estimator", dens_estimator, "uniform | epanechnikov | gaussian[:h=] | wavelet:<family>[:j=]");
  dens->add_option("--lo", grid_lo, "grid start (default: sample min - 3 sd)");
  dens->add_option("--hi", grid_hi, "grid end (default: sample max + 3 sd)");
  dens->add_option("--points", grid_n, "grid size")->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}));
  add_output(dens);

  // oracle
  auto* orc = app.add_subcommand("oracle", "true optimal value of the higher-order measure");
  DistFlags dist;
  double alpha = 0.05;
  double q = 2.0;
  add_dist_flags(orc, dist);
  orc->add_option("--alpha", alpha, "tail parameter");
  orc->add_option("--q", q, "order");
  add_output(orc);

  // bias-study
  auto* study = app.add_subcommand("bias-study", "Monte Carlo bias and variance of the estimators");
  std::string config_path;
  std::string sizes_text = "100,200,500";
  std::size_t reps = 500;
  std::string estimators_text = "plugin,uniform,epanechnikov,gaussian,wavelet:linear,wavelet:quadratic";
  std::uint64_t study_seed = kReproSeed;
  DistFlags study_dist;
  double study_alpha = 0.05;
  double study_q = 2.0;
  study->add_option("--config", config_path, "JSON config; flags given explicitly override it");
  add_dist_flags(study, study_dist);
  study->add_option("--n", sizes_text, "comma separated sample sizes");
  study->add_option("--reps", reps, "replications");
  study->add_option("--estimators", estimators_text, "comma separated backend tokens");
  study->add_option("--alpha", study_alpha, "tail parameter");
  study->add_option("--q", study_q, "order");
  study->add_option("--seed", study_seed, "master seed");
  study->add_option("--opt-tol", opt_tol, "optimizer tolerance");
  add_output(study);

  // repro-table
  auto* repro = app.add_subcommand("repro-table", "rerun a published study and compare side by side");
  std::string which;
  std::size_t repro_reps = 500;
  std::uint64_t repro_seed = kReproSeed;
  repro->add_option("table", which, "normal | t")->required()->check(CLI::IsMember({"normal", "t"}));
  repro->add_option("--reps", repro_reps, "replications");
  repro->add_option("--seed", repro_seed, "master seed");
  repro->add_option("--out", o.path, "output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return 1;
  }

  try {
    if (eval->parsed()) {
      const RiskSpec risk = parse_risk_token(risk_text);
      const Sample sample = load_sample_csv(data_path);
      const LevelBackend backend = parse_backend_token(estimator);
      json result{{"estimator", backend_token(backend)}, {"risk", risk_token(risk)}, {"N", sample.size()}};
      if (std::holds_alternative<HigherOrderInverse>(risk.family)) {
        if (sample.dim() != 1) fail(ErrorKind::DimensionMismatch, "the higher-order measure takes one column");
        const Estimate est = estimate_risk(sample, risk, backend, opt_tol);
        result["theta"] = est.theta;
        result["u_star"] = est.u_star;
      } else {
        const CompositeChain chain = mean_semideviation_chain(risk, sample.dim());
        const PreparedBackend prepared(ExpectationBackend::smoothed_at(chain.levels(), 1, backend), sample);
        auto objective = [&](ConstVec u) { return eval_composite(chain, prepared, sample, u); };
        Vector weights;
        double value = 0.0;
        if (!weights_text.empty()) {
          for (const std::string& w : split_list(weights_text)) {
            try {
              weights.push_back(std::stod(w));
            } catch (const std::exception&) {
              fail(ErrorKind::UsageError, "bad weight '" + w + "'");
            }
          }
          if (weights.size() != sample.dim()) fail(ErrorKind::DimensionMismatch, "one weight per data column");
          value = objective(weights);
        } else {
          SimplexDomain domain;
          domain.dim = sample.dim();
          SimplexOptions opts;
          opts.seed = seed;
          opts.tol = opt_tol;
          opts.max_evaluations = opt_budget;
          const SimplexMinimum best = minimize_simplex(objective, domain, opts);
          weights = best.u_star;
          value = best.value;
        }
        result["theta"] = value;
        result["weights"] = weights;
      }
      std::ostringstream text;
      if (o.format == "json") {
        text << result.dump(2) << '\n';
      } else if (result.contains("u_star")) {
        text << "estimator,theta,u_star\n"
             << result["estimator"].get<std::string>() << ',' << format_double(result["theta"].get<double>()) << ','
             << format_double(result["u_star"].get<double>()) << '\n';
      } else {
        text << "estimator,theta,weights\n" << result["estimator"].get<std::string>() << ','
             << format_double(result["theta"].get<double>()) << ',';
        const auto w = result["weights"].get<std::vector<double>>();
        for (std::size_t i = 0; i < w.size(); ++i) text << (i ? ";" : "") << format_double(w[i]);
        text << '\n';
      }
      emit(o, text.str(), out);
      return 0;
    }

    if (dens->parsed()) {
      const Sample sample = load_sample_csv(data_path);
      if (sample.dim() != 1) fail(ErrorKind::DimensionMismatch, "density-est takes one column");
      const LevelBackend backend = parse_backend_token(dens_estimator);
      const double sd = sample.size() > 1 ? sample.stddev() : 1.0;
      const double lo = std::isnan(grid_lo) ? sample.min() - 3.0 * sd : grid_lo;
      const double hi = std::isnan(grid_hi) ? sample.max() + 3.0 * sd : grid_hi;
      if (!(lo < hi)) fail(ErrorKind::UsageError, "grid needs lo < hi");
      std::function<double(double)> density;
      json meta{{"estimator", backend_token(backend)}};
      if (const auto* k = std::get_if<KernelLevel>(&backend)) {
        const Kernel kernel(k->family);
        const double h = k->bandwidth.value_or(bandwidth_rule(sample));
        meta["bandwidth"] = h;
        density = [=, &sample](double x) { return kernel_density(sample, kernel, h, x); };
      } else if (const auto* w = std::get_if<WaveletLevel>(&backend)) {
        const int j = w->resolution.value_or(resolution_rule(sample.size(), w->rounding));
        meta["resolution"] = j;
        auto dens_ptr = std::make_shared<WaveletDensity>(wavelet_density(sample, ScalingFunction(w->family), j));
        density = [dens_ptr](double x) { return (*dens_ptr)(x); };
      } else {
        fail(ErrorKind::UsageError, "density-est needs a kernel or wavelet estimator");
      }
      std::ostringstream text;
      if (o.format == "json") {
        json xs = json::array();
        json ys = json::array();
        for (std::size_t i = 0; i < grid_n; ++i) {
          const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
          xs.push_back(x);
          ys.push_back(density(x));
        }
        meta["x"] = xs;
        meta["density"] = ys;
        text << meta.dump(2) << '\n';
      } else {
        text << "x,density\n";
        for (std::size_t i = 0; i < grid_n; ++i) {
          const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
          text << format_double(x) << ',' << format_double(density(x)) << '\n';
        }
      }
      emit(o, text.str(), out);
      return 0;
    }

    if (orc->parsed()) {
      const RiskSpec risk = hor_spec(alpha, q);
      std::string note;
      const Distribution d = make_distribution(dist, risk, &note);
      const OracleValue v = true_value_oracle(d, risk);
      std::ostringstream text;
      if (o.format == "json") {
        json j{{"dist", distribution_name(d)}, {"theta0", v.theta0}, {"u_star", v.u_star},
               {"mean", distribution_mean(d)}, {"stddev", distribution_stddev(d)}};
        if (!note.empty()) j["note"] = note;
        text << j.dump(2) << '\n';
      } else {
        if (!note.empty()) text << "# " << note << '\n';
        text << "theta0,u_star\n" << format_double(v.theta0) << ',' << format_double(v.u_star) << '\n';
      }
      emit(o, text.str(), out);
      return 0;
    }

    if (study->parsed()) {
      ExperimentConfig config;
      std::string note;
      if (!config_path.empty()) config = load_config(config_path);
      auto given = [&](const char* flag) { return study->count(flag) > 0; };
      if (config_path.empty() || given("--alpha") || given("--q")) {
        const HigherOrderInverse base =
            config_path.empty() ? HigherOrderInverse{} : std::get<HigherOrderInverse>(config.risk.family);
        config.risk = hor_spec(given("--alpha") ? study_alpha : base.alpha, given("--q") ? study_q : base.q);
      }
      if (config_path.empty() || given("--dist") || given("--mean") || given("--scale") || given("--df")) {
        config.dist = make_distribution(study_dist, config.risk, &note);
      }
      if (config_path.empty() || given("--n")) config.sample_sizes = parse_sizes(sizes_text);
      if (config_path.empty() || given("--reps")) config.replications = reps;
      if (config_path.empty() || given("--estimators")) config.estimators = parse_estimators(estimators_text);
      if (config_path.empty() || given("--seed")) config.master_seed = study_seed;
      if (config_path.empty() || given("--opt-tol")) config.opt_tol = opt_tol;
      BiasReport report = run_bias_study(config);
      if (!note.empty()) report.notes.push_back(note);
      std::ostringstream text;
      if (o.format == "json") {
        text << report_to_json(report) << '\n';
      } else {
        write_csv(report.rows, text);
      }
      emit(o, text.str(), out);
      return 0;
    }

    if (repro->parsed()) {
      const ReproFixture fixture = which == "normal" ? normal_fixture(repro_reps, repro_seed)
                                                     : t_fixture(repro_reps, repro_seed);
      emit(o, format_comparison(run_repro(fixture)), out);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 1;
}

}  // namespace crisk
