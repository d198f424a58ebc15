#include "crisk/repro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "crisk/error.hpp"
#include "crisk/report.hpp"

namespace crisk {
namespace {

constexpr double kBiasFloor = 0.10;
constexpr double kVarianceRel = 0.25;

std::vector<LevelBackend> tokens(std::initializer_list<const char*> names) {
  std::vector<LevelBackend> out;
  for (const char* n : names) out.push_back(parse_backend_token(n));
  return out;
}

struct Printed {
  std::size_t n;
  double bias, variance;
};

void add(std::vector<PublishedEntry>& out, const char* table, std::optional<double> df, const char* estimator,
         std::initializer_list<Printed> rows) {
  for (const Printed& p : rows) out.push_back({table, p.n, df, estimator, p.bias, p.variance});
}

}  // namespace

ReproFixture normal_fixture(std::size_t replications, std::uint64_t seed) {
  ReproFixture f;
  f.name = "normal";
  f.version = "normal-v1";
  ExperimentConfig c;
  c.dist = Normal{10.0, std::sqrt(3.0)};
  c.sample_sizes = {100, 200, 500};
  c.replications = replications;
  c.master_seed = seed;
  c.estimators = tokens({"plugin", "uniform", "epanechnikov", "gaussian", "wavelet:quadratic", "wavelet:linear"});
  f.configs.push_back(c);

  auto& e = f.entries;
  add(e, "normal-kernel", std::nullopt, "plugin", {{100, -1.1896, 0.5754}, {200, -0.7891, 0.5350}, {500, -0.3236, 0.4099}});
  add(e, "normal-kernel", std::nullopt, "uniform", {{100, -0.6095, 0.5893}, {200, -0.3930, 0.5132}, {500, -0.1655, 0.3482}});
  add(e, "normal-kernel", std::nullopt, "epanechnikov",
      {{100, -0.7254, 0.5813}, {200, -0.4852, 0.5168}, {500, -0.2164, 0.3641}});
  add(e, "normal-kernel", std::nullopt, "gaussian", {{100, -0.6095, 0.5893}, {200, -0.3930, 0.5132}, {500, -0.1655, 0.3482}});
  add(e, "normal-wavelet", std::nullopt, "wavelet:quadratic",
      {{100, -0.6430, 0.6054}, {200, -0.3728, 0.4879}, {500, -0.1016, 0.2842}});
  add(e, "normal-wavelet", std::nullopt, "plugin", {{100, -1.1668, 0.6375}, {200, -0.7677, 0.5382}, {500, -0.2996, 0.3525}});
  return f;
}

ReproFixture t_fixture(std::size_t replications, std::uint64_t seed) {
  ReproFixture f;
  f.name = "t";
  f.version = "t-v1";
  for (double df : {6.0, 8.0, 60.0}) {
    ExperimentConfig c;
    c.dist = ShiftedT{df, 10.0};
    c.sample_sizes = {100, 200, 500};
    c.replications = replications;
    c.master_seed = seed;
    c.estimators = tokens({"plugin", "uniform", "epanechnikov", "wavelet:quadratic", "wavelet:linear"});
    f.configs.push_back(c);
  }
  auto& e = f.entries;
  add(e, "t-wavelet", 6.0, "wavelet:quadratic", {{100, -1.6239, 1.3681}, {200, -1.2090, 1.4265}, {500, -0.5870, 1.9387}});
  add(e, "t-wavelet", 6.0, "plugin", {{100, -2.1477, 1.4114}, {200, -1.5892, 1.4979}, {500, -0.7453, 2.1290}});
  add(e, "t-wavelet", 8.0, "wavelet:quadratic", {{100, -1.0266, 0.9092}, {200, -0.6814, 0.9434}, {500, -0.3029, 1.0214}});
  add(e, "t-wavelet", 8.0, "plugin", {{100, -1.5532, 0.9622}, {200, -1.0694, 1.0175}, {500, -0.480, 1.1519}});
  add(e, "t-wavelet", 60.0, "wavelet:quadratic", {{100, -0.2176, 0.2182}, {200, -0.0788, 0.1745}, {500, 0.0490, 0.0935}});
  add(e, "t-wavelet", 60.0, "plugin", {{100, -0.7692, 0.2506}, {200, -0.5058, 0.2171}, {500, -0.2092, 0.1366}});

  add(e, "t-kernel", 6.0, "uniform", {{100, -1.9800, 1.3440}, {200, -1.4528, 1.5973}, {500, -0.7694, 1.6350}});
  add(e, "t-kernel", 8.0, "uniform", {{100, -1.4044, 1.2057}, {200, -0.9433, 1.2299}, {500, -0.4875, 1.0281}});
  add(e, "t-kernel", 60.0, "uniform", {{100, -0.6193, 0.2529}, {200, -0.3776, 0.2168}, {500, -0.1513, 0.1687}});
  add(e, "t-kernel", 6.0, "epanechnikov", {{100, -2.0119, 1.3370}, {200, -1.4790, 1.5954}, {500, -0.7782, 1.6435}});
  add(e, "t-kernel", 8.0, "epanechnikov", {{100, -1.4336, 1.1996}, {200, -0.9675, 1.2299}, {500, -0.4960, 1.0336}});
  add(e, "t-kernel", 60.0, "epanechnikov", {{100, -0.6436, 0.2510}, {200, -0.3979, 0.2166}, {500, -0.1606, 0.1710}});
  add(e, "t-kernel", 6.0, "plugin", {{100, -2.1343, 1.3150}, {200, -1.5649, 1.5886}, {500, -0.7952, 1.6624}});
  add(e, "t-kernel", 8.0, "plugin", {{100, -1.5452, 1.1805}, {200, -1.0468, 1.2207}, {500, -0.5126, 1.0460}});
  add(e, "t-kernel", 60.0, "plugin", {{100, -0.7367, 0.2457}, {200, -0.4642, 0.2158}, {500, -0.1789, 0.1768}});
  return f;
}

EntryComparison compare_entry(const PublishedEntry& published, const BiasRow& row) {
  EntryComparison c;
  c.published = published;
  c.bias = row.bias;
  c.variance = row.variance;
  c.standard_error = std::sqrt(row.variance / static_cast<double>(row.reps));
  c.bias_tolerance = std::max(kBiasFloor, 3.0 * c.standard_error);
  c.bias_ok = std::abs(row.bias - published.bias) <= c.bias_tolerance;
  c.variance_ok = std::abs(row.variance - published.variance) <= kVarianceRel * std::abs(published.variance);
  return c;
}

ReproResult run_repro(const ReproFixture& fixture) {
  ReproResult result;
  result.fixture = fixture.name;
  result.notes.push_back("fixture " + fixture.version);
  std::vector<ExperimentConfig> configs = fixture.configs;
  for (ExperimentConfig& c : configs) {
    if (auto* n = std::get_if<Normal>(&c.dist)) {
      const ScaleResolution scale = resolve_normal_scale(n->mean, 3.0, c.risk, kPublishedTheta0, kPublishedUStar);
      n->scale = scale.stddev;
      result.notes.push_back(scale.note);
    }
  }
  for (const ExperimentConfig& c : configs) result.reports.push_back(run_bias_study(c));
  for (const PublishedEntry& e : fixture.entries) {
    const BiasReport* match = nullptr;
    for (const BiasReport& r : result.reports) {
      if (distribution_df(r.config.dist) == e.df) match = &r;
    }
    if (!match) fail(ErrorKind::BadParameters, "fixture entry has no matching study");
    result.comparisons.push_back(compare_entry(e, match->row(e.n, e.estimator)));
  }
  for (const BiasReport& r : result.reports) {
    for (const std::string& note : r.notes) {
      if (std::find(result.notes.begin(), result.notes.end(), note) == result.notes.end()) result.notes.push_back(note);
    }
  }
  return result;
}

std::string format_comparison(const ReproResult& result) {
  std::ostringstream out;
  for (const std::string& note : result.notes) out << "# " << note << '\n';
  for (const BiasReport& r : result.reports) {
    out << "# " << distribution_name(r.config.dist);
    if (auto df = distribution_df(r.config.dist)) out << " df=" << format_double(*df);
    out << " theta0=" << format_double(r.oracle.theta0) << " u_star=" << format_double(r.oracle.u_star) << '\n';
  }
  char line[256];
  std::snprintf(line, sizeof line, "%-15s %4s %4s %-18s %9s %9s %7s %9s %9s  %s\n", "table", "df", "N", "estimator",
                "bias_pub", "bias", "tol", "var_pub", "var", "check");
  out << line;
  for (const EntryComparison& c : result.comparisons) {
    const std::string df = c.published.df ? format_double(*c.published.df) : "-";
    const char* verdict = c.bias_ok && c.variance_ok ? "ok" : !c.bias_ok && !c.variance_ok ? "bias,var off" :
                          !c.bias_ok ? "bias off" : "var off";
    std::snprintf(line, sizeof line, "%-15s %4s %4zu %-18s %9.4f %9.4f %7.4f %9.4f %9.4f  %s\n",
                  c.published.table.c_str(), df.c_str(), c.published.n, c.published.estimator.c_str(),
                  c.published.bias, c.bias, c.bias_tolerance, c.published.variance, c.variance, verdict);
    out << line;
  }
  out << "# computed rows\n";
  for (const BiasReport& r : result.reports) write_csv(r.rows, out);
  return out.str();
}

}  // namespace crisk
