#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crisk/backend.hpp"
#include "crisk/risk.hpp"
#include "crisk/sample.hpp"

namespace crisk {

/// Normal with the given mean and standard deviation.
struct Normal {
  double mean = 10.0;
  double scale = 1.7320508075688772;
};

/// Standard t with `df` degrees of freedom, shifted by `target_mean` (never rescaled).
struct ShiftedT {
  double df = 60.0;
  double target_mean = 10.0;
};

struct PointMass {
  double value = 0.0;
};

using Distribution = std::variant<Normal, ShiftedT, PointMass>;

void validate(const Distribution& dist);
/// "normal", "t" or "point".
std::string distribution_name(const Distribution& dist);
std::optional<double> distribution_df(const Distribution& dist);
double distribution_mean(const Distribution& dist);
double distribution_stddev(const Distribution& dist);

/// Stream seed for replication r at sample size n; independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t r) noexcept;

Sample sample_generator(const Distribution& dist, std::size_t n, std::uint64_t seed);

struct OracleValue {
  double theta0 = 0.0;
  double u_star = 0.0;
};

/// Population version of the higher-order measure by adaptive quadrature inside golden-section search.
OracleValue true_value_oracle(const Distribution& dist, const RiskSpec& risk);

/// Both readings of a printed Normal(mean, s) and the one closer to the reference pair.
struct ScaleResolution {
  OracleValue as_stddev;    // s is the standard deviation
  OracleValue as_variance;  // s is the variance
  bool variance_convention = false;
  double stddev = 0.0;
  std::string note;
};

ScaleResolution resolve_normal_scale(double mean, double printed, const RiskSpec& risk, double theta0_ref,
                                     double u_star_ref);

struct ExperimentConfig {
  Distribution dist = Normal{};
  std::vector<std::size_t> sample_sizes{100, 200, 500};
  std::size_t replications = 500;
  std::vector<LevelBackend> estimators{EmpiricalLevel{}};
  RiskSpec risk{HigherOrderInverse{}, Orientation::Losses};
  std::uint64_t master_seed = 20240601;
  // 0: COMPOSITE_RISK_THREADS if set, otherwise hardware concurrency.
  std::size_t threads = 0;
  double opt_tol = 1e-8;
};

void validate(const ExperimentConfig& config);

struct BiasRow {
  std::string dist;
  std::optional<double> df;
  std::size_t n = 0;
  std::string estimator;
  std::string kernel;                // kernel or scaling family; empty for plugin
  std::optional<double> bandwidth;   // mean rule bandwidth across replications
  std::optional<int> resolution;
  double bias = 0.0;
  double variance = 0.0;
  double theta0 = 0.0;
  double u_star = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  bool operator==(const BiasRow&) const = default;
};

struct BiasReport {
  ExperimentConfig config;
  OracleValue oracle;
  std::vector<BiasRow> rows;  // sample size major, estimator minor
  // estimates[size index][estimator index][replication]
  std::vector<std::vector<std::vector<double>>> estimates;
  std::vector<std::string> notes;

  const BiasRow& row(std::size_t n, const std::string& estimator) const;
};

/// theta estimate for one sample with the given backend applied to the inner stage.
struct Estimate {
  double theta = 0.0;
  double u_star = 0.0;
  std::optional<double> bandwidth;
  std::optional<int> resolution;
};

Estimate estimate_risk(const Sample& sample, const RiskSpec& risk, const LevelBackend& backend, double tol = 1e-8);

/// Paired Monte Carlo study: every estimator sees the same sample in a replication.
/// Any estimator failure aborts the study by rethrowing.
BiasReport run_bias_study(const ExperimentConfig& config);

/// Worker count from COMPOSITE_RISK_THREADS, falling back to hardware concurrency.
std::size_t default_thread_count();

}  // namespace crisk
