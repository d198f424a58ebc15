#include "crisk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "crisk/error.hpp"
#include "crisk/optimize.hpp"
#include "crisk/quadrature.hpp"

namespace crisk {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const HigherOrderInverse& higher_order(const RiskSpec& risk) {
  const auto* hor = std::get_if<HigherOrderInverse>(&risk.family);
  if (!hor) fail(ErrorKind::BadParameters, "the bias study needs a higher-order inverse risk spec");
  validate(*hor);
  return *hor;
}

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void validate(const Distribution& dist) {
  if (const auto* n = std::get_if<Normal>(&dist)) {
    if (!(n->scale > 0.0) || !std::isfinite(n->mean)) fail(ErrorKind::BadParameters, "normal needs scale > 0");
  } else if (const auto* t = std::get_if<ShiftedT>(&dist)) {
    if (!(t->df > 2.0) || !std::isfinite(t->target_mean)) fail(ErrorKind::BadParameters, "t needs df > 2");
  } else if (!std::isfinite(std::get<PointMass>(dist).value)) {
    fail(ErrorKind::BadParameters, "point mass needs a finite location");
  }
}

std::string distribution_name(const Distribution& dist) {
  if (std::holds_alternative<Normal>(dist)) return "normal";
  if (std::holds_alternative<ShiftedT>(dist)) return "t";
  return "point";
}

std::optional<double> distribution_df(const Distribution& dist) {
  if (const auto* t = std::get_if<ShiftedT>(&dist)) return t->df;
  return std::nullopt;
}

double distribution_mean(const Distribution& dist) {
  if (const auto* n = std::get_if<Normal>(&dist)) return n->mean;
  if (const auto* t = std::get_if<ShiftedT>(&dist)) return t->target_mean;
  return std::get<PointMass>(dist).value;
}

double distribution_stddev(const Distribution& dist) {
  if (const auto* n = std::get_if<Normal>(&dist)) return n->scale;
  if (const auto* t = std::get_if<ShiftedT>(&dist)) return std::sqrt(t->df / (t->df - 2.0));
  return 0.0;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t r) noexcept {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ n);
  return splitmix64(s ^ (r * 0xd1342543de82ef95ULL));
}

Sample sample_generator(const Distribution& dist, std::size_t n, std::uint64_t seed) {
  validate(dist);
  if (n == 0) fail(ErrorKind::BadParameters, "sample size must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<double> values(n);
  if (const auto* nd = std::get_if<Normal>(&dist)) {
    std::normal_distribution<double> draw(nd->mean, nd->scale);
    for (double& v : values) v = draw(rng);
  } else if (const auto* t = std::get_if<ShiftedT>(&dist)) {
    std::student_t_distribution<double> draw(t->df);
    for (double& v : values) v = draw(rng) + t->target_mean;
  } else {
    std::fill(values.begin(), values.end(), std::get<PointMass>(dist).value);
  }
  return Sample::scalar(std::move(values));
}

OracleValue true_value_oracle(const Distribution& dist, const RiskSpec& risk) {
  validate(dist);
  const HigherOrderInverse& hor = higher_order(risk);
  const double sign = risk.orientation == Orientation::Losses ? 1.0 : -1.0;
  // Normal and t are symmetric about their centre, so the loss -X has the same law shifted to -centre.
  const double centre = sign * distribution_mean(dist);
  if (std::holds_alternative<PointMass>(dist)) return {centre, centre};

  std::function<double(double)> pdf;
  if (const auto* nd = std::get_if<Normal>(&dist)) {
    const double s = nd->scale;
    pdf = [=](double x) {
      const double z = (x - centre) / s;
      return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * M_PI));
    };
  } else {
    const double nu = std::get<ShiftedT>(dist).df;
    const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * M_PI);
    pdf = [=](double x) {
      const double z = x - centre;
      return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu));
    };
  }
  QuadratureOptions quad;
  quad.abs_tol = 1e-10;
  quad.rel_tol = 1e-12;
  const double q = hor.q;
  const double inv_alpha = 1.0 / hor.alpha;
  const double kappa = hor.kappa;
  auto measure = [&](double u) {
    const double tail = integrate_upper_tail([&](double x) { return std::pow(x - u, q) * pdf(x); }, u, quad);
    return u + inv_alpha * std::pow(std::max(tail, 0.0), 1.0 / q);
  };
  const double sd = distribution_stddev(dist);
  const ScalarMinimum best = minimize_scalar(measure, {centre - sd, centre + sd / hor.alpha, 1e-8});
  return {(1.0 - kappa) * centre + kappa * best.value, best.u_star};
}

ScaleResolution resolve_normal_scale(double mean, double printed, const RiskSpec& risk, double theta0_ref,
                                     double u_star_ref) {
  if (!(printed > 0.0)) fail(ErrorKind::BadParameters, "printed scale must be positive");
  ScaleResolution res;
  res.as_stddev = true_value_oracle(Normal{mean, printed}, risk);
  res.as_variance = true_value_oracle(Normal{mean, std::sqrt(printed)}, risk);
  auto distance = [&](const OracleValue& v) {
    return std::max(std::abs(v.theta0 - theta0_ref), std::abs(v.u_star - u_star_ref));
  };
  res.variance_convention = distance(res.as_variance) < distance(res.as_stddev);
  res.stddev = res.variance_convention ? std::sqrt(printed) : printed;
  res.note = std::string("scale convention: ") + (res.variance_convention ? "variance" : "standard deviation") +
             " (sd reading theta0=" + std::to_string(res.as_stddev.theta0) +
             ", variance reading theta0=" + std::to_string(res.as_variance.theta0) + ")";
  return res;
}

void validate(const ExperimentConfig& config) {
  validate(config.dist);
  higher_order(config.risk);
  if (config.replications < 2) fail(ErrorKind::BadParameters, "replications must be at least 2");
  if (config.sample_sizes.empty()) fail(ErrorKind::BadParameters, "no sample sizes given");
  for (std::size_t n : config.sample_sizes) {
    if (n < 2) fail(ErrorKind::BadParameters, "sample sizes must be at least 2");
  }
  if (config.estimators.empty()) fail(ErrorKind::BadParameters, "no estimators given");
  if (!(config.opt_tol > 0.0)) fail(ErrorKind::BadParameters, "optimizer tolerance must be positive");
}

const BiasRow& BiasReport::row(std::size_t n, const std::string& estimator) const {
  for (const BiasRow& r : rows) {
    if (r.n == n && r.estimator == estimator) return r;
  }
  fail(ErrorKind::BadParameters, "no row for N=" + std::to_string(n) + " estimator " + estimator);
}

Estimate estimate_risk(const Sample& sample, const RiskSpec& risk, const LevelBackend& backend, double tol) {
  const HigherOrderInverse& hor = higher_order(risk);
  const CompositeChain chain = higher_order_risk_objective(risk);
  const PreparedBackend prepared(ExpectationBackend::smoothed_at(chain.levels(), 1, backend), sample);
  Sample loss = risk.orientation == Orientation::Losses ? sample : sample.scaled(-1.0);
  const ScalarMinimum best = minimize_chain(chain, prepared, sample, higher_order_bracket(loss, hor.alpha, tol));
  return {best.value, best.u_star, prepared.bandwidth(1), prepared.resolution(1)};
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("COMPOSITE_RISK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BiasReport run_bias_study(const ExperimentConfig& config) {
  validate(config);
  BiasReport report;
  report.config = config;
  report.oracle = true_value_oracle(config.dist, config.risk);
  report.notes.push_back("paired sampling: every estimator sees the same sample within a replication");
  report.notes.push_back("variance: unbiased sample variance across replications");

  const std::size_t n_est = config.estimators.size();
  const std::size_t reps = config.replications;
  const std::size_t threads = std::max<std::size_t>(1, config.threads ? config.threads : default_thread_count());

  for (std::size_t n : config.sample_sizes) {
    std::vector<Estimate> buffer(reps * n_est);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr first_error;
    std::size_t first_error_rep = reps;
    std::mutex error_mutex;

    auto worker = [&] {
      for (;;) {
        const std::size_t r = next.fetch_add(1);
        if (r >= reps || abort.load()) return;
        try {
          const Sample sample = sample_generator(config.dist, n, derive_seed(config.master_seed, n, r));
          for (std::size_t e = 0; e < n_est; ++e) {
            buffer[r * n_est + e] = estimate_risk(sample, config.risk, config.estimators[e], config.opt_tol);
          }
        } catch (...) {
          std::lock_guard lock(error_mutex);
          // Keep the lowest failing replication so the diagnostic does not depend on scheduling.
          if (r < first_error_rep) {
            first_error_rep = r;
            first_error = std::current_exception();
          }
          abort.store(true);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(threads, reps); ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<std::vector<double>> per_estimator(n_est, std::vector<double>(reps));
    for (std::size_t e = 0; e < n_est; ++e) {
      KahanSum total;
      KahanSum h_total;
      bool has_h = false;
      for (std::size_t r = 0; r < reps; ++r) {
        const Estimate& est = buffer[r * n_est + e];
        per_estimator[e][r] = est.theta;
        total.add(est.theta);
        if (est.bandwidth) {
          has_h = true;
          h_total.add(*est.bandwidth);
        }
      }
      const double mean = total.sum / static_cast<double>(reps);
      KahanSum sq;
      for (std::size_t r = 0; r < reps; ++r) {
        const double d = per_estimator[e][r] - mean;
        sq.add(d * d);
      }
      BiasRow row;
      row.dist = distribution_name(config.dist);
      row.df = distribution_df(config.dist);
      row.n = n;
      row.estimator = backend_token(config.estimators[e]);
      if (const auto* k = std::get_if<KernelLevel>(&config.estimators[e])) {
        row.kernel = std::string(to_string(k->family));
      }
      if (const auto* w = std::get_if<WaveletLevel>(&config.estimators[e])) row.kernel = std::string(to_string(w->family));
      if (has_h) row.bandwidth = h_total.sum / static_cast<double>(reps);
      if (const auto* k = std::get_if<KernelLevel>(&config.estimators[e]); k && k->bandwidth) row.bandwidth = k->bandwidth;
      row.resolution = buffer[e].resolution;
      row.bias = mean - report.oracle.theta0;
      row.variance = sq.sum / static_cast<double>(reps - 1);
      row.theta0 = report.oracle.theta0;
      row.u_star = report.oracle.u_star;
      row.reps = reps;
      row.seed = config.master_seed;
      report.rows.push_back(std::move(row));
    }
    report.estimates.push_back(std::move(per_estimator));
  }
  return report;
}

}  // namespace crisk
