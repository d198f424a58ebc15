#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crisk/experiments.hpp"

namespace crisk {

/// One printed (bias, variance) pair of a published table.
struct PublishedEntry {
  std::string table;
  std::size_t n = 0;
  std::optional<double> df;
  std::string estimator;  // backend token
  double bias = 0.0;
  double variance = 0.0;
};

struct ReproFixture {
  std::string name;  // "normal" or "t"
  std::string version;
  std::vector<ExperimentConfig> configs;
  std::vector<PublishedEntry> entries;
};

inline constexpr std::uint64_t kReproSeed = 20240601;
inline constexpr double kPublishedTheta0 = 15.5163;
inline constexpr double kPublishedUStar = 14.5048;

/// Normal(10, 3) study. The printed scale is 3; which reading it is gets settled by `resolve_normal_scale`.
ReproFixture normal_fixture(std::size_t replications = 500, std::uint64_t seed = kReproSeed);
ReproFixture t_fixture(std::size_t replications = 500, std::uint64_t seed = kReproSeed);

struct EntryComparison {
  PublishedEntry published;
  double bias = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
  double bias_tolerance = 0.0;
  bool bias_ok = false;
  bool variance_ok = false;
};

struct ReproResult {
  std::string fixture;
  std::vector<BiasReport> reports;
  std::vector<EntryComparison> comparisons;
  std::vector<std::string> notes;
};

/// Bias within max(0.10, 3 standard errors); variance within 25% relative.
EntryComparison compare_entry(const PublishedEntry& published, const BiasRow& row);

ReproResult run_repro(const ReproFixture& fixture);

/// Side-by-side published versus computed columns.
std::string format_comparison(const ReproResult& result);

}  // namespace crisk
