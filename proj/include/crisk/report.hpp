#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "crisk/experiments.hpp"

namespace crisk {

inline constexpr std::string_view kCsvHeader =
    "dist,df,N,estimator,kernel,bandwidth,resolution,bias,variance,theta0,u_star,reps,seed";

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

void write_csv(const std::vector<BiasRow>& rows, std::ostream& out);
std::vector<BiasRow> read_csv(std::istream& in);

std::string report_to_json(const BiasReport& report, int indent = 2);

std::string config_to_json(const ExperimentConfig& config, int indent = 2);
ExperimentConfig config_from_json(std::string_view text);
/// Throws IoError when the file cannot be read.
ExperimentConfig load_config(const std::string& path);

std::string risk_token(const RiskSpec& risk);

/// Headerless CSV, one observation per row, one column per dimension.
Sample read_sample_csv(std::istream& in);
Sample load_sample_csv(const std::string& path);

}  // namespace crisk
