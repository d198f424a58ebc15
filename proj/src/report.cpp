#include "crisk/report.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "crisk/error.hpp"

namespace crisk {
namespace {

using nlohmann::json;

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view text, const char* what) {
  text = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorKind::IoError, std::string("cannot parse ") + what + " from '" + std::string(text) + "'");
  }
  return v;
}

json distribution_json(const Distribution& dist) {
  if (const auto* n = std::get_if<Normal>(&dist)) return {{"family", "normal"}, {"mean", n->mean}, {"scale", n->scale}};
  if (const auto* t = std::get_if<ShiftedT>(&dist)) {
    return {{"family", "t"}, {"df", t->df}, {"target_mean", t->target_mean}};
  }
  return {{"family", "point"}, {"value", std::get<PointMass>(dist).value}};
}

json row_json(const BiasRow& r) {
  json j{{"dist", r.dist}, {"N", r.n}, {"estimator", r.estimator}, {"kernel", r.kernel}, {"bias", r.bias},
         {"variance", r.variance}, {"theta0", r.theta0}, {"u_star", r.u_star}, {"reps", r.reps}, {"seed", r.seed}};
  j["df"] = r.df ? json(*r.df) : json(nullptr);
  j["bandwidth"] = r.bandwidth ? json(*r.bandwidth) : json(nullptr);
  j["resolution"] = r.resolution ? json(*r.resolution) : json(nullptr);
  return j;
}

json config_json(const ExperimentConfig& c) {
  json est = json::array();
  for (const LevelBackend& b : c.estimators) est.push_back(backend_token(b));
  return {{"dist", distribution_json(c.dist)}, {"sample_sizes", c.sample_sizes}, {"replications", c.replications},
          {"estimators", est}, {"risk", risk_token(c.risk)}, {"master_seed", c.master_seed},
          {"threads", c.threads}, {"opt_tol", c.opt_tol}};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(const std::vector<BiasRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const BiasRow& r : rows) {
    out << r.dist << ',' << (r.df ? format_double(*r.df) : "") << ',' << r.n << ',' << r.estimator << ','
        << r.kernel << ',' << (r.bandwidth ? format_double(*r.bandwidth) : "") << ','
        << (r.resolution ? std::to_string(*r.resolution) : "") << ',' << format_double(r.bias) << ','
        << format_double(r.variance) << ',' << format_double(r.theta0) << ',' << format_double(r.u_star) << ','
        << r.reps << ',' << r.seed << '\n';
  }
}

std::vector<BiasRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) fail(ErrorKind::IoError, "missing or unexpected CSV header");
  std::vector<BiasRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(trim(line), ',');
    if (f.size() != 13) fail(ErrorKind::IoError, "expected 13 CSV fields, got " + std::to_string(f.size()));
    BiasRow r;
    r.dist = f[0];
    if (!trim(f[1]).empty()) r.df = parse_number<double>(f[1], "df");
    r.n = parse_number<std::size_t>(f[2], "N");
    r.estimator = f[3];
    r.kernel = f[4];
    if (!trim(f[5]).empty()) r.bandwidth = parse_number<double>(f[5], "bandwidth");
    if (!trim(f[6]).empty()) r.resolution = parse_number<int>(f[6], "resolution");
    r.bias = parse_number<double>(f[7], "bias");
    r.variance = parse_number<double>(f[8], "variance");
    r.theta0 = parse_number<double>(f[9], "theta0");
    r.u_star = parse_number<double>(f[10], "u_star");
    r.reps = parse_number<std::size_t>(f[11], "reps");
    r.seed = parse_number<std::uint64_t>(f[12], "seed");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string report_to_json(const BiasReport& report, int indent) {
  json rows = json::array();
  for (const BiasRow& r : report.rows) rows.push_back(row_json(r));
  json j{{"config", config_json(report.config)},
         {"theta0", report.oracle.theta0},
         {"u_star", report.oracle.u_star},
         {"rows", rows},
         {"notes", report.notes}};
  return j.dump(indent);
}

std::string config_to_json(const ExperimentConfig& config, int indent) { return config_json(config).dump(indent); }

std::string risk_token(const RiskSpec& risk) {
  if (const auto* m = std::get_if<MeanSemiDeviation>(&risk.family)) {
    return "msd:p=" + format_double(m->p) + ",kappa=" + format_double(m->kappa);
  }
  const auto& h = std::get<HigherOrderInverse>(risk.family);
  std::string s = "hor:q=" + format_double(h.q) + ",alpha=" + format_double(h.alpha);
  if (h.kappa != 1.0) s += ",kappa=" + format_double(h.kappa);
  return s;
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::IoError, std::string("invalid config JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("dist")) {
      const json& d = j.at("dist");
      const std::string family = d.value("family", "normal");
      if (family == "normal") {
        c.dist = Normal{d.value("mean", 10.0), d.value("scale", Normal{}.scale)};
      } else if (family == "t") {
        c.dist = ShiftedT{d.value("df", 60.0), d.value("target_mean", 10.0)};
      } else if (family == "point") {
        c.dist = PointMass{d.value("value", 0.0)};
      } else {
        fail(ErrorKind::BadParameters, "unknown distribution family '" + family + "'");
      }
    }
    if (j.contains("sample_sizes")) c.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    if (j.contains("replications")) c.replications = j.at("replications").get<std::size_t>();
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const std::string& tok : j.at("estimators").get<std::vector<std::string>>()) {
        c.estimators.push_back(parse_backend_token(tok));
      }
    }
    if (j.contains("risk")) c.risk = parse_risk_token(j.at("risk").get<std::string>());
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
    if (j.contains("opt_tol")) c.opt_tol = j.at("opt_tol").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::IoError, std::string("malformed config field: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open config file '" + path + "': file not found or unreadable");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

Sample read_sample_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(trim(line), ',');
    if (dim == 0) dim = f.size();
    if (f.size() != dim) {
      fail(ErrorKind::DimensionMismatch, "row " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                                             " columns, expected " + std::to_string(dim));
    }
    for (const std::string& s : f) values.push_back(parse_number<double>(s, "observation"));
  }
  if (values.empty()) fail(ErrorKind::IoError, "sample file contains no observations");
  return Sample(std::move(values), dim);
}

Sample load_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open data file '" + path + "'");
  return read_sample_csv(in);
}

}  // namespace crisk
