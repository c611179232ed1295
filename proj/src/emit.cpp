#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "orient/errors.hpp"
#include "orient/experiment.hpp"
#include "orient/volume_io.hpp"

namespace orient {

namespace {

namespace fs = std::filesystem;

nlohmann::ordered_json json_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double double_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw std::invalid_argument("expected a number");
}

double parse_double(const std::string& field) {
  std::size_t used = 0;
  const double v = std::stod(field, &used);
  if (used != field.size()) throw std::invalid_argument("bad number '" + field + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& field) {
  if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("bad count '" + field + "'");
  }
  return std::stoull(field);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw FileError("write failed: " + path.string());
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header() { return "experiment,seed,sigma,snr,L,estimator,metric_mean,metric_se,trials"; }

std::string to_csv(const std::vector<ResultRecord>& records) {
  std::string out = csv_header() + "\n";
  for (const ResultRecord& r : records) {
    out += r.experiment + "," + std::to_string(r.seed) + "," + format_double(r.sigma) + "," + format_double(r.snr) +
           "," + std::to_string(r.grid_size) + "," + r.estimator + "," + format_double(r.metric_mean) + "," +
           format_double(r.metric_se) + "," + std::to_string(r.trials) + "\n";
  }
  return out;
}

std::vector<ResultRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw std::invalid_argument("missing or wrong CSV header");
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw std::invalid_argument("CSV row needs 9 fields: " + line);
    ResultRecord r;
    r.experiment = f[0];
    r.seed = parse_unsigned(f[1]);
    r.sigma = parse_double(f[2]);
    r.snr = parse_double(f[3]);
    r.grid_size = parse_unsigned(f[4]);
    r.estimator = f[5];
    r.metric_mean = parse_double(f[6]);
    r.metric_se = parse_double(f[7]);
    r.trials = parse_unsigned(f[8]);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::ordered_json to_json(const ResultRecord& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["sigma"] = json_double(r.sigma);
  j["snr"] = json_double(r.snr);
  j["L"] = r.grid_size;
  j["estimator"] = r.estimator;
  j["metric_mean"] = json_double(r.metric_mean);
  j["metric_se"] = json_double(r.metric_se);
  j["trials"] = r.trials;
  return j;
}

ResultRecord record_from_json(const nlohmann::json& j) {
  ResultRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.sigma = double_from_json(j.at("sigma"));
  r.snr = double_from_json(j.at("snr"));
  r.grid_size = j.at("L").get<std::size_t>();
  r.estimator = j.at("estimator").get<std::string>();
  r.metric_mean = double_from_json(j.at("metric_mean"));
  r.metric_se = double_from_json(j.at("metric_se"));
  r.trials = j.at("trials").get<std::size_t>();
  return r;
}

void emit_csv(const std::vector<ResultRecord>& records, const fs::path& path) { write_text(path, to_csv(records)); }

void emit_json(const ExperimentConfig& cfg, const std::vector<ResultRecord>& records, const fs::path& path) {
  nlohmann::ordered_json j;
  j["config"] = cfg.to_json();
  j["records"] = nlohmann::ordered_json::array();
  for (const ResultRecord& r : records) j["records"].push_back(to_json(r));
  write_text(path, j.dump(2) + "\n");
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out, const fs::path& dir) {
  try {
    fs::create_directories(dir / "volumes");
    fs::create_directories(dir / "traces");
  } catch (const fs::filesystem_error& e) {
    throw FileError("cannot create output directory " + dir.string() + ": " + e.what());
  }
  emit_csv(out.records, dir / "results.csv");
  emit_json(cfg, out.records, dir / "results.json");
  for (const NamedVolume& v : out.volumes) write_obv(v.volume, dir / "volumes" / (v.name + ".obv"));
  for (const NamedTrace& t : out.traces) write_text(dir / "traces" / (t.name + ".jsonl"), t.trace.to_jsonl());
}

}  // namespace orient
