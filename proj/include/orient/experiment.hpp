#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orient/forward.hpp"
#include "orient/priors.hpp"
#include "orient/reconstruct.hpp"

namespace orient {

enum class ExperimentKind { SnrSweep, PriorMismatch, GridSweep, Recover2d, Recover3d, EinsteinNoise };

ExperimentKind parse_experiment_kind(const std::string& s);
std::string to_string(ExperimentKind kind);

/// How the entries of ExperimentConfig::noise_levels are interpreted.
///   absolute - the noise standard deviation itself
///   relative - multiples of the RMS of the clean reference signal
///   snr      - target mean-power SNR, converted through the reference signal
enum class NoiseScale { Absolute, Relative, Snr };

struct PhantomSpec {
  PhantomKind kind = PhantomKind::AsymmetricL;
  std::size_t n = 32;
  std::uint64_t seed = 0;
  std::string path;  ///< for PhantomKind::Loaded

  bool operator==(const PhantomSpec&) const = default;
};

struct PolarSpec {
  std::size_t d_radial = 300;
  std::size_t l_angular = 30;
  std::uint64_t truth_seed = 1;
  std::uint64_t template_seed = 2;

  bool operator==(const PolarSpec&) const = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::SnrSweep;
  std::uint64_t seed = 0;
  std::vector<std::size_t> grid_sizes{300};  ///< L values
  std::size_t trials = 500;
  std::size_t observations = 1000;  ///< M, for the reconstruction experiments
  std::size_t repeats = 1;          ///< independent noise seeds per reconstruction cell

  NoiseScale noise_scale = NoiseScale::Relative;
  std::vector<double> noise_levels;

  RotationPrior truth_prior;
  std::vector<RotationPrior> estimation_priors;  ///< prior_mismatch only

  PhantomSpec phantom;           ///< ground truth volume
  PhantomSpec template_phantom;  ///< initial template for recover3d / einstein_noise
  PolarSpec polar;
  bool projected = false;
  bool polar_geometry = true;  ///< einstein_noise: polar images or volumes

  std::vector<Assignment> assignments{Assignment::MmseAlign, Assignment::HardMap};
  int max_iters = 100;
  double rel_tol = 1e-4;
  Interpolation interpolation = Interpolation::Trilinear;
  std::size_t align_samples = 1000;  ///< coarse search size for 3D aligned PCC

  std::string output = "results";

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  bool operator==(const ExperimentConfig&) const = default;
};

/// Reads a JSON config; `overrides` is merged over the file's top-level
/// fields before parsing. FileError if unreadable, ConfigError otherwise.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const nlohmann::json& overrides = nlohmann::json::object());

struct ResultRecord {
  std::string experiment;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  double snr = 0.0;
  std::size_t grid_size = 0;  ///< L; 0 on rows that summarize several L
  std::string estimator;
  double metric_mean = 0.0;
  double metric_se = 0.0;
  std::size_t trials = 0;

  bool operator==(const ResultRecord&) const = default;
};

struct NamedVolume {
  std::string name;
  VolumeGrid volume;
};

struct NamedTrace {
  std::string name;
  ReconstructionTrace trace;
};

struct ExperimentOutput {
  std::vector<ResultRecord> records;
  std::vector<NamedVolume> volumes;
  std::vector<NamedTrace> traces;
};

ExperimentOutput run_snr_sweep(const ExperimentConfig& cfg);
ExperimentOutput run_prior_mismatch(const ExperimentConfig& cfg);
ExperimentOutput run_grid_sweep(const ExperimentConfig& cfg);
ExperimentOutput run_recover2d(const ExperimentConfig& cfg);
ExperimentOutput run_recover3d(const ExperimentConfig& cfg);
ExperimentOutput run_einstein_noise(const ExperimentConfig& cfg);

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string format_double(double v);
std::string csv_header();
std::string to_csv(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> parse_csv(const std::string& text);
/// Non-finite doubles are written as the strings "inf", "-inf" and "nan".
nlohmann::ordered_json to_json(const ResultRecord& r);
ResultRecord record_from_json(const nlohmann::json& j);

void emit_csv(const std::vector<ResultRecord>& records, const std::filesystem::path& path);
void emit_json(const ExperimentConfig& cfg, const std::vector<ResultRecord>& records,
               const std::filesystem::path& path);

/// results.csv, results.json, volumes/*.obv and traces/*.jsonl under `dir`.
void write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out, const std::filesystem::path& dir);

}  // namespace orient
