#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "orient/forward.hpp"
#include "orient/group_action.hpp"

namespace orient {

enum class Assignment { SoftEm, MmseAlign, HardMap };

Assignment parse_assignment(const std::string& s);
std::string to_string(Assignment a);

struct ReconstructionConfig {
  Assignment assignment = Assignment::MmseAlign;
  int max_iters = 100;
  double rel_tol = 1e-4;
  Interpolation interpolation = Interpolation::Trilinear;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for max_iters < 1 or rel_tol <= 0.
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double rel_change = 0.0;  ///< ||V_{t+1} - V_t|| / ||V_t||
  std::optional<double> pcc_truth;
  std::optional<double> pcc_template;
};

struct ReconstructionTrace {
  std::vector<IterationRecord> records;
  bool converged = false;

  /// One JSON object per line: iter, rel_change, pcc_truth, pcc_template
  /// (null when undefined).
  std::string to_jsonl() const;
};

struct ReconstructionResult {
  std::vector<double> estimate;
  ReconstructionTrace trace;
};

/// Stacks observation vectors as the columns of a d x M matrix. Throws
/// DimensionMismatch when lengths differ.
Eigen::MatrixXd stack_observations(std::span<const Observation> obs);

/// (1/M) sum_i sum_l p_i(l) (g_l . y_i): the soft-assignment M-step.
std::vector<double> em_step_soft(const Eigen::MatrixXd& observations, std::span<const double> current,
                                 const GroupAction& action, const NoiseModel& noise);

/// (1/M) sum_i (g_MMSE,i . y_i) with g_MMSE,i the rounded posterior mean
/// against `current`.
std::vector<double> em_step_mmse(const Eigen::MatrixXd& observations, std::span<const double> current,
                                 const GroupAction& action, const NoiseModel& noise);

/// (1/M) sum_i (g_MAP,i . y_i).
std::vector<double> hard_step(const Eigen::MatrixXd& observations, std::span<const double> current,
                              const GroupAction& action);

/// Index of the best-matching candidate for every observation.
std::vector<std::size_t> hard_assignments(const Eigen::MatrixXd& observations, std::span<const double> current,
                                          const GroupAction& action);

/// Posterior weights of every observation against `current`.
std::vector<PosteriorWeights> soft_assignments(const Eigen::MatrixXd& observations, std::span<const double> current,
                                               const GroupAction& action, const NoiseModel& noise);

/// M-step for fixed posterior weights (soft form).
std::vector<double> soft_update(const Eigen::MatrixXd& observations, std::span<const PosteriorWeights> weights,
                                const GroupAction& action);

/// M-step for fixed hard assignments.
std::vector<double> hard_update(const Eigen::MatrixXd& observations, std::span<const std::size_t> assignment,
                                const GroupAction& action);

/// M-step aligning each observation by its rounded posterior mean.
std::vector<double> mmse_update(const Eigen::MatrixXd& observations, std::span<const PosteriorWeights> weights,
                                const GroupAction& action);

std::vector<double> run_step(Assignment mode, const Eigen::MatrixXd& observations, std::span<const double> current,
                             const GroupAction& action, const NoiseModel& noise);

/// Iterates the configured step from `initial` until the relative change
/// drops below rel_tol or max_iters steps were taken. `truth`, when given,
/// feeds the per-iteration pcc_truth column; pcc_template is measured against
/// `initial`.
ReconstructionResult run_reconstruction(const Eigen::MatrixXd& observations, std::span<const double> initial,
                                        const GroupAction& action, const NoiseModel& noise,
                                        const ReconstructionConfig& cfg,
                                        std::optional<std::span<const double>> truth = std::nullopt);

/// Pearson correlation over all coordinates. Throws DimensionMismatch or
/// ZeroVariance.
double pcc(std::span<const double> a, std::span<const double> b);

}  // namespace orient
