#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "orient/candidates.hpp"
#include "orient/forward.hpp"
#include "orient/so3.hpp"

namespace orient {

/// Normalized posterior over the L candidates: w = exp(log_w), sum w = 1.
struct PosteriorWeights {
  std::vector<double> log_w;
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  /// 1 / sum w^2, in [1, L].
  double effective_sample_size() const;

  /// Log-sum-exp normalization of unnormalized log-likelihoods.
  static PosteriorWeights from_log_likelihood(std::span<const double> log_likelihood);
  /// Weights given directly (must be nonnegative with positive sum); renormalized.
  static PosteriorWeights from_weights(std::span<const double> weights);
};

struct EstimateReport {
  Rotation rotation;
  std::optional<std::size_t> map_index;
  double effective_sample_size = 1.0;
  bool procrustes_nonunique = false;
  /// ||sum w g||_F < 1e-9: the average cancelled before rounding.
  bool degenerate_average = false;
};

/// -1/2 sum_i (y_i - x_{l,i})^2 / (tau_i^2 + sigma^2) for every candidate.
/// Throws DimensionMismatch or ZeroVariance.
std::vector<double> log_likelihoods(std::span<const double> y, const CandidateSet& c, const NoiseModel& noise);

PosteriorWeights posterior_weights(std::span<const double> y, const CandidateSet& c, const NoiseModel& noise);
PosteriorWeights posterior_weights(const Observation& y, const CandidateSet& c, const NoiseModel& noise);

/// Candidate with the smallest ||y - x_l||^2; ties go to the lowest index.
EstimateReport map_estimate(std::span<const double> y, const CandidateSet& c);
EstimateReport map_estimate(const Observation& y, const CandidateSet& c);

/// Posterior mean of the candidate matrices rounded to SO(3) by Procrustes.
EstimateReport mmse_estimate(std::span<const double> y, const CandidateSet& c, const NoiseModel& noise);
EstimateReport mmse_estimate(const Observation& y, const CandidateSet& c, const NoiseModel& noise);

/// Rounding step alone, for weights computed elsewhere.
EstimateReport mmse_from_weights(const PosteriorWeights& w, std::span<const Rotation> rotations);

/// sum_l w_l g_l, before rounding. Throws DimensionMismatch on length mismatch.
Mat3 mmse_raw_average(const PosteriorWeights& w, std::span<const Rotation> rotations);
Mat3 mmse_raw_average(const PosteriorWeights& w, const CandidateSet& c);

struct CircularMean {
  double angle = 0.0;
  double resultant = 0.0;
  bool degenerate = false;  ///< resultant length < 1e-9
};

/// atan2(sum w sin t, sum w cos t): the SO(2) rounding of the averaged 2x2
/// rotation matrix.
CircularMean mmse_so2_angle(const PosteriorWeights& w, std::span<const double> angles);

}  // namespace orient
