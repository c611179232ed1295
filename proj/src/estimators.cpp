#include "orient/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "orient/errors.hpp"

namespace orient {

double PosteriorWeights::effective_sample_size() const {
  double s = 0.0;
  for (double x : w) s += x * x;
  return 1.0 / s;
}

PosteriorWeights PosteriorWeights::from_log_likelihood(std::span<const double> log_likelihood) {
  if (log_likelihood.empty()) throw std::invalid_argument("posterior over an empty candidate set");
  const double top = *std::max_element(log_likelihood.begin(), log_likelihood.end());
  if (!std::isfinite(top)) throw std::domain_error("non-finite log-likelihood");
  PosteriorWeights p;
  p.w.resize(log_likelihood.size());
  p.log_w.resize(log_likelihood.size());
  double total = 0.0;
  for (std::size_t l = 0; l < log_likelihood.size(); ++l) {
    p.w[l] = std::exp(log_likelihood[l] - top);
    total += p.w[l];
  }
  const double log_total = std::log(total);
  for (std::size_t l = 0; l < log_likelihood.size(); ++l) {
    p.w[l] /= total;
    p.log_w[l] = log_likelihood[l] - top - log_total;
  }
  return p;
}

PosteriorWeights PosteriorWeights::from_weights(std::span<const double> weights) {
  double total = 0.0;
  for (double x : weights) {
    if (!(x >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    total += x;
  }
  if (!(total > 0.0)) throw std::invalid_argument("weights must have a positive sum");
  PosteriorWeights p;
  for (double x : weights) {
    p.w.push_back(x / total);
    p.log_w.push_back(std::log(x / total));
  }
  return p;
}

std::vector<double> log_likelihoods(std::span<const double> y, const CandidateSet& c, const NoiseModel& noise) {
  const std::size_t d = c.dim();
  if (y.size() != d) throw DimensionMismatch("observation dimension does not match templates");
  noise.validate(d);
  std::vector<double> inv_var(noise.is_isotropic() ? 1 : d);
  bool any_positive = false;
  for (std::size_t i = 0; i < inv_var.size(); ++i) {
    const double v = noise.effective_variance(i);
    any_positive = any_positive || v > 0.0;
    inv_var[i] = v > 0.0 ? 1.0 / v : std::numeric_limits<double>::infinity();
  }
  if (!any_positive) throw ZeroVariance("all effective noise variances are zero");

  std::vector<double> ll(c.size());
  for (std::size_t l = 0; l < c.size(); ++l) {
    const double* x = c.templates.col(static_cast<Eigen::Index>(l)).data();
    double acc = 0.0;
    if (inv_var.size() == 1) {
      for (std::size_t i = 0; i < d; ++i) {
        const double r = y[i] - x[i];
        acc += r * r;
      }
      acc *= inv_var[0];
    } else {
      for (std::size_t i = 0; i < d; ++i) {
        const double r = y[i] - x[i];
        // A zero-variance coordinate only contributes when it disagrees.
        if (r != 0.0) acc += r * r * inv_var[i];
      }
    }
    ll[l] = -0.5 * acc;
  }
  return ll;
}

PosteriorWeights posterior_weights(std::span<const double> y, const CandidateSet& c, const NoiseModel& noise) {
  const std::vector<double> ll = log_likelihoods(y, c, noise);
  const bool all_impossible = std::all_of(ll.begin(), ll.end(), [](double v) { return std::isinf(v); });
  if (all_impossible) throw ZeroVariance("every candidate is excluded by a zero-variance coordinate");
  return PosteriorWeights::from_log_likelihood(ll);
}

PosteriorWeights posterior_weights(const Observation& y, const CandidateSet& c, const NoiseModel& noise) {
  return posterior_weights(y.data, c, noise);
}

EstimateReport map_estimate(std::span<const double> y, const CandidateSet& c) {
  const std::size_t d = c.dim();
  if (y.size() != d) throw DimensionMismatch("observation dimension does not match templates");
  std::size_t best = 0;
  double best_r = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < c.size(); ++l) {
    const double* x = c.templates.col(static_cast<Eigen::Index>(l)).data();
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double r = y[i] - x[i];
      acc += r * r;
    }
    if (acc < best_r) {
      best_r = acc;
      best = l;
    }
  }
  EstimateReport report;
  report.rotation = c.rotations[best];
  report.map_index = best;
  return report;
}

EstimateReport map_estimate(const Observation& y, const CandidateSet& c) { return map_estimate(y.data, c); }

Mat3 mmse_raw_average(const PosteriorWeights& w, std::span<const Rotation> rotations) {
  if (w.size() != rotations.size()) throw DimensionMismatch("weights and candidates differ in length");
  Mat3 avg = Mat3::Zero();
  for (std::size_t l = 0; l < rotations.size(); ++l) {
    if (w.w[l] != 0.0) avg += w.w[l] * rotations[l].matrix();
  }
  return avg;
}

Mat3 mmse_raw_average(const PosteriorWeights& w, const CandidateSet& c) { return mmse_raw_average(w, c.rotations); }

EstimateReport mmse_from_weights(const PosteriorWeights& w, std::span<const Rotation> rotations) {
  const Mat3 avg = mmse_raw_average(w, rotations);
  const ProcrustesResult rounded = procrustes_project(avg);
  EstimateReport report;
  report.rotation = rounded.rotation;
  report.effective_sample_size = w.effective_sample_size();
  report.procrustes_nonunique = rounded.nonunique();
  report.degenerate_average = avg.norm() < 1e-9;
  return report;
}

EstimateReport mmse_estimate(std::span<const double> y, const CandidateSet& c, const NoiseModel& noise) {
  return mmse_from_weights(posterior_weights(y, c, noise), c.rotations);
}

EstimateReport mmse_estimate(const Observation& y, const CandidateSet& c, const NoiseModel& noise) {
  return mmse_estimate(y.data, c, noise);
}

CircularMean mmse_so2_angle(const PosteriorWeights& w, std::span<const double> angles) {
  if (w.size() != angles.size()) throw DimensionMismatch("weights and angles differ in length");
  double s = 0.0, co = 0.0;
  for (std::size_t l = 0; l < angles.size(); ++l) {
    if (w.w[l] == 0.0) continue;
    s += w.w[l] * std::sin(angles[l]);
    co += w.w[l] * std::cos(angles[l]);
  }
  CircularMean out;
  out.resultant = std::hypot(s, co);
  out.angle = std::atan2(s, co);
  out.degenerate = out.resultant < 1e-9;
  return out;
}

}  // namespace orient
