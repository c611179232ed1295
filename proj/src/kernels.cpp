#include "orient/kernels.hpp"

#include <algorithm>
#include <limits>

#include "orient/errors.hpp"

namespace orient::kernels {

Eigen::MatrixXd residual_norms(const Eigen::MatrixXd& templates, const Eigen::VectorXd& template_sq_norms,
                               const Eigen::MatrixXd& observations) {
  if (templates.rows() != observations.rows()) {
    throw DimensionMismatch("observation dimension does not match templates");
  }
  const Eigen::Index count = templates.cols();
  const Eigen::Index m = observations.cols();
  Eigen::MatrixXd out(count, m);
  const Eigen::Index blocks = (m + kObservationBlock - 1) / kObservationBlock;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index first = b * kObservationBlock;
    const Eigen::Index width = std::min(kObservationBlock, m - first);
    const auto ys = observations.middleCols(first, width);
    Eigen::MatrixXd block = -2.0 * (templates.transpose() * ys);
    const Eigen::RowVectorXd y_sq = ys.colwise().squaredNorm();
    block.colwise() += template_sq_norms;
    block.rowwise() += y_sq;
    out.middleCols(first, width) = block.cwiseMax(0.0);
  }
  return out;
}

Eigen::MatrixXd residual_norms(const CandidateSet& c, const Eigen::MatrixXd& observations) {
  return residual_norms(c.templates, c.template_sq_norms, observations);
}

PosteriorWeights posterior_from_residuals(std::span<const double> residuals, double variance) {
  if (!(variance > 0.0)) throw ZeroVariance("effective noise variance is zero");
  std::vector<double> ll(residuals.size());
  const double scale = -0.5 / variance;
  for (std::size_t l = 0; l < residuals.size(); ++l) ll[l] = scale * residuals[l];
  return PosteriorWeights::from_log_likelihood(ll);
}

std::size_t argmin(std::span<const double> values) {
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < values.size(); ++l) {
    if (values[l] < best_v) {
      best_v = values[l];
      best = l;
    }
  }
  return best;
}

BatchEstimates estimate_batch(const Eigen::MatrixXd& observations, const CandidateSet& c, const NoiseModel& noise) {
  if (!noise.is_isotropic()) throw std::invalid_argument("batch estimation requires isotropic noise");
  const double variance = noise.effective_variance(0);
  if (!(variance > 0.0)) throw ZeroVariance("effective noise variance is zero");
  const Eigen::MatrixXd residuals = residual_norms(c, observations);
  const Eigen::Index m = observations.cols();
  BatchEstimates out;
  out.map.resize(static_cast<std::size_t>(m));
  out.mmse.resize(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < m; ++i) {
    std::span<const double> col(residuals.col(i).data(), static_cast<std::size_t>(residuals.rows()));
    const std::size_t best = argmin(col);
    EstimateReport map;
    map.rotation = c.rotations[best];
    map.map_index = best;
    out.map[static_cast<std::size_t>(i)] = map;
    out.mmse[static_cast<std::size_t>(i)] = mmse_from_weights(posterior_from_residuals(col, variance), c.rotations);
  }
  return out;
}

}  // namespace orient::kernels
