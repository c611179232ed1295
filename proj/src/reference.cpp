#include <span>

#include "interp.hpp"
#include "orient/errors.hpp"
#include "orient/kernels.hpp"

namespace orient::reference {

Eigen::MatrixXd residual_norms(const Eigen::MatrixXd& templates, const Eigen::MatrixXd& observations) {
  if (templates.rows() != observations.rows()) {
    throw DimensionMismatch("observation dimension does not match templates");
  }
  Eigen::MatrixXd out(templates.cols(), observations.cols());
  for (Eigen::Index i = 0; i < observations.cols(); ++i) {
    for (Eigen::Index l = 0; l < templates.cols(); ++l) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < templates.rows(); ++k) {
        const double r = observations(k, i) - templates(k, l);
        acc += r * r;
      }
      out(l, i) = acc;
    }
  }
  return out;
}

VolumeGrid rotate_volume(const VolumeGrid& v, const Rotation& g, Interpolation method) {
  const std::size_t n = v.n();
  const long nl = static_cast<long>(n);
  const double c = v.center();
  const Mat3& m = g.matrix();
  VolumeGrid out(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) - c, y = static_cast<double>(j) - c,
                     z = static_cast<double>(k) - c;
        const double px = m(0, 0) * x + m(0, 1) * y + m(0, 2) * z + c;
        const double py = m(1, 0) * x + m(1, 1) * y + m(1, 2) * z + c;
        const double pz = m(2, 0) * x + m(2, 1) * y + m(2, 2) * z + c;
        out.at(i, j, k) = method == Interpolation::Tricubic ? detail::sample_tricubic(v.data(), nl, px, py, pz)
                                                            : detail::sample_trilinear(v.data(), nl, px, py, pz);
      }
  return out;
}

kernels::BatchEstimates estimate_batch(const Eigen::MatrixXd& observations, const CandidateSet& c,
                                       const NoiseModel& noise) {
  kernels::BatchEstimates out;
  for (Eigen::Index i = 0; i < observations.cols(); ++i) {
    std::span<const double> y(observations.col(i).data(), static_cast<std::size_t>(observations.rows()));
    out.map.push_back(map_estimate(y, c));
    out.mmse.push_back(mmse_estimate(y, c, noise));
  }
  return out;
}

}  // namespace orient::reference
