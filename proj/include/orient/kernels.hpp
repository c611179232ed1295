#pragma once

// Parallel batch kernels and their serial reference counterparts.
//
// Parallel loops run over fixed-size blocks of observations (or candidates)
// whose boundaries do not depend on the thread count, and every reduction is
// performed in block order, so results are bit-identical for any number of
// OpenMP threads.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "orient/candidates.hpp"
#include "orient/estimators.hpp"
#include "orient/forward.hpp"

namespace orient::kernels {

inline constexpr Eigen::Index kObservationBlock = 32;

/// R(l, i) = ||y_i - x_l||^2 through ||x||^2 + ||y||^2 - 2 x.y, clamped at 0.
/// `observations` is d x M.
Eigen::MatrixXd residual_norms(const Eigen::MatrixXd& templates, const Eigen::VectorXd& template_sq_norms,
                               const Eigen::MatrixXd& observations);
Eigen::MatrixXd residual_norms(const CandidateSet& c, const Eigen::MatrixXd& observations);

/// Column-wise posterior for isotropic effective variance.
PosteriorWeights posterior_from_residuals(std::span<const double> residuals, double variance);

/// Lowest index of the column minimum.
std::size_t argmin(std::span<const double> values);

struct BatchEstimates {
  std::vector<EstimateReport> map;
  std::vector<EstimateReport> mmse;
};

/// MAP and MMSE estimates for every column of `observations` against one
/// shared candidate set, isotropic noise only.
BatchEstimates estimate_batch(const Eigen::MatrixXd& observations, const CandidateSet& c, const NoiseModel& noise);

}  // namespace orient::kernels

namespace orient::reference {

/// Direct double loop, no expansion: the oracle for kernels::residual_norms.
Eigen::MatrixXd residual_norms(const Eigen::MatrixXd& templates, const Eigen::MatrixXd& observations);

/// Single-threaded voxel loop with the same samplers as orient::rotate_volume.
VolumeGrid rotate_volume(const VolumeGrid& v, const Rotation& g, Interpolation method = Interpolation::Trilinear);

/// One estimate at a time through the single-observation API.
kernels::BatchEstimates estimate_batch(const Eigen::MatrixXd& observations, const CandidateSet& c,
                                       const NoiseModel& noise);

}  // namespace orient::reference
