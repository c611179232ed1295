#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "orient/forward.hpp"
#include "orient/priors.hpp"
#include "orient/so3.hpp"

namespace orient {

/// L candidate rotations with their precomputed templates
/// x_l = Pi(g_l^-1 . vbar), one per column of `templates` (d x L).
/// Immutable after construction and shared read-only across estimates.
struct CandidateSet {
  std::vector<Rotation> rotations;
  Eigen::MatrixXd templates;
  Eigen::VectorXd template_sq_norms;
  RotationPrior prior;
  std::uint64_t seed = 0;

  std::size_t size() const { return rotations.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(templates.rows()); }

  /// Draws L rotations from `prior` with `seed` and renders their templates.
  static CandidateSet build(const VolumeGrid& vbar, const RotationPrior& prior, std::size_t count,
                            std::uint64_t seed, bool projected,
                            Interpolation method = Interpolation::Trilinear);

  static CandidateSet from_rotations(const VolumeGrid& vbar, std::vector<Rotation> rotations, bool projected,
                                     Interpolation method = Interpolation::Trilinear);

  /// Throws std::invalid_argument when the counts disagree or L == 0.
  static CandidateSet from_templates(std::vector<Rotation> rotations, Eigen::MatrixXd templates);
};

}  // namespace orient
