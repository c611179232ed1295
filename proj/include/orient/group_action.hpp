#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "orient/estimators.hpp"
#include "orient/forward.hpp"
#include "orient/so3.hpp"

namespace orient {

/// Finite set of candidate group elements acting on flat signals of a fixed
/// dimension. Observations of a signal v at candidate l look like
/// template(v, l); align_candidate undoes that action.
class GroupAction {
 public:
  virtual ~GroupAction() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t size() const = 0;

  /// d x L matrix whose column l is the signal seen at candidate l.
  virtual Eigen::MatrixXd templates(std::span<const double> v) const = 0;

  /// out = g_l . y
  virtual void align_candidate(std::span<const double> y, std::size_t l, std::span<double> out) const = 0;

  /// out = g_MMSE . y with g_MMSE the rounded posterior mean. Returns true
  /// when the rounding was degenerate (non-unique or cancelled average).
  virtual bool align_mmse(std::span<const double> y, const PosteriorWeights& w, std::span<double> out) const = 0;
};

/// Cyclic shifts of a polar image's angular axis. Candidate l is the shift
/// shifts[l]; by default every shift 0 .. L-1.
class PolarShiftAction final : public GroupAction {
 public:
  PolarShiftAction(std::size_t d_radial, std::size_t l_angular);
  PolarShiftAction(std::size_t d_radial, std::size_t l_angular, std::vector<long> shifts);

  std::size_t dim() const override { return d_radial_ * l_angular_; }
  std::size_t size() const override { return shifts_.size(); }
  const std::vector<long>& shifts() const { return shifts_; }
  /// 2 pi shift / L for each candidate.
  std::vector<double> angles() const;

  Eigen::MatrixXd templates(std::span<const double> v) const override;
  void align_candidate(std::span<const double> y, std::size_t l, std::span<double> out) const override;
  /// Circular mean of the candidate angles, rounded to the nearest shift.
  bool align_mmse(std::span<const double> y, const PosteriorWeights& w, std::span<double> out) const override;

  /// Shift nearest to `angle` (mod L).
  long nearest_shift(double angle) const;

 private:
  std::size_t d_radial_;
  std::size_t l_angular_;
  std::vector<long> shifts_;
};

/// Rotations of an n^3 volume by interpolation; templates are
/// rotate_volume(v, g^-1), alignment is rotate_volume(y, g).
class VolumeRotationAction final : public GroupAction {
 public:
  VolumeRotationAction(std::size_t n, std::vector<Rotation> rotations,
                       Interpolation method = Interpolation::Trilinear);

  std::size_t dim() const override { return n_ * n_ * n_; }
  std::size_t size() const override { return rotations_.size(); }
  const std::vector<Rotation>& rotations() const { return rotations_; }

  Eigen::MatrixXd templates(std::span<const double> v) const override;
  void align_candidate(std::span<const double> y, std::size_t l, std::span<double> out) const override;
  /// Procrustes-rounded posterior mean, applied by interpolation.
  bool align_mmse(std::span<const double> y, const PosteriorWeights& w, std::span<double> out) const override;

 private:
  std::size_t n_;
  std::vector<Rotation> rotations_;
  Interpolation method_;
};

}  // namespace orient
