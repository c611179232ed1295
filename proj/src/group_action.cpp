#include "orient/group_action.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace orient {

PolarShiftAction::PolarShiftAction(std::size_t d_radial, std::size_t l_angular)
    : d_radial_(d_radial), l_angular_(l_angular) {
  if (l_angular == 0) throw std::invalid_argument("polar action needs l_angular >= 1");
  for (std::size_t k = 0; k < l_angular; ++k) shifts_.push_back(static_cast<long>(k));
}

PolarShiftAction::PolarShiftAction(std::size_t d_radial, std::size_t l_angular, std::vector<long> shifts)
    : d_radial_(d_radial), l_angular_(l_angular), shifts_(std::move(shifts)) {
  if (l_angular == 0) throw std::invalid_argument("polar action needs l_angular >= 1");
  if (shifts_.empty()) throw std::invalid_argument("polar action needs at least one shift");
}

std::vector<double> PolarShiftAction::angles() const {
  std::vector<double> out;
  out.reserve(shifts_.size());
  for (long k : shifts_) {
    out.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(l_angular_));
  }
  return out;
}

Eigen::MatrixXd PolarShiftAction::templates(std::span<const double> v) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(size()));
  for (std::size_t l = 0; l < shifts_.size(); ++l) {
    rotate_polar_into(v, d_radial_, l_angular_, shifts_[l],
                      std::span<double>(out.col(static_cast<Eigen::Index>(l)).data(), dim()));
  }
  return out;
}

void PolarShiftAction::align_candidate(std::span<const double> y, std::size_t l, std::span<double> out) const {
  rotate_polar_into(y, d_radial_, l_angular_, -shifts_[l], out);
}

long PolarShiftAction::nearest_shift(double angle) const {
  const double steps = angle * static_cast<double>(l_angular_) / (2.0 * std::numbers::pi);
  const long l = static_cast<long>(l_angular_);
  const long k = static_cast<long>(std::llround(steps));
  return ((k % l) + l) % l;
}

bool PolarShiftAction::align_mmse(std::span<const double> y, const PosteriorWeights& w, std::span<double> out) const {
  const CircularMean mean = mmse_so2_angle(w, angles());
  rotate_polar_into(y, d_radial_, l_angular_, -nearest_shift(mean.angle), out);
  return mean.degenerate;
}

VolumeRotationAction::VolumeRotationAction(std::size_t n, std::vector<Rotation> rotations, Interpolation method)
    : n_(n), rotations_(std::move(rotations)), method_(method) {
  if (rotations_.empty()) throw std::invalid_argument("volume action needs at least one rotation");
}

Eigen::MatrixXd VolumeRotationAction::templates(std::span<const double> v) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(size()));
  for (std::size_t l = 0; l < rotations_.size(); ++l) {
    rotate_volume_into(v, n_, rotations_[l].inverse(), method_,
                       std::span<double>(out.col(static_cast<Eigen::Index>(l)).data(), dim()));
  }
  return out;
}

void VolumeRotationAction::align_candidate(std::span<const double> y, std::size_t l, std::span<double> out) const {
  rotate_volume_into(y, n_, rotations_[l], method_, out);
}

bool VolumeRotationAction::align_mmse(std::span<const double> y, const PosteriorWeights& w,
                                      std::span<double> out) const {
  const EstimateReport est = mmse_from_weights(w, rotations_);
  rotate_volume_into(y, n_, est.rotation, method_, out);
  return est.procrustes_nonunique || est.degenerate_average;
}

}  // namespace orient
