#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace orient {

/// Cubic n^3 scalar field, x-fastest storage. Voxel (i, j, k) sits at
/// coordinate (i, j, k) - c with c = (n - 1) / 2 the grid midpoint.
class VolumeGrid {
 public:
  VolumeGrid() = default;
  /// Zero volume. Throws std::invalid_argument for n < 2.
  explicit VolumeGrid(std::size_t n);
  VolumeGrid(std::size_t n, std::vector<double> data);

  std::size_t n() const { return n_; }
  std::size_t size() const { return data_.size(); }
  double center() const { return 0.5 * static_cast<double>(n_ - 1); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + n_ * (j + n_ * k); }
  double& at(std::size_t i, std::size_t j, std::size_t k) { return data_[index(i, j, k)]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return data_[index(i, j, k)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const VolumeGrid&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// d_radial x l_angular samples; row r holds the angular profile at radius r.
class PolarImage {
 public:
  PolarImage() = default;
  PolarImage(std::size_t d_radial, std::size_t l_angular);
  PolarImage(std::size_t d_radial, std::size_t l_angular, std::vector<double> data);

  std::size_t d_radial() const { return d_radial_; }
  std::size_t l_angular() const { return l_angular_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t r, std::size_t j) { return data_[r * l_angular_ + j]; }
  double at(std::size_t r, std::size_t j) const { return data_[r * l_angular_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const PolarImage&) const = default;

 private:
  std::size_t d_radial_ = 0;
  std::size_t l_angular_ = 0;
  std::vector<double> data_;
};

double squared_norm(std::span<const double> v);
double l2_norm(std::span<const double> v);

}  // namespace orient
