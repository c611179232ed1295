#include "orient/volume.hpp"

#include <cmath>
#include <stdexcept>

namespace orient {

VolumeGrid::VolumeGrid(std::size_t n) : n_(n), data_(n * n * n, 0.0) {
  if (n < 2) throw std::invalid_argument("volume edge must be at least 2");
}

VolumeGrid::VolumeGrid(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {
  if (n < 2) throw std::invalid_argument("volume edge must be at least 2");
  if (data_.size() != n * n * n) throw std::invalid_argument("volume data size is not n^3");
}

PolarImage::PolarImage(std::size_t d_radial, std::size_t l_angular)
    : d_radial_(d_radial), l_angular_(l_angular), data_(d_radial * l_angular, 0.0) {
  if (l_angular == 0 || d_radial == 0) throw std::invalid_argument("polar image needs nonzero extents");
}

PolarImage::PolarImage(std::size_t d_radial, std::size_t l_angular, std::vector<double> data)
    : d_radial_(d_radial), l_angular_(l_angular), data_(std::move(data)) {
  if (l_angular == 0 || d_radial == 0) throw std::invalid_argument("polar image needs nonzero extents");
  if (data_.size() != d_radial * l_angular) throw std::invalid_argument("polar data size mismatch");
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

}  // namespace orient
