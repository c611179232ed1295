#pragma once

// Point samplers shared by the parallel kernels and the serial reference.

#include <cmath>
#include <cstddef>
#include <span>

namespace orient::detail {

// Coordinates within this distance of an integer are snapped to it so that
// exact grid maps (identity, quarter turns) reproduce voxel values exactly.
inline double snap(double p) {
  const double r = std::nearbyint(p);
  return std::abs(p - r) < 1e-9 ? r : p;
}

inline double voxel_or_zero(std::span<const double> src, long n, long i, long j, long k) {
  if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return 0.0;
  return src[static_cast<std::size_t>(i + n * (j + n * k))];
}

inline double sample_trilinear(std::span<const double> src, long n, double x, double y, double z) {
  x = snap(x);
  y = snap(y);
  z = snap(z);
  if (x <= -1.0 || y <= -1.0 || z <= -1.0 || x >= n || y >= n || z >= n) return 0.0;
  const double fx = std::floor(x), fy = std::floor(y), fz = std::floor(z);
  const long i = static_cast<long>(fx), j = static_cast<long>(fy), k = static_cast<long>(fz);
  const double tx = x - fx, ty = y - fy, tz = z - fz;
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? tz : 1.0 - tz;
    if (wz == 0.0) continue;
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? ty : 1.0 - ty;
      if (wy == 0.0) continue;
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? tx : 1.0 - tx;
        if (wx == 0.0) continue;
        acc += wx * wy * wz * voxel_or_zero(src, n, i + dx, j + dy, k + dz);
      }
    }
  }
  return acc;
}

// Catmull-Rom (Keys, a = -0.5) weights for taps at offsets -1, 0, 1, 2.
inline void cubic_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

inline double sample_tricubic(std::span<const double> src, long n, double x, double y, double z) {
  x = snap(x);
  y = snap(y);
  z = snap(z);
  if (x <= -2.0 || y <= -2.0 || z <= -2.0 || x >= n + 1.0 || y >= n + 1.0 || z >= n + 1.0) return 0.0;
  const double fx = std::floor(x), fy = std::floor(y), fz = std::floor(z);
  const long i = static_cast<long>(fx), j = static_cast<long>(fy), k = static_cast<long>(fz);
  double wx[4], wy[4], wz[4];
  cubic_weights(x - fx, wx);
  cubic_weights(y - fy, wy);
  cubic_weights(z - fz, wz);
  double acc = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (wz[c] == 0.0) continue;
    for (int b = 0; b < 4; ++b) {
      if (wy[b] == 0.0) continue;
      double row = 0.0;
      for (int a = 0; a < 4; ++a) {
        if (wx[a] == 0.0) continue;
        row += wx[a] * voxel_or_zero(src, n, i + a - 1, j + b - 1, k + c - 1);
      }
      acc += wz[c] * wy[b] * row;
    }
  }
  return acc;
}

}  // namespace orient::detail
