#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "orient/errors.hpp"
#include "orient/forward.hpp"
#include "orient/volume_io.hpp"

namespace orient {

namespace {

// 1 inside 0.8 R, cos^2 ramp to 0 at R, 0 beyond.
double support_taper(double r, double radius) {
  const double inner = 0.8 * radius;
  if (r <= inner) return 1.0;
  if (r >= radius) return 0.0;
  const double t = (r - inner) / (radius - inner);
  const double c = std::cos(0.5 * std::numbers::pi * t);
  return c * c;
}

void apply_support(VolumeGrid& v) {
  const std::size_t n = v.n();
  const double c = v.center();
  const double radius = phantom_support_radius(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const double x = i - c, y = j - c, z = k - c;
        v.at(i, j, k) *= support_taper(std::sqrt(x * x + y * y + z * z), radius);
      }
}

void blur_axis(VolumeGrid& v, int axis, const std::vector<double>& kernel) {
  const long n = static_cast<long>(v.n());
  const long half = static_cast<long>(kernel.size() / 2);
  VolumeGrid out(v.n());
  for (long k = 0; k < n; ++k)
    for (long j = 0; j < n; ++j)
      for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long t = -half; t <= half; ++t) {
          long ii = i, jj = j, kk = k;
          (axis == 0 ? ii : axis == 1 ? jj : kk) += t;
          if (ii < 0 || jj < 0 || kk < 0 || ii >= n || jj >= n || kk >= n) continue;
          acc += kernel[static_cast<std::size_t>(t + half)] * v.at(ii, jj, kk);
        }
        out.at(i, j, k) = acc;
      }
  v = std::move(out);
}

void gaussian_blur(VolumeGrid& v, double sigma) {
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * half + 1);
  double total = 0.0;
  for (int t = -half; t <= half; ++t) {
    kernel[t + half] = std::exp(-0.5 * t * t / (sigma * sigma));
    total += kernel[t + half];
  }
  for (double& w : kernel) w /= total;
  for (int axis = 0; axis < 3; ++axis) blur_axis(v, axis, kernel);
}

VolumeGrid gaussian_blobs(std::size_t n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6b6c6f62));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = phantom_support_radius(n);
  const double c = 0.5 * static_cast<double>(n - 1);
  const int count = 5 + static_cast<int>(rng() % 6);

  struct Blob {
    Vec3 center;
    Mat3 precision;
    double amplitude;
  };
  std::vector<Blob> blobs;
  for (int b = 0; b < count; ++b) {
    const Vec3 dir = sample_unit_vector(rng);
    const double r = 0.5 * radius * std::cbrt(unit(rng));
    const Rotation frame = sample_uniform(rng, 1).front();
    Vec3 widths;
    for (int a = 0; a < 3; ++a) widths(a) = (0.06 + 0.06 * unit(rng)) * static_cast<double>(n);
    const Vec3 inv_var = widths.cwiseProduct(widths).cwiseInverse();
    const Mat3 precision = frame.matrix() * inv_var.asDiagonal() * frame.matrix().transpose();
    blobs.push_back({r * dir, precision, 0.5 + unit(rng)});
  }

  VolumeGrid v(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p(i - c, j - c, k - c);
        double acc = 0.0;
        for (const Blob& b : blobs) {
          const Vec3 d = p - b.center;
          acc += b.amplitude * std::exp(-0.5 * d.dot(b.precision * d));
        }
        v.at(i, j, k) = acc;
      }
  apply_support(v);
  return v;
}

// Three orthogonal arms of distinct lengths from a common corner: no
// rotational symmetry and chiral, so every rotation is identifiable.
VolumeGrid asymmetric_l(std::size_t n) {
  const double radius = phantom_support_radius(n);
  const double c = 0.5 * static_cast<double>(n - 1);
  const Vec3 corner(-0.3 * radius, -0.25 * radius, -0.2 * radius);
  const double thick = 0.22 * radius;
  const Vec3 lengths(0.95 * radius, 0.6 * radius, 0.35 * radius);

  VolumeGrid v(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d = Vec3(i - c, j - c, k - c) - corner;
        bool inside = false;
        for (int axis = 0; axis < 3 && !inside; ++axis) {
          bool in_arm = d(axis) >= 0.0 && d(axis) <= lengths(axis);
          for (int other = 0; other < 3; ++other) {
            if (other != axis) in_arm = in_arm && d(other) >= 0.0 && d(other) <= thick;
          }
          inside = in_arm;
        }
        v.at(i, j, k) = inside ? 1.0 : 0.0;
      }
  gaussian_blur(v, std::max(1.0, static_cast<double>(n) / 32.0));
  apply_support(v);
  return v;
}

}  // namespace

double phantom_support_radius(std::size_t n) { return 0.5 * static_cast<double>(n - 1) - 0.5; }

VolumeGrid make_phantom(PhantomKind kind, std::size_t n, std::uint64_t seed, const std::filesystem::path& path) {
  switch (kind) {
    case PhantomKind::GaussianBlobs:
      if (n < 8) throw std::invalid_argument("phantom edge must be at least 8");
      return gaussian_blobs(n, seed);
    case PhantomKind::AsymmetricL:
      if (n < 8) throw std::invalid_argument("phantom edge must be at least 8");
      return asymmetric_l(n);
    case PhantomKind::Loaded:
      return read_obv(path);
  }
  throw std::invalid_argument("unknown phantom kind");
}

PolarImage make_polar_phantom(std::size_t d_radial, std::size_t l_angular, std::uint64_t seed) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Rng rng(derive_seed(seed, 0x706f6c72));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double d = static_cast<double>(d_radial);
  struct Bump {
    double r0, theta0, sr, st, amp;
  };
  std::vector<Bump> bumps;
  for (int b = 0; b < 8; ++b) {
    const double sign = b % 3 == 2 ? -0.5 : 1.0;
    bumps.push_back({(0.1 + 0.8 * unit(rng)) * d, two_pi * unit(rng), (0.04 + 0.1 * unit(rng)) * d,
                     0.3 + 0.6 * unit(rng), sign * (0.5 + unit(rng))});
  }
  PolarImage img(d_radial, l_angular);
  for (std::size_t r = 0; r < d_radial; ++r) {
    for (std::size_t j = 0; j < l_angular; ++j) {
      const double theta = two_pi * static_cast<double>(j) / static_cast<double>(l_angular);
      double acc = 0.0;
      for (const Bump& b : bumps) {
        double dt = std::remainder(theta - b.theta0, two_pi);
        const double dr = static_cast<double>(r) - b.r0;
        acc += b.amp * std::exp(-0.5 * (dr * dr / (b.sr * b.sr) + dt * dt / (b.st * b.st)));
      }
      img.at(r, j) = acc;
    }
  }
  return img;
}

PhantomKind parse_phantom_kind(const std::string& s) {
  if (s == "gaussian_blobs") return PhantomKind::GaussianBlobs;
  if (s == "asymmetric_L" || s == "asymmetric_l") return PhantomKind::AsymmetricL;
  if (s == "loaded") return PhantomKind::Loaded;
  throw std::invalid_argument("unknown phantom kind '" + s + "'");
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::GaussianBlobs:
      return "gaussian_blobs";
    case PhantomKind::AsymmetricL:
      return "asymmetric_L";
    case PhantomKind::Loaded:
      return "loaded";
  }
  return "unknown";
}

}  // namespace orient
