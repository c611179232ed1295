#include "orient/forward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "interp.hpp"
#include "orient/errors.hpp"

namespace orient {

void rotate_volume_into(std::span<const double> src, std::size_t n, const Rotation& g,
                        Interpolation method, std::span<double> out) {
  if (src.size() != n * n * n || out.size() != src.size()) {
    throw DimensionMismatch("rotate_volume: buffer sizes do not match n^3");
  }
  const Mat3& m = g.matrix();
  const double c = 0.5 * static_cast<double>(n - 1);
  const long nl = static_cast<long>(n);
  const bool cubic = method == Interpolation::Tricubic;
#pragma omp parallel for schedule(static)
  for (long k = 0; k < nl; ++k) {
    const double z = static_cast<double>(k) - c;
    for (long j = 0; j < nl; ++j) {
      const double y = static_cast<double>(j) - c;
      double* row = out.data() + static_cast<std::size_t>(nl * (j + nl * k));
      for (long i = 0; i < nl; ++i) {
        const double x = static_cast<double>(i) - c;
        const double px = m(0, 0) * x + m(0, 1) * y + m(0, 2) * z + c;
        const double py = m(1, 0) * x + m(1, 1) * y + m(1, 2) * z + c;
        const double pz = m(2, 0) * x + m(2, 1) * y + m(2, 2) * z + c;
        row[i] = cubic ? detail::sample_tricubic(src, nl, px, py, pz)
                       : detail::sample_trilinear(src, nl, px, py, pz);
      }
    }
  }
}

VolumeGrid rotate_volume(const VolumeGrid& v, const Rotation& g, Interpolation method) {
  VolumeGrid out(v.n());
  rotate_volume_into(v.data(), v.n(), g, method, out.data());
  return out;
}

std::vector<double> project_z(const VolumeGrid& v, double voxel_length) {
  const std::size_t n = v.n();
  std::vector<double> image(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) image[i + n * j] += v.at(i, j, k);
    }
  }
  if (voxel_length != 1.0) {
    for (double& p : image) p *= voxel_length;
  }
  return image;
}

void NoiseModel::validate(std::size_t dim) const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be finite and >= 0");
  if (!tau.empty() && tau.size() != 1 && tau.size() != dim) {
    throw std::invalid_argument("tau must be empty, scalar, or one value per coordinate");
  }
  for (double t : tau) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("tau entries must be finite and >= 0");
  }
}

std::vector<double> clean_signal(const VolumeGrid& vbar, const Rotation& g, bool projected,
                                 Interpolation method) {
  VolumeGrid rotated = rotate_volume(vbar, g.inverse(), method);
  if (projected) return project_z(rotated);
  return std::move(rotated.values());
}

void add_noise(std::span<double> data, const NoiseModel& noise, Rng& rng) {
  noise.validate(data.size());
  const bool noiseless = noise.sigma == 0.0 && std::all_of(noise.tau.begin(), noise.tau.end(),
                                                           [](double t) { return t == 0.0; });
  if (noiseless) return;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] += std::sqrt(noise.effective_variance(i)) * normal(rng);
  }
}

Observation synthesize_observation(const VolumeGrid& vbar, const Rotation& g, const NoiseModel& noise,
                                   bool projected, Rng& rng, Interpolation method) {
  Observation obs;
  obs.data = clean_signal(vbar, g, projected, method);
  add_noise(obs.data, noise, rng);
  obs.true_rotation = g;
  return obs;
}

void rotate_polar_into(std::span<const double> src, std::size_t d_radial, std::size_t l_angular, long k,
                       std::span<double> out) {
  if (src.size() != d_radial * l_angular || out.size() != src.size()) {
    throw DimensionMismatch("rotate_polar: buffer sizes do not match");
  }
  const long l = static_cast<long>(l_angular);
  const std::size_t shift = static_cast<std::size_t>(((k % l) + l) % l);
  for (std::size_t r = 0; r < d_radial; ++r) {
    const double* in_row = src.data() + r * l_angular;
    double* out_row = out.data() + r * l_angular;
    for (std::size_t j = 0; j < l_angular; ++j) {
      out_row[(j + shift) % l_angular] = in_row[j];
    }
  }
}

PolarImage rotate_polar(const PolarImage& img, long k) {
  PolarImage out(img.d_radial(), img.l_angular());
  rotate_polar_into(img.data(), img.d_radial(), img.l_angular(), k, out.data());
  return out;
}

double snr_of(std::span<const double> clean, double sigma) {
  if (sigma == 0.0) throw ZeroNoise("SNR is undefined for sigma = 0");
  return squared_norm(clean) / static_cast<double>(clean.size()) / (sigma * sigma);
}

double snr_of(const VolumeGrid& vbar, const NoiseModel& noise, bool projected) {
  if (projected) {
    const std::vector<double> image = project_z(vbar);
    return snr_of(image, noise.sigma);
  }
  return snr_of(vbar.data(), noise.sigma);
}

double snr_of(const PolarImage& img, const NoiseModel& noise) { return snr_of(img.data(), noise.sigma); }

double signal_rms(std::span<const double> clean) {
  return std::sqrt(squared_norm(clean) / static_cast<double>(clean.size()));
}

double sigma_for_snr(std::span<const double> clean, double snr) {
  if (!(snr > 0.0)) throw std::invalid_argument("target SNR must be positive");
  return signal_rms(clean) / std::sqrt(snr);
}

Interpolation parse_interpolation(const std::string& s) {
  if (s == "trilinear") return Interpolation::Trilinear;
  if (s == "tricubic") return Interpolation::Tricubic;
  throw std::invalid_argument("unknown interpolation '" + s + "'");
}

std::string to_string(Interpolation method) {
  return method == Interpolation::Trilinear ? "trilinear" : "tricubic";
}

}  // namespace orient
