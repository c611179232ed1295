#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orient/rng.hpp"
#include "orient/so3.hpp"
#include "orient/volume.hpp"

namespace orient {

enum class Interpolation { Trilinear, Tricubic };

/// Output voxel at coordinate x holds v(g x), interpolated; samples falling
/// outside the source grid read as 0. Parallel over z-slices.
VolumeGrid rotate_volume(const VolumeGrid& v, const Rotation& g,
                         Interpolation method = Interpolation::Trilinear);

/// Raw-buffer form of rotate_volume; `out` must hold n^3 values.
void rotate_volume_into(std::span<const double> src, std::size_t n, const Rotation& g,
                        Interpolation method, std::span<double> out);

/// Line integral along z: image(i, j) = voxel_length * sum_k v(i, j, k),
/// stored x-fastest (n x n).
std::vector<double> project_z(const VolumeGrid& v, double voxel_length = 1.0);

/// Measurement noise sigma plus per-coordinate structural deviations tau_i.
/// `tau` may be empty (all zero), a single broadcast value, or one per coordinate.
struct NoiseModel {
  double sigma = 0.0;
  std::vector<double> tau;

  static NoiseModel isotropic(double sigma) { return {sigma, {}}; }

  double tau_at(std::size_t i) const {
    if (tau.empty()) return 0.0;
    return tau.size() == 1 ? tau[0] : tau[i];
  }
  /// tau_i^2 + sigma^2.
  double effective_variance(std::size_t i) const {
    const double t = tau_at(i);
    return t * t + sigma * sigma;
  }
  /// True when every coordinate shares one effective variance.
  bool is_isotropic() const { return tau.size() <= 1; }

  /// Throws std::invalid_argument for negative entries or a tau length that
  /// is neither 0, 1 nor `dim`.
  void validate(std::size_t dim) const;
};

struct Observation {
  std::vector<double> data;
  std::optional<Rotation> true_rotation;  ///< evaluation only
};

/// Pi(g^-1 . vbar) in this library's convention: rotate_volume(vbar, g^-1),
/// optionally followed by project_z.
std::vector<double> clean_signal(const VolumeGrid& vbar, const Rotation& g, bool projected,
                                 Interpolation method = Interpolation::Trilinear);

/// Adds independent N(0, tau_i^2 + sigma^2) noise in place. No draws are made
/// when the model is noiseless.
void add_noise(std::span<double> data, const NoiseModel& noise, Rng& rng);

Observation synthesize_observation(const VolumeGrid& vbar, const Rotation& g, const NoiseModel& noise,
                                   bool projected, Rng& rng,
                                   Interpolation method = Interpolation::Trilinear);

/// Exact cyclic shift along the angular axis: out(r, j) = img(r, j - k mod L).
PolarImage rotate_polar(const PolarImage& img, long k);

/// Raw-buffer form of rotate_polar.
void rotate_polar_into(std::span<const double> src, std::size_t d_radial, std::size_t l_angular, long k,
                       std::span<double> out);

/// Mean clean-signal power per coordinate over sigma^2. Throws ZeroNoise when
/// sigma == 0.
double snr_of(std::span<const double> clean, double sigma);
double snr_of(const VolumeGrid& vbar, const NoiseModel& noise, bool projected);
double snr_of(const PolarImage& img, const NoiseModel& noise);

/// sigma giving `snr` for this clean signal (inverse of snr_of).
double sigma_for_snr(std::span<const double> clean, double snr);

/// sqrt(mean power): the "signal scale" that relative noise levels refer to.
double signal_rms(std::span<const double> clean);

enum class PhantomKind { GaussianBlobs, AsymmetricL, Loaded };

/// Synthetic volume supported inside the inscribed sphere. `path` is only
/// read for PhantomKind::Loaded (OBV1 file; FileError on malformed input).
VolumeGrid make_phantom(PhantomKind kind, std::size_t n, std::uint64_t seed,
                        const std::filesystem::path& path = {});

/// Radius of the support sphere used by the synthetic phantoms.
double phantom_support_radius(std::size_t n);

/// Smooth random polar image (sum of angularly periodic Gaussian bumps).
/// Different seeds give unrelated images.
PolarImage make_polar_phantom(std::size_t d_radial, std::size_t l_angular, std::uint64_t seed);

PhantomKind parse_phantom_kind(const std::string& s);
std::string to_string(PhantomKind kind);
Interpolation parse_interpolation(const std::string& s);
std::string to_string(Interpolation method);

}  // namespace orient
