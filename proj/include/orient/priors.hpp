#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "orient/rng.hpp"
#include "orient/so3.hpp"

namespace orient {

/// Rotation-angle density of the Haar measure, (1 - cos w) / pi.
double haar_angle_density(double omega);

/// Haar angle CDF, (w - sin w) / pi.
double haar_angle_cdf(double omega);

/// Rotation-angle density of the isotropic Gaussian IG_SO(3)(eta) on [0, pi].
///
/// eta >= 1 sums the character series
///   (1 - cos w)/pi * sum_l (2l+1) exp(-l(l+1) eta^2) sin((l+1/2) w) / sin(w/2)
/// with an adaptive cutoff; eta < 1 uses the Matthies closed form, whose heat
/// parameter is eta^2 so both branches describe the same distribution.
double ig_density(double omega, double eta);

/// The two evaluation routes, exposed so they can be checked against each
/// other. `max_terms` caps the series (adaptive cutoff still applies).
double ig_density_series(double omega, double eta, int max_terms = 200);
double ig_density_matthies(double omega, double eta);

/// Number of series terms the eta >= 1 branch uses (diagnostic).
int ig_series_terms(double eta);

/// Tabulated CDF of the IG angle density on a uniform grid over [0, pi].
class InverseCdfTable {
 public:
  static constexpr std::size_t kDefaultGridSize = 4096;

  /// Throws std::invalid_argument for eta <= 0 or grid_size < 256.
  static InverseCdfTable build(double eta, std::size_t grid_size = kDefaultGridSize);

  double eta() const { return eta_; }
  const std::vector<double>& omega_grid() const { return omega_; }
  const std::vector<double>& cdf_values() const { return cdf_; }

  /// Piecewise-linear CDF.
  double cdf(double omega) const;

  /// Monotone-linear inverse of the tabulated CDF, u in [0, 1].
  double quantile(double u) const;

 private:
  double eta_ = 1.0;
  std::vector<double> omega_;
  std::vector<double> cdf_;
};

/// IG_SO(3)(eta) samples: uniform axis, inverse-CDF angle.
std::vector<Rotation> ig_sample(Rng& rng, double eta, std::size_t count);

/// Same, reusing a prebuilt table.
std::vector<Rotation> ig_sample(Rng& rng, const InverseCdfTable& table, std::size_t count);

struct RotationPrior {
  enum class Kind { Uniform, IsotropicGaussian };

  Kind kind = Kind::Uniform;
  double eta = 0.0;  ///< only meaningful for IsotropicGaussian

  static RotationPrior uniform() { return {}; }
  /// Throws std::invalid_argument unless eta > 0.
  static RotationPrior isotropic_gaussian(double eta);

  std::vector<Rotation> sample(Rng& rng, std::size_t count) const;
  double angle_density(double omega) const;
  std::string label() const;

  bool operator==(const RotationPrior&) const = default;
};

}  // namespace orient
