#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "orient/priors.hpp"

namespace orient {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesRelTol = 1e-10;
constexpr int kSeriesMaxL = 200;

// Coefficient (2l+1) exp(-l(l+1) eta^2) bounds |term| since
// |sin((l+1/2)w) / sin(w/2)| <= 2l+1 and the prefactor is common.
double series_density(double omega, double eta, int* terms_used, int max_l = kSeriesMaxL) {
  const double eta2 = eta * eta;
  // (1 - cos w) / sin(w/2) = 2 sin(w/2), so the series has no singularity.
  const double prefactor = 2.0 * std::sin(0.5 * omega) / kPi;
  double sum = 0.0;
  double coeff_mass = 0.0;
  int l = 0;
  for (; l <= max_l; ++l) {
    const double coeff = (2.0 * l + 1.0) * std::exp(-static_cast<double>(l) * (l + 1) * eta2);
    if (l > 0 && coeff < kSeriesRelTol * coeff_mass) break;
    coeff_mass += coeff;
    sum += coeff * std::sin((l + 0.5) * omega);
  }
  if (terms_used) *terms_used = l;
  return prefactor * sum;
}

double matthies_density(double omega, double eta) {
  const double t = eta * eta;
  auto image = [t](double x) { return x * std::exp(-x * x / (4.0 * t)); };
  const double bracket = image(omega) - image(omega - 2.0 * kPi) - image(omega + 2.0 * kPi);
  return std::sin(0.5 * omega) / std::sqrt(kPi) * std::pow(t, -1.5) * std::exp(t / 4.0) * bracket;
}

}  // namespace

double haar_angle_density(double omega) { return (1.0 - std::cos(omega)) / kPi; }

double haar_angle_cdf(double omega) { return (omega - std::sin(omega)) / kPi; }

double ig_density(double omega, double eta) {
  if (omega <= 0.0) return 0.0;
  const double value = eta >= 1.0 ? series_density(omega, eta, nullptr) : matthies_density(omega, eta);
  return std::max(value, 0.0);
}

double ig_density_series(double omega, double eta, int max_terms) {
  if (omega <= 0.0) return 0.0;
  return series_density(omega, eta, nullptr, max_terms - 1);
}

double ig_density_matthies(double omega, double eta) {
  if (omega <= 0.0) return 0.0;
  return matthies_density(omega, eta);
}

int ig_series_terms(double eta) {
  int terms = 0;
  series_density(1.0, eta, &terms);
  return terms;
}

InverseCdfTable InverseCdfTable::build(double eta, std::size_t grid_size) {
  if (!(eta > 0.0)) throw std::invalid_argument("IG eta must be positive");
  if (grid_size < 256) throw std::invalid_argument("inverse-CDF grid needs at least 256 nodes");
  InverseCdfTable table;
  table.eta_ = eta;
  table.omega_.resize(grid_size);
  table.cdf_.resize(grid_size);
  const double h = kPi / static_cast<double>(grid_size - 1);
  std::vector<double> density(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    table.omega_[i] = i == grid_size - 1 ? kPi : h * static_cast<double>(i);
    density[i] = ig_density(table.omega_[i], eta);
  }
  table.cdf_[0] = 0.0;
  for (std::size_t i = 1; i < grid_size; ++i) {
    table.cdf_[i] = table.cdf_[i - 1] + 0.5 * h * (density[i - 1] + density[i]);
  }
  const double total = table.cdf_.back();
  for (double& c : table.cdf_) c /= total;
  table.cdf_.back() = 1.0;
  return table;
}

double InverseCdfTable::cdf(double omega) const {
  if (omega <= 0.0) return 0.0;
  if (omega >= kPi) return 1.0;
  const double h = omega_[1] - omega_[0];
  const std::size_t i = std::min(static_cast<std::size_t>(omega / h), omega_.size() - 2);
  const double f = (omega - omega_[i]) / (omega_[i + 1] - omega_[i]);
  return cdf_[i] + f * (cdf_[i + 1] - cdf_[i]);
}

double InverseCdfTable::quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return kPi;
  // First node with cdf >= u; flat stretches resolve to their left edge.
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t hi = static_cast<std::size_t>(it - cdf_.begin());
  const std::size_t lo = hi - 1;
  const double span = cdf_[hi] - cdf_[lo];
  const double f = span > 0.0 ? (u - cdf_[lo]) / span : 0.0;
  return omega_[lo] + f * (omega_[hi] - omega_[lo]);
}

std::vector<Rotation> ig_sample(Rng& rng, double eta, std::size_t count) {
  return ig_sample(rng, InverseCdfTable::build(eta), count);
}

std::vector<Rotation> ig_sample(Rng& rng, const InverseCdfTable& table, std::size_t count) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Rotation> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 axis = sample_unit_vector(rng);
    const double omega = table.quantile(unit(rng));
    out.push_back(axis_angle_to_rotation({axis, omega}));
  }
  return out;
}

RotationPrior RotationPrior::isotropic_gaussian(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("IG eta must be positive");
  return {Kind::IsotropicGaussian, eta};
}

std::vector<Rotation> RotationPrior::sample(Rng& rng, std::size_t count) const {
  if (kind == Kind::Uniform) return sample_uniform(rng, count);
  return ig_sample(rng, eta, count);
}

double RotationPrior::angle_density(double omega) const {
  return kind == Kind::Uniform ? haar_angle_density(omega) : ig_density(omega, eta);
}

std::string RotationPrior::label() const {
  if (kind == Kind::Uniform) return "uniform";
  std::ostringstream os;
  os << "ig(" << eta << ")";
  return os.str();
}

}  // namespace orient
