#include "orient/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace orient {

namespace {

Vec3 skew_vector(const Mat3& m) {
  return {m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)};
}

}  // namespace

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  if (!is_rotation(m, tol)) {
    throw std::invalid_argument("matrix is not a proper rotation");
  }
  return Rotation(m);
}

Rotation Rotation::about_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return Rotation(m);
}

Rotation Rotation::about_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return Rotation(m);
}

Rotation Rotation::about_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return Rotation(m);
}

std::array<double, 9> Rotation::row_major() const {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[3 * r + c] = m_(r, c);
  return out;
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  if ((m.transpose() * m - Mat3::Identity()).norm() > tol) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

double chordal_distance(const Rotation& g1, const Rotation& g2) {
  return (g1.matrix() - g2.matrix()).norm();
}

double geodesic_distance(const Rotation& g1, const Rotation& g2) {
  // atan2 of (sin, cos) of the relative angle; equal to the clamped
  // arccos((tr - 1) / 2) but without its loss of precision near 0 and pi.
  const Mat3 rel = g2.matrix() * g1.matrix().transpose();
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double s = 0.5 * skew_vector(rel).norm();
  return std::atan2(s, c);
}

double rotation_angle(const Rotation& g) { return geodesic_distance(Rotation(), g); }

ProcrustesResult procrustes_project(const Mat3& a) {
  Eigen::JacobiSVD<Mat3> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  const Vec3 sv = svd.singularValues();  // descending

  const double d = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  Vec3 diag(1.0, 1.0, d);
  ProcrustesResult result;
  result.rotation = Rotation::unchecked(u * diag.asDiagonal() * v.transpose());

  const int vanishing = static_cast<int>(sv(1) < 1e-12) + static_cast<int>(sv(2) < 1e-12);
  if (vanishing >= 2) {
    result.status = ProcrustesStatus::RankDeficient;
  } else if (d < 0.0 && sv(1) - sv(2) <= 1e-9) {
    result.status = ProcrustesStatus::DegenerateInput;
  }
  return result;
}

Rotation axis_angle_to_rotation(const AxisAngle& a) {
  if (a.angle == 0.0) return Rotation();
  const Vec3 k = a.axis.normalized();
  Mat3 kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  const double s = std::sin(a.angle), c = std::cos(a.angle);
  const Mat3 m = Mat3::Identity() + s * kx + (1.0 - c) * kx * kx;
  return Rotation::unchecked(m);
}

AxisAngle rotation_to_axis_angle(const Rotation& g) {
  const Mat3& m = g.matrix();
  const Vec3 w = skew_vector(m);
  const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double s = 0.5 * w.norm();
  AxisAngle out;
  out.angle = std::atan2(s, c);
  if (out.angle < 1e-14) {
    out.angle = 0.0;
    out.axis = Vec3::UnitZ();
    return out;
  }
  if (c > 0.0) {
    out.axis = w / (2.0 * s);
    return out;
  }
  // Large angles: (m + m^T)/2 - cos I = (1 - cos) a a^T is well conditioned.
  const Mat3 sym = 0.5 * (m + m.transpose()) - c * Mat3::Identity();
  int col = 0;
  sym.diagonal().maxCoeff(&col);
  Vec3 axis = sym.col(col).normalized();
  if (axis.dot(w) < 0.0) axis = -axis;
  out.axis = axis;
  return out;
}

Rotation quaternion_to_rotation(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return Rotation::unchecked(m);
}

Vec3 sample_unit_vector(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  while (true) {
    Vec3 v(normal(rng), normal(rng), normal(rng));
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

std::vector<Rotation> sample_uniform(Rng& rng, std::size_t count) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Rotation> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Shoemake's subgroup algorithm for uniform unit quaternions.
    const double u1 = unit(rng), u2 = unit(rng), u3 = unit(rng);
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    out.push_back(quaternion_to_rotation(b * std::cos(two_pi * u3), a * std::sin(two_pi * u2),
                                         a * std::cos(two_pi * u2), b * std::sin(two_pi * u3)));
  }
  return out;
}

}  // namespace orient
