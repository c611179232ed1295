#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "orient/rng.hpp"

namespace orient {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Element of SO(3): orthonormal 3x3 matrix with determinant +1.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Throws std::invalid_argument unless `m` is orthonormal with det +1
  /// (Frobenius tolerance `tol`).
  static Rotation from_matrix(const Mat3& m, double tol = 1e-10);

  /// No validation; for matrices that are rotations by construction.
  static Rotation unchecked(const Mat3& m) { return Rotation(m); }

  static Rotation about_x(double angle);
  static Rotation about_y(double angle);
  static Rotation about_z(double angle);

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  double trace() const { return m_.trace(); }

  std::array<double, 9> row_major() const;

  bool operator==(const Rotation& o) const { return m_ == o.m_; }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Orthonormality and determinant check within `tol`.
bool is_rotation(const Mat3& m, double tol = 1e-10);

struct AxisAngle {
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;  ///< radians in [0, pi]
};

/// ||g1 - g2||_F, in [0, 2*sqrt(2)].
double chordal_distance(const Rotation& g1, const Rotation& g2);

/// Rotation angle of g2 g1^{-1}, in [0, pi].
double geodesic_distance(const Rotation& g1, const Rotation& g2);

/// Angle of a single rotation (its geodesic distance from the identity).
double rotation_angle(const Rotation& g);

enum class ProcrustesStatus {
  Unique,
  /// Two smallest singular values tie and det(UV^T) < 0: minimizer not unique.
  DegenerateInput,
  /// At least two singular values vanish.
  RankDeficient,
};

struct ProcrustesResult {
  Rotation rotation;
  ProcrustesStatus status = ProcrustesStatus::Unique;
  bool nonunique() const { return status != ProcrustesStatus::Unique; }
};

/// Nearest rotation to `a` in Frobenius norm (maximizes tr(R^T a)).
///
/// With a = U S V^T (singular values descending) the result is
/// U diag(1, 1, det(UV^T)) V^T. Ties are not an error: a valid minimizer is
/// always returned and `status` records whether it was unique.
ProcrustesResult procrustes_project(const Mat3& a);

/// Rodrigues formula.
Rotation axis_angle_to_rotation(const AxisAngle& a);

/// Inverse of axis_angle_to_rotation. At angle 0 the axis is +z; near pi the
/// axis is recovered from the symmetric part.
AxisAngle rotation_to_axis_angle(const Rotation& g);

/// Unit quaternion (w, x, y, z) to rotation.
Rotation quaternion_to_rotation(double w, double x, double y, double z);

/// Uniformly distributed direction on the unit sphere.
Vec3 sample_unit_vector(Rng& rng);

/// I.i.d. Haar-distributed rotations (uniform unit quaternions).
std::vector<Rotation> sample_uniform(Rng& rng, std::size_t count);

}  // namespace orient
