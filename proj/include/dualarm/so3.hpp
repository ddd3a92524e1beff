#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dualarm::so3 {

/// Series branches of the log map and of T^-1 kick in below this angle [rad].
inline constexpr double kSmallAngle = 1e-6;
/// Tolerated deviation of |u| from one before a quaternion is rejected.
inline constexpr double kUnitTolerance = 1e-6;

/// Unit quaternion stored scalar-first: [a, v].
struct UnitQuaternion {
  double a{1.0};
  Eigen::Vector3d v{Eigen::Vector3d::Zero()};

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion from_matrix(const Eigen::Matrix3d& rotation);
  static UnitQuaternion from_axis_angle(const Eigen::Vector3d& axis, double angle);

  Eigen::Matrix3d to_matrix() const;
  double norm() const { return std::sqrt(a * a + v.squaredNorm()); }
  UnitQuaternion normalized() const;
  UnitQuaternion conjugate() const { return {a, -v}; }
  UnitQuaternion operator-() const { return {-a, -v}; }
  double dot(const UnitQuaternion& other) const { return a * other.a + v.dot(other.v); }
};

/// Hamilton product.
UnitQuaternion operator*(const UnitQuaternion& lhs, const UnitQuaternion& rhs);

/// Skew-symmetric matrix such that skew(p) * x == p.cross(x).
Eigen::Matrix3d skew(const Eigen::Vector3d& p);

/// Rotation from `from` to `to` expressed in `from`'s frame, u_from^-1 * u_to.
/// `to` is flipped onto the hemisphere of `from` first, so the result always
/// encodes the shorter arc and has a non-negative scalar part.
/// Throws InvalidInput if either input is not unit-norm.
UnitQuaternion relative(const UnitQuaternion& from, const UnitQuaternion& to);

/// Logarithmic map of a shortest-arc unit quaternion: the rotation vector
/// (axis * angle) with |p| equal to the rotation angle.
Eigen::Vector3d log_map(const UnitQuaternion& u);

/// Inverse of the exponential-map Jacobian,
///   T^-1(p) = I - 0.5 [p]x + (1 - gamma)/|p|^2 [p]x^2,  gamma = (|p|/2) / tan(|p|/2).
/// Maps a left (spatial) angular increment to the increment of the rotation vector.
/// Throws SingularRotation when |p| is within 1e-6 of 2*pi.
Eigen::Matrix3d inv_exp_jacobian(const Eigen::Vector3d& p);

}  // namespace dualarm::so3
