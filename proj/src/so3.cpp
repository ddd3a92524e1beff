#include "dualarm/so3.hpp"

#include <cmath>
#include <numbers>

#include "dualarm/errors.hpp"

namespace dualarm::so3 {

namespace {

void require_unit(const UnitQuaternion& u, const char* name) {
  if (std::abs(u.norm() - 1.0) > kUnitTolerance) {
    throw InvalidInput(std::string("quaternion '") + name + "' is not unit-norm");
  }
}

}  // namespace

UnitQuaternion UnitQuaternion::from_matrix(const Eigen::Matrix3d& rotation) {
  const Eigen::Quaterniond q(rotation);
  UnitQuaternion u{q.w(), Eigen::Vector3d(q.x(), q.y(), q.z())};
  return u.normalized();
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d n = axis.normalized();
  return {std::cos(0.5 * angle), std::sin(0.5 * angle) * n};
}

Eigen::Matrix3d UnitQuaternion::to_matrix() const {
  return Eigen::Quaterniond(a, v.x(), v.y(), v.z()).toRotationMatrix();
}

UnitQuaternion UnitQuaternion::normalized() const {
  const double n = norm();
  return {a / n, v / n};
}

UnitQuaternion operator*(const UnitQuaternion& lhs, const UnitQuaternion& rhs) {
  return {lhs.a * rhs.a - lhs.v.dot(rhs.v), lhs.a * rhs.v + rhs.a * lhs.v + lhs.v.cross(rhs.v)};
}

Eigen::Matrix3d skew(const Eigen::Vector3d& p) {
  Eigen::Matrix3d m;
  m << 0.0, -p.z(), p.y(),
       p.z(), 0.0, -p.x(),
       -p.y(), p.x(), 0.0;
  return m;
}

UnitQuaternion relative(const UnitQuaternion& from, const UnitQuaternion& to) {
  require_unit(from, "from");
  require_unit(to, "to");
  const UnitQuaternion target = from.dot(to) < 0.0 ? -to : to;
  UnitQuaternion rel = from.conjugate() * target;
  // Rounding can leave a tiny negative scalar part for a half-turn.
  if (rel.a < 0.0) rel = -rel;
  return rel;
}

Eigen::Vector3d log_map(const UnitQuaternion& u) {
  const double s = u.v.norm();  // == sin(acos(a)) for a unit quaternion
  if (s < kSmallAngle) {
    // 2 * asin(s)/s * v expanded around s = 0
    return 2.0 * (1.0 + s * s / 6.0) * u.v;
  }
  const double half_angle = std::atan2(s, u.a);
  return (2.0 * half_angle / s) * u.v;
}

Eigen::Matrix3d inv_exp_jacobian(const Eigen::Vector3d& p) {
  const double angle = p.norm();
  if (std::abs(angle - 2.0 * std::numbers::pi) < 1e-6 || angle > 2.0 * std::numbers::pi) {
    throw SingularRotation("inverse exponential-map Jacobian is singular at |p| = 2*pi");
  }
  const Eigen::Matrix3d P = skew(p);
  if (angle < kSmallAngle) {
    return Eigen::Matrix3d::Identity() - 0.5 * P + (1.0 / 12.0) * P * P;
  }
  const double half = 0.5 * angle;
  const double gamma = half / std::tan(half);
  return Eigen::Matrix3d::Identity() - 0.5 * P + ((1.0 - gamma) / (angle * angle)) * P * P;
}

}  // namespace dualarm::so3
