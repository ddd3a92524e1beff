#include <doctest.h>

#include <Eigen/Geometry>

#include "dualarm/errors.hpp"
#include "dualarm/so3.hpp"
#include "fixtures.hpp"

using namespace dualarm;
using dualarm::so3::UnitQuaternion;

namespace {

UnitQuaternion from_eigen(const Eigen::Quaterniond& q) { return {q.w(), q.vec()}; }

// Exponential map through Eigen's angle-axis type, used as the oracle.
UnitQuaternion exp_map(const Eigen::Vector3d& p) {
  const double angle = p.norm();
  if (angle == 0.0) return UnitQuaternion::identity();
  return from_eigen(Eigen::Quaterniond(Eigen::AngleAxisd(angle, p / angle)));
}

}  // namespace

TEST_CASE("skew matrix reproduces the cross product") {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d p = testing::random_point(rng, 2.0);
    const Eigen::Vector3d x = testing::random_point(rng, 2.0);
    CHECK((so3::skew(p) * x - p.cross(x)).norm() < 1e-14);
    CHECK((so3::skew(p) + so3::skew(p).transpose()).norm() == 0.0);
  }
}

TEST_CASE("quaternion and matrix conversions agree with Eigen") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d axis = testing::random_unit_vector(rng);
    const double angle = rng.uniform(-3.1, 3.1);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    const UnitQuaternion u = UnitQuaternion::from_axis_angle(axis, angle);
    CHECK((u.to_matrix() - r).norm() < 1e-12);
    const UnitQuaternion back = UnitQuaternion::from_matrix(r);
    CHECK(std::abs(std::abs(back.dot(u)) - 1.0) < 1e-12);
    CHECK(std::abs(back.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("Hamilton product composes rotations like matrix products") {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const UnitQuaternion a = exp_map(testing::random_point(rng, 1.5));
    const UnitQuaternion b = exp_map(testing::random_point(rng, 1.5));
    CHECK(((a * b).to_matrix() - a.to_matrix() * b.to_matrix()).norm() < 1e-12);
  }
}

TEST_CASE("log map inverts the exponential map on (0, pi)") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d axis = testing::random_unit_vector(rng);
    const double angle = rng.uniform(0.0, 3.14);
    const Eigen::Vector3d p = axis * angle;
    CHECK((so3::log_map(exp_map(p)) - p).norm() < 1e-12);
  }
}

TEST_CASE("log map matches the angle-axis of the rotation matrix") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion a = exp_map(testing::random_point(rng, 1.5));
    const UnitQuaternion b = exp_map(testing::random_point(rng, 1.5));
    const Eigen::Matrix3d rel = a.to_matrix().transpose() * b.to_matrix();
    const Eigen::AngleAxisd oracle(rel);
    const Eigen::Vector3d p = so3::log_map(so3::relative(a, b));
    CHECK(std::abs(p.norm() - oracle.angle()) < 1e-10);
    if (oracle.angle() > 1e-6) CHECK((p - oracle.angle() * oracle.axis()).norm() < 1e-9);
  }
}

TEST_CASE("log map small-angle branch is continuous") {
  const Eigen::Vector3d axis = Eigen::Vector3d(1, -2, 0.5).normalized();
  for (double angle : {1e-3, 1e-6, 0.99e-6, 1e-9, 0.0}) {
    const Eigen::Vector3d p = so3::log_map(exp_map(axis * angle));
    CHECK((p - axis * angle).norm() <= 1e-15 + 1e-12 * angle);
  }
}

TEST_CASE("relative picks the shorter arc") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion a = exp_map(testing::random_point(rng, 1.8));
    const UnitQuaternion b = exp_map(testing::random_point(rng, 1.8));
    const UnitQuaternion r1 = so3::relative(a, b);
    const UnitQuaternion r2 = so3::relative(a, -b);
    CHECK(r1.a >= 0.0);
    CHECK(std::abs(r1.a - r2.a) < 1e-15);
    CHECK((r1.v - r2.v).norm() < 1e-15);
    CHECK(so3::log_map(r1).norm() <= M_PI + 1e-12);
  }
  const UnitQuaternion u = exp_map(Eigen::Vector3d(0.3, -0.2, 1.0));
  CHECK(so3::log_map(so3::relative(u, -u)).norm() < 1e-15);
}

TEST_CASE("relative rejects non-unit quaternions") {
  const UnitQuaternion bad{2.0, Eigen::Vector3d::Zero()};
  CHECK_THROWS_AS(so3::relative(bad, UnitQuaternion::identity()), InvalidInput);
  CHECK_THROWS_AS(so3::relative(UnitQuaternion::identity(), bad), InvalidInput);
}

TEST_CASE("inverse exponential Jacobian matches finite differences of the log") {
  // log(exp(w) exp(p)) = p + T^-1(p) w + O(|w|^2) for a left increment w.
  Rng rng(19);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d p = testing::random_unit_vector(rng) * rng.uniform(0.05, 3.0);
    const Eigen::Matrix3d tinv = so3::inv_exp_jacobian(p);
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d w = h * Eigen::Vector3d::Unit(k);
      const Eigen::Vector3d plus = so3::log_map(exp_map(w) * exp_map(p));
      const Eigen::Vector3d minus = so3::log_map(exp_map(-w) * exp_map(p));
      const Eigen::Vector3d fd = (plus - minus) / (2 * h);
      CHECK((fd - tinv.col(k)).norm() < 1e-7 * (1.0 + tinv.col(k).norm()));
    }
  }
}

TEST_CASE("inverse exponential Jacobian near zero and near 2 pi") {
  const Eigen::Vector3d tiny(1e-8, -2e-8, 3e-9);
  const Eigen::Matrix3d expected = Eigen::Matrix3d::Identity() - 0.5 * so3::skew(tiny);
  CHECK((so3::inv_exp_jacobian(tiny) - expected).norm() < 1e-15);
  CHECK((so3::inv_exp_jacobian(Eigen::Vector3d::Zero()) - Eigen::Matrix3d::Identity()).norm() == 0.0);
  const Eigen::Vector3d axis = Eigen::Vector3d(0, 0, 1);
  CHECK_THROWS_AS(so3::inv_exp_jacobian(axis * (2 * M_PI - 1e-7)), SingularRotation);
  CHECK_NOTHROW(so3::inv_exp_jacobian(axis * (2 * M_PI - 1e-3)));
}
