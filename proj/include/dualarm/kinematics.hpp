#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "dualarm/so3.hpp"
#include "dualarm/ssv.hpp"

namespace dualarm {

/// Revolute joint: a fixed transform from the parent link frame to the joint
/// frame, followed by a rotation about `axis` (joint frame coordinates).
struct RevoluteJoint {
  std::string name;
  Eigen::Isometry3d origin{Eigen::Isometry3d::Identity()};
  Eigen::Vector3d axis{Eigen::Vector3d::UnitZ()};
  double lower{-3.14};
  double upper{3.14};
  double max_velocity{1.0};      // rad/s
  double max_acceleration{1.0};  // rad/s^2
};

/// Kinematic and collision description of one manipulator.
///
/// Links are numbered 0..n_dof: link 0 is rigidly attached to the base,
/// link j+1 is carried by joint j. `link_bodies[k]` holds the SSV primitives of
/// link k in link-local coordinates. The end-effector (TCP) frame is
/// `link(ee_link) * tcp`.
struct SerialChain {
  std::string name;
  Eigen::Isometry3d base_pose{Eigen::Isometry3d::Identity()};
  std::vector<RevoluteJoint> joints;
  std::vector<std::vector<SsvPrimitive>> link_bodies;
  std::size_t ee_link{0};
  Eigen::Isometry3d tcp{Eigen::Isometry3d::Identity()};

  std::size_t dof() const { return joints.size(); }
  std::size_t link_count() const { return joints.size() + 1; }

  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;
  Eigen::VectorXd velocity_limits() const;
  Eigen::VectorXd acceleration_limits() const;
  bool within_limits(const Eigen::VectorXd& q, double tol = 0.0) const;
  /// Sum of link reach: Lipschitz bound (w.r.t. |q|_2) on the motion of any chain point.
  double reach() const;

  /// Throws InvalidInput when the chain breaks its invariants
  /// (1..7 joints, finite limits with lower < upper, ee_link in range).
  void validate() const;
};

struct EePose {
  Eigen::Vector3d x{Eigen::Vector3d::Zero()};
  so3::UnitQuaternion u;
};

/// Result of forward kinematics: world poses of every link plus joint axes.
struct FkResult {
  EePose ee;
  Eigen::Matrix3d ee_rotation{Eigen::Matrix3d::Identity()};
  std::vector<Eigen::Isometry3d> link_poses;  // size dof + 1
  std::vector<Eigen::Vector3d> joint_axes;    // world frame, unit
  std::vector<Eigen::Vector3d> joint_origins; // world frame
};

struct EeJacobian {
  Eigen::Matrix3Xd trans;
  Eigen::Matrix3Xd rot;
};

FkResult forward_kinematics(const SerialChain& chain, const Eigen::VectorXd& q);

/// Geometric end-effector Jacobian in the world frame.
EeJacobian jacobian(const SerialChain& chain, const Eigen::VectorXd& q);
EeJacobian jacobian(const SerialChain& chain, const FkResult& fk);

/// Translational Jacobian (3 x dof) of a world point rigidly attached to `link`.
/// Columns of joints that do not move `link` are zero.
Eigen::Matrix3Xd point_jacobian(const SerialChain& chain, const FkResult& fk,
                                std::size_t link, const Eigen::Vector3d& point);

/// Two chains viewed as one composite robot with q = [q_left; q_right].
class CompositeChain {
 public:
  CompositeChain(const SerialChain& left, const SerialChain& right);

  std::size_t dof() const { return n_left_ + n_right_; }
  std::size_t left_dof() const { return n_left_; }
  std::size_t right_dof() const { return n_right_; }

  std::pair<Eigen::VectorXd, Eigen::VectorXd> split(const Eigen::VectorXd& q) const;
  Eigen::VectorXd join(const Eigen::VectorXd& q_left, const Eigen::VectorXd& q_right) const;

  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;
  Eigen::VectorXd velocity_limits() const;
  Eigen::VectorXd acceleration_limits() const;
  bool within_limits(const Eigen::VectorXd& q, double tol = 0.0) const;

 private:
  const SerialChain* left_;
  const SerialChain* right_;
  std::size_t n_left_;
  std::size_t n_right_;
};

/// Homogeneous transform from translation and roll-pitch-yaw (URDF convention,
/// R = Rz(yaw) * Ry(pitch) * Rx(roll)).
Eigen::Isometry3d make_transform(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy);

}  // namespace dualarm
