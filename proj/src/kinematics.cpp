#include "dualarm/kinematics.hpp"

#include <cmath>
#include <string>

#include "dualarm/errors.hpp"

namespace dualarm {

namespace {

void require_dim(const SerialChain& chain, const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != chain.dof()) {
    throw InvalidInput("chain '" + chain.name + "' expects " + std::to_string(chain.dof()) +
                       " joint values, got " + std::to_string(q.size()));
  }
}

template <typename Getter>
Eigen::VectorXd collect(const SerialChain& chain, Getter get) {
  Eigen::VectorXd out(chain.dof());
  for (std::size_t j = 0; j < chain.dof(); ++j) out[j] = get(chain.joints[j]);
  return out;
}

}  // namespace

Eigen::VectorXd SerialChain::lower_limits() const {
  return collect(*this, [](const RevoluteJoint& j) { return j.lower; });
}
Eigen::VectorXd SerialChain::upper_limits() const {
  return collect(*this, [](const RevoluteJoint& j) { return j.upper; });
}
Eigen::VectorXd SerialChain::velocity_limits() const {
  return collect(*this, [](const RevoluteJoint& j) { return j.max_velocity; });
}
Eigen::VectorXd SerialChain::acceleration_limits() const {
  return collect(*this, [](const RevoluteJoint& j) { return j.max_acceleration; });
}

bool SerialChain::within_limits(const Eigen::VectorXd& q, double tol) const {
  require_dim(*this, q);
  for (std::size_t j = 0; j < dof(); ++j) {
    if (q[j] < joints[j].lower - tol || q[j] > joints[j].upper + tol) return false;
  }
  return true;
}

double SerialChain::reach() const {
  // Sum over joints of a bound on the distance from the joint origin to any
  // point it carries.
  double far = tcp.translation().norm();
  for (const auto& link : link_bodies) {
    for (const auto& p : link) {
      for (const auto& a : p.skeleton()) far = std::max(far, a.norm() + p.radius);
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < joints.size(); ++j) {
    double arm = far;
    for (std::size_t k = j + 1; k < joints.size(); ++k) arm += joints[k].origin.translation().norm();
    total += arm;
  }
  return total;
}

void SerialChain::validate() const {
  if (joints.empty() || joints.size() > 7) {
    throw InvalidInput("chain '" + name + "' must have 1..7 joints");
  }
  for (const auto& j : joints) {
    if (!std::isfinite(j.lower) || !std::isfinite(j.upper) || !(j.lower < j.upper)) {
      throw InvalidInput("joint '" + j.name + "' has invalid position limits");
    }
    if (!(j.max_velocity > 0.0) || !(j.max_acceleration > 0.0)) {
      throw InvalidInput("joint '" + j.name + "' needs positive velocity/acceleration limits");
    }
    if (j.axis.norm() < 1e-9) throw InvalidInput("joint '" + j.name + "' has a zero axis");
  }
  if (link_bodies.size() > link_count()) {
    throw InvalidInput("chain '" + name + "' has bodies for non-existent links");
  }
  if (ee_link >= link_count()) throw InvalidInput("chain '" + name + "' ee_link out of range");
  for (const auto& link : link_bodies) {
    for (const auto& p : link) p.validate();
  }
}

FkResult forward_kinematics(const SerialChain& chain, const Eigen::VectorXd& q) {
  require_dim(chain, q);
  FkResult fk;
  const std::size_t n = chain.dof();
  fk.link_poses.reserve(n + 1);
  fk.joint_axes.reserve(n);
  fk.joint_origins.reserve(n);
  Eigen::Isometry3d pose = chain.base_pose;
  fk.link_poses.push_back(pose);
  for (std::size_t j = 0; j < n; ++j) {
    const RevoluteJoint& joint = chain.joints[j];
    const Eigen::Isometry3d frame = pose * joint.origin;
    const Eigen::Vector3d axis = joint.axis.normalized();
    fk.joint_axes.push_back(frame.linear() * axis);
    fk.joint_origins.push_back(frame.translation());
    pose = frame * Eigen::AngleAxisd(q[j], axis);
    fk.link_poses.push_back(pose);
  }
  const Eigen::Isometry3d ee = fk.link_poses[chain.ee_link] * chain.tcp;
  fk.ee.x = ee.translation();
  fk.ee_rotation = ee.linear();
  fk.ee.u = so3::UnitQuaternion::from_matrix(fk.ee_rotation);
  return fk;
}

Eigen::Matrix3Xd point_jacobian(const SerialChain& chain, const FkResult& fk, std::size_t link,
                                const Eigen::Vector3d& point) {
  Eigen::Matrix3Xd J = Eigen::Matrix3Xd::Zero(3, chain.dof());
  // Joint j carries links j+1 .. n.
  for (std::size_t j = 0; j < chain.dof() && j < link; ++j) {
    J.col(j) = fk.joint_axes[j].cross(point - fk.joint_origins[j]);
  }
  return J;
}

EeJacobian jacobian(const SerialChain& chain, const FkResult& fk) {
  EeJacobian out;
  out.trans = point_jacobian(chain, fk, chain.ee_link, fk.ee.x);
  out.rot = Eigen::Matrix3Xd::Zero(3, chain.dof());
  for (std::size_t j = 0; j < chain.dof() && j < chain.ee_link; ++j) {
    out.rot.col(j) = fk.joint_axes[j];
  }
  return out;
}

EeJacobian jacobian(const SerialChain& chain, const Eigen::VectorXd& q) {
  return jacobian(chain, forward_kinematics(chain, q));
}

CompositeChain::CompositeChain(const SerialChain& left, const SerialChain& right)
    : left_(&left), right_(&right), n_left_(left.dof()), n_right_(right.dof()) {}

std::pair<Eigen::VectorXd, Eigen::VectorXd> CompositeChain::split(const Eigen::VectorXd& q) const {
  if (static_cast<std::size_t>(q.size()) != dof()) {
    throw InvalidInput("composite configuration must have " + std::to_string(dof()) + " values");
  }
  return {q.head(static_cast<Eigen::Index>(n_left_)), q.tail(static_cast<Eigen::Index>(n_right_))};
}

Eigen::VectorXd CompositeChain::join(const Eigen::VectorXd& q_left,
                                     const Eigen::VectorXd& q_right) const {
  if (static_cast<std::size_t>(q_left.size()) != n_left_ ||
      static_cast<std::size_t>(q_right.size()) != n_right_) {
    throw InvalidInput("per-arm configurations do not match the composite layout");
  }
  Eigen::VectorXd q(dof());
  q << q_left, q_right;
  return q;
}

Eigen::VectorXd CompositeChain::lower_limits() const {
  return join(left_->lower_limits(), right_->lower_limits());
}
Eigen::VectorXd CompositeChain::upper_limits() const {
  return join(left_->upper_limits(), right_->upper_limits());
}
Eigen::VectorXd CompositeChain::velocity_limits() const {
  return join(left_->velocity_limits(), right_->velocity_limits());
}
Eigen::VectorXd CompositeChain::acceleration_limits() const {
  return join(left_->acceleration_limits(), right_->acceleration_limits());
}

bool CompositeChain::within_limits(const Eigen::VectorXd& q, double tol) const {
  const auto [l, r] = split(q);
  return left_->within_limits(l, tol) && right_->within_limits(r, tol);
}

Eigen::Isometry3d make_transform(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                   .toRotationMatrix();
  t.translation() = xyz;
  return t;
}

}  // namespace dualarm
