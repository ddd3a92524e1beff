#pragma once

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "dualarm/kinematics.hpp"
#include "dualarm/rng.hpp"
#include "dualarm/scenario.hpp"

namespace dualarm::testing {

inline std::string data_file(const std::string& name) {
  return std::string(DUALARM_DATA_DIR) + "/" + name;
}

/// Loaded once per test binary.
inline const Scenario& desk() {
  static const Scenario s = load_scenario(data_file("desk_scenario.json"));
  return s;
}

inline const Scenario& deadlock() {
  static const Scenario s = load_scenario(data_file("deadlock_scenario.json"));
  return s;
}

/// One revolute joint about z at `base`, a sphere of radius `r` at distance
/// `length` along the rotating x axis, TCP on the sphere center.
inline SerialChain one_joint_chain(const Eigen::Vector3d& base, double length, double r,
                                   double lower = -3.0, double upper = 3.0) {
  SerialChain c;
  c.name = "single";
  c.base_pose.translation() = base;
  RevoluteJoint j;
  j.name = "j1";
  j.lower = lower;
  j.upper = upper;
  j.max_velocity = 1.0;
  j.max_acceleration = 2.0;
  c.joints.push_back(j);
  c.link_bodies.assign(2, {});
  c.link_bodies[1].push_back(SsvPrimitive::sphere(Eigen::Vector3d(length, 0, 0), r));
  c.ee_link = 1;
  c.tcp.translation() = Eigen::Vector3d(length, 0, 0);
  return c;
}

inline Eigen::Vector3d random_unit_vector(Rng& rng) {
  for (;;) {
    const Eigen::Vector3d v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double n = v.norm();
    if (n > 0.1 && n <= 1.0) return v / n;
  }
}

inline Eigen::Vector3d random_point(Rng& rng, double half_width) {
  return {rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width),
          rng.uniform(-half_width, half_width)};
}

/// Random configuration of a chain, uniformly inside its limits.
inline Eigen::VectorXd random_configuration(Rng& rng, const SerialChain& chain) {
  return rng.uniform(chain.lower_limits(), chain.upper_limits());
}

}  // namespace dualarm::testing
