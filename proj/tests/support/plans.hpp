#pragma once

#include <limits>

#include "dualarm/collision.hpp"
#include "dualarm/rng.hpp"
#include "dualarm/sampling.hpp"
#include "dualarm/scenario.hpp"

namespace dualarm::testing {

/// Single-arm path for query `query` of the scenario: planned, shortcut
/// without a time cap, densified. Empty if the planner fails.
inline JointPath planned_arm_path(const Scenario& s, const CollisionWorld& world, std::size_t query,
                                  std::size_t arm, std::uint64_t seed) {
  const SerialChain& chain = s.chains[arm];
  const double margin = s.params.planning_margin;
  const StateSpace space(
      chain.lower_limits(), chain.upper_limits(),
      [&world, arm, margin](const Eigen::VectorXd& q) {
        return world.clearance_at_least(q, ClearanceMode::single_arm, margin, arm);
      },
      s.params.segment_fraction);
  const auto& mq = s.queries.at(query);
  const Eigen::VectorXd start = arm == 0 ? mq.start.head(7) : mq.start.tail(7);
  const Eigen::VectorXd goal = arm == 0 ? mq.goal.head(7) : mq.goal.tail(7);
  PlannerParams pp;
  pp.seed = derive_seed(seed, 1);
  pp.max_iterations = s.params.max_iterations;
  pp.step_factor = s.params.step_factor;
  const PlannerResult r = rrt_connect(space, start, goal, pp);
  if (!r.solved) return {};
  SimplifyParams sp = s.params.simplify;
  sp.seed = derive_seed(seed, 2);
  sp.max_time = std::numeric_limits<double>::infinity();
  return densify(simplify(space, r.path, sp), s.params.min_waypoints);
}

/// Straight line between two random configurations plus noise: a generic
/// point for derivative checks, not necessarily collision free.
inline JointPath random_arm_path(Rng& rng, const SerialChain& chain, std::size_t waypoints, double noise) {
  const Eigen::VectorXd lo = chain.lower_limits(), hi = chain.upper_limits();
  const Eigen::VectorXd a = rng.uniform(lo, hi), b = rng.uniform(lo, hi);
  JointPath path;
  for (std::size_t i = 0; i < waypoints; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(waypoints - 1);
    Eigen::VectorXd q = a + t * (b - a);
    if (i > 0 && i + 1 < waypoints) {
      for (Eigen::Index k = 0; k < q.size(); ++k) q[k] += rng.uniform(-noise, noise);
    }
    path.push_back(q.cwiseMax(lo).cwiseMin(hi));
  }
  return path;
}

}  // namespace dualarm::testing
