#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "dualarm/collision.hpp"
#include "dualarm/coordination.hpp"
#include "dualarm/kinematics.hpp"
#include "dualarm/plpp.hpp"
#include "dualarm/sampling.hpp"

namespace dualarm {

struct PlanningParams {
  double segment_fraction{0.001};  // per-arm space; the composite space uses half
  double max_time{5.0};            // thread CPU seconds per planner call
  std::size_t max_iterations{20000};
  double step_factor{10.0};
  double planning_margin{0.0};     // clearance required of every checked state [m]
  SimplifyParams simplify;
  std::size_t min_waypoints{20};
  PlppParams plpp;
  double coordination_fraction{0.001};
  double coordination_margin{0.0};
  double coordination_max_time{5.0};
  std::size_t coordination_max_iterations{20000};
  Interpolation interpolation{Interpolation::cubic};
  double validation_dt{1e-3};
  double validation_margin{0.0};
};

/// Start and goal of both arms; q uses the composite layout [left; right].
struct MotionQuery {
  std::string name;
  Eigen::VectorXd start;
  Eigen::VectorXd goal;
};

struct Scenario {
  std::string name;
  std::vector<SerialChain> chains;
  Scene scene;
  std::vector<MotionQuery> queries;
  PlanningParams params;
  nlohmann::json source;  // the document the scenario was read from

  CollisionWorld world() const { return CollisionWorld(scene, chains); }
};

/// Parses a scenario document. Throws LoadError naming the offending field.
Scenario parse_scenario(const nlohmann::json& doc);

/// Reads and parses a scenario file; syntax errors report line and column.
Scenario load_scenario(const std::string& file);

/// Checks that every query endpoint lies within the joint limits and has
/// non-negative full clearance. Throws LoadError listing every offending query.
void check_queries(const Scenario& scenario);

}  // namespace dualarm
