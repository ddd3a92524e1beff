#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dualarm/collision.hpp"
#include "dualarm/coordination.hpp"
#include "dualarm/plpp.hpp"
#include "dualarm/sampling.hpp"
#include "dualarm/scenario.hpp"
#include "dualarm/trajectory.hpp"

namespace dualarm {

enum class Outcome {
  success,
  collision_failure,     // the interpolated motion hits something
  coordination_failure,  // no collision-free coordination path (deadlock)
  planning_failure,      // sampling planner budget exhausted
  infeasible_start       // path post-processing could not reach the clearance margin
};

enum class PlanningMode { centralized, decoupled };

std::string_view to_string(Outcome outcome);
std::string_view to_string(PlanningMode mode);
/// Throws InvalidInput for unknown names.
PlanningMode planning_mode_from_string(std::string_view name);

/// Thread CPU seconds per stage. For the decoupled pipeline the per-arm
/// stages report the arm whose pipeline took longer.
struct StageTimes {
  double path_planner{0.0};
  double simplifier{0.0};
  double plpp{0.0};
  double trajectory{0.0};
  double coordination{0.0};
  double motion_planning{0.0};  // total, validation excluded
  double distance{0.0};         // distance queries inside motion_planning
  double validation{0.0};
};

/// What one arm pipeline (or the composite pipeline) produced.
struct ArmPlan {
  JointPath raw;
  JointPath simplified;
  JointPath plpp_input;   // densified, empty without post-processing
  JointPath plpp_output;
  JointPath final_path;
  PlppReport plpp;
  JointTrajectory trajectory;
  StageTimes times;
  std::uint64_t distance_calls{0};
  std::size_t planner_iterations{0};
};

struct PlanResult {
  Outcome outcome{Outcome::planning_failure};
  std::string detail;
  PlanningMode mode{PlanningMode::centralized};
  bool use_plpp{false};
  std::uint64_t seed{0};
  std::size_t attempt{0};  // index of the returned attempt
  std::size_t attempts{1};
  bool cancelled{false};

  StageTimes times;
  std::uint64_t distance_calls{0};
  double motion_duration{0.0};   // [s]
  double original_length{0.0};   // combined length of the post-processor input
  double modified_length{0.0};   // ... and of its output (equal without post-processing)

  /// One entry (composite) for centralized, two (left, right) for decoupled.
  std::vector<ArmPlan> arms;
  JointPath coordination_path;
  CoordinationMap coordination_map;
  Interpolation interpolation{Interpolation::cubic};
  std::size_t validation_samples{0};
  double collision_time{-1.0};  // first sample in collision, -1 if none
};

struct PlanOptions {
  bool use_plpp{true};
  std::uint64_t seed{1};
  const std::atomic<bool>* cancel{nullptr};
};

/// Both pipelines over one immutable world. Reentrant; attempts and per-arm
/// pipelines run on their own threads.
class Planner {
 public:
  Planner(CollisionWorld world, PlanningParams params);

  const CollisionWorld& world() const { return world_; }
  const PlanningParams& params() const { return params_; }

  /// Throws PreconditionError when the start or goal is outside the joint
  /// limits or in collision.
  void check_query(const MotionQuery& query) const;

  /// 14-DoF planning with full clearance: plan, simplify, [densify, optimize,
  /// simplify], interpolate, validate.
  PlanResult plan_centralized(const MotionQuery& query, const PlanOptions& options) const;

  /// Two concurrent 7-DoF pipelines, each ignoring the other arm, then
  /// coordination of the two trajectories and validation.
  PlanResult plan_decoupled(const MotionQuery& query, const PlanOptions& options) const;

  PlanResult plan(PlanningMode mode, const MotionQuery& query, const PlanOptions& options) const;

  /// k concurrent attempts; attempt 0 uses options.seed, the others derived
  /// seeds. The lowest-index success is returned (attempt 0's result if all
  /// fail). Attempts that can no longer win are cancelled.
  PlanResult plan_with_retries(PlanningMode mode, const MotionQuery& query,
                               const PlanOptions& options, std::size_t k) const;

  /// Samples the executed motion every dt and checks full clearance; fills the
  /// validation fields and sets collision_failure on a hit.
  void validate_trajectory(PlanResult& result, double dt) const;

  /// Composite configuration of the executed motion at time t.
  Eigen::VectorXd executed_configuration(const PlanResult& result, double t) const;

 private:
  ArmPlan run_arm_pipeline(ClearanceMode mode, std::size_t arm, const Eigen::VectorXd& start,
                           const Eigen::VectorXd& goal, const PlanOptions& options,
                           Outcome& outcome, std::string& detail) const;

  CollisionWorld world_;
  PlanningParams params_;
};

/// Seed of retry attempt `index` (attempt 0 keeps the base seed).
std::uint64_t attempt_seed(std::uint64_t base, std::size_t index);

}  // namespace dualarm
