#include "dualarm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <thread>

#include "dualarm/distance_meter.hpp"
#include "dualarm/errors.hpp"
#include "dualarm/rng.hpp"
#include "dualarm/timing.hpp"

namespace dualarm {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::success: return "success";
    case Outcome::collision_failure: return "collision_failure";
    case Outcome::coordination_failure: return "coordination_failure";
    case Outcome::planning_failure: return "planning_failure";
    case Outcome::infeasible_start: return "infeasible_start";
  }
  return "unknown";
}

std::string_view to_string(PlanningMode mode) {
  return mode == PlanningMode::centralized ? "centralized" : "decoupled";
}

PlanningMode planning_mode_from_string(std::string_view name) {
  if (name == "centralized") return PlanningMode::centralized;
  if (name == "decoupled") return PlanningMode::decoupled;
  throw InvalidInput("unknown planning mode '" + std::string(name) + "'");
}

std::uint64_t attempt_seed(std::uint64_t base, std::size_t index) {
  return index == 0 ? base : derive_seed(base, 1000 + index);
}

namespace {

// Seed streams of the stages of one pipeline.
enum Stream : std::uint64_t { kPlanner = 1, kSimplify = 2, kResimplify = 3, kCoordination = 4,
                              kCoordinationSimplify = 5 };

std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t lane, Stream stream) {
  return derive_seed(derive_seed(seed, lane), stream);
}

constexpr std::uint64_t kCompositeLane = 100;

}  // namespace

Planner::Planner(CollisionWorld world, PlanningParams params)
    : world_(std::move(world)), params_(std::move(params)) {
  if (world_.chains().size() != 2) throw InvalidInput("the planner needs exactly two chains");
}

void Planner::check_query(const MotionQuery& query) const {
  const CompositeChain composite(world_.chain(0), world_.chain(1));
  for (const auto* q : {&query.start, &query.goal}) {
    const char* which = q == &query.start ? "start" : "goal";
    if (static_cast<std::size_t>(q->size()) != composite.dof()) {
      throw PreconditionError(std::string(which) + " has the wrong dimension");
    }
    if (!composite.within_limits(*q)) {
      throw PreconditionError(std::string(which) + " is outside the joint limits");
    }
    if (world_.min_clearance(*q, ClearanceMode::full).value() < 0.0) {
      throw PreconditionError(std::string(which) + " is in collision");
    }
  }
}

ArmPlan Planner::run_arm_pipeline(ClearanceMode mode, std::size_t arm, const Eigen::VectorXd& start,
                                  const Eigen::VectorXd& goal, const PlanOptions& options,
                                  Outcome& outcome, std::string& detail) const {
  ArmPlan out;
  const DistanceMeter::Snapshot meter0 = DistanceMeter::local().snapshot();
  const bool composite = mode != ClearanceMode::single_arm;
  const std::uint64_t lane = composite ? kCompositeLane : arm;

  Eigen::VectorXd lower, upper;
  double fraction = params_.segment_fraction;
  if (composite) {
    const CompositeChain c(world_.chain(0), world_.chain(1));
    lower = c.lower_limits();
    upper = c.upper_limits();
    fraction *= 0.5;
  } else {
    lower = world_.chain(arm).lower_limits();
    upper = world_.chain(arm).upper_limits();
  }
  const double margin = params_.planning_margin;
  const StateSpace space(
      lower, upper,
      [this, mode, arm, margin](const Eigen::VectorXd& q) {
        return world_.clearance_at_least(q, mode, margin, arm);
      },
      fraction);

  auto finish = [&] {
    const DistanceMeter::Snapshot meter1 = DistanceMeter::local().snapshot();
    out.distance_calls = meter1.calls - meter0.calls;
    out.times.distance = meter1.seconds - meter0.seconds;
    out.times.motion_planning =
        out.times.path_planner + out.times.simplifier + out.times.plpp + out.times.trajectory;
  };

  StageTimer timer;
  PlannerParams pp;
  pp.max_time = params_.max_time;
  pp.max_iterations = params_.max_iterations;
  pp.step_factor = params_.step_factor;
  pp.seed = stage_seed(options.seed, lane, kPlanner);
  pp.cancel = options.cancel;
  const PlannerResult planned = rrt_connect(space, start, goal, pp);
  out.times.path_planner = timer.elapsed();
  out.planner_iterations = planned.iterations;
  if (!planned.solved) {
    outcome = Outcome::planning_failure;
    detail = planned.cancelled ? "cancelled" : "sampling planner budget exhausted";
    finish();
    return out;
  }
  out.raw = planned.path;

  timer.restart();
  SimplifyParams sp = params_.simplify;
  sp.seed = stage_seed(options.seed, lane, kSimplify);
  out.simplified = simplify(space, out.raw, sp);
  out.times.simplifier = timer.elapsed();
  out.final_path = out.simplified;

  if (options.use_plpp) {
    timer.restart();
    out.plpp_input = densify(out.simplified, params_.min_waypoints);
    PlppParams plpp = params_.plpp;
    plpp.cancel = options.cancel;
    PlppResult optimized = optimize(world_, mode, arm, out.plpp_input, plpp);
    out.plpp = optimized.report;
    out.plpp_output = std::move(optimized.path);
    out.times.plpp = timer.elapsed();
    if (out.plpp.status == PlppStatus::cancelled) {
      outcome = Outcome::planning_failure;
      detail = "cancelled";
      finish();
      return out;
    }
    if (out.plpp.status == PlppStatus::infeasible_start) {
      outcome = Outcome::infeasible_start;
      detail = "clearance margin not reachable for the post-processor input";
      finish();
      return out;
    }
    timer.restart();
    sp.seed = stage_seed(options.seed, lane, kResimplify);
    out.final_path = simplify(space, out.plpp_output, sp);
    out.times.simplifier += timer.elapsed();
  }

  timer.restart();
  JointLimits limits;
  if (composite) {
    const CompositeChain c(world_.chain(0), world_.chain(1));
    limits = {c.velocity_limits(), c.acceleration_limits()};
  } else {
    limits = {world_.chain(arm).velocity_limits(), world_.chain(arm).acceleration_limits()};
  }
  out.trajectory = interpolate(out.final_path, limits);
  out.times.trajectory = timer.elapsed();
  outcome = Outcome::success;
  finish();
  return out;
}

namespace {

void measure_lengths(const CollisionWorld& world, ClearanceMode mode, std::size_t arm,
                     const ArmPlan& plan, const PlanningParams& params, std::size_t min_waypoints,
                     double& original, double& modified) {
  if (!plan.plpp_input.empty()) {
    original += plan.plpp.initial_length;
    modified += plan.plpp.final_length;
    return;
  }
  if (plan.simplified.size() < 2) return;
  const double len = combined_path_length(world, mode, arm, densify(plan.simplified, min_waypoints),
                                          params.plpp.alpha);
  original += len;
  modified += len;
}

}  // namespace

PlanResult Planner::plan_centralized(const MotionQuery& query, const PlanOptions& options) const {
  check_query(query);
  PlanResult r;
  r.mode = PlanningMode::centralized;
  r.use_plpp = options.use_plpp;
  r.seed = options.seed;
  r.interpolation = params_.interpolation;

  r.arms.push_back(run_arm_pipeline(ClearanceMode::full, 0, query.start, query.goal, options,
                                    r.outcome, r.detail));
  const ArmPlan& plan = r.arms.front();
  r.times = plan.times;
  r.distance_calls = plan.distance_calls;
  r.cancelled = r.detail == "cancelled";
  measure_lengths(world_, ClearanceMode::full, 0, plan, params_, params_.min_waypoints,
                  r.original_length, r.modified_length);
  if (r.outcome != Outcome::success) return r;
  r.motion_duration = plan.trajectory.duration();
  validate_trajectory(r, params_.validation_dt);
  return r;
}

PlanResult Planner::plan_decoupled(const MotionQuery& query, const PlanOptions& options) const {
  check_query(query);
  PlanResult r;
  r.mode = PlanningMode::decoupled;
  r.use_plpp = options.use_plpp;
  r.seed = options.seed;
  r.interpolation = params_.interpolation;

  const auto nl = static_cast<Eigen::Index>(world_.chain(0).dof());
  const auto nr = static_cast<Eigen::Index>(world_.chain(1).dof());
  r.arms.resize(2);
  Outcome outcome[2]{Outcome::planning_failure, Outcome::planning_failure};
  std::string detail[2];
  std::exception_ptr error[2];
  auto work = [&](std::size_t arm) {
    try {
      const Eigen::VectorXd s = arm == 0 ? query.start.head(nl) : query.start.tail(nr);
      const Eigen::VectorXd g = arm == 0 ? query.goal.head(nl) : query.goal.tail(nr);
      r.arms[arm] = run_arm_pipeline(ClearanceMode::single_arm, arm, s, g, options, outcome[arm],
                                     detail[arm]);
    } catch (...) {
      error[arm] = std::current_exception();
    }
  };
  {
    std::thread left(work, 0);
    std::thread right(work, 1);
    left.join();
    right.join();
  }
  for (const auto& e : error) {
    if (e) std::rethrow_exception(e);
  }

  const std::size_t critical =
      r.arms[1].times.motion_planning > r.arms[0].times.motion_planning ? 1 : 0;
  r.times = r.arms[critical].times;
  r.distance_calls = r.arms[0].distance_calls + r.arms[1].distance_calls;
  for (std::size_t arm = 0; arm < 2; ++arm) {
    measure_lengths(world_, ClearanceMode::single_arm, arm, r.arms[arm], params_,
                    params_.min_waypoints, r.original_length, r.modified_length);
  }
  for (std::size_t arm = 0; arm < 2; ++arm) {
    if (outcome[arm] != Outcome::success) {
      r.outcome = outcome[arm];
      r.detail = std::string(arm == 0 ? "left: " : "right: ") + detail[arm];
      r.cancelled = detail[arm] == "cancelled";
      return r;
    }
  }

  const DistanceMeter::Snapshot meter0 = DistanceMeter::local().snapshot();
  const StageTimer timer;
  const CoordinationSpace cspace(world_, r.arms[0].trajectory, r.arms[1].trajectory,
                                 params_.coordination_margin);
  CoordinationParams cp;
  cp.segment_fraction = params_.coordination_fraction;
  cp.margin = params_.coordination_margin;
  cp.planner.max_time = params_.coordination_max_time;
  cp.planner.max_iterations = params_.coordination_max_iterations;
  cp.planner.step_factor = params_.step_factor;
  cp.planner.seed = stage_seed(options.seed, kCompositeLane + 1, kCoordination);
  cp.planner.cancel = options.cancel;
  cp.simplify = params_.simplify;
  cp.simplify.seed = stage_seed(options.seed, kCompositeLane + 1, kCoordinationSimplify);
  CoordinationPlan cplan;
  try {
    cplan = plan_coordination(cspace, cp);
  } catch (const PreconditionError& e) {
    r.outcome = Outcome::coordination_failure;
    r.detail = e.what();
  }
  if (cplan.solved) {
    r.coordination_path = cplan.path;
    r.coordination_map = CoordinationMap::build(cplan.path, params_.interpolation, cspace.upper());
  }
  r.times.coordination = timer.elapsed();
  const DistanceMeter::Snapshot meter1 = DistanceMeter::local().snapshot();
  r.times.distance += meter1.seconds - meter0.seconds;
  r.distance_calls += meter1.calls - meter0.calls;
  r.times.motion_planning += r.times.coordination;

  if (r.detail.empty() && !cplan.solved) {
    r.outcome = cplan.cancelled ? Outcome::planning_failure : Outcome::coordination_failure;
    r.cancelled = cplan.cancelled;
    r.detail = cplan.cancelled ? "cancelled" : "no coordination path within the budget";
  }
  if (!cplan.solved) return r;
  r.outcome = Outcome::success;
  r.motion_duration = r.coordination_map.duration();
  validate_trajectory(r, params_.validation_dt);
  return r;
}

PlanResult Planner::plan(PlanningMode mode, const MotionQuery& query,
                         const PlanOptions& options) const {
  return mode == PlanningMode::centralized ? plan_centralized(query, options)
                                           : plan_decoupled(query, options);
}

Eigen::VectorXd Planner::executed_configuration(const PlanResult& result, double t) const {
  if (result.mode == PlanningMode::centralized) return result.arms.at(0).trajectory.eval(t).q;
  const auto [l, r] = coordinated_eval(result.arms.at(0).trajectory, result.arms.at(1).trajectory,
                                       result.coordination_map, t);
  Eigen::VectorXd q(l.q.size() + r.q.size());
  q << l.q, r.q;
  return q;
}

void Planner::validate_trajectory(PlanResult& result, double dt) const {
  if (!(dt > 0.0)) throw InvalidInput("validation step must be positive");
  const StageTimer timer;
  const double T = result.motion_duration;
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt));
  result.validation_samples = 0;
  result.collision_time = -1.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, T);
    ++result.validation_samples;
    if (!world_.clearance_at_least(executed_configuration(result, t), ClearanceMode::full,
                                   params_.validation_margin)) {
      result.collision_time = t;
      result.outcome = Outcome::collision_failure;
      result.detail = "executed motion in collision";
      break;
    }
  }
  result.times.validation = timer.elapsed();
}

PlanResult Planner::plan_with_retries(PlanningMode mode, const MotionQuery& query,
                                      const PlanOptions& options, std::size_t k) const {
  if (k == 0) throw InvalidInput("at least one attempt is required");
  check_query(query);
  if (k == 1) {
    PlanResult r = plan(mode, query, options);
    r.attempts = 1;
    return r;
  }

  std::vector<PlanResult> results(k);
  std::vector<std::exception_ptr> errors(k);
  std::vector<std::unique_ptr<std::atomic<bool>>> cancel;
  for (std::size_t i = 0; i < k; ++i) cancel.push_back(std::make_unique<std::atomic<bool>>(false));

  auto work = [&](std::size_t i) {
    try {
      PlanOptions o = options;
      o.seed = attempt_seed(options.seed, i);
      o.cancel = cancel[i].get();
      results[i] = plan(mode, query, o);
      results[i].attempt = i;
      if (results[i].outcome == Outcome::success) {
        // Higher-index attempts can no longer be returned.
        for (std::size_t j = i + 1; j < k; ++j) cancel[j]->store(true);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < k; ++i) threads.emplace_back(work, i);
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::size_t winner = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (results[i].outcome == Outcome::success) {
      winner = i;
      break;
    }
  }
  PlanResult r = std::move(results[winner]);
  r.attempts = k;
  return r;
}

}  // namespace dualarm
