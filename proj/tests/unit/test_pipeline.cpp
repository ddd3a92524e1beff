#include <doctest.h>

#include "dualarm/errors.hpp"
#include "dualarm/pipeline.hpp"
#include "dualarm/rng.hpp"
#include "fixtures.hpp"

using namespace dualarm;
using dualarm::testing::deadlock;
using dualarm::testing::desk;

namespace {

const Planner& desk_planner() {
  static const Planner p(desk().world(), desk().params);
  return p;
}

PlanOptions options(std::uint64_t seed, bool plpp = true) {
  PlanOptions o;
  o.seed = seed;
  o.use_plpp = plpp;
  return o;
}

// Independent sampling of the executed motion, coarser than the validator.
double sampled_min_clearance(const Planner& planner, const PlanResult& r, double dt) {
  double best = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t <= r.motion_duration + dt; t += dt) {
    const auto q = planner.executed_configuration(r, std::min(t, r.motion_duration));
    best = std::min(best, planner.world().min_clearance(q, ClearanceMode::full).value());
  }
  return best;
}

void check_timing(const PlanResult& r) {
  const StageTimes& t = r.times;
  for (double v : {t.path_planner, t.simplifier, t.plpp, t.trajectory, t.coordination,
                   t.motion_planning, t.distance, t.validation}) {
    CHECK(v >= 0.0);
  }
  CHECK(t.distance <= t.motion_planning);
  CHECK(t.path_planner + t.simplifier + t.plpp + t.trajectory + t.coordination <=
        t.motion_planning * (1 + 1e-9) + 1e-9);
  CHECK(r.distance_calls > 0);
}

}  // namespace

TEST_CASE("mode names") {
  CHECK(planning_mode_from_string("centralized") == PlanningMode::centralized);
  CHECK(planning_mode_from_string(to_string(PlanningMode::decoupled)) == PlanningMode::decoupled);
  CHECK_THROWS_AS(planning_mode_from_string("joint"), InvalidInput);
  CHECK(to_string(Outcome::coordination_failure) == "coordination_failure");
}

TEST_CASE("attempt seeds") {
  CHECK(attempt_seed(42, 0) == 42);
  CHECK(attempt_seed(42, 1) != 42);
  CHECK(attempt_seed(42, 1) != attempt_seed(42, 2));
  CHECK(attempt_seed(42, 1) == attempt_seed(42, 1));
}

TEST_CASE("query preconditions") {
  const Planner& p = desk_planner();
  MotionQuery q = desk().queries[0];
  CHECK_NOTHROW(p.check_query(q));
  q.start[3] = 0.5;
  CHECK_THROWS_AS(p.check_query(q), PreconditionError);
  CHECK_THROWS_AS(p.plan_with_retries(PlanningMode::centralized, q, options(1), 1),
                  PreconditionError);
  q = desk().queries[0];
  q.goal.resize(7);
  CHECK_THROWS_AS(p.check_query(q), std::exception);
  q = desk().queries[0];
  CHECK_THROWS_AS(p.plan_with_retries(PlanningMode::centralized, q, options(1), 0), InvalidInput);
}

TEST_CASE("centralized pipeline on a desk query") {
  const Planner& p = desk_planner();
  const MotionQuery& q = desk().queries[0];
  const PlanResult r = p.plan_centralized(q, options(3));
  REQUIRE(r.outcome == Outcome::success);
  REQUIRE(r.arms.size() == 1);
  const ArmPlan& arm = r.arms[0];
  CHECK(arm.raw.front() == q.start);
  CHECK(arm.raw.back() == q.goal);
  CHECK(arm.final_path.front() == q.start);
  CHECK(arm.final_path.back() == q.goal);
  CHECK(arm.plpp_input.size() >= desk().params.min_waypoints);
  CHECK(r.modified_length <= r.original_length);
  CHECK(r.motion_duration == doctest::Approx(arm.trajectory.duration()));
  CHECK((p.executed_configuration(r, 0.0) - q.start).norm() < 1e-12);
  CHECK((p.executed_configuration(r, r.motion_duration) - q.goal).norm() < 1e-12);
  CHECK(r.validation_samples >= static_cast<std::size_t>(r.motion_duration / 1e-3));
  CHECK(r.collision_time < 0.0);
  CHECK(sampled_min_clearance(p, r, 0.005) >= 0.0);
  check_timing(r);

  const PlanResult again = p.plan_centralized(q, options(3));
  REQUIRE(again.arms.size() == 1);
  CHECK(again.arms[0].final_path == arm.final_path);
}

TEST_CASE("decoupled pipeline on a desk query") {
  const Planner& p = desk_planner();
  const MotionQuery& q = desk().queries[1];
  const PlanResult r = p.plan_decoupled(q, options(4));
  REQUIRE(r.outcome == Outcome::success);
  REQUIRE(r.arms.size() == 2);
  CHECK(r.arms[0].final_path.front() == q.start.head(7));
  CHECK(r.arms[1].final_path.back() == q.goal.tail(7));
  CHECK(r.motion_duration >=
        std::max(r.arms[0].trajectory.duration(), r.arms[1].trajectory.duration()) - 1e-12);
  CHECK((p.executed_configuration(r, r.motion_duration) - q.goal).norm() < 1e-12);
  CHECK(sampled_min_clearance(p, r, 0.005) >= 0.0);
  CHECK(!r.coordination_path.empty());
  check_timing(r);
  const StageTimes& crit = r.arms[0].times.motion_planning > r.arms[1].times.motion_planning
                               ? r.arms[0].times
                               : r.arms[1].times;
  CHECK(r.times.path_planner == crit.path_planner);
  CHECK(r.times.motion_planning == doctest::Approx(crit.motion_planning + r.times.coordination));
}

TEST_CASE("post-processing can be switched off") {
  const PlanResult r = desk_planner().plan_centralized(desk().queries[2], options(5, false));
  REQUIRE(r.outcome == Outcome::success);
  CHECK(r.arms[0].plpp_input.empty());
  CHECK(r.times.plpp == 0.0);
  CHECK(r.modified_length == r.original_length);
}

TEST_CASE("a single retry attempt is the plain plan") {
  const Planner& p = desk_planner();
  const MotionQuery& q = desk().queries[3];
  const PlanResult a = p.plan(PlanningMode::decoupled, q, options(6));
  const PlanResult b = p.plan_with_retries(PlanningMode::decoupled, q, options(6), 1);
  CHECK(a.outcome == b.outcome);
  CHECK(b.attempts == 1);
  CHECK(b.attempt == 0);
  REQUIRE(a.arms.size() == b.arms.size());
  for (std::size_t i = 0; i < a.arms.size(); ++i) CHECK(a.arms[i].final_path == b.arms[i].final_path);
  CHECK(a.coordination_path == b.coordination_path);
}

TEST_CASE("retries return the lowest successful attempt") {
  const Planner& p = desk_planner();
  const PlanResult r = p.plan_with_retries(PlanningMode::centralized, desk().queries[4], options(7), 3);
  CHECK(r.attempts == 3);
  REQUIRE(r.outcome == Outcome::success);
  CHECK(r.seed == attempt_seed(7, r.attempt));
  const PlanResult first = p.plan(PlanningMode::centralized, desk().queries[4], options(7));
  if (first.outcome == Outcome::success) {
    CHECK(r.attempt == 0);
    CHECK(r.arms[0].final_path == first.arms[0].final_path);
  }
}

TEST_CASE("decoupled planning deadlocks where the arms must swap") {
  const Scenario& s = deadlock();
  const Planner p(s.world(), s.params);
  const PlanResult r = p.plan_decoupled(s.queries.at(0), options(1));
  CHECK(r.outcome == Outcome::coordination_failure);
  CHECK(r.coordination_path.empty());
  CHECK(r.arms.size() == 2);
}

TEST_CASE("cancellation stops planning") {
  std::atomic<bool> stop{true};
  PlanOptions o = options(1);
  o.cancel = &stop;
  const PlanResult r = desk_planner().plan_centralized(desk().queries[0], o);
  CHECK(r.outcome == Outcome::planning_failure);
  CHECK(r.cancelled);
}
