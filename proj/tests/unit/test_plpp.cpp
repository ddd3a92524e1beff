#include <doctest.h>

#include "dualarm/errors.hpp"
#include "dualarm/plpp.hpp"
#include "fixtures.hpp"
#include "plans.hpp"

using namespace dualarm;

namespace {

Eigen::VectorXd q1(double v) {
  Eigen::VectorXd q(1);
  q << v;
  return q;
}

Eigen::VectorXd central_gradient(const PlppProblem& p, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (p.objective(xp) - p.objective(xm)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("combined length of a single joint rotation has the closed form") {
  const SerialChain c = testing::one_joint_chain({0, 0, 0}, 2.0, 0.1);
  const double alpha = 5.0;
  for (double theta : {0.1, 0.5, 1.0, 2.0}) {
    const JointPath p{q1(0.0), q1(theta)};
    const double chord = 2 * 2.0 * std::sin(theta / 2);
    CHECK(combined_path_length(c, p, alpha) ==
          doctest::Approx(0.5 * (alpha * chord * chord + theta * theta)).epsilon(1e-13));
    CHECK(rotational_path_length(c, p) == doctest::Approx(0.5 * theta * theta).epsilon(1e-13));
  }
  // Two steps of 0.1 rad on a 1 m arm: 0.5 * 2 * (alpha * (2 sin 0.05)^2 + 0.01).
  const SerialChain unit = testing::one_joint_chain({0, 0, 0}, 1.0, 0.1);
  const JointPath p{q1(0.0), q1(0.1), q1(0.2)};
  const double chord = 2 * std::sin(0.05);
  CHECK(combined_path_length(unit, p, alpha) ==
        doctest::Approx(alpha * chord * chord + 0.01).epsilon(1e-13));
  CHECK(combined_path_length(unit, p, 0.0) == doctest::Approx(0.01).epsilon(1e-13));
}

TEST_CASE("world length sums the active chains") {
  const auto& s = testing::desk();
  const CollisionWorld world = s.world();
  Rng rng(79);
  const JointPath l = testing::random_arm_path(rng, s.chains[0], 10, 0.05);
  const JointPath r = testing::random_arm_path(rng, s.chains[1], 10, 0.05);
  JointPath both;
  for (std::size_t i = 0; i < 10; ++i) {
    Eigen::VectorXd q(14);
    q << l[i], r[i];
    both.push_back(q);
  }
  const double expected = combined_path_length(s.chains[0], l, 5.0) + combined_path_length(s.chains[1], r, 5.0);
  CHECK(combined_path_length(world, ClearanceMode::full, 0, both, 5.0) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(combined_path_length(world, ClearanceMode::single_arm, 1, r, 5.0) ==
        doctest::Approx(combined_path_length(s.chains[1], r, 5.0)).epsilon(1e-14));
  CHECK(rotational_path_length(world, ClearanceMode::full, 0, both) ==
        doctest::Approx(rotational_path_length(s.chains[0], l) + rotational_path_length(s.chains[1], r))
            .epsilon(1e-14));
}

TEST_CASE("objective gradient matches central differences") {
  const auto& s = testing::desk();
  const CollisionWorld world = s.world();
  Rng rng(83);
  for (int i = 0; i < 20; ++i) {
    const std::size_t arm = rng.index(2);
    const PlppProblem p(world, ClearanceMode::single_arm, arm,
                        testing::random_arm_path(rng, s.chains[arm], 20, 0.05), s.params.plpp);
    const Eigen::VectorXd x = p.initial_variables();
    Eigen::VectorXd g;
    const double f = p.objective_and_gradient(x, g);
    CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f == p.objective(x));
    CHECK((central_gradient(p, x, 1e-6) - g).norm() < 1e-6 * g.norm());
  }
}

TEST_CASE("translational objective ignores rotation") {
  const SerialChain c = testing::one_joint_chain({0, 0, 0}, 1.0, 0.1);
  const CollisionWorld world(Scene{}, {c, testing::one_joint_chain({5, 0, 0}, 1.0, 0.1)});
  PlppParams params;
  params.rotation_term = false;
  const PlppProblem p(world, ClearanceMode::single_arm, 0, {q1(0.0), q1(0.3), q1(0.4)}, params);
  // objective is scaled by its own initial value
  Eigen::VectorXd x = p.initial_variables();
  x[0] = 0.2;
  const double a = 2 * std::sin(0.1);
  const double c0 = 2 * std::sin(0.15), c1 = 2 * std::sin(0.05);
  CHECK(p.objective(x) == doctest::Approx(2 * a * a / (c0 * c0 + c1 * c1)).epsilon(1e-12));
}

TEST_CASE("constraint Jacobian matches central differences") {
  const auto& s = testing::desk();
  const CollisionWorld world = s.world();
  Rng rng(89);
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t arm = rng.index(2);
    const PlppProblem p(world, ClearanceMode::single_arm, arm,
                        testing::random_arm_path(rng, s.chains[arm], 8, 0.05), s.params.plpp);
    const Eigen::VectorXd x = p.initial_variables();
    Eigen::MatrixXd jac;
    const Eigen::VectorXd c = p.constraints_and_jacobian(x, jac);
    CHECK((c - p.constraints(x)).norm() == 0.0);
    REQUIRE(c.size() == static_cast<Eigen::Index>(p.interior_count()));
    const double h = 1e-7;
    for (Eigen::Index row = 0; row < c.size(); ++row) {
      if (c[row] < 0.0) continue;  // overlapping skeletons have no derivative
      Eigen::VectorXd fd(x.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        Eigen::VectorXd xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        fd[k] = (p.constraints(xp)[row] - p.constraints(xm)[row]) / (2 * h);
      }
      // Rows couple only to their own waypoint.
      const Eigen::VectorXd analytic = jac.row(row).transpose();
      if ((fd - analytic).norm() < 1e-4 * analytic.norm()) ++checked;
      CHECK((fd - analytic).norm() < 1e-3 * analytic.norm() + 1e-9);
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("optimized paths are feasible, shorter and keep their endpoints") {
  const auto& s = testing::desk();
  const CollisionWorld world = s.world();
  for (std::size_t q = 0; q < 3; ++q) {
    const std::size_t arm = q % 2;
    const JointPath input = testing::planned_arm_path(s, world, q, arm, 100 + q);
    REQUIRE(input.size() == s.params.min_waypoints);
    const PlppResult r = optimize(world, ClearanceMode::single_arm, arm, input, s.params.plpp);
    INFO("status " << to_string(r.report.status));
    CHECK((r.report.status == PlppStatus::converged || r.report.status == PlppStatus::iteration_limit));
    REQUIRE(r.path.size() == input.size());
    CHECK((r.path.front() - input.front()).norm() == 0.0);
    CHECK((r.path.back() - input.back()).norm() == 0.0);
    for (std::size_t i = 1; i + 1 < r.path.size(); ++i) {
      CHECK(world.min_clearance(r.path[i], ClearanceMode::single_arm, arm).value() >=
            s.params.plpp.d_obs * (1 - 1e-6));
      CHECK(s.chains[arm].within_limits(r.path[i]));
    }
    CHECK(r.report.final_length < r.report.initial_length);
    CHECK(r.report.final_length ==
          doctest::Approx(combined_path_length(s.chains[arm], r.path, s.params.plpp.alpha)).epsilon(1e-12));
    for (double drop : r.report.merit_drops) CHECK(drop >= 0.0);
    CHECK(r.report.iterations <= s.params.plpp.max_iterations);
  }
}

TEST_CASE("two waypoints are returned untouched") {
  const auto& s = testing::desk();
  const CollisionWorld world = s.world();
  const JointPath p{s.queries[0].start.head(7), s.queries[0].goal.head(7)};
  const PlppResult r = optimize(world, ClearanceMode::single_arm, 0, p, s.params.plpp);
  CHECK(r.report.status == PlppStatus::trivial);
  CHECK((r.path[0] - p[0]).norm() == 0.0);
  CHECK((r.path[1] - p[1]).norm() == 0.0);
}

TEST_CASE("an unrecoverable start is reported and returned unchanged") {
  // The whole joint range keeps the arm tip inside a large ball.
  Scene scene;
  scene.obstacles.push_back({"ball", {SsvPrimitive::sphere({1, 0, 0}, 0.5)}});
  const CollisionWorld world(scene, {testing::one_joint_chain({0, 0, 0}, 1.0, 0.1, -0.1, 0.1),
                                     testing::one_joint_chain({5, 0, 0}, 1.0, 0.1)});
  const JointPath p{q1(-0.1), q1(-0.05), q1(0.0), q1(0.05), q1(0.1)};
  const PlppResult r = optimize(world, ClearanceMode::single_arm, 0, p, PlppParams{});
  CHECK(r.report.status == PlppStatus::infeasible_start);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK((r.path[i] - p[i]).norm() == 0.0);
}

TEST_CASE("a waypoint inside the margin is pushed out") {
  // Ball just outside the swept arc; the waypoint at 0.5 rad grazes it.
  Scene scene;
  scene.obstacles.push_back({"ball", {SsvPrimitive::sphere({std::cos(0.52) * 1.25, std::sin(0.52) * 1.25, 0}, 0.149)}});
  const CollisionWorld world(scene, {testing::one_joint_chain({0, 0, 0}, 1.0, 0.1),
                                     testing::one_joint_chain({5, 0, 0}, 1.0, 0.1)});
  JointPath p;
  for (int i = 0; i <= 10; ++i) p.push_back(q1(0.1 * i));
  const PlppResult r = optimize(world, ClearanceMode::single_arm, 0, p, PlppParams{});
  CHECK(r.report.restoration_steps > 0);
  CHECK(r.report.status != PlppStatus::infeasible_start);
  for (std::size_t i = 1; i + 1 < r.path.size(); ++i) {
    CHECK(world.min_clearance(r.path[i], ClearanceMode::single_arm, 0).value() >= 0.01 * (1 - 1e-6));
  }
}

TEST_CASE("numeric and analytic gradients reach the same objective") {
  const auto& s = testing::desk();
  const CollisionWorld world = s.world();
  const JointPath input = testing::planned_arm_path(s, world, 4, 1, 7);
  REQUIRE_FALSE(input.empty());
  PlppParams params = s.params.plpp;
  const PlppResult a = optimize(world, ClearanceMode::single_arm, 1, input, params);
  params.gradient = GradientMode::numeric;
  const PlppResult n = optimize(world, ClearanceMode::single_arm, 1, input, params);
  CHECK(std::abs(a.report.final_objective - n.report.final_objective) <= 0.01 * a.report.final_objective);
}

TEST_CASE("cancellation stops the optimizer") {
  const auto& s = testing::desk();
  const CollisionWorld world = s.world();
  const JointPath input = testing::planned_arm_path(s, world, 0, 0, 3);
  REQUIRE_FALSE(input.empty());
  std::atomic<bool> cancel{true};
  PlppParams params = s.params.plpp;
  params.cancel = &cancel;
  const PlppResult r = optimize(world, ClearanceMode::single_arm, 0, input, params);
  CHECK(r.report.status == PlppStatus::cancelled);
}

TEST_CASE("without obstacles the waypoints spread evenly") {
  // Unconstrained optimum of the summed squared steps: equal increments.
  const SerialChain c = testing::one_joint_chain({0, 0, 0}, 1.0, 0.1);
  const CollisionWorld world(Scene{}, {c, testing::one_joint_chain({5, 0, 0}, 1.0, 0.1)});
  const JointPath p{q1(0.0), q1(0.05), q1(0.1), q1(0.7), q1(0.8), q1(1.0)};
  const PlppResult r = optimize(world, ClearanceMode::single_arm, 0, p, PlppParams{});
  CHECK(r.report.status == PlppStatus::converged);
  const double n = 5.0;
  const double chord = 2 * std::sin(0.5 / n);
  CHECK(combined_path_length(c, r.path, 5.0) ==
        doctest::Approx(n * 0.5 * (5.0 * chord * chord + 1.0 / (n * n))).epsilon(1e-3));
  for (std::size_t i = 0; i < r.path.size(); ++i) CHECK(r.path[i][0] == doctest::Approx(i / n).epsilon(0.02));
}
