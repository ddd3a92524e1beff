#include <doctest.h>

#include <cmath>

#include "dualarm/errors.hpp"
#include "dualarm/rng.hpp"
#include "dualarm/sampling.hpp"

using namespace dualarm;

namespace {

// Unit square with a wall at x in [0.45, 0.55] that is open for y in [0.8, 0.9].
bool corridor_free(const Eigen::VectorXd& q) {
  return !(q[0] >= 0.45 && q[0] <= 0.55 && !(q[1] >= 0.8 && q[1] <= 0.9));
}

StateSpace corridor(double fraction = 0.001) {
  return StateSpace(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), corridor_free, fraction);
}

Eigen::VectorXd v2(double x, double y) { return Eigen::Vector2d(x, y); }

// Every segment checked at a tenth of the planner's resolution.
bool path_valid_fine(const JointPath& path) {
  const StateSpace fine = corridor(0.0001);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!fine.segment_valid(path[i], path[i + 1])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("path length sums segment norms") {
  const JointPath p{v2(0, 0), v2(3, 4), v2(3, 5)};
  CHECK(path_length(p) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(path_length({v2(1, 1)}) == 0.0);
}

TEST_CASE("segment checks are spaced by the resolution") {
  const StateSpace s = corridor();
  CHECK(s.extent() == doctest::Approx(2.0));
  CHECK(s.resolution() == doctest::Approx(0.002));
  CHECK(s.check_count(0.0) == 1);
  CHECK(s.check_count(0.001) == 2);
  CHECK(s.check_count(0.002) == 2);
  CHECK(s.check_count(0.0021) == 3);
  CHECK(s.check_count(0.1) == static_cast<std::size_t>(std::ceil(0.1 / 0.002)) + 1);

  std::size_t calls = 0;
  const StateSpace counting(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1),
                            [&](const Eigen::VectorXd&) { ++calls; return true; }, 0.001);
  CHECK(counting.segment_valid(v2(0.1, 0.1), v2(0.4, 0.5)));
  CHECK(calls == counting.check_count(0.5));
}

TEST_CASE("segment validity includes both endpoints") {
  const Eigen::VectorXd bad = v2(0.9, 0.9);
  const StateSpace s(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1),
                     [&](const Eigen::VectorXd& q) { return (q - bad).norm() > 1e-12; }, 0.001);
  CHECK_FALSE(s.segment_valid(v2(0.1, 0.1), bad));
  CHECK_FALSE(s.segment_valid(bad, v2(0.1, 0.1)));
  CHECK(s.segment_valid(v2(0.1, 0.1), v2(0.2, 0.7)));
}

TEST_CASE("bidirectional RRT finds a corridor path") {
  const StateSpace s = corridor();
  PlannerParams params;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    params.seed = seed;
    const PlannerResult r = rrt_connect(s, v2(0.1, 0.1), v2(0.9, 0.1), params);
    REQUIRE(r.solved);
    CHECK((r.path.front() - v2(0.1, 0.1)).norm() == 0.0);
    CHECK((r.path.back() - v2(0.9, 0.1)).norm() == 0.0);
    CHECK(path_valid_fine(r.path));
    for (const auto& q : r.path) CHECK(s.inside(q));
  }
}

TEST_CASE("planner output depends only on the seed") {
  const StateSpace s = corridor();
  PlannerParams params;
  params.seed = 99;
  const PlannerResult a = rrt_connect(s, v2(0.1, 0.1), v2(0.9, 0.1), params);
  const PlannerResult b = rrt_connect(s, v2(0.1, 0.1), v2(0.9, 0.1), params);
  REQUIRE(a.path.size() == b.path.size());
  for (std::size_t i = 0; i < a.path.size(); ++i) CHECK((a.path[i] - b.path[i]).norm() == 0.0);
}

TEST_CASE("planner preconditions and budget") {
  const StateSpace s = corridor();
  PlannerParams params;
  CHECK_THROWS_AS(rrt_connect(s, v2(0.5, 0.1), v2(0.9, 0.1), params), PreconditionError);
  CHECK_THROWS_AS(rrt_connect(s, v2(0.1, 0.1), v2(1.5, 0.1), params), PreconditionError);
  // Fully closed wall: the budget runs out and the failure is reported as data.
  const StateSpace closed(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1),
                          [](const Eigen::VectorXd& q) { return q[0] < 0.45 || q[0] > 0.55; }, 0.001);
  params.max_iterations = 500;
  const PlannerResult r = rrt_connect(closed, v2(0.1, 0.1), v2(0.9, 0.1), params);
  CHECK_FALSE(r.solved);
  CHECK(r.path.empty());
  CHECK(r.iterations <= 500);
}

TEST_CASE("planner honours cancellation") {
  const StateSpace closed(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1),
                          [](const Eigen::VectorXd& q) { return q[0] < 0.45 || q[0] > 0.55; }, 0.001);
  std::atomic<bool> cancel{true};
  PlannerParams params;
  params.cancel = &cancel;
  const PlannerResult r = rrt_connect(closed, v2(0.1, 0.1), v2(0.9, 0.1), params);
  CHECK_FALSE(r.solved);
  CHECK(r.cancelled);
}

TEST_CASE("simplification keeps endpoints, validity and never lengthens") {
  const StateSpace s = corridor();
  PlannerParams params;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    params.seed = seed;
    const PlannerResult r = rrt_connect(s, v2(0.1, 0.1), v2(0.9, 0.1), params);
    REQUIRE(r.solved);
    SimplifyParams sp;
    sp.seed = seed;
    sp.max_time = std::numeric_limits<double>::infinity();
    const JointPath p = simplify(s, r.path, sp);
    CHECK((p.front() - r.path.front()).norm() == 0.0);
    CHECK((p.back() - r.path.back()).norm() == 0.0);
    CHECK(path_length(p) <= path_length(r.path) + 1e-12);
    CHECK(path_valid_fine(p));
    // Through the gap: at least the detour to y = 0.8.
    CHECK(path_length(p) >= 2 * std::hypot(0.35, 0.7) - 1e-9);
  }
}

TEST_CASE("collinear pruning drops only straight interior vertices") {
  const StateSpace s = corridor();
  const JointPath p{v2(0.1, 0.1), v2(0.2, 0.2), v2(0.3, 0.3), v2(0.3, 0.6)};
  const JointPath pruned = prune_collinear(s, p, 1e-9);
  REQUIRE(pruned.size() == 3);
  CHECK((pruned[1] - v2(0.3, 0.3)).norm() == 0.0);
}

TEST_CASE("densify reaches the waypoint count without moving the path") {
  const JointPath p{v2(0, 0), v2(1, 0), v2(1, 0.1)};
  const JointPath d = densify(p, 20);
  REQUIRE(d.size() == 20);
  CHECK(path_length(d) == doctest::Approx(path_length(p)).epsilon(1e-14));
  CHECK((d.front() - p.front()).norm() == 0.0);
  CHECK((d.back() - p.back()).norm() == 0.0);
  // The original corner is kept.
  bool corner = false;
  for (const auto& q : d) corner = corner || (q - p[1]).norm() == 0.0;
  CHECK(corner);
  // Spacing is proportional to segment length: most points on the long segment.
  std::size_t on_long = 0;
  for (const auto& q : d) on_long += q[1] == 0.0 ? 1 : 0;
  CHECK(on_long >= 17);
  CHECK(densify(d, 10).size() == 20);
  CHECK_THROWS_AS(densify({v2(0, 0)}, 5), InvalidInput);
}
