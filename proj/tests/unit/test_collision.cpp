#include <doctest.h>

#include "dualarm/collision.hpp"
#include "dualarm/distance_meter.hpp"
#include "dualarm/errors.hpp"
#include "exhaustive.hpp"
#include "fixtures.hpp"

using namespace dualarm;

namespace {

// Arm 0: one joint at the origin, unit arm, sphere radius 0.1 at its tip.
// Arm 1: the same far away. Obstacle: sphere radius 0.2 at (2, 0.5, 0).
CollisionWorld pendulum_world() {
  Scene scene;
  scene.obstacles.push_back({"ball", {SsvPrimitive::sphere({2, 0.5, 0}, 0.2)}});
  return CollisionWorld(scene, {testing::one_joint_chain({0, 0, 0}, 1.0, 0.1),
                                testing::one_joint_chain({10, 0, 0}, 1.0, 0.1)});
}

Eigen::VectorXd desk_configuration(Rng& rng) {
  const auto& s = testing::desk();
  const CompositeChain c(s.chains[0], s.chains[1]);
  return rng.uniform(c.lower_limits(), c.upper_limits());
}

}  // namespace

TEST_CASE("exclusions are stored symmetrically") {
  Scene scene;
  scene.exclude({0, 3}, {kEnvironment, 1});
  CHECK(scene.excluded({0, 3}, {kEnvironment, 1}));
  CHECK(scene.excluded({kEnvironment, 1}, {0, 3}));
  CHECK_FALSE(scene.excluded({0, 2}, {kEnvironment, 1}));
  CHECK(scene.exclusions().size() == 2);
}

TEST_CASE("pair enumeration honours modes and exclusions") {
  const auto& s = testing::desk();
  const CollisionWorld world = s.world();
  for (const auto& [a, b] : world.pairs(ClearanceMode::full)) {
    CHECK(a.entity.owner >= 0);
    CHECK_FALSE(s.scene.excluded(a.entity, b.entity));
    if (a.entity.owner == b.entity.owner) {
      const auto gap = a.entity.index > b.entity.index ? a.entity.index - b.entity.index
                                                       : b.entity.index - a.entity.index;
      CHECK(gap > 1);
    }
  }
  for (const auto& [a, b] : world.pairs(ClearanceMode::robot_robot_only)) {
    CHECK(a.entity.owner >= 0);
    CHECK(b.entity.owner >= 0);
    CHECK(a.entity.owner != b.entity.owner);
  }
  for (std::size_t arm = 0; arm < 2; ++arm) {
    for (const auto& [a, b] : world.pairs(ClearanceMode::single_arm, arm)) {
      CHECK(a.entity.owner == static_cast<int>(arm));
      CHECK((b.entity.owner == static_cast<int>(arm) || b.entity.owner == kEnvironment));
    }
  }
  CHECK(world.query_dof(ClearanceMode::full) == 14);
  CHECK(world.query_dof(ClearanceMode::robot_robot_only) == 14);
  CHECK(world.query_dof(ClearanceMode::single_arm, 1) == 7);
}

TEST_CASE("scene minimum equals the exhaustive pair minimum") {
  Rng rng(67);
  const auto& chains = testing::desk().chains;
  for (int scene = 0; scene < 20; ++scene) {
    const CollisionWorld world = testing::random_world(rng, chains, 1 + rng.index(6));
    for (int i = 0; i < 5; ++i) {
      const Eigen::VectorXd q = desk_configuration(rng);
      for (ClearanceMode mode : {ClearanceMode::full, ClearanceMode::robot_robot_only}) {
        const ClearanceResult r = world.min_clearance(q, mode);
        const auto [value, index] = testing::exhaustive_min(world, q, mode);
        CHECK(r.value() == value);
        CHECK(r.pair_index == index);
      }
      for (std::size_t arm = 0; arm < 2; ++arm) {
        const Eigen::VectorXd qa = arm == 0 ? q.head(7) : q.tail(7);
        const auto [value, index] = testing::exhaustive_min(world, qa, ClearanceMode::single_arm, arm);
        CHECK(world.min_clearance(qa, ClearanceMode::single_arm, arm).value() == value);
      }
    }
  }
}

TEST_CASE("clearance_at_least agrees with min_clearance") {
  Rng rng(71);
  const CollisionWorld world = testing::desk().world();
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd q = desk_configuration(rng);
    const double d = world.min_clearance(q, ClearanceMode::full).value();
    for (double margin : {-0.05, 0.0, 0.01, 0.1}) {
      CHECK(world.clearance_at_least(q, ClearanceMode::full, margin) == (d >= margin));
    }
  }
}

TEST_CASE("single joint clearance gradient has the symbolic value") {
  const CollisionWorld world = pendulum_world();
  for (double q0 = -2.5; q0 <= 2.5; q0 += 0.25) {
    Eigen::VectorXd q(1);
    q << q0;
    const double dx = std::cos(q0) - 2, dy = std::sin(q0) - 0.5;
    const double dist = std::hypot(dx, dy);
    const ClearanceWithGradient r = world.clearance_with_gradient(q, ClearanceMode::single_arm, 0);
    CHECK(r.clearance.value() == doctest::Approx(dist - 0.3).epsilon(1e-14));
    const double expected = (-dx * std::sin(q0) + dy * std::cos(q0)) / dist;
    CHECK(r.gradient[0] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("clearance gradient matches central differences at feasible desk configurations") {
  Rng rng(73);
  const CollisionWorld world = testing::desk().world();
  const double h = 1e-6;
  int compared = 0;
  while (compared < 30) {
    const Eigen::VectorXd q = desk_configuration(rng);
    const ClearanceWithGradient r = world.clearance_with_gradient(q, ClearanceMode::full);
    // Inside an overlap of skeletons the distance is flat and the normal arbitrary.
    if (r.clearance.value() < 0.0) continue;
    bool same_pair = true;
    Eigen::VectorXd fd(q.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      Eigen::VectorXd qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      const ClearanceResult p = world.min_clearance(qp, ClearanceMode::full);
      const ClearanceResult m = world.min_clearance(qm, ClearanceMode::full);
      same_pair = same_pair && p.pair_index == r.clearance.pair_index && m.pair_index == r.clearance.pair_index;
      fd[k] = (p.value() - m.value()) / (2 * h);
    }
    if (!same_pair || r.gradient.norm() < 1e-3) continue;
    ++compared;
    CHECK((fd - r.gradient).norm() < 1e-5 * r.gradient.norm());
  }
}

TEST_CASE("queries reject configurations of the wrong size") {
  const CollisionWorld world = testing::desk().world();
  CHECK_THROWS_AS(world.min_clearance(Eigen::VectorXd::Zero(7), ClearanceMode::full), InvalidInput);
  CHECK_THROWS_AS(world.min_clearance(Eigen::VectorXd::Zero(14), ClearanceMode::single_arm, 0),
                  InvalidInput);
}

TEST_CASE("distance meter counts outermost queries only") {
  const CollisionWorld world = testing::desk().world();
  auto& meter = DistanceMeter::local();
  meter.reset();
  const Eigen::VectorXd q = testing::desk().queries[0].start;
  world.min_clearance(q, ClearanceMode::full);
  world.clearance_with_gradient(q, ClearanceMode::full);
  world.clearance_at_least(q, ClearanceMode::full, 0.0);
  const auto snap = meter.snapshot();
  CHECK(snap.calls == 3);
  CHECK(snap.seconds >= 0.0);
  {
    const DistanceMeter::Scope outer;
    world.min_clearance(q, ClearanceMode::full);
  }
  CHECK(meter.snapshot().calls == 4);
  DistanceMeter::Snapshot other{5, 1.0};
  meter.merge(other);
  CHECK(meter.snapshot().calls == 9);
  meter.reset();
  CHECK(meter.snapshot().calls == 0);
}

TEST_CASE("near pairs start with the closest pair and stay within the window") {
  Rng rng(97);
  const CollisionWorld world = testing::desk().world();
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd q = desk_configuration(rng);
    const ClearanceWithGradient best = world.clearance_with_gradient(q, ClearanceMode::full);
    const auto near = world.near_clearances(q, ClearanceMode::full, 0, 0.05, 6, true);
    REQUIRE_FALSE(near.empty());
    CHECK(near.size() <= 6);
    CHECK(near[0].pair_index == best.clearance.pair_index);
    CHECK(near[0].distance.distance == best.clearance.value());
    CHECK((near[0].gradient - best.gradient).norm() == 0.0);
    for (std::size_t k = 1; k < near.size(); ++k) {
      CHECK(near[k].distance.distance <= best.clearance.value() + 0.05);
      if (k > 1) CHECK(near[k].distance.distance >= near[k - 1].distance.distance);
      const PairClearance single = world.pair_clearance(q, ClearanceMode::full, 0, near[k].pair_index, true);
      CHECK(single.distance.distance == near[k].distance.distance);
      CHECK((single.gradient - near[k].gradient).norm() == 0.0);
    }
    const auto& pairs = world.pairs(ClearanceMode::full);
    // Every pair inside the window is reported when the limit allows it.
    const auto all = world.near_clearances(q, ClearanceMode::full, 0, 0.05, pairs.size(), false);
    std::size_t inside = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double d = ssv_distance(world.placed(pairs[p].first, q, ClearanceMode::full),
                                    world.placed(pairs[p].second, q, ClearanceMode::full))
                           .distance;
      if (d <= best.clearance.value() + 0.05) ++inside;
    }
    CHECK(all.size() == inside);
    CHECK(all[0].gradient.size() == 0);
  }
  CHECK_THROWS_AS(world.pair_clearance(Eigen::VectorXd::Zero(14), ClearanceMode::full, 0,
                                       world.pairs(ClearanceMode::full).size(), false),
                  InvalidInput);
}
