#pragma once

#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dualarm/kinematics.hpp"
#include "dualarm/ssv.hpp"

namespace dualarm {

/// Owner index used for static environment objects.
inline constexpr int kEnvironment = -1;

/// A collision entity: a link of a chain (owner >= 0) or an environment object.
struct EntityId {
  int owner{kEnvironment};
  std::size_t index{0};

  auto operator<=>(const EntityId&) const = default;
};

/// One primitive of an entity.
struct BodyRef {
  EntityId entity;
  std::size_t primitive{0};
};

struct Obstacle {
  std::string name;
  std::vector<SsvPrimitive> primitives;  // world frame
};

/// Static environment plus the entity pairs that are never checked.
/// Adjacent links of one chain are always excluded and need not be listed.
class Scene {
 public:
  std::vector<Obstacle> obstacles;

  /// Stores the pair in both orders, keeping the set symmetric.
  void exclude(EntityId a, EntityId b);
  bool excluded(EntityId a, EntityId b) const;
  const std::set<std::pair<EntityId, EntityId>>& exclusions() const { return exclusions_; }

 private:
  std::set<std::pair<EntityId, EntityId>> exclusions_;
};

/// Which pairs a clearance query considers.
///  - full: link-environment, inter-robot and same-arm non-adjacent pairs of all chains
///  - robot_robot_only: pairs between different chains
///  - single_arm: one chain against the environment and itself, other chains ignored
enum class ClearanceMode { full, robot_robot_only, single_arm };

/// Minimal-distance pair of a clearance query.
struct ClearanceResult {
  DistanceResult distance;  // witness_a on body a, normal points from b to a
  BodyRef a;                // always a robot body
  BodyRef b;
  std::size_t pair_index{0};  // position in the deterministic pair enumeration
  bool has_pair{false};       // false when the mode has no pairs at all

  double value() const {
    return has_pair ? distance.distance : std::numeric_limits<double>::infinity();
  }
};

struct ClearanceWithGradient {
  ClearanceResult clearance;
  Eigen::VectorXd gradient;  // d(distance)/dq in the query's q layout
};

/// Distance of one enumerated pair, optionally with d(distance)/dq.
struct PairClearance {
  std::size_t pair_index{0};
  DistanceResult distance;
  Eigen::VectorXd gradient;  // empty unless requested
};

/// Scene and chains bound together for distance queries.
///
/// The configuration passed to a query covers the active chains only: all
/// chains concatenated in order for `full` and `robot_robot_only`, the single
/// selected chain for `single_arm`. Immutable after construction; queries are
/// reentrant.
class CollisionWorld {
 public:
  CollisionWorld(Scene scene, std::vector<SerialChain> chains);

  const Scene& scene() const { return scene_; }
  const std::vector<SerialChain>& chains() const { return chains_; }
  const SerialChain& chain(std::size_t i) const { return chains_.at(i); }

  /// Length of q expected by a query in `mode`.
  std::size_t query_dof(ClearanceMode mode, std::size_t arm = 0) const;

  /// Minimum signed distance over all pairs of the mode. Ties go to the pair
  /// that comes first in the enumeration.
  ClearanceResult min_clearance(const Eigen::VectorXd& q, ClearanceMode mode,
                                std::size_t arm = 0) const;

  /// min_clearance plus d(distance)/dq = n^T (J_a - J_b) of the witness points.
  ClearanceWithGradient clearance_with_gradient(const Eigen::VectorXd& q, ClearanceMode mode,
                                                std::size_t arm = 0) const;

  Eigen::VectorXd clearance_gradient(const Eigen::VectorXd& q, ClearanceMode mode,
                                     std::size_t arm = 0) const {
    return clearance_with_gradient(q, mode, arm).gradient;
  }

  /// Every pair within `window` of the minimum distance, closest first (ties
  /// by enumeration order), at most `limit` of them. The first entry is the
  /// pair min_clearance reports.
  std::vector<PairClearance> near_clearances(const Eigen::VectorXd& q, ClearanceMode mode,
                                             std::size_t arm, double window, std::size_t limit,
                                             bool with_gradient) const;

  /// Distance of pair `pair_index` of the mode's enumeration.
  PairClearance pair_clearance(const Eigen::VectorXd& q, ClearanceMode mode, std::size_t arm,
                               std::size_t pair_index, bool with_gradient) const;

  /// Equivalent to min_clearance(q, mode, arm).value() >= margin, with early exit.
  bool clearance_at_least(const Eigen::VectorXd& q, ClearanceMode mode, double margin,
                          std::size_t arm = 0) const;

  /// Pairs of `mode` in enumeration order (used by tests and the exhaustive oracle).
  const std::vector<std::pair<BodyRef, BodyRef>>& pairs(ClearanceMode mode,
                                                        std::size_t arm = 0) const;

  /// World-frame primitive of `body` at the active configuration q.
  SsvPrimitive placed(const BodyRef& body, const Eigen::VectorXd& q, ClearanceMode mode,
                      std::size_t arm = 0) const;

 private:
  struct Placement;
  struct Candidate {
    const SsvPrimitive* primitive;
    const Eigen::Vector3d* center;
    double bound;
  };

  Candidate resolve(const Placement& placement, const BodyRef& body) const;

  std::vector<std::size_t> active_chains(ClearanceMode mode, std::size_t arm) const;
  Placement place(const Eigen::VectorXd& q, ClearanceMode mode, std::size_t arm) const;
  ClearanceResult search(const Placement& placement, ClearanceMode mode, std::size_t arm) const;
  Eigen::VectorXd witness_gradient(const Placement& placement, const BodyRef& a, const BodyRef& b,
                                   const DistanceResult& d, Eigen::Index size) const;

  Scene scene_;
  std::vector<SerialChain> chains_;
  std::vector<std::pair<BodyRef, BodyRef>> full_pairs_;
  std::vector<std::pair<BodyRef, BodyRef>> robot_pairs_;
  std::vector<std::vector<std::pair<BodyRef, BodyRef>>> single_pairs_;
  std::vector<std::pair<Eigen::Vector3d, double>> obstacle_bounds_;  // flattened
  std::vector<std::size_t> obstacle_offset_;
};

}  // namespace dualarm
