#include "dualarm/collision.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "dualarm/distance_meter.hpp"
#include "dualarm/errors.hpp"

namespace dualarm {

void Scene::exclude(EntityId a, EntityId b) {
  exclusions_.insert({a, b});
  exclusions_.insert({b, a});
}

bool Scene::excluded(EntityId a, EntityId b) const {
  if (a.owner >= 0 && a.owner == b.owner) {
    const auto lo = std::min(a.index, b.index);
    const auto hi = std::max(a.index, b.index);
    if (hi - lo <= 1) return true;
  }
  return exclusions_.count({a, b}) > 0;
}

struct CollisionWorld::Placement {
  struct Placed {
    SsvPrimitive primitive;
    Eigen::Vector3d center;
    double bound;
  };
  std::vector<std::optional<FkResult>> fk;                   // per chain
  std::vector<std::vector<std::vector<Placed>>> bodies;      // [chain][link][primitive]
  std::vector<std::size_t> offset;                           // q offset per chain
};

CollisionWorld::CollisionWorld(Scene scene, std::vector<SerialChain> chains)
    : scene_(std::move(scene)), chains_(std::move(chains)) {
  for (auto& c : chains_) {
    c.validate();
    c.link_bodies.resize(c.link_count());
  }
  for (const auto& o : scene_.obstacles) {
    obstacle_offset_.push_back(obstacle_bounds_.size());
    for (const auto& p : o.primitives) {
      p.validate();
      obstacle_bounds_.push_back(bounding_sphere(p));
    }
  }

  auto env_pairs = [&](std::size_t c, std::vector<std::pair<BodyRef, BodyRef>>& out) {
    const auto& chain = chains_[c];
    for (std::size_t k = 0; k < chain.link_count(); ++k) {
      const EntityId link{static_cast<int>(c), k};
      for (std::size_t p = 0; p < chain.link_bodies[k].size(); ++p) {
        for (std::size_t o = 0; o < scene_.obstacles.size(); ++o) {
          const EntityId obj{kEnvironment, o};
          if (scene_.excluded(link, obj)) continue;
          for (std::size_t r = 0; r < scene_.obstacles[o].primitives.size(); ++r) {
            out.push_back({BodyRef{link, p}, BodyRef{obj, r}});
          }
        }
      }
    }
  };
  auto cross_pairs = [&](std::vector<std::pair<BodyRef, BodyRef>>& out) {
    for (std::size_t c1 = 0; c1 < chains_.size(); ++c1) {
      for (std::size_t c2 = c1 + 1; c2 < chains_.size(); ++c2) {
        for (std::size_t k1 = 0; k1 < chains_[c1].link_count(); ++k1) {
          const EntityId e1{static_cast<int>(c1), k1};
          for (std::size_t k2 = 0; k2 < chains_[c2].link_count(); ++k2) {
            const EntityId e2{static_cast<int>(c2), k2};
            if (scene_.excluded(e1, e2)) continue;
            for (std::size_t p1 = 0; p1 < chains_[c1].link_bodies[k1].size(); ++p1) {
              for (std::size_t p2 = 0; p2 < chains_[c2].link_bodies[k2].size(); ++p2) {
                out.push_back({BodyRef{e1, p1}, BodyRef{e2, p2}});
              }
            }
          }
        }
      }
    }
  };
  auto self_pairs = [&](std::size_t c, std::vector<std::pair<BodyRef, BodyRef>>& out) {
    const auto& chain = chains_[c];
    for (std::size_t k1 = 0; k1 < chain.link_count(); ++k1) {
      for (std::size_t k2 = k1 + 1; k2 < chain.link_count(); ++k2) {
        const EntityId e1{static_cast<int>(c), k1};
        const EntityId e2{static_cast<int>(c), k2};
        if (scene_.excluded(e1, e2)) continue;
        for (std::size_t p1 = 0; p1 < chain.link_bodies[k1].size(); ++p1) {
          for (std::size_t p2 = 0; p2 < chain.link_bodies[k2].size(); ++p2) {
            out.push_back({BodyRef{e1, p1}, BodyRef{e2, p2}});
          }
        }
      }
    }
  };

  for (std::size_t c = 0; c < chains_.size(); ++c) env_pairs(c, full_pairs_);
  cross_pairs(full_pairs_);
  for (std::size_t c = 0; c < chains_.size(); ++c) self_pairs(c, full_pairs_);

  cross_pairs(robot_pairs_);

  single_pairs_.resize(chains_.size());
  for (std::size_t c = 0; c < chains_.size(); ++c) {
    env_pairs(c, single_pairs_[c]);
    self_pairs(c, single_pairs_[c]);
  }
}

std::vector<std::size_t> CollisionWorld::active_chains(ClearanceMode mode, std::size_t arm) const {
  if (mode == ClearanceMode::single_arm) {
    if (arm >= chains_.size()) throw InvalidInput("arm index out of range");
    return {arm};
  }
  std::vector<std::size_t> all(chains_.size());
  for (std::size_t c = 0; c < chains_.size(); ++c) all[c] = c;
  return all;
}

std::size_t CollisionWorld::query_dof(ClearanceMode mode, std::size_t arm) const {
  std::size_t n = 0;
  for (auto c : active_chains(mode, arm)) n += chains_[c].dof();
  return n;
}

const std::vector<std::pair<BodyRef, BodyRef>>& CollisionWorld::pairs(ClearanceMode mode,
                                                                      std::size_t arm) const {
  switch (mode) {
    case ClearanceMode::full: return full_pairs_;
    case ClearanceMode::robot_robot_only: return robot_pairs_;
    case ClearanceMode::single_arm:
      if (arm >= chains_.size()) throw InvalidInput("arm index out of range");
      return single_pairs_[arm];
  }
  return full_pairs_;
}

CollisionWorld::Placement CollisionWorld::place(const Eigen::VectorXd& q, ClearanceMode mode,
                                                std::size_t arm) const {
  const auto active = active_chains(mode, arm);
  if (static_cast<std::size_t>(q.size()) != query_dof(mode, arm)) {
    throw InvalidInput("configuration has " + std::to_string(q.size()) + " values, query needs " +
                       std::to_string(query_dof(mode, arm)));
  }
  Placement pl;
  pl.fk.resize(chains_.size());
  pl.bodies.resize(chains_.size());
  pl.offset.assign(chains_.size(), 0);
  Eigen::Index offset = 0;
  for (auto c : active) {
    const auto& chain = chains_[c];
    const auto n = static_cast<Eigen::Index>(chain.dof());
    pl.offset[c] = static_cast<std::size_t>(offset);
    pl.fk[c] = forward_kinematics(chain, q.segment(offset, n));
    offset += n;
    auto& links = pl.bodies[c];
    links.resize(chain.link_count());
    for (std::size_t k = 0; k < chain.link_count(); ++k) {
      const auto& pose = pl.fk[c]->link_poses[k];
      for (const auto& prim : chain.link_bodies[k]) {
        SsvPrimitive w = prim.transformed(pose);
        auto [center, bound] = bounding_sphere(w);
        links[k].push_back({std::move(w), center, bound});
      }
    }
  }
  return pl;
}

CollisionWorld::Candidate CollisionWorld::resolve(const Placement& pl, const BodyRef& body) const {
  if (body.entity.owner == kEnvironment) {
    const std::size_t flat = obstacle_offset_[body.entity.index] + body.primitive;
    return {&scene_.obstacles[body.entity.index].primitives[body.primitive],
            &obstacle_bounds_[flat].first, obstacle_bounds_[flat].second};
  }
  const auto& placed =
      pl.bodies[static_cast<std::size_t>(body.entity.owner)][body.entity.index][body.primitive];
  return {&placed.primitive, &placed.center, placed.bound};
}

ClearanceResult CollisionWorld::search(const Placement& pl, ClearanceMode mode,
                                       std::size_t arm) const {
  const auto& list = pairs(mode, arm);
  ClearanceResult best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& [ra, rb] = list[i];
    const Candidate a = resolve(pl, ra);
    const Candidate b = resolve(pl, rb);
    const double lower = (*a.center - *b.center).norm() - a.bound - b.bound;
    if (lower >= best_d) continue;
    const DistanceResult d = ssv_distance(*a.primitive, *b.primitive);
    if (d.distance < best_d) {
      best_d = d.distance;
      best.distance = d;
      best.a = ra;
      best.b = rb;
      best.pair_index = i;
      best.has_pair = true;
    }
  }
  return best;
}

ClearanceResult CollisionWorld::min_clearance(const Eigen::VectorXd& q, ClearanceMode mode,
                                              std::size_t arm) const {
  const DistanceMeter::Scope metered;
  return search(place(q, mode, arm), mode, arm);
}

Eigen::VectorXd CollisionWorld::witness_gradient(const Placement& pl, const BodyRef& a,
                                                 const BodyRef& b, const DistanceResult& d,
                                                 Eigen::Index size) const {
  Eigen::VectorXd gradient = Eigen::VectorXd::Zero(size);
  auto accumulate = [&](const BodyRef& body, const Eigen::Vector3d& witness, double sign) {
    if (body.entity.owner == kEnvironment) return;
    const auto c = static_cast<std::size_t>(body.entity.owner);
    const auto& chain = chains_[c];
    const Eigen::Matrix3Xd J = point_jacobian(chain, *pl.fk[c], body.entity.index, witness);
    gradient.segment(static_cast<Eigen::Index>(pl.offset[c]), static_cast<Eigen::Index>(chain.dof())) +=
        sign * (J.transpose() * d.normal);
  };
  accumulate(a, d.witness_a, 1.0);
  accumulate(b, d.witness_b, -1.0);
  return gradient;
}

ClearanceWithGradient CollisionWorld::clearance_with_gradient(const Eigen::VectorXd& q,
                                                              ClearanceMode mode,
                                                              std::size_t arm) const {
  const DistanceMeter::Scope metered;
  const Placement pl = place(q, mode, arm);
  ClearanceWithGradient out;
  out.clearance = search(pl, mode, arm);
  if (!out.clearance.has_pair) {
    out.gradient = Eigen::VectorXd::Zero(q.size());
    return out;
  }
  out.gradient = witness_gradient(pl, out.clearance.a, out.clearance.b, out.clearance.distance, q.size());
  return out;
}

std::vector<PairClearance> CollisionWorld::near_clearances(const Eigen::VectorXd& q,
                                                           ClearanceMode mode, std::size_t arm,
                                                           double window, std::size_t limit,
                                                           bool with_gradient) const {
  const DistanceMeter::Scope metered;
  const Placement pl = place(q, mode, arm);
  const ClearanceResult best = search(pl, mode, arm);
  std::vector<PairClearance> out;
  if (!best.has_pair || limit == 0) return out;
  const double cutoff = best.distance.distance + window;
  const auto& list = pairs(mode, arm);
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i == best.pair_index) {
      out.push_back({i, best.distance, {}});
      continue;
    }
    const Candidate a = resolve(pl, list[i].first);
    const Candidate b = resolve(pl, list[i].second);
    if ((*a.center - *b.center).norm() - a.bound - b.bound > cutoff) continue;
    const DistanceResult d = ssv_distance(*a.primitive, *b.primitive);
    if (d.distance <= cutoff) out.push_back({i, d, {}});
  }
  std::stable_sort(out.begin(), out.end(), [&](const PairClearance& x, const PairClearance& y) {
    if (x.pair_index == best.pair_index) return y.pair_index != best.pair_index;
    if (y.pair_index == best.pair_index) return false;
    return x.distance.distance < y.distance.distance;
  });
  if (out.size() > limit) out.resize(limit);
  if (with_gradient) {
    for (auto& p : out) {
      p.gradient = witness_gradient(pl, list[p.pair_index].first, list[p.pair_index].second,
                                    p.distance, q.size());
    }
  }
  return out;
}

PairClearance CollisionWorld::pair_clearance(const Eigen::VectorXd& q, ClearanceMode mode,
                                             std::size_t arm, std::size_t pair_index,
                                             bool with_gradient) const {
  const DistanceMeter::Scope metered;
  const auto& list = pairs(mode, arm);
  if (pair_index >= list.size()) throw InvalidInput("pair index out of range");
  const Placement pl = place(q, mode, arm);
  const auto& [ra, rb] = list[pair_index];
  PairClearance out{pair_index, ssv_distance(*resolve(pl, ra).primitive, *resolve(pl, rb).primitive), {}};
  if (with_gradient) out.gradient = witness_gradient(pl, ra, rb, out.distance, q.size());
  return out;
}

bool CollisionWorld::clearance_at_least(const Eigen::VectorXd& q, ClearanceMode mode,
                                        double margin, std::size_t arm) const {
  const DistanceMeter::Scope metered;
  const Placement pl = place(q, mode, arm);
  const auto& list = pairs(mode, arm);
  for (const auto& [ra, rb] : list) {
    const Candidate a = resolve(pl, ra);
    const Candidate b = resolve(pl, rb);
    if ((*a.center - *b.center).norm() - a.bound - b.bound >= margin) continue;
    if (ssv_distance(*a.primitive, *b.primitive).distance < margin) return false;
  }
  return true;
}

SsvPrimitive CollisionWorld::placed(const BodyRef& body, const Eigen::VectorXd& q,
                                    ClearanceMode mode, std::size_t arm) const {
  if (body.entity.owner == kEnvironment) {
    return scene_.obstacles.at(body.entity.index).primitives.at(body.primitive);
  }
  const Placement pl = place(q, mode, arm);
  const auto c = static_cast<std::size_t>(body.entity.owner);
  if (!pl.fk[c]) throw InvalidInput("body belongs to a chain that is inactive in this mode");
  return pl.bodies[c].at(body.entity.index).at(body.primitive).primitive;
}

}  // namespace dualarm
