#include "dualarm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dualarm/errors.hpp"
#include "dualarm/rng.hpp"
#include "dualarm/timing.hpp"

namespace dualarm {

double path_length(const JointPath& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += (path[i] - path[i - 1]).norm();
  return total;
}

StateSpace::StateSpace(Eigen::VectorXd lower, Eigen::VectorXd upper, Validity validity,
                       double segment_fraction)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      validity_(std::move(validity)),
      fraction_(segment_fraction) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw InvalidInput("state space bounds must be non-empty and of equal size");
  }
  if (!((upper_ - lower_).array() > 0.0).all()) {
    throw InvalidInput("state space needs lower < upper in every dimension");
  }
  if (!(segment_fraction > 0.0 && segment_fraction < 1.0)) {
    throw InvalidInput("segment fraction must lie in (0, 1)");
  }
  if (!validity_) throw InvalidInput("state space needs a validity predicate");
  extent_ = (upper_ - lower_).sum();
  resolution_ = fraction_ * extent_;
}

bool StateSpace::inside(const Eigen::VectorXd& q) const {
  if (q.size() != lower_.size()) return false;
  return (q.array() >= lower_.array()).all() && (q.array() <= upper_.array()).all();
}

std::size_t StateSpace::check_count(double length) const {
  return static_cast<std::size_t>(std::ceil(length / resolution_)) + 1;
}

bool StateSpace::segment_valid(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const double length = (b - a).norm();
  const std::size_t n = check_count(length);
  if (n == 1) return valid(a);
  // Endpoints first; they are the likeliest to be new.
  if (!valid(b) || !valid(a)) return false;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    if (!valid(a + s * (b - a))) return false;
  }
  return true;
}

namespace {

struct Tree {
  std::vector<Eigen::VectorXd> states;
  std::vector<std::size_t> parent;

  std::size_t add(Eigen::VectorXd q, std::size_t from) {
    states.push_back(std::move(q));
    parent.push_back(from);
    return states.size() - 1;
  }

  std::size_t nearest(const Eigen::VectorXd& q) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < states.size(); ++i) {
      const double d = (states[i] - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  JointPath branch(std::size_t leaf) const {
    JointPath out;
    for (std::size_t i = leaf;; i = parent[i]) {
      out.push_back(states[i]);
      if (parent[i] == i) break;
    }
    return out;  // leaf first
  }
};

enum class Extend { trapped, advanced, reached };

Extend extend(const StateSpace& space, Tree& tree, const Eigen::VectorXd& target, double step,
              std::size_t& added) {
  const std::size_t near = tree.nearest(target);
  const Eigen::VectorXd& from = tree.states[near];
  const Eigen::VectorXd delta = target - from;
  const double d = delta.norm();
  const bool reaches = d <= step;
  Eigen::VectorXd next = reaches ? target : Eigen::VectorXd(from + (step / d) * delta);
  if (!space.segment_valid(from, next)) return Extend::trapped;
  added = tree.add(std::move(next), near);
  return reaches ? Extend::reached : Extend::advanced;
}

}  // namespace

PlannerResult rrt_connect(const StateSpace& space, const Eigen::VectorXd& start,
                          const Eigen::VectorXd& goal, const PlannerParams& params) {
  if (!space.inside(start) || !space.valid(start)) {
    throw PreconditionError("start state is outside the bounds or invalid");
  }
  if (!space.inside(goal) || !space.valid(goal)) {
    throw PreconditionError("goal state is outside the bounds or invalid");
  }
  PlannerResult result;
  if (space.segment_valid(start, goal)) {
    result.solved = true;
    result.path = {start, goal};
    return result;
  }

  const double step = params.step_factor * space.resolution();
  Rng rng(params.seed);
  Tree trees[2];
  trees[0].add(start, 0);
  trees[1].add(goal, 0);
  int a = 0;  // tree that extends towards the sample
  const StageTimer timer;

  for (; result.iterations < params.max_iterations; ++result.iterations) {
    if (params.cancel && params.cancel->load(std::memory_order_relaxed)) {
      result.cancelled = true;
      break;
    }
    if (timer.elapsed() > params.max_time) break;

    const Eigen::VectorXd sample = rng.uniform(space.lower(), space.upper());
    std::size_t new_a = 0;
    if (extend(space, trees[a], sample, step, new_a) != Extend::trapped) {
      const Eigen::VectorXd target = trees[a].states[new_a];
      Tree& other = trees[1 - a];
      std::size_t new_b = 0;
      Extend status = Extend::advanced;
      while (status == Extend::advanced) status = extend(space, other, target, step, new_b);
      if (status == Extend::reached) {
        JointPath half_a = trees[a].branch(new_a);
        JointPath half_b = other.branch(new_b);
        // half_a and half_b both end in their roots; the joint state appears twice.
        JointPath& from_start = a == 0 ? half_a : half_b;
        JointPath& from_goal = a == 0 ? half_b : half_a;
        std::reverse(from_start.begin(), from_start.end());
        result.path = std::move(from_start);
        result.path.insert(result.path.end(), from_goal.begin() + 1, from_goal.end());
        result.solved = true;
        ++result.iterations;
        break;
      }
    }
    a = 1 - a;
  }
  result.tree_size = trees[0].states.size() + trees[1].states.size();
  return result;
}

namespace {

double perpendicular_deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& m,
                               const Eigen::VectorXd& b) {
  const Eigen::VectorXd ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (m - a).norm();
  const double s = std::clamp((m - a).dot(ab) / len2, 0.0, 1.0);
  return (a + s * ab - m).norm();
}

void reduce_vertices(const StateSpace& space, JointPath& path, Rng& rng,
                     const SimplifyParams& params) {
  const StageTimer timer;
  for (std::size_t attempt = 0; attempt < params.attempts && path.size() > 2; ++attempt) {
    if (timer.elapsed() > params.max_time) break;
    const std::size_t i = rng.index(path.size());
    const std::size_t j = rng.index(path.size());
    const std::size_t lo = std::min(i, j);
    const std::size_t hi = std::max(i, j);
    if (hi < lo + 2) continue;
    if (space.segment_valid(path[lo], path[hi])) {
      path.erase(path.begin() + static_cast<std::ptrdiff_t>(lo + 1),
                 path.begin() + static_cast<std::ptrdiff_t>(hi));
    }
  }
}

void shortcut(const StateSpace& space, JointPath& path, Rng& rng, const SimplifyParams& params) {
  const StageTimer timer;
  for (std::size_t attempt = 0; attempt < params.attempts && path.size() > 2; ++attempt) {
    if (timer.elapsed() > params.max_time) break;
    std::vector<double> cumulative(path.size(), 0.0);
    for (std::size_t k = 1; k < path.size(); ++k) {
      cumulative[k] = cumulative[k - 1] + (path[k] - path[k - 1]).norm();
    }
    const double total = cumulative.back();
    if (total <= 0.0) break;
    double t1 = rng.uniform(0.0, total);
    double t2 = rng.uniform(0.0, total);
    if (t1 > t2) std::swap(t1, t2);
    auto locate = [&](double t) {
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), t);
      std::size_t seg = static_cast<std::size_t>(it - cumulative.begin());
      seg = std::clamp<std::size_t>(seg, 1, path.size() - 1) - 1;
      return seg;
    };
    const std::size_t s1 = locate(t1);
    const std::size_t s2 = locate(t2);
    if (s1 == s2) continue;
    auto point = [&](std::size_t seg, double t) {
      const double len = cumulative[seg + 1] - cumulative[seg];
      const double u = len > 0.0 ? (t - cumulative[seg]) / len : 0.0;
      return Eigen::VectorXd(path[seg] + u * (path[seg + 1] - path[seg]));
    };
    const Eigen::VectorXd p1 = point(s1, t1);
    const Eigen::VectorXd p2 = point(s2, t2);
    // Arc length along the path between p1 and p2 versus the chord.
    if ((p2 - p1).norm() >= (t2 - t1) * (1.0 - 1e-12)) continue;
    if (!space.segment_valid(p1, p2)) continue;
    JointPath next(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(s1 + 1));
    if ((p1 - next.back()).norm() > 0.0) next.push_back(p1);
    if ((p2 - path[s2 + 1]).norm() > 0.0) next.push_back(p2);
    next.insert(next.end(), path.begin() + static_cast<std::ptrdiff_t>(s2 + 1), path.end());
    path = std::move(next);
  }
}

}  // namespace

JointPath prune_collinear(const StateSpace& space, const JointPath& path, double tolerance) {
  if (path.size() <= 2) return path;
  JointPath out{path.front()};
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const Eigen::VectorXd& m = path[i];
    const Eigen::VectorXd& b = path[i + 1];
    if (perpendicular_deviation(out.back(), m, b) < tolerance && space.segment_valid(out.back(), b)) {
      continue;
    }
    out.push_back(m);
  }
  out.push_back(path.back());
  return out;
}

JointPath simplify(const StateSpace& space, const JointPath& path, const SimplifyParams& params) {
  if (path.size() <= 2) return path;
  JointPath out = path;
  if (space.segment_valid(out.front(), out.back())) return {out.front(), out.back()};
  Rng rng(params.seed);
  reduce_vertices(space, out, rng, params);
  shortcut(space, out, rng, params);
  reduce_vertices(space, out, rng, params);
  return prune_collinear(space, out, 1e-9 * space.extent());
}

JointPath densify(const JointPath& path, std::size_t min_waypoints) {
  if (path.size() < 2) throw InvalidInput("densify needs at least two waypoints");
  if (path.size() >= min_waypoints) return path;
  const std::size_t segments = path.size() - 1;
  const std::size_t extra = min_waypoints - path.size();

  std::vector<double> weight(segments);
  for (std::size_t s = 0; s < segments; ++s) weight[s] = (path[s + 1] - path[s]).norm();
  double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  if (total <= 0.0) {
    std::fill(weight.begin(), weight.end(), 1.0);
    total = static_cast<double>(segments);
  }

  // Largest-remainder apportionment, ties to the earlier segment.
  std::vector<std::size_t> count(segments);
  std::vector<std::pair<double, std::size_t>> remainder(segments);
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < segments; ++s) {
    const double quota = static_cast<double>(extra) * weight[s] / total;
    count[s] = static_cast<std::size_t>(std::floor(quota));
    assigned += count[s];
    remainder[s] = {quota - static_cast<double>(count[s]), s};
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < extra; ++k, ++assigned) ++count[remainder[k % segments].second];

  JointPath out;
  out.reserve(min_waypoints);
  for (std::size_t s = 0; s < segments; ++s) {
    out.push_back(path[s]);
    const std::size_t n = count[s];
    for (std::size_t k = 1; k <= n; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(n + 1);
      out.push_back(path[s] + u * (path[s + 1] - path[s]));
    }
  }
  out.push_back(path.back());
  return out;
}

}  // namespace dualarm
