#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace dualarm {

using JointPath = std::vector<Eigen::VectorXd>;

/// Sum of Euclidean segment lengths.
double path_length(const JointPath& path);

/// Box-bounded real vector space with a validity predicate.
class StateSpace {
 public:
  using Validity = std::function<bool(const Eigen::VectorXd&)>;

  /// `segment_fraction` times the extent (sum of ranges) is the spacing of
  /// validity checks along a straight segment.
  StateSpace(Eigen::VectorXd lower, Eigen::VectorXd upper, Validity validity,
             double segment_fraction);

  std::size_t dim() const { return static_cast<std::size_t>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  double extent() const { return extent_; }
  double resolution() const { return resolution_; }
  double segment_fraction() const { return fraction_; }

  bool inside(const Eigen::VectorXd& q) const;
  bool valid(const Eigen::VectorXd& q) const { return validity_(q); }

  /// Number of states segment_valid checks for a segment of this length.
  std::size_t check_count(double length) const;

  /// Checks ceil(|b - a| / resolution) + 1 evenly spaced states, both ends included.
  bool segment_valid(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Validity validity_;
  double fraction_;
  double extent_;
  double resolution_;
};

struct PlannerParams {
  double max_time{5.0};               // thread CPU seconds
  std::size_t max_iterations{20000};  // sampling iterations
  double step_factor{10.0};           // extension step in units of the check resolution
  std::uint64_t seed{1};
  const std::atomic<bool>* cancel{nullptr};
};

struct PlannerResult {
  bool solved{false};
  bool cancelled{false};
  JointPath path;
  std::size_t iterations{0};
  std::size_t tree_size{0};
};

/// Bidirectional RRT (extend on one tree, connect the other, swap).
/// Throws PreconditionError when start or goal is outside the bounds or invalid.
PlannerResult rrt_connect(const StateSpace& space, const Eigen::VectorXd& start,
                          const Eigen::VectorXd& goal, const PlannerParams& params);

struct SimplifyParams {
  std::size_t attempts{100};  // per shortcut stage
  double max_time{0.05};      // per shortcut stage, thread CPU seconds
  std::uint64_t seed{1};
};

/// Random vertex shortcuts, random point-to-point shortcuts along the path,
/// then removal of collinear vertices. Endpoints are kept; the length never grows.
JointPath simplify(const StateSpace& space, const JointPath& path, const SimplifyParams& params);

/// Drops interior vertices that deviate from the chord of their neighbours by
/// less than `tolerance`, provided the shortened segment validates.
JointPath prune_collinear(const StateSpace& space, const JointPath& path, double tolerance);

/// Inserts linearly interpolated states until the path has `min_waypoints`,
/// distributing them over segments proportionally to their length.
JointPath densify(const JointPath& path, std::size_t min_waypoints);

}  // namespace dualarm
