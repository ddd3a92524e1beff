#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dualarm/collision.hpp"
#include "dualarm/sampling.hpp"
#include "dualarm/trajectory.hpp"

namespace dualarm {

/// The two arm trajectories of a decoupled plan, viewed through their local
/// times (tau_l, tau_r). Validity is inter-robot clearance only.
class CoordinationSpace {
 public:
  /// Zero-duration trajectories get the degenerate bound kMinExtent.
  static constexpr double kMinExtent = 1e-9;

  CoordinationSpace(const CollisionWorld& world, const JointTrajectory& left,
                    const JointTrajectory& right, double margin);

  double left_duration() const { return left_->duration(); }
  double right_duration() const { return right_->duration(); }
  Eigen::Vector2d upper() const { return upper_; }
  Eigen::Vector2d goal() const { return {left_duration(), right_duration()}; }

  /// Composite configuration at the given local times.
  Eigen::VectorXd configuration(double tau_l, double tau_r) const;

  /// Robot-robot clearance at (tau_l, tau_r) is at least the margin.
  /// Throws InvalidInput for times outside the bounds.
  bool valid(double tau_l, double tau_r) const;

  const CollisionWorld& world() const { return *world_; }
  const JointTrajectory& left() const { return *left_; }
  const JointTrajectory& right() const { return *right_; }
  double margin() const { return margin_; }

 private:
  const CollisionWorld* world_;
  const JointTrajectory* left_;
  const JointTrajectory* right_;
  double margin_;
  Eigen::Vector2d upper_;
};

struct CoordinationParams {
  double segment_fraction{0.001};  // of tau_l extent + tau_r extent
  double margin{0.0};              // [m]
  PlannerParams planner;
  SimplifyParams simplify;
};

struct CoordinationPlan {
  bool solved{false};
  bool cancelled{false};
  JointPath path;  // 2D states (tau_l, tau_r), not necessarily monotone
  std::size_t iterations{0};
};

/// RRT-Connect from (0, 0) to (T_l, T_r) followed by shortcutting. An
/// unsolved plan is a deadlock within the budget.
/// Throws PreconditionError when either corner is in collision.
CoordinationPlan plan_coordination(const CoordinationSpace& space, const CoordinationParams& params);

enum class Interpolation { linear, cubic, quintic };

std::string_view to_string(Interpolation mode);
/// Throws InvalidInput for unknown names.
Interpolation interpolation_from_string(std::string_view name);

/// Real time to local times, c(t) = (c_l(t), c_r(t)), t in [0, duration()].
class CoordinationMap {
 public:
  CoordinationMap() = default;

  /// Segment durations start at the largest component change (rate <= 1);
  /// afterwards time is stretched uniformly if the fitted curve is faster than 1.
  static CoordinationMap build(const JointPath& path, Interpolation mode, const Eigen::Vector2d& upper);

  Interpolation mode() const { return mode_; }
  double duration() const { return duration_; }

  /// c, c', c'' at t. Each component is clamped to [0, upper]; a clamped
  /// component reports zero derivatives.
  void eval(double t, Eigen::Vector2d& c, Eigen::Vector2d& cd, Eigen::Vector2d& cdd) const;

  /// Unclamped curve.
  void eval_raw(double t, Eigen::Vector2d& c, Eigen::Vector2d& cd, Eigen::Vector2d& cdd) const;

  /// Times at which the path waypoints are passed.
  const std::vector<double>& knot_times() const { return knots_; }
  /// Largest excursion of the unclamped curve outside the bounds (1 ms sampling).
  double overshoot() const { return overshoot_; }
  /// Uniform stretch applied after the fit (1 when none was needed).
  double time_scale() const { return time_scale_; }

 private:
  Interpolation mode_{Interpolation::cubic};
  double duration_{0.0};
  double time_scale_{1.0};
  double overshoot_{0.0};
  Eigen::Vector2d upper_{Eigen::Vector2d::Zero()};
  std::vector<double> knots_;
  JointPath points_;      // deduplicated waypoints
  ClampedSpline spline_;  // cubic mode
};

struct ArmCommand {
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  Eigen::VectorXd qdd;
};

/// q(c(t)) with the chain rule: qd = q' c', qdd = q'' c'^2 + q' c''.
std::pair<ArmCommand, ArmCommand> coordinated_eval(const JointTrajectory& left,
                                                   const JointTrajectory& right,
                                                   const CoordinationMap& map, double t);

/// Rasterized coordination space: cell (i, j) holds validity at
/// (min(i res, T_l), min(j res, T_r)).
struct CoordinationDiagram {
  double resolution{0.0};
  double left_duration{0.0};
  double right_duration{0.0};
  std::size_t left_cells{0};
  std::size_t right_cells{0};
  std::vector<std::uint8_t> free;  // index j * left_cells + i; 1 = free

  bool at(std::size_t i, std::size_t j) const { return free[j * left_cells + i] != 0; }
  std::size_t free_count() const;
};

CoordinationDiagram rasterize_diagram(const CoordinationSpace& space, double resolution);

/// Binary 8-bit PGM, 255 = free, 0 = collision; columns follow tau_l, the top
/// row is tau_r = 0. Throws std::runtime_error on I/O failure.
void write_pgm(const CoordinationDiagram& diagram, const std::string& file);
/// Long format: tau_l, tau_r, free.
void write_csv(const CoordinationDiagram& diagram, const std::string& file);

}  // namespace dualarm
