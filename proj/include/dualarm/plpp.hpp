#pragma once

#include <atomic>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dualarm/collision.hpp"
#include "dualarm/kinematics.hpp"
#include "dualarm/sampling.hpp"

namespace dualarm {

/// 0.5 * sum_i [ alpha |x_{i+1} - x_i|^2 + |p_i|^2 ] over consecutive waypoints of one
/// chain, with p_i the rotation vector of the shortest relative rotation.
double combined_path_length(const SerialChain& chain, const JointPath& path, double alpha);

/// The rotational part alone, 0.5 * sum_i |p_i|^2.
double rotational_path_length(const SerialChain& chain, const JointPath& path);

/// Sums combined_path_length over the chains that `mode` makes active; `path`
/// uses the query layout of CollisionWorld.
double combined_path_length(const CollisionWorld& world, ClearanceMode mode, std::size_t arm,
                            const JointPath& path, double alpha);
double rotational_path_length(const CollisionWorld& world, ClearanceMode mode, std::size_t arm,
                              const JointPath& path);

enum class GradientMode { analytic, numeric };

struct PlppParams {
  double alpha{5.0};
  double d_obs{0.01};             // [m]
  double eps_rel{1e-3};           // relative change of the objective that ends the iteration
  std::size_t max_iterations{100};
  double feas_tol{1e-6};          // on the scaled constraints d/d_obs - 1
  std::size_t restoration_iterations{10};
  bool rotation_term{true};       // false: translational length only
  GradientMode gradient{GradientMode::analytic};
  double fd_step{1e-6};           // forward-difference step of the numeric mode [rad]
  const std::atomic<bool>* cancel{nullptr};
};

enum class PlppStatus {
  converged,
  iteration_limit,
  stalled,             // no acceptable step along the search direction
  infeasible_start,    // restoration could not reach the clearance margin; input returned
  joint_limit_rejected,
  cancelled,
  trivial              // fewer than three waypoints: nothing to optimize
};

std::string_view to_string(PlppStatus status);

struct PlppReport {
  PlppStatus status{PlppStatus::trivial};
  std::size_t iterations{0};
  std::size_t restoration_steps{0};
  double initial_objective{0.0};  // scaled, 1 unless the scale is degenerate
  double final_objective{0.0};
  double initial_length{0.0};     // combined length with the rotation term, unscaled
  double final_length{0.0};
  double max_violation{0.0};      // of the scaled constraints at the returned path
  double seconds{0.0};            // thread CPU time
  double penalty{0.0};            // final l1 penalty weight
  std::vector<double> merit_drops;  // merit decrease of every accepted step, same penalty weight
  std::size_t function_evaluations{0};
};

/// Interior waypoints of a path as the optimization variable, with the
/// endpoints held fixed.
class PlppProblem {
 public:
  PlppProblem(const CollisionWorld& world, ClearanceMode mode, std::size_t arm, JointPath path,
              const PlppParams& params);

  std::size_t waypoint_count() const { return path_.size(); }
  std::size_t interior_count() const { return path_.size() - 2; }
  std::size_t config_dim() const { return dim_; }
  std::size_t variable_count() const { return interior_count() * dim_; }

  Eigen::VectorXd initial_variables() const;
  JointPath to_path(const Eigen::VectorXd& x) const;

  /// Normalizer of the objective; the objective value of the input path (1 if zero).
  double scale() const { return scale_; }

  /// Objective (divided by scale()) and its analytic gradient.
  double objective(const Eigen::VectorXd& x) const;
  double objective_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& gradient) const;

  /// g_i = d(q_i) / d_obs - 1 for every interior waypoint, and its Jacobian.
  Eigen::VectorXd constraints(const Eigen::VectorXd& x) const;
  Eigen::VectorXd constraints_and_jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jacobian) const;

  bool within_limits(const Eigen::VectorXd& x) const;

  const CollisionWorld& world() const { return *world_; }
  ClearanceMode mode() const { return mode_; }
  std::size_t arm() const { return arm_; }
  const PlppParams& params() const { return params_; }
  const std::vector<std::size_t>& active() const { return active_; }

 private:
  double raw_objective(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const;

  const CollisionWorld* world_;
  ClearanceMode mode_;
  std::size_t arm_;
  JointPath path_;
  PlppParams params_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> offset_;
  std::size_t dim_{0};
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  double scale_{1.0};
};

struct PlppResult {
  JointPath path;
  PlppReport report;
};

/// Sequential quadratic programming on the interior waypoints: damped BFGS
/// model of the objective, linearized clearance constraints solved through an
/// elastic (l1) QP, backtracking on the l1 merit. Endpoints are copied
/// unchanged. If the start violates the margin a restoration phase pushes the
/// offending waypoints out first; failing that, the input path is returned
/// with status infeasible_start.
PlppResult optimize(const CollisionWorld& world, ClearanceMode mode, std::size_t arm,
                    const JointPath& path, const PlppParams& params);

}  // namespace dualarm
