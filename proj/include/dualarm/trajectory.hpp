#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "dualarm/sampling.hpp"

namespace dualarm {

/// Piecewise cubic through given knot values, C2, with zero first and second
/// derivative at both ends. An auxiliary knot is placed at 10% of the first
/// and of the last interval; its value is solved for so that both end
/// conditions hold. Knot positions and moments are stored per column.
class ClampedSpline {
 public:
  ClampedSpline() = default;

  /// `values` is (knots x columns); `times` strictly increasing, same length.
  /// A single knot yields a constant spline of zero duration.
  static ClampedSpline fit(const std::vector<double>& times, const Eigen::MatrixXd& values);

  double duration() const { return times_.empty() ? 0.0 : times_.back() - times_.front(); }
  Eigen::Index columns() const { return y_.cols(); }

  /// Evaluates value, first and second derivative at t; outside the support
  /// the end value is held with zero derivatives.
  void eval(double t, Eigen::Ref<Eigen::VectorXd> q, Eigen::Ref<Eigen::VectorXd> qd,
            Eigen::Ref<Eigen::VectorXd> qdd) const;

  /// Largest |first derivative| and |second derivative| per column, exact.
  Eigen::VectorXd peak_velocity() const;
  Eigen::VectorXd peak_acceleration() const;
  /// Largest |third derivative| per column (piecewise constant).
  Eigen::VectorXd peak_jerk() const;

  /// Stretches time by factor s > 0 (durations multiply by s).
  void scale_time(double s);

  /// All knot times including the two auxiliary ones.
  const std::vector<double>& knot_times() const { return times_; }
  /// Times of the knots that carry input values (auxiliary knots skipped).
  std::vector<double> data_times() const;

 private:
  std::vector<double> times_;  // all knots
  Eigen::MatrixXd y_;          // knot values, rows follow times_
  Eigen::MatrixXd m_;          // second derivatives at knots
};

/// Zero-clamped joint trajectory q(t), t in [0, T].
class JointTrajectory {
 public:
  struct Sample {
    Eigen::VectorXd q;
    Eigen::VectorXd qd;
    Eigen::VectorXd qdd;
  };

  JointTrajectory() = default;
  explicit JointTrajectory(ClampedSpline spline) : spline_(std::move(spline)) {}

  double duration() const { return spline_.duration(); }
  std::size_t dof() const { return static_cast<std::size_t>(spline_.columns()); }
  Sample eval(double t) const;
  void eval(double t, Eigen::Ref<Eigen::VectorXd> q, Eigen::Ref<Eigen::VectorXd> qd,
            Eigen::Ref<Eigen::VectorXd> qdd) const {
    spline_.eval(t, q, qd, qdd);
  }
  const ClampedSpline& spline() const { return spline_; }

  /// Times at which the (deduplicated) waypoints are passed.
  std::vector<double> waypoint_times() const { return spline_.data_times(); }
  Eigen::VectorXd peak_velocity() const { return spline_.peak_velocity(); }
  Eigen::VectorXd peak_acceleration() const { return spline_.peak_acceleration(); }
  Eigen::VectorXd peak_jerk() const { return spline_.peak_jerk(); }

 private:
  ClampedSpline spline_;
};

struct JointLimits {
  Eigen::VectorXd velocity;      // rad/s, > 0
  Eigen::VectorXd acceleration;  // rad/s^2, > 0
};

/// Consecutive duplicate waypoints removed (exact equality).
JointPath remove_duplicates(const JointPath& path);

/// Fits a zero-clamped spline through the path. Interval lengths start
/// proportional to max_j |dq_j| / vmax_j; then time is scaled uniformly by the
/// exact factor that puts the peak velocity or acceleration of some joint on
/// its limit. A path that does not move gives a zero-duration trajectory.
JointTrajectory interpolate(const JointPath& path, const JointLimits& limits);

}  // namespace dualarm
