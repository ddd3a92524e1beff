#include "dualarm/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "dualarm/errors.hpp"

namespace dualarm {

namespace {

constexpr double kAuxFraction = 0.1;

}  // namespace

ClampedSpline ClampedSpline::fit(const std::vector<double>& data_times,
                                 const Eigen::MatrixXd& values) {
  const std::size_t count = data_times.size();
  if (count == 0 || static_cast<Eigen::Index>(count) != values.rows()) {
    throw InvalidInput("spline needs one time per knot value row");
  }
  for (std::size_t i = 1; i < count; ++i) {
    if (!(data_times[i] > data_times[i - 1])) throw InvalidInput("knot times must increase");
  }
  ClampedSpline s;
  const Eigen::Index cols = values.cols();
  if (count == 1) {
    s.times_ = data_times;
    s.y_ = values;
    s.m_ = Eigen::MatrixXd::Zero(1, cols);
    return s;
  }

  // Knot layout: data knot 0, auxiliary, data knots 1..N-1, auxiliary, data knot N.
  const std::size_t N = count - 1;
  const std::size_t K = N + 2;  // index of the last knot
  auto& t = s.times_;
  t.reserve(K + 1);
  t.push_back(data_times[0]);
  t.push_back(data_times[0] + kAuxFraction * (data_times[1] - data_times[0]));
  for (std::size_t i = 1; i < N; ++i) t.push_back(data_times[i]);
  t.push_back(data_times[N] - kAuxFraction * (data_times[N] - data_times[N - 1]));
  t.push_back(data_times[N]);

  std::vector<double> h(K);
  for (std::size_t k = 0; k < K; ++k) h[k] = t[k + 1] - t[k];

  // Known knot values; the auxiliary rows (1 and K-1) are unknowns.
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K + 1), cols);
  y.row(0) = values.row(0);
  for (std::size_t i = 1; i < N; ++i) y.row(static_cast<Eigen::Index>(i + 1)) = values.row(static_cast<Eigen::Index>(i));
  y.row(static_cast<Eigen::Index>(K)) = values.row(static_cast<Eigen::Index>(N));

  // Unknowns z = [M_1 .. M_{K-1}, y_1, y_{K-1}] with M_0 = M_K = 0.
  const auto n = static_cast<Eigen::Index>(K + 1);
  const Eigen::Index ya = n - 2;
  const Eigen::Index yb = n - 1;
  auto mcol = [](std::size_t k) { return static_cast<Eigen::Index>(k - 1); };
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, cols);

  // y value coefficient helper: unknown auxiliary values go into A, known ones to rhs.
  auto add_y = [&](Eigen::Index row, std::size_t k, double coeff) {
    if (k == 1) {
      A(row, ya) += coeff;
    } else if (k == K - 1) {
      A(row, yb) += coeff;
    } else {
      rhs.row(row) -= coeff * y.row(static_cast<Eigen::Index>(k));
    }
  };

  Eigen::Index row = 0;
  // Zero velocity at the start: -M_1 h_0/6 + (y_1 - y_0)/h_0 = 0.
  A(row, mcol(1)) += -h[0] / 6.0;
  add_y(row, 1, 1.0 / h[0]);
  add_y(row, 0, -1.0 / h[0]);
  ++row;
  // First-derivative continuity at every inner knot.
  for (std::size_t k = 1; k < K; ++k, ++row) {
    if (k - 1 >= 1) A(row, mcol(k - 1)) += h[k - 1] / 6.0;
    A(row, mcol(k)) += (h[k - 1] + h[k]) / 3.0;
    if (k + 1 <= K - 1) A(row, mcol(k + 1)) += h[k] / 6.0;
    add_y(row, k + 1, -1.0 / h[k]);
    add_y(row, k, 1.0 / h[k] + 1.0 / h[k - 1]);
    add_y(row, k - 1, -1.0 / h[k - 1]);
  }
  // Zero velocity at the end: M_{K-1} h/6 + (y_K - y_{K-1})/h = 0.
  A(row, mcol(K - 1)) += h[K - 1] / 6.0;
  add_y(row, K, 1.0 / h[K - 1]);
  add_y(row, K - 1, -1.0 / h[K - 1]);

  const Eigen::MatrixXd z = A.partialPivLu().solve(rhs);
  s.m_ = Eigen::MatrixXd::Zero(n, cols);
  for (std::size_t k = 1; k < K; ++k) s.m_.row(static_cast<Eigen::Index>(k)) = z.row(mcol(k));
  y.row(1) = z.row(ya);
  y.row(static_cast<Eigen::Index>(K - 1)) = z.row(yb);
  s.y_ = std::move(y);
  return s;
}

void ClampedSpline::eval(double tq, Eigen::Ref<Eigen::VectorXd> q, Eigen::Ref<Eigen::VectorXd> qd,
                         Eigen::Ref<Eigen::VectorXd> qdd) const {
  if (times_.size() <= 1 || tq <= times_.front()) {
    q = y_.row(0).transpose();
    qd.setZero();
    qdd.setZero();
    return;
  }
  if (tq >= times_.back()) {
    q = y_.row(y_.rows() - 1).transpose();
    qd.setZero();
    qdd.setZero();
    return;
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), tq);
  const auto k = static_cast<Eigen::Index>(it - times_.begin()) - 1;
  const double h = times_[static_cast<std::size_t>(k) + 1] - times_[static_cast<std::size_t>(k)];
  const double a = times_[static_cast<std::size_t>(k) + 1] - tq;
  const double b = tq - times_[static_cast<std::size_t>(k)];
  const auto m0 = m_.row(k).transpose();
  const auto m1 = m_.row(k + 1).transpose();
  const Eigen::VectorXd c0 = y_.row(k).transpose() / h - m0 * (h / 6.0);
  const Eigen::VectorXd c1 = y_.row(k + 1).transpose() / h - m1 * (h / 6.0);
  q = m0 * (a * a * a / (6.0 * h)) + m1 * (b * b * b / (6.0 * h)) + c0 * a + c1 * b;
  qd = -m0 * (a * a / (2.0 * h)) + m1 * (b * b / (2.0 * h)) - c0 + c1;
  qdd = m0 * (a / h) + m1 * (b / h);
}

Eigen::VectorXd ClampedSpline::peak_velocity() const {
  Eigen::VectorXd peak = Eigen::VectorXd::Zero(columns());
  for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
    const double h = times_[k + 1] - times_[k];
    const auto r0 = static_cast<Eigen::Index>(k);
    for (Eigen::Index j = 0; j < columns(); ++j) {
      const double M0 = m_(r0, j);
      const double M1 = m_(r0 + 1, j);
      const double slope = (y_(r0 + 1, j) - y_(r0, j)) / h;
      // Derivative at offset b into the interval; extremum where the moment line crosses zero.
      auto velocity = [&](double b) {
        const double a = h - b;
        return -M0 * a * a / (2.0 * h) + M1 * b * b / (2.0 * h) + slope - (M1 - M0) * h / 6.0;
      };
      double v = std::max(std::abs(velocity(0.0)), std::abs(velocity(h)));
      if (M0 * M1 < 0.0) v = std::max(v, std::abs(velocity(h * M0 / (M0 - M1))));
      peak[j] = std::max(peak[j], v);
    }
  }
  return peak;
}

Eigen::VectorXd ClampedSpline::peak_acceleration() const {
  return m_.cwiseAbs().colwise().maxCoeff().transpose();
}

Eigen::VectorXd ClampedSpline::peak_jerk() const {
  Eigen::VectorXd peak = Eigen::VectorXd::Zero(columns());
  for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
    const double h = times_[k + 1] - times_[k];
    const auto r = static_cast<Eigen::Index>(k);
    peak = peak.cwiseMax(((m_.row(r + 1) - m_.row(r)).cwiseAbs() / h).transpose());
  }
  return peak;
}

void ClampedSpline::scale_time(double s) {
  if (!(s > 0.0)) throw InvalidInput("time scale must be positive");
  if (times_.empty()) return;
  const double t0 = times_.front();
  for (auto& t : times_) t = t0 + s * (t - t0);
  m_ /= s * s;
}

std::vector<double> ClampedSpline::data_times() const {
  if (times_.size() <= 1) return times_;
  std::vector<double> out;
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (k == 1 || k + 2 == times_.size()) continue;
    out.push_back(times_[k]);
  }
  return out;
}

JointTrajectory::Sample JointTrajectory::eval(double t) const {
  Sample s{Eigen::VectorXd(spline_.columns()), Eigen::VectorXd(spline_.columns()),
           Eigen::VectorXd(spline_.columns())};
  spline_.eval(t, s.q, s.qd, s.qdd);
  return s;
}

JointPath remove_duplicates(const JointPath& path) {
  JointPath out;
  for (const auto& q : path) {
    if (out.empty() || out.back() != q) out.push_back(q);
  }
  return out;
}

JointTrajectory interpolate(const JointPath& input, const JointLimits& limits) {
  if (input.empty()) throw InvalidInput("cannot interpolate an empty path");
  const Eigen::Index dof = input.front().size();
  if (limits.velocity.size() != dof || limits.acceleration.size() != dof) {
    throw InvalidInput("joint limits do not match the path dimension");
  }
  if (!(limits.velocity.array() > 0.0).all() || !(limits.acceleration.array() > 0.0).all()) {
    throw InvalidInput("velocity and acceleration limits must be positive");
  }
  const JointPath path = remove_duplicates(input);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(path.size()), dof);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i].size() != dof) throw InvalidInput("waypoints differ in dimension");
    values.row(static_cast<Eigen::Index>(i)) = path[i].transpose();
  }
  if (path.size() == 1) return JointTrajectory(ClampedSpline::fit({0.0}, values));

  std::vector<double> h(path.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    h[i] = ((path[i + 1] - path[i]).cwiseAbs().array() / limits.velocity.array()).maxCoeff();
    total += h[i];
  }
  std::vector<double> times{0.0};
  for (double hi : h) times.push_back(times.back() + std::max(hi, 1e-6 * total));

  ClampedSpline spline = ClampedSpline::fit(times, values);
  const Eigen::ArrayXd v_ratio = spline.peak_velocity().array() / limits.velocity.array();
  const Eigen::ArrayXd a_ratio =
      (spline.peak_acceleration().array() / limits.acceleration.array()).sqrt();
  const double s = std::max(v_ratio.maxCoeff(), a_ratio.maxCoeff());
  if (s > 0.0) spline.scale_time(s * (1.0 + 1e-9));
  return JointTrajectory(std::move(spline));
}

}  // namespace dualarm
