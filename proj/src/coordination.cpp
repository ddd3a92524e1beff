#include "dualarm/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "dualarm/errors.hpp"

namespace dualarm {

CoordinationSpace::CoordinationSpace(const CollisionWorld& world, const JointTrajectory& left,
                                     const JointTrajectory& right, double margin)
    : world_(&world), left_(&left), right_(&right), margin_(margin) {
  if (world.chains().size() != 2) throw InvalidInput("coordination needs exactly two chains");
  if (left.dof() != world.chain(0).dof() || right.dof() != world.chain(1).dof()) {
    throw InvalidInput("trajectory dimensions do not match the chains");
  }
  upper_ = {std::max(left.duration(), kMinExtent), std::max(right.duration(), kMinExtent)};
}

Eigen::VectorXd CoordinationSpace::configuration(double tau_l, double tau_r) const {
  const auto l = left_->eval(tau_l);
  const auto r = right_->eval(tau_r);
  Eigen::VectorXd q(l.q.size() + r.q.size());
  q << l.q, r.q;
  return q;
}

bool CoordinationSpace::valid(double tau_l, double tau_r) const {
  if (!(tau_l >= 0.0 && tau_l <= upper_.x() && tau_r >= 0.0 && tau_r <= upper_.y())) {
    throw InvalidInput("coordination state outside [0, T_l] x [0, T_r]");
  }
  return world_->clearance_at_least(configuration(tau_l, tau_r), ClearanceMode::robot_robot_only,
                                    margin_);
}

CoordinationPlan plan_coordination(const CoordinationSpace& space,
                                   const CoordinationParams& params) {
  const Eigen::Vector2d upper = space.upper();
  StateSpace states(
      Eigen::Vector2d::Zero(), upper,
      [&space](const Eigen::VectorXd& s) { return space.valid(s[0], s[1]); },
      params.segment_fraction);
  const Eigen::VectorXd start = Eigen::Vector2d::Zero();
  const Eigen::VectorXd goal = space.goal();
  if (!space.valid(0.0, 0.0)) throw PreconditionError("coordination start (0, 0) is in collision");
  if (!space.valid(goal[0], goal[1])) throw PreconditionError("coordination goal is in collision");

  CoordinationPlan plan;
  const PlannerResult r = rrt_connect(states, start, goal, params.planner);
  plan.iterations = r.iterations;
  plan.cancelled = r.cancelled;
  if (!r.solved) return plan;
  plan.solved = true;
  plan.path = simplify(states, r.path, params.simplify);
  return plan;
}

std::string_view to_string(Interpolation mode) {
  switch (mode) {
    case Interpolation::linear: return "linear";
    case Interpolation::cubic: return "cubic";
    case Interpolation::quintic: return "quintic";
  }
  return "unknown";
}

Interpolation interpolation_from_string(std::string_view name) {
  if (name == "linear") return Interpolation::linear;
  if (name == "cubic") return Interpolation::cubic;
  if (name == "quintic") return Interpolation::quintic;
  throw InvalidInput("unknown interpolation '" + std::string(name) + "'");
}

namespace {

// Quintic rest-to-rest blend and its derivatives on u in [0, 1].
double blend(double u) { return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u); }
double blend_d(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double blend_dd(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

}  // namespace

CoordinationMap CoordinationMap::build(const JointPath& path, Interpolation mode,
                                       const Eigen::Vector2d& upper) {
  if (path.empty()) throw InvalidInput("coordination path is empty");
  CoordinationMap map;
  map.mode_ = mode;
  map.upper_ = upper;
  map.points_ = remove_duplicates(path);
  map.knots_ = {0.0};
  for (std::size_t i = 1; i < map.points_.size(); ++i) {
    const double h = (map.points_[i] - map.points_[i - 1]).cwiseAbs().maxCoeff();
    map.knots_.push_back(map.knots_.back() + h);
  }

  double peak_rate = 0.0;
  switch (mode) {
    case Interpolation::linear:
      peak_rate = 1.0;
      break;
    case Interpolation::quintic:
      for (std::size_t i = 1; i < map.points_.size(); ++i) {
        const double h = map.knots_[i] - map.knots_[i - 1];
        const double d = (map.points_[i] - map.points_[i - 1]).cwiseAbs().maxCoeff();
        peak_rate = std::max(peak_rate, blend_d(0.5) * d / h);
      }
      break;
    case Interpolation::cubic: {
      Eigen::MatrixXd values(static_cast<Eigen::Index>(map.points_.size()), 2);
      for (std::size_t i = 0; i < map.points_.size(); ++i) {
        values.row(static_cast<Eigen::Index>(i)) = map.points_[i].transpose();
      }
      map.spline_ = ClampedSpline::fit(map.knots_, values);
      peak_rate = map.spline_.peak_velocity().maxCoeff();
      break;
    }
  }
  map.time_scale_ = std::max(1.0, peak_rate * (1.0 + 1e-12));
  if (map.time_scale_ > 1.0) {
    for (auto& t : map.knots_) t *= map.time_scale_;
    if (mode == Interpolation::cubic) map.spline_.scale_time(map.time_scale_);
  }
  map.duration_ = map.knots_.back();

  Eigen::Vector2d c, cd, cdd;
  for (double t = 0.0;; t += 1e-3) {
    map.eval_raw(std::min(t, map.duration_), c, cd, cdd);
    const double below = std::max(0.0, -c.minCoeff());
    const double above = std::max(0.0, (c - upper).maxCoeff());
    map.overshoot_ = std::max({map.overshoot_, below, above});
    if (t >= map.duration_) break;
  }
  return map;
}

void CoordinationMap::eval_raw(double t, Eigen::Vector2d& c, Eigen::Vector2d& cd,
                               Eigen::Vector2d& cdd) const {
  if (points_.size() == 1 || t <= 0.0) {
    c = points_.front();
    cd.setZero();
    cdd.setZero();
    return;
  }
  if (t >= duration_) {
    c = points_.back();
    cd.setZero();
    cdd.setZero();
    return;
  }
  if (mode_ == Interpolation::cubic) {
    Eigen::VectorXd q(2), qd(2), qdd(2);
    spline_.eval(t, q, qd, qdd);
    c = q;
    cd = qd;
    cdd = qdd;
    return;
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double h = knots_[k + 1] - knots_[k];
  const double u = (t - knots_[k]) / h;
  const Eigen::Vector2d delta = points_[k + 1] - points_[k];
  if (mode_ == Interpolation::linear) {
    c = points_[k] + u * delta;
    cd = delta / h;
    cdd.setZero();
  } else {
    c = points_[k] + blend(u) * delta;
    cd = blend_d(u) / h * delta;
    cdd = blend_dd(u) / (h * h) * delta;
  }
}

void CoordinationMap::eval(double t, Eigen::Vector2d& c, Eigen::Vector2d& cd,
                           Eigen::Vector2d& cdd) const {
  eval_raw(t, c, cd, cdd);
  for (int i = 0; i < 2; ++i) {
    if (c[i] < 0.0 || c[i] > upper_[i]) {
      c[i] = std::clamp(c[i], 0.0, upper_[i]);
      cd[i] = 0.0;
      cdd[i] = 0.0;
    }
  }
}

std::pair<ArmCommand, ArmCommand> coordinated_eval(const JointTrajectory& left,
                                                   const JointTrajectory& right,
                                                   const CoordinationMap& map, double t) {
  Eigen::Vector2d c, cd, cdd;
  map.eval(t, c, cd, cdd);
  auto command = [](const JointTrajectory& traj, double tau, double rate, double accel) {
    const JointTrajectory::Sample s = traj.eval(tau);
    return ArmCommand{s.q, s.qd * rate, s.qdd * (rate * rate) + s.qd * accel};
  };
  return {command(left, c[0], cd[0], cdd[0]), command(right, c[1], cd[1], cdd[1])};
}

std::size_t CoordinationDiagram::free_count() const {
  return static_cast<std::size_t>(std::count(free.begin(), free.end(), std::uint8_t{1}));
}

CoordinationDiagram rasterize_diagram(const CoordinationSpace& space, double resolution) {
  if (!(resolution > 0.0)) throw InvalidInput("diagram resolution must be positive");
  CoordinationDiagram d;
  d.resolution = resolution;
  d.left_duration = space.left_duration();
  d.right_duration = space.right_duration();
  d.left_cells = static_cast<std::size_t>(std::ceil(d.left_duration / resolution)) + 1;
  d.right_cells = static_cast<std::size_t>(std::ceil(d.right_duration / resolution)) + 1;
  d.free.assign(d.left_cells * d.right_cells, 0);
  for (std::size_t j = 0; j < d.right_cells; ++j) {
    const double tr = std::min(static_cast<double>(j) * resolution, d.right_duration);
    for (std::size_t i = 0; i < d.left_cells; ++i) {
      const double tl = std::min(static_cast<double>(i) * resolution, d.left_duration);
      d.free[j * d.left_cells + i] = space.valid(tl, tr) ? 1 : 0;
    }
  }
  return d;
}

void write_pgm(const CoordinationDiagram& d, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "P5\n# resolution " << d.resolution << " T_l " << d.left_duration << " T_r "
      << d.right_duration << "\n"
      << d.left_cells << " " << d.right_cells << "\n255\n";
  for (std::size_t j = 0; j < d.right_cells; ++j) {
    for (std::size_t i = 0; i < d.left_cells; ++i) {
      out.put(static_cast<char>(d.at(i, j) ? 255 : 0));
    }
  }
  if (!out) throw std::runtime_error("failed writing " + file);
}

void write_csv(const CoordinationDiagram& d, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "tau_l,tau_r,free\n";
  for (std::size_t j = 0; j < d.right_cells; ++j) {
    const double tr = std::min(static_cast<double>(j) * d.resolution, d.right_duration);
    for (std::size_t i = 0; i < d.left_cells; ++i) {
      const double tl = std::min(static_cast<double>(i) * d.resolution, d.left_duration);
      out << tl << "," << tr << "," << (d.at(i, j) ? 1 : 0) << "\n";
    }
  }
  if (!out) throw std::runtime_error("failed writing " + file);
}

}  // namespace dualarm
