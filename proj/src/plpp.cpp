#include "dualarm/plpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualarm/errors.hpp"
#include "dualarm/so3.hpp"
#include "dualarm/timing.hpp"

namespace dualarm {

namespace {

std::vector<std::size_t> active_chains(const CollisionWorld& world, ClearanceMode mode,
                                       std::size_t arm) {
  if (mode == ClearanceMode::single_arm) {
    if (arm >= world.chains().size()) throw InvalidInput("arm index out of range");
    return {arm};
  }
  std::vector<std::size_t> all(world.chains().size());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  return all;
}

JointPath chain_slice(const JointPath& path, Eigen::Index offset, Eigen::Index n) {
  JointPath out;
  out.reserve(path.size());
  for (const auto& q : path) out.emplace_back(q.segment(offset, n));
  return out;
}

}  // namespace

std::string_view to_string(PlppStatus status) {
  switch (status) {
    case PlppStatus::converged: return "converged";
    case PlppStatus::iteration_limit: return "iteration_limit";
    case PlppStatus::stalled: return "stalled";
    case PlppStatus::infeasible_start: return "infeasible_start";
    case PlppStatus::joint_limit_rejected: return "joint_limit_rejected";
    case PlppStatus::cancelled: return "cancelled";
    case PlppStatus::trivial: return "trivial";
  }
  return "unknown";
}

double combined_path_length(const SerialChain& chain, const JointPath& path, double alpha) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const FkResult a = forward_kinematics(chain, path[i - 1]);
    const FkResult b = forward_kinematics(chain, path[i]);
    const Eigen::Vector3d dx = b.ee.x - a.ee.x;
    const Eigen::Vector3d p = so3::log_map(so3::relative(a.ee.u, b.ee.u));
    total += 0.5 * (alpha * dx.squaredNorm() + p.squaredNorm());
  }
  return total;
}

double rotational_path_length(const SerialChain& chain, const JointPath& path) {
  return combined_path_length(chain, path, 0.0);
}

double combined_path_length(const CollisionWorld& world, ClearanceMode mode, std::size_t arm,
                            const JointPath& path, double alpha) {
  double total = 0.0;
  Eigen::Index offset = 0;
  for (auto c : active_chains(world, mode, arm)) {
    const auto& chain = world.chain(c);
    const auto n = static_cast<Eigen::Index>(chain.dof());
    total += combined_path_length(chain, chain_slice(path, offset, n), alpha);
    offset += n;
  }
  return total;
}

double rotational_path_length(const CollisionWorld& world, ClearanceMode mode, std::size_t arm,
                              const JointPath& path) {
  return combined_path_length(world, mode, arm, path, 0.0);
}

PlppProblem::PlppProblem(const CollisionWorld& world, ClearanceMode mode, std::size_t arm,
                         JointPath path, const PlppParams& params)
    : world_(&world), mode_(mode), arm_(arm), path_(std::move(path)), params_(params) {
  if (path_.size() < 2) throw InvalidInput("a path needs at least two waypoints");
  if (!(params_.d_obs > 0.0)) throw InvalidInput("d_obs must be positive");
  active_ = active_chains(world, mode, arm);
  for (auto c : active_) {
    offset_.push_back(dim_);
    dim_ += world.chain(c).dof();
  }
  for (const auto& q : path_) {
    if (static_cast<std::size_t>(q.size()) != dim_) {
      throw InvalidInput("waypoint size does not match the active chains");
    }
  }
  lower_.resize(static_cast<Eigen::Index>(dim_));
  upper_.resize(static_cast<Eigen::Index>(dim_));
  for (std::size_t k = 0; k < active_.size(); ++k) {
    const auto& chain = world.chain(active_[k]);
    const auto o = static_cast<Eigen::Index>(offset_[k]);
    const auto n = static_cast<Eigen::Index>(chain.dof());
    lower_.segment(o, n) = chain.lower_limits();
    upper_.segment(o, n) = chain.upper_limits();
  }
  const double f0 = raw_objective(initial_variables(), nullptr);
  scale_ = f0 > 0.0 ? f0 : 1.0;
}

Eigen::VectorXd PlppProblem::initial_variables() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(variable_count()));
  const auto d = static_cast<Eigen::Index>(dim_);
  for (std::size_t i = 0; i < interior_count(); ++i) {
    x.segment(static_cast<Eigen::Index>(i) * d, d) = path_[i + 1];
  }
  return x;
}

JointPath PlppProblem::to_path(const Eigen::VectorXd& x) const {
  JointPath out = path_;
  const auto d = static_cast<Eigen::Index>(dim_);
  for (std::size_t i = 0; i < interior_count(); ++i) {
    out[i + 1] = x.segment(static_cast<Eigen::Index>(i) * d, d);
  }
  return out;
}

bool PlppProblem::within_limits(const Eigen::VectorXd& x) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  for (std::size_t i = 0; i < interior_count(); ++i) {
    const auto q = x.segment(static_cast<Eigen::Index>(i) * d, d);
    if ((q.array() < lower_.array()).any() || (q.array() > upper_.array()).any()) return false;
  }
  return true;
}

double PlppProblem::raw_objective(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const {
  const JointPath path = to_path(x);
  const std::size_t n = path.size();
  const double alpha = params_.alpha;
  const bool rot = params_.rotation_term;
  if (gradient) gradient->setZero(x.size());

  double total = 0.0;
  std::vector<Eigen::Vector3d> pos(n);
  std::vector<so3::UnitQuaternion> quat(n);
  std::vector<Eigen::Matrix3d> rotm(n);
  std::vector<EeJacobian> jac(n);
  std::vector<Eigen::Vector3d> p(n);  // p[i]: rotation vector of segment i -> i+1

  for (std::size_t k = 0; k < active_.size(); ++k) {
    const SerialChain& chain = world_->chain(active_[k]);
    const auto o = static_cast<Eigen::Index>(offset_[k]);
    const auto nq = static_cast<Eigen::Index>(chain.dof());
    for (std::size_t i = 0; i < n; ++i) {
      const FkResult fk = forward_kinematics(chain, path[i].segment(o, nq));
      pos[i] = fk.ee.x;
      quat[i] = fk.ee.u;
      rotm[i] = fk.ee_rotation;
      if (gradient && i > 0 && i + 1 < n) jac[i] = jacobian(chain, fk);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Eigen::Vector3d dx = pos[i + 1] - pos[i];
      total += 0.5 * alpha * dx.squaredNorm();
      if (rot) {
        p[i] = so3::log_map(so3::relative(quat[i], quat[i + 1]));
        total += 0.5 * p[i].squaredNorm();
      }
    }
    if (!gradient) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      Eigen::RowVectorXd g =
          alpha * (2.0 * pos[i] - pos[i - 1] - pos[i + 1]).transpose() * jac[i].trans;
      if (rot) {
        const Eigen::RowVector3d left =
            p[i - 1].transpose() * so3::inv_exp_jacobian(p[i - 1]) * rotm[i - 1].transpose();
        const Eigen::RowVector3d right =
            p[i].transpose() * so3::inv_exp_jacobian(-p[i]) * rotm[i + 1].transpose();
        g += (left - right) * jac[i].rot;
      }
      const auto at = static_cast<Eigen::Index>((i - 1) * dim_ + offset_[k]);
      gradient->segment(at, nq) += g.transpose();
    }
  }
  return total;
}

double PlppProblem::objective(const Eigen::VectorXd& x) const {
  return raw_objective(x, nullptr) / scale_;
}

double PlppProblem::objective_and_gradient(const Eigen::VectorXd& x,
                                           Eigen::VectorXd& gradient) const {
  const double f = raw_objective(x, &gradient) / scale_;
  gradient /= scale_;
  return f;
}

Eigen::VectorXd PlppProblem::constraints(const Eigen::VectorXd& x) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::VectorXd c(static_cast<Eigen::Index>(interior_count()));
  for (std::size_t i = 0; i < interior_count(); ++i) {
    const auto q = x.segment(static_cast<Eigen::Index>(i) * d, d);
    c[static_cast<Eigen::Index>(i)] =
        world_->min_clearance(q, mode_, arm_).value() / params_.d_obs - 1.0;
  }
  return c;
}

Eigen::VectorXd PlppProblem::constraints_and_jacobian(const Eigen::VectorXd& x,
                                                      Eigen::MatrixXd& jacobian) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  const auto m = static_cast<Eigen::Index>(interior_count());
  Eigen::VectorXd c(m);
  jacobian.setZero(m, x.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto q = x.segment(i * d, d);
    const ClearanceWithGradient cg = world_->clearance_with_gradient(q, mode_, arm_);
    c[i] = cg.clearance.value() / params_.d_obs - 1.0;
    jacobian.block(i, i * d, 1, d) = cg.gradient.transpose() / params_.d_obs;
  }
  return c;
}

namespace {

// Pairs per waypoint that enter the QP. The clearance of a waypoint is the
// minimum over many pairs; linearizing only the current minimum makes the QP
// blind to the pair that takes over, so every pair within d_obs of the
// minimum contributes a row.
constexpr std::size_t kRowsPerWaypoint = 4;

struct Row {
  Eigen::Index waypoint{0};
  std::size_t pair{0};
  double value{0.0};     // scaled, d / d_obs - 1
  Eigen::VectorXd grad;  // scaled, waypoint block only
};

struct Evaluation {
  double f{0.0};
  Eigen::VectorXd grad;
  Eigen::VectorXd c;      // per interior waypoint, the closest pair
  std::vector<Row> rows;  // waypoint-major; each waypoint's closest pair first
};

double violation(const Eigen::VectorXd& c) { return (-c.array()).max(0.0).sum(); }
double max_violation(const Eigen::VectorXd& c) {
  return c.size() == 0 ? 0.0 : std::max(0.0, -c.minCoeff());
}

/// Box-constrained dual of the elastic QP,
///   min 0.5 l^T M l + l^T r  s.t. 0 <= l <= rho,
/// by projected Gauss-Seidel.
void solve_box_qp(const Eigen::MatrixXd& M, const Eigen::VectorXd& r, double rho,
                  Eigen::VectorXd& lambda) {
  const Eigen::Index m = r.size();
  lambda = lambda.cwiseMax(0.0).cwiseMin(rho);
  if (m == 0) return;
  for (int sweep = 0; sweep < 2000; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double mii = M(i, i);
      double next;
      if (mii <= 1e-300) {
        next = r[i] < 0.0 ? rho : 0.0;
      } else {
        const double residual = M.row(i).dot(lambda) + r[i];
        next = std::clamp(lambda[i] - residual / mii, 0.0, rho);
      }
      change = std::max(change, std::abs(next - lambda[i]));
      lambda[i] = next;
    }
    if (change <= 1e-13 * (1.0 + lambda.cwiseAbs().maxCoeff())) break;
  }
}

class Solver {
 public:
  Solver(const PlppProblem& problem, PlppReport& report)
      : problem_(problem),
        params_(problem.params()),
        report_(report),
        d_(static_cast<Eigen::Index>(problem.config_dim())) {}

  Evaluation evaluate(const Eigen::VectorXd& x) const {
    ++report_.function_evaluations;
    const bool analytic = params_.gradient == GradientMode::analytic;
    Evaluation e;
    if (analytic) {
      e.f = problem_.objective_and_gradient(x, e.grad);
    } else {
      e.f = problem_.objective(x);
    }
    const auto m = static_cast<Eigen::Index>(problem_.interior_count());
    e.c.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto near = problem_.world().near_clearances(x.segment(i * d_, d_), problem_.mode(),
                                                         problem_.arm(), params_.d_obs,
                                                         kRowsPerWaypoint, analytic);
      e.c[i] = near.empty() ? std::numeric_limits<double>::infinity() : scaled(near[0].distance.distance);
      for (const auto& p : near) {
        e.rows.push_back({i, p.pair_index, scaled(p.distance.distance),
                          analytic ? Eigen::VectorXd(p.gradient / params_.d_obs) : Eigen::VectorXd()});
      }
    }
    if (analytic) return e;

    // Black-box forward differences: every perturbation re-evaluates the
    // objective and every constraint row.
    const Eigen::Index n = x.size();
    e.grad.resize(n);
    for (auto& r : e.rows) r.grad.setZero(d_);
    Eigen::VectorXd xp = x;
    const double h = params_.fd_step;
    for (Eigen::Index j = 0; j < n; ++j) {
      xp[j] = x[j] + h;
      e.grad[j] = (problem_.objective(xp) - e.f) / h;
      for (auto& r : e.rows) {
        const double v = row_value(xp, r);
        if (r.waypoint == j / d_) r.grad[j % d_] = (v - r.value) / h;
      }
      xp[j] = x[j];
    }
    return e;
  }

  /// Gauss-Newton pushes of violating waypoints along their clearance gradient.
  bool restore(Eigen::VectorXd& x, Evaluation& e) {
    const double target = 1e-3;  // scaled margin aimed for
    for (std::size_t it = 0; it < params_.restoration_iterations; ++it) {
      if (max_violation(e.c) <= params_.feas_tol) return true;
      ++report_.restoration_steps;
      Eigen::VectorXd next = x;
      Eigen::Index last = -1;
      for (const Row& r : e.rows) {
        if (r.waypoint == last) continue;  // the closest pair only
        last = r.waypoint;
        if (r.value >= target) continue;
        const double g2 = r.grad.squaredNorm();
        if (g2 <= 0.0) continue;
        Eigen::VectorXd step = ((target - r.value) / g2) * r.grad;
        const double cap = 0.2;  // rad per component
        const double big = step.cwiseAbs().maxCoeff();
        if (big > cap) step *= cap / big;
        next.segment(r.waypoint * d_, d_) += step;
      }
      x = clamp_to_limits(next);
      e = evaluate(x);
    }
    return max_violation(e.c) <= params_.feas_tol;
  }

  /// Runs SQP iterations from a feasible x; returns the final point.
  Eigen::VectorXd run(Eigen::VectorXd x, Evaluation e) {
    const Eigen::Index n = x.size();
    double rho = 10.0;
    Eigen::VectorXd lambda;
    Eigen::MatrixXd H = initial_inverse_hessian(e.grad, n);
    bool reset_used = false;
    bool fresh_model = true;  // H is still the scaled identity
    // Lowest-objective feasible iterate; the merit tolerates small violations
    // on the way, the returned path may not.
    Eigen::VectorXd best_x = x;
    Evaluation best_e = e;
    auto remember = [&] {
      if (max_violation(e.c) <= params_.feas_tol && e.f < best_e.f) {
        best_x = x;
        best_e = e;
      }
    };

    while (true) {
      if (report_.iterations >= params_.max_iterations) {
        report_.status = PlppStatus::iteration_limit;
        break;
      }
      if (params_.cancel && params_.cancel->load(std::memory_order_relaxed)) {
        report_.status = PlppStatus::cancelled;
        break;
      }

      const Eigen::MatrixXd A = row_jacobian(e.rows, n);
      Eigen::VectorXd cr(static_cast<Eigen::Index>(e.rows.size()));
      for (std::size_t r = 0; r < e.rows.size(); ++r) cr[static_cast<Eigen::Index>(r)] = e.rows[r].value;
      if (lambda.size() != cr.size()) lambda = Eigen::VectorXd::Zero(cr.size());

      // Search direction from the elastic QP; raise the penalty while the
      // multipliers sit at the bound and the linearization stays violated.
      Eigen::VectorXd d;
      for (int attempt = 0;; ++attempt) {
        const Eigen::MatrixXd HA = H * A.transpose();
        const Eigen::MatrixXd M = A * HA;
        const Eigen::VectorXd r = cr - A * (H * e.grad);
        solve_box_qp(M, r, rho, lambda);
        d = H * (A.transpose() * lambda - e.grad);
        const Eigen::VectorXd lin = cr + A * d;
        bool saturated = false;
        for (Eigen::Index i = 0; i < lin.size(); ++i) {
          if (lambda[i] >= rho * (1.0 - 1e-12) && lin[i] < -params_.feas_tol) saturated = true;
        }
        if (!saturated || rho >= 1e8 || attempt >= 8) break;
        rho = std::min(1e8, rho * 10.0);
      }

      const Eigen::VectorXd Bd = A.transpose() * lambda - e.grad;
      const double dBd = d.dot(Bd);
      const double phi0 = merit(e.f, e.c, rho);
      const double pred =
          rho * (violation(e.c) - model_violation(e, cr + A * d)) - e.grad.dot(d) - 0.5 * dBd;

      if (!(pred > 1e-14 * std::max(1.0, std::abs(phi0))) || d.norm() < 1e-14) {
        if (!reset_used && max_violation(e.c) > params_.feas_tol) {
          H = initial_inverse_hessian(e.grad, n);
          reset_used = true;
          fresh_model = true;
          continue;
        }
        report_.status = PlppStatus::converged;
        break;
      }

      double step = 1.0;
      bool accepted = false;
      Eigen::VectorXd x_new;
      Evaluation e_new;
      double phi_new = phi0;
      for (int k = 0; k < 40; ++k, step *= 0.5) {
        x_new = x + step * d;
        if (!problem_.within_limits(x_new)) continue;
        e_new = evaluate(x_new);
        phi_new = merit(e_new.f, e_new.c, rho);
        if (phi_new <= phi0 - 1e-4 * step * pred) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (!reset_used) {
          // Non-descent with the current model: restart from a scaled identity.
          H = initial_inverse_hessian(e.grad, n);
          reset_used = true;
          fresh_model = true;
          continue;
        }
        report_.status = PlppStatus::stalled;
        break;
      }
      reset_used = false;
      ++report_.iterations;
      report_.merit_drops.push_back(phi0 - phi_new);

      // Damped BFGS update of the inverse Hessian of the Lagrangian; both
      // gradients use the rows of the old point.
      const Eigen::VectorXd s = x_new - x;
      Eigen::VectorXd y = (e_new.grad - e.grad) + A.transpose() * lambda;
      for (std::size_t r = 0; r < e.rows.size(); ++r) {
        const double l = lambda[static_cast<Eigen::Index>(r)];
        if (l <= 0.0) continue;
        y.segment(e.rows[r].waypoint * d_, d_) -= l * row_gradient(x_new, e.rows[r]);
      }
      const Eigen::VectorXd Bs = step * Bd;
      const double sBs = s.dot(Bs);
      const double sy = s.dot(y);
      if (sBs > 0.0) {
        Eigen::VectorXd rvec = y;
        if (sy < 0.2 * sBs) {
          const double theta = 0.8 * sBs / (sBs - sy);
          rvec = theta * y + (1.0 - theta) * Bs;
        }
        const double sr = s.dot(rvec);
        if (sr > 1e-300) {
          // First update: replace the guessed scale by s'r / r'r.
          if (fresh_model) H = (sr / rvec.squaredNorm()) * Eigen::MatrixXd::Identity(n, n);
          const double inv = 1.0 / sr;
          const Eigen::VectorXd Hr = H * rvec;
          const double rHr = rvec.dot(Hr);
          H += (inv * inv * rHr + inv) * (s * s.transpose()) -
               inv * (Hr * s.transpose() + s * Hr.transpose());
        }
      }

      const double f_old = e.f;
      // Only a full step of an informed model measures progress; a short
      // backtracked step says nothing about stationarity.
      const bool model_step = !fresh_model && step == 1.0;
      fresh_model = false;
      x = std::move(x_new);
      e = std::move(e_new);
      remember();
      // The model must agree that little is left: its predicted merit
      // decrease is held to the same relative tolerance.
      if (model_step && std::abs(e.f - f_old) < params_.eps_rel * std::abs(e.f) &&
          pred < params_.eps_rel * std::abs(e.f) && max_violation(e.c) <= params_.feas_tol) {
        report_.status = PlppStatus::converged;
        break;
      }
    }
    report_.penalty = rho;
    if (max_violation(e.c) > params_.feas_tol) {
      Eigen::VectorXd xr = x;
      Evaluation er = e;
      if (restore(xr, er) && er.f <= best_e.f) {
        x = std::move(xr);
        e = std::move(er);
      } else {
        x = std::move(best_x);
        e = std::move(best_e);
      }
    }
    final_ = std::move(e);
    return x;
  }

  const Evaluation& final_evaluation() const { return final_; }

 private:
  double scaled(double distance) const { return distance / params_.d_obs - 1.0; }

  double row_value(const Eigen::VectorXd& x, const Row& r) const {
    return scaled(problem_.world()
                      .pair_clearance(x.segment(r.waypoint * d_, d_), problem_.mode(), problem_.arm(),
                                      r.pair, false)
                      .distance.distance);
  }

  /// Gradient of the row's pair at another point, same differentiation mode.
  Eigen::VectorXd row_gradient(const Eigen::VectorXd& x, const Row& r) const {
    const Eigen::VectorXd q = x.segment(r.waypoint * d_, d_);
    if (params_.gradient == GradientMode::analytic) {
      return problem_.world().pair_clearance(q, problem_.mode(), problem_.arm(), r.pair, true).gradient /
             params_.d_obs;
    }
    const double v = row_value(x, r);
    Eigen::VectorXd g(d_);
    Eigen::VectorXd xp = x;
    for (Eigen::Index k = 0; k < d_; ++k) {
      const Eigen::Index j = r.waypoint * d_ + k;
      xp[j] = x[j] + params_.fd_step;
      g[k] = (row_value(xp, r) - v) / params_.fd_step;
      xp[j] = x[j];
    }
    return g;
  }

  Eigen::MatrixXd row_jacobian(const std::vector<Row>& rows, Eigen::Index n) const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      A.block(static_cast<Eigen::Index>(r), rows[r].waypoint * d_, 1, d_) = rows[r].grad.transpose();
    }
    return A;
  }

  /// l1 violation of the linearized waypoint constraints, each the minimum of its rows.
  double model_violation(const Evaluation& e, const Eigen::VectorXd& lin) const {
    double total = 0.0;
    std::size_t r = 0;
    while (r < e.rows.size()) {
      const Eigen::Index w = e.rows[r].waypoint;
      double lowest = std::numeric_limits<double>::infinity();
      for (; r < e.rows.size() && e.rows[r].waypoint == w; ++r) {
        lowest = std::min(lowest, lin[static_cast<Eigen::Index>(r)]);
      }
      total += std::max(0.0, -lowest);
    }
    return total;
  }

  double merit(double f, const Eigen::VectorXd& c, double rho) const {
    return f + rho * violation(c);
  }

  Eigen::VectorXd clamp_to_limits(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out = x;
    Eigen::VectorXd lo(d_), hi(d_);
    Eigen::Index o = 0;
    for (auto c : problem_.active()) {
      const auto& chain = problem_.world().chain(c);
      const auto n = static_cast<Eigen::Index>(chain.dof());
      lo.segment(o, n) = chain.lower_limits();
      hi.segment(o, n) = chain.upper_limits();
      o += n;
    }
    for (Eigen::Index i = 0; i * d_ < out.size(); ++i) {
      out.segment(i * d_, d_) = out.segment(i * d_, d_).cwiseMax(lo).cwiseMin(hi);
    }
    return out;
  }

  static Eigen::MatrixXd initial_inverse_hessian(const Eigen::VectorXd& grad, Eigen::Index n) {
    const double gmax = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
    const double h0 = gmax > 0.0 ? 0.1 / gmax : 1.0;
    return h0 * Eigen::MatrixXd::Identity(n, n);
  }

  const PlppProblem& problem_;
  const PlppParams& params_;
  PlppReport& report_;
  Eigen::Index d_;
  Evaluation final_;
};

}  // namespace

PlppResult optimize(const CollisionWorld& world, ClearanceMode mode, std::size_t arm,
                    const JointPath& path, const PlppParams& params) {
  const StageTimer timer;
  PlppResult out;
  out.path = path;
  PlppReport& report = out.report;
  if (path.size() < 3) {
    if (path.size() == 2) {
      report.initial_length = report.final_length =
          combined_path_length(world, mode, arm, path, params.alpha);
    }
    report.status = PlppStatus::trivial;
    report.seconds = timer.elapsed();
    return out;
  }

  const PlppProblem problem(world, mode, arm, path, params);
  report.initial_length = combined_path_length(world, mode, arm, path, params.alpha);
  report.final_length = report.initial_length;

  Solver solver(problem, report);
  Eigen::VectorXd x = problem.initial_variables();
  Evaluation e = solver.evaluate(x);
  report.initial_objective = e.f;
  report.final_objective = e.f;
  report.max_violation = max_violation(e.c);

  if (max_violation(e.c) > params.feas_tol && !solver.restore(x, e)) {
    report.status = PlppStatus::infeasible_start;
    report.seconds = timer.elapsed();
    return out;
  }

  x = solver.run(std::move(x), std::move(e));
  if (report.status == PlppStatus::cancelled) {
    report.seconds = timer.elapsed();
    return out;
  }
  const Evaluation& fin = solver.final_evaluation();
  JointPath result = problem.to_path(x);
  if (!problem.within_limits(x)) {
    report.status = PlppStatus::joint_limit_rejected;
    report.seconds = timer.elapsed();
    return out;
  }
  // Endpoints copied bit for bit.
  result.front() = path.front();
  result.back() = path.back();
  out.path = std::move(result);
  report.final_objective = fin.f;
  report.max_violation = max_violation(fin.c);
  report.final_length = combined_path_length(world, mode, arm, out.path, params.alpha);
  report.seconds = timer.elapsed();
  return out;
}

}  // namespace dualarm
