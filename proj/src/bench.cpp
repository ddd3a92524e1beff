#include "dualarm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dualarm/errors.hpp"
#include "dualarm/rng.hpp"
#include "dualarm/timing.hpp"

namespace dualarm::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& file) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

json path_json(const JointPath& path) {
  json out = json::array();
  for (const auto& q : path) out.push_back(std::vector<double>(q.data(), q.data() + q.size()));
  return out;
}

JointPath path_from_json(const json& j) {
  JointPath out;
  for (const auto& row : j) {
    const auto v = row.get<std::vector<double>>();
    out.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

PlppStatus plpp_status_from_string(const std::string& name) {
  for (auto s : {PlppStatus::converged, PlppStatus::iteration_limit, PlppStatus::stalled,
                 PlppStatus::infeasible_start, PlppStatus::joint_limit_rejected,
                 PlppStatus::cancelled, PlppStatus::trivial}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidInput("unknown post-processor status '" + name + "'");
}

Outcome outcome_from_string(const std::string& name) {
  for (auto o : kOutcomes) {
    if (to_string(o) == name) return o;
  }
  throw InvalidInput("unknown outcome '" + name + "'");
}

json times_json(const StageTimes& t) {
  return {{"path_planner", t.path_planner}, {"simplifier", t.simplifier}, {"plpp", t.plpp},
          {"trajectory", t.trajectory},     {"coordination", t.coordination},
          {"motion_planning", t.motion_planning}, {"distance", t.distance},
          {"validation", t.validation}};
}

StageTimes times_from_json(const json& j) {
  StageTimes t;
  t.path_planner = j.at("path_planner");
  t.simplifier = j.at("simplifier");
  t.plpp = j.at("plpp");
  t.trajectory = j.at("trajectory");
  t.coordination = j.at("coordination");
  t.motion_planning = j.at("motion_planning");
  t.distance = j.at("distance");
  t.validation = j.at("validation");
  return t;
}

JointLimits limits_for(const Scenario& s, PlanningMode mode, std::size_t arm) {
  if (mode == PlanningMode::centralized) {
    const CompositeChain c(s.chains[0], s.chains[1]);
    return {c.velocity_limits(), c.acceleration_limits()};
  }
  return {s.chains[arm].velocity_limits(), s.chains[arm].acceleration_limits()};
}

}  // namespace

std::uint64_t query_seed(std::uint64_t run_seed, std::size_t index) {
  return derive_seed(run_seed, index);
}

QueryRecord make_record(const PlanResult& result, std::size_t index, std::size_t cycle,
                        const std::string& query) {
  QueryRecord r;
  r.index = index;
  r.cycle = cycle;
  r.query = query;
  r.seed = result.seed;
  r.outcome = result.outcome;
  r.detail = result.detail;
  r.attempt = result.attempt;
  r.times = result.times;
  r.distance_calls = result.distance_calls;
  r.motion_duration = result.motion_duration;
  r.original_length = result.original_length;
  r.modified_length = result.modified_length;
  r.validation_samples = result.validation_samples;
  for (const auto& arm : result.arms) {
    if (!arm.plpp_input.empty()) {
      if (!r.plpp_status.empty()) r.plpp_status += '|';
      r.plpp_status += to_string(arm.plpp.status);
      r.plpp_iterations += arm.plpp.iterations;
    }
    r.raw_waypoints += arm.raw.size();
    r.final_waypoints += arm.final_path.size();
  }
  return r;
}

Statistic summarize(const std::vector<double>& values) {
  Statistic s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
  return s;
}

std::size_t BenchReport::count(Outcome outcome) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [outcome](const QueryRecord& r) { return r.outcome == outcome; }));
}

std::vector<ReportRow> BenchReport::rows() const {
  auto over_all = [this](double StageTimes::*field) {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(r.times.*field);
    return summarize(v);
  };
  std::vector<double> duration, original, modified;
  for (const auto& r : records) {
    if (r.outcome == Outcome::success) duration.push_back(r.motion_duration);
    if (r.original_length > 0.0) {
      original.push_back(r.original_length);
      modified.push_back(r.modified_length);
    }
  }
  auto count_row = [this](const char* label, Outcome o) {
    ReportRow row{label, {}, true};
    row.value.count = count(o);
    return row;
  };
  return {
      {"Path Planner Time [s]", over_all(&StageTimes::path_planner)},
      {"OMPL-style Simplifier Time [s]", over_all(&StageTimes::simplifier)},
      {"PLPP Time [s]", over_all(&StageTimes::plpp)},
      {"Trajectory Planner Time [s]", over_all(&StageTimes::trajectory)},
      {"Coordination Time [s]", over_all(&StageTimes::coordination)},
      {"Motion Planning Time [s]", over_all(&StageTimes::motion_planning)},
      {"Distance Computation Time [s]", over_all(&StageTimes::distance)},
      {"Motion Duration [s]", summarize(duration)},
      {"Original Path Length", summarize(original)},
      {"Modified Path Length", summarize(modified)},
      count_row("Collision Failure", Outcome::collision_failure),
      count_row("Coordination Failure", Outcome::coordination_failure),
      count_row("Planning Failure", Outcome::planning_failure),
      count_row("Infeasible Start", Outcome::infeasible_start),
      count_row("Success", Outcome::success),
  };
}

BenchReport run(const Scenario& scenario, const RunConfig& config, const ResultSink& sink) {
  if (config.retries == 0) throw InvalidInput("retries must be at least 1");
  if (scenario.queries.empty()) throw InvalidInput("the scenario defines no queries");
  check_queries(scenario);

  PlanningParams params = scenario.params;
  if (config.reproducible) params.simplify.max_time = std::numeric_limits<double>::infinity();
  const Planner planner(scenario.world(), params);

  BenchReport report;
  report.scenario = scenario.name;
  report.config = config;
  std::size_t index = 0;
  for (std::size_t cycle = 0; cycle < config.cycles; ++cycle) {
    for (const auto& query : scenario.queries) {
      PlanOptions options;
      options.use_plpp = config.use_plpp;
      options.seed = query_seed(config.seed, index);
      const PlanResult result = planner.plan_with_retries(config.mode, query, options, config.retries);
      report.records.push_back(make_record(result, index, cycle, query.name));
      if (sink) sink(report.records.back(), result);
      ++index;
    }
  }
  return report;
}

void write_query_csv(const BenchReport& report, const fs::path& file) {
  auto out = open_out(file);
  out << "index,cycle,query,seed,outcome,attempt,motion_duration,original_length,"
         "modified_length,plpp_status,plpp_iterations,raw_waypoints,final_waypoints,"
         "validation_samples\n";
  for (const auto& r : report.records) {
    out << r.index << ',' << r.cycle << ',' << r.query << ',' << r.seed << ','
        << to_string(r.outcome) << ',' << r.attempt << ',' << exact(r.motion_duration) << ','
        << exact(r.original_length) << ',' << exact(r.modified_length) << ',' << r.plpp_status
        << ',' << r.plpp_iterations << ',' << r.raw_waypoints << ',' << r.final_waypoints << ','
        << r.validation_samples << '\n';
  }
  finish(out, file);
}

void write_timing_csv(const BenchReport& report, const fs::path& file) {
  auto out = open_out(file);
  out << "index,query,path_planner,simplifier,plpp,trajectory,coordination,motion_planning,"
         "distance,validation,distance_calls\n";
  for (const auto& r : report.records) {
    const auto& t = r.times;
    out << r.index << ',' << r.query << ',' << short_num(t.path_planner) << ','
        << short_num(t.simplifier) << ',' << short_num(t.plpp) << ',' << short_num(t.trajectory)
        << ',' << short_num(t.coordination) << ',' << short_num(t.motion_planning) << ','
        << short_num(t.distance) << ',' << short_num(t.validation) << ',' << r.distance_calls
        << '\n';
  }
  finish(out, file);
}

void write_summary_text(const BenchReport& report, const fs::path& file) {
  auto out = open_out(file);
  const auto& c = report.config;
  out << "scenario " << report.scenario << ", " << to_string(c.mode) << ", plpp "
      << (c.use_plpp ? "on" : "off") << ", " << c.cycles << " cycle(s), "
      << report.records.size() << " queries, retries " << c.retries << ", seed " << c.seed
      << "\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-32s %14s %14s %6s\n", "", "mean", "std", "n");
  out << line;
  for (const auto& row : report.rows()) {
    if (row.is_count) {
      std::snprintf(line, sizeof line, "%-32s %14zu\n", row.label.c_str(), row.value.count);
    } else {
      std::snprintf(line, sizeof line, "%-32s %14.6g %14.6g %6zu\n", row.label.c_str(),
                    row.value.mean, row.value.stddev, row.value.count);
    }
    out << line;
  }
  finish(out, file);
}

void write_summary_csv(const BenchReport& report, const fs::path& file) {
  auto out = open_out(file);
  out << "metric,mean,std,count\n";
  for (const auto& row : report.rows()) {
    if (row.is_count) {
      out << row.label << ",,," << row.value.count << '\n';
    } else {
      out << row.label << ',' << short_num(row.value.mean) << ',' << short_num(row.value.stddev)
          << ',' << row.value.count << '\n';
    }
  }
  finish(out, file);
}

json result_to_json(const Scenario& scenario, const QueryRecord& record, const PlanResult& result) {
  json arms = json::array();
  for (const auto& a : result.arms) {
    arms.push_back({{"raw", path_json(a.raw)},
                    {"simplified", path_json(a.simplified)},
                    {"plpp_input", path_json(a.plpp_input)},
                    {"plpp_output", path_json(a.plpp_output)},
                    {"final_path", path_json(a.final_path)},
                    {"plpp",
                     {{"status", to_string(a.plpp.status)},
                      {"iterations", a.plpp.iterations},
                      {"initial_length", a.plpp.initial_length},
                      {"final_length", a.plpp.final_length},
                      {"max_violation", a.plpp.max_violation}}},
                    {"times", times_json(a.times)}});
  }
  return {{"query", record.query},
          {"index", record.index},
          {"cycle", record.cycle},
          {"mode", to_string(result.mode)},
          {"use_plpp", result.use_plpp},
          {"seed", result.seed},
          {"attempt", result.attempt},
          {"attempts", result.attempts},
          {"outcome", to_string(result.outcome)},
          {"detail", result.detail},
          {"times", times_json(result.times)},
          {"distance_calls", result.distance_calls},
          {"motion_duration", result.motion_duration},
          {"original_length", result.original_length},
          {"modified_length", result.modified_length},
          {"interpolation", to_string(result.interpolation)},
          {"collision_time", result.collision_time},
          {"arms", arms},
          {"coordination_path", path_json(result.coordination_path)},
          {"scenario", scenario.source}};
}

LoadedResult load_result(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError(file.string(), "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError(file.string(), e.what());
  }
  try {
    LoadedResult out{parse_scenario(doc.at("scenario")), {}, {}};
    PlanResult& r = out.result;
    r.mode = planning_mode_from_string(doc.at("mode").get<std::string>());
    r.use_plpp = doc.at("use_plpp");
    r.seed = doc.at("seed");
    r.attempt = doc.at("attempt");
    r.attempts = doc.at("attempts");
    r.outcome = outcome_from_string(doc.at("outcome").get<std::string>());
    r.detail = doc.at("detail");
    r.times = times_from_json(doc.at("times"));
    r.distance_calls = doc.at("distance_calls");
    r.motion_duration = doc.at("motion_duration");
    r.original_length = doc.at("original_length");
    r.modified_length = doc.at("modified_length");
    r.interpolation = interpolation_from_string(doc.at("interpolation").get<std::string>());
    r.collision_time = doc.at("collision_time");
    r.coordination_path = path_from_json(doc.at("coordination_path"));

    const auto& arms = doc.at("arms");
    for (std::size_t i = 0; i < arms.size(); ++i) {
      const json& a = arms[i];
      ArmPlan plan;
      plan.raw = path_from_json(a.at("raw"));
      plan.simplified = path_from_json(a.at("simplified"));
      plan.plpp_input = path_from_json(a.at("plpp_input"));
      plan.plpp_output = path_from_json(a.at("plpp_output"));
      plan.final_path = path_from_json(a.at("final_path"));
      plan.plpp.status = plpp_status_from_string(a.at("plpp").at("status"));
      plan.plpp.iterations = a.at("plpp").at("iterations");
      plan.plpp.initial_length = a.at("plpp").at("initial_length");
      plan.plpp.final_length = a.at("plpp").at("final_length");
      plan.plpp.max_violation = a.at("plpp").at("max_violation");
      plan.times = times_from_json(a.at("times"));
      if (plan.final_path.size() >= 1) {
        plan.trajectory = interpolate(plan.final_path, limits_for(out.scenario, r.mode, i));
      }
      r.arms.push_back(std::move(plan));
    }
    if (r.mode == PlanningMode::decoupled && !r.coordination_path.empty() && r.arms.size() == 2) {
      const Eigen::Vector2d upper{
          std::max(r.arms[0].trajectory.duration(), CoordinationSpace::kMinExtent),
          std::max(r.arms[1].trajectory.duration(), CoordinationSpace::kMinExtent)};
      r.coordination_map = CoordinationMap::build(r.coordination_path, r.interpolation, upper);
    }

    QueryRecord& rec = out.record;
    rec = make_record(r, doc.at("index"), doc.at("cycle"), doc.at("query"));
    return out;
  } catch (const json::exception& e) {
    throw LoadError(file.string(), e.what());
  }
}

namespace {

void write_cpath_profiles(const LoadedResult& loaded, const fs::path& file, double dt) {
  const PlanResult& r = loaded.result;
  const Eigen::Vector2d upper{
      std::max(r.arms[0].trajectory.duration(), CoordinationSpace::kMinExtent),
      std::max(r.arms[1].trajectory.duration(), CoordinationSpace::kMinExtent)};
  auto out = open_out(file);
  out << "mode,t,tau_l,tau_r,tau_l_dot,tau_r_dot,tau_l_ddot,tau_r_ddot\n";
  for (auto mode : {Interpolation::linear, Interpolation::cubic, Interpolation::quintic}) {
    const CoordinationMap map = CoordinationMap::build(r.coordination_path, mode, upper);
    const auto steps = static_cast<std::size_t>(std::ceil(map.duration() / dt));
    Eigen::Vector2d c, cd, cdd;
    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = std::min(static_cast<double>(k) * dt, map.duration());
      map.eval(t, c, cd, cdd);
      out << to_string(mode) << ',' << short_num(t) << ',' << short_num(c[0]) << ','
          << short_num(c[1]) << ',' << short_num(cd[0]) << ',' << short_num(cd[1]) << ','
          << short_num(cdd[0]) << ',' << short_num(cdd[1]) << '\n';
    }
  }
  finish(out, file);
}

// End-effector waypoints of the post-processor input and output, per chain.
void write_ee_traces(const LoadedResult& loaded, const fs::path& file) {
  const PlanResult& r = loaded.result;
  const auto& chains = loaded.scenario.chains;
  auto out = open_out(file);
  out << "stage,arm,index,x,y,z,qw,qx,qy,qz\n";
  for (std::size_t a = 0; a < r.arms.size(); ++a) {
    const ArmPlan& plan = r.arms[a];
    for (const auto& [stage, path] : {std::pair<const char*, const JointPath*>{"before", &plan.plpp_input},
                                      std::pair<const char*, const JointPath*>{"after", &plan.plpp_output}}) {
      for (std::size_t i = 0; i < path->size(); ++i) {
        const Eigen::VectorXd& q = (*path)[i];
        // Centralized plans carry composite configurations.
        const std::size_t first = r.mode == PlanningMode::centralized ? 0 : a;
        const std::size_t last = r.mode == PlanningMode::centralized ? 1 : a;
        Eigen::Index offset = 0;
        for (std::size_t c = first; c <= last; ++c) {
          const auto n = static_cast<Eigen::Index>(chains[c].dof());
          const FkResult fk = forward_kinematics(chains[c], q.segment(offset, n));
          offset += n;
          out << stage << ',' << c << ',' << i << ',' << exact(fk.ee.x.x()) << ','
              << exact(fk.ee.x.y()) << ',' << exact(fk.ee.x.z()) << ',' << exact(fk.ee.u.a) << ','
              << exact(fk.ee.u.v.x()) << ',' << exact(fk.ee.u.v.y()) << ','
              << exact(fk.ee.u.v.z()) << '\n';
        }
      }
    }
  }
  finish(out, file);
}

void write_joint_profiles(const LoadedResult& loaded, const fs::path& file, double dt) {
  const PlanResult& r = loaded.result;
  const std::size_t n = loaded.scenario.chains[0].dof() + loaded.scenario.chains[1].dof();
  auto out = open_out(file);
  out << "t";
  for (const char* kind : {"q", "qd", "qdd"}) {
    for (std::size_t j = 0; j < n; ++j) out << ',' << kind << j + 1;
  }
  out << '\n';
  const double T = r.motion_duration;
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, T);
    Eigen::VectorXd q(n), qd(n), qdd(n);
    if (r.mode == PlanningMode::centralized) {
      const auto s = r.arms[0].trajectory.eval(t);
      q = s.q;
      qd = s.qd;
      qdd = s.qdd;
    } else {
      const auto [left, right] =
          coordinated_eval(r.arms[0].trajectory, r.arms[1].trajectory, r.coordination_map, t);
      q << left.q, right.q;
      qd << left.qd, right.qd;
      qdd << left.qdd, right.qdd;
    }
    out << short_num(t);
    for (const Eigen::VectorXd* v : {&q, &qd, &qdd}) {
      for (Eigen::Index j = 0; j < v->size(); ++j) out << ',' << short_num((*v)[j]);
    }
    out << '\n';
  }
  finish(out, file);
}

}  // namespace

std::vector<std::string> export_artifacts(const LoadedResult& loaded, const fs::path& out_dir,
                                          const ExportOptions& options) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  const PlanResult& r = loaded.result;
  std::vector<std::string> files;
  const bool arms_planned = !r.arms.empty() && std::all_of(r.arms.begin(), r.arms.end(),
      [](const ArmPlan& a) { return a.final_path.size() >= 1 && a.trajectory.dof() > 0; });

  if (r.mode == PlanningMode::decoupled && arms_planned && r.arms.size() == 2) {
    const CollisionWorld world = loaded.scenario.world();
    const CoordinationSpace space(world, r.arms[0].trajectory, r.arms[1].trajectory,
                                  loaded.scenario.params.coordination_margin);
    const CoordinationDiagram diagram = rasterize_diagram(space, options.diagram_resolution);
    write_pgm(diagram, (out_dir / "diagram.pgm").string());
    write_csv(diagram, (out_dir / "diagram.csv").string());
    files.insert(files.end(), {"diagram.pgm", "diagram.csv"});
    if (!r.coordination_path.empty()) {
      write_cpath_profiles(loaded, out_dir / "cpath_profiles.csv", options.sample_dt);
      files.push_back("cpath_profiles.csv");
    }
  }
  if (std::any_of(r.arms.begin(), r.arms.end(), [](const ArmPlan& a) { return !a.plpp_input.empty(); })) {
    write_ee_traces(loaded, out_dir / "ee_traces.csv");
    files.push_back("ee_traces.csv");
  }
  const bool executable = arms_planned &&
      (r.mode == PlanningMode::centralized || !r.coordination_path.empty());
  if (executable) {
    write_joint_profiles(loaded, out_dir / "joint_profiles.csv", options.sample_dt);
    files.push_back("joint_profiles.csv");
  }

  json manifest = {{"query", loaded.record.query},
                   {"mode", to_string(r.mode)},
                   {"outcome", to_string(r.outcome)},
                   {"original_length", r.original_length},
                   {"modified_length", r.modified_length},
                   {"motion_duration", r.motion_duration},
                   {"files", files}};
  if (r.mode == PlanningMode::decoupled && !r.coordination_path.empty()) {
    manifest["coordination_overshoot"] = r.coordination_map.overshoot();
    manifest["coordination_time_scale"] = r.coordination_map.time_scale();
  }
  auto out = open_out(out_dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  finish(out, out_dir / "manifest.json");
  files.push_back("manifest.json");
  return files;
}

GradientBenchReport gradient_bench(const Scenario& scenario, std::uint64_t seed, std::size_t trials) {
  if (trials < 10) throw PreconditionError("the gradient benchmark needs at least 10 trials");
  if (scenario.queries.empty()) throw InvalidInput("the scenario defines no queries");
  const CollisionWorld world = scenario.world();
  const PlanningParams& params = scenario.params;

  GradientBenchReport report;
  std::vector<double> analytic_times, numeric_times;
  for (std::size_t t = 0; t < trials; ++t) {
    const MotionQuery& query = scenario.queries[t % scenario.queries.size()];
    const std::size_t arm = (t / scenario.queries.size()) % 2;
    const SerialChain& chain = world.chain(arm);
    const auto n = static_cast<Eigen::Index>(chain.dof());
    const Eigen::VectorXd start = arm == 0 ? query.start.head(n) : query.start.tail(n);
    const Eigen::VectorXd goal = arm == 0 ? query.goal.head(n) : query.goal.tail(n);
    const double margin = params.planning_margin;
    const StateSpace space(
        chain.lower_limits(), chain.upper_limits(),
        [&world, arm, margin](const Eigen::VectorXd& q) {
          return world.clearance_at_least(q, ClearanceMode::single_arm, margin, arm);
        },
        params.segment_fraction);

    const std::uint64_t trial_seed = derive_seed(seed, t);
    PlannerParams pp;
    pp.max_time = params.max_time;
    pp.max_iterations = params.max_iterations;
    pp.step_factor = params.step_factor;
    pp.seed = derive_seed(trial_seed, 1);
    const PlannerResult planned = rrt_connect(space, start, goal, pp);
    if (!planned.solved) continue;
    SimplifyParams sp = params.simplify;
    sp.max_time = std::numeric_limits<double>::infinity();
    sp.seed = derive_seed(trial_seed, 2);
    const JointPath path = densify(simplify(space, planned.path, sp), params.min_waypoints);

    GradientTrial trial;
    trial.waypoints = path.size();
    PlppParams analytic = params.plpp;
    analytic.gradient = GradientMode::analytic;
    PlppParams numeric = params.plpp;
    numeric.gradient = GradientMode::numeric;

    StageTimer timer;
    const PlppResult a = optimize(world, ClearanceMode::single_arm, arm, path, analytic);
    trial.analytic_seconds = timer.elapsed();
    timer.restart();
    const PlppResult b = optimize(world, ClearanceMode::single_arm, arm, path, numeric);
    trial.numeric_seconds = timer.elapsed();

    trial.analytic_objective = a.report.final_objective;
    trial.numeric_objective = b.report.final_objective;
    trial.analytic_iterations = a.report.iterations;
    trial.numeric_iterations = b.report.iterations;
    trial.analytic_status = a.report.status;
    trial.numeric_status = b.report.status;
    analytic_times.push_back(trial.analytic_seconds);
    numeric_times.push_back(trial.numeric_seconds);
    const double scale = std::max(std::abs(trial.analytic_objective), 1e-12);
    report.max_objective_gap = std::max(
        report.max_objective_gap, std::abs(trial.analytic_objective - trial.numeric_objective) / scale);
    report.trials.push_back(trial);
  }
  report.analytic_seconds = summarize(analytic_times);
  report.numeric_seconds = summarize(numeric_times);
  if (report.analytic_seconds.mean > 0.0) {
    report.speedup = report.numeric_seconds.mean / report.analytic_seconds.mean;
  }
  return report;
}

void write_gradient_report(const GradientBenchReport& report, const fs::path& file) {
  auto out = open_out(file);
  out << "trial,waypoints,analytic_seconds,numeric_seconds,analytic_objective,numeric_objective,"
         "analytic_iterations,numeric_iterations,analytic_status,numeric_status\n";
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    out << i << ',' << t.waypoints << ',' << short_num(t.analytic_seconds) << ','
        << short_num(t.numeric_seconds) << ',' << exact(t.analytic_objective) << ','
        << exact(t.numeric_objective) << ',' << t.analytic_iterations << ','
        << t.numeric_iterations << ',' << to_string(t.analytic_status) << ','
        << to_string(t.numeric_status) << '\n';
  }
  finish(out, file);
}

}  // namespace dualarm::bench
