// Command-line benchmark harness for the dual-arm planning pipelines.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dualarm/bench.hpp"
#include "dualarm/errors.hpp"

namespace fs = std::filesystem;
using namespace dualarm;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

bool parse_switch(const std::string& value) {
  if (value == "on") return true;
  if (value == "off") return false;
  throw InvalidInput("expected on or off, got '" + value + "'");
}

int run_command(const std::string& scenario_file, const std::string& mode, std::size_t cycles,
                const std::string& plpp, std::size_t retries, std::uint64_t seed,
                const std::string& out, const std::string& results, const std::string& reproducible,
                bool quiet) {
  const Scenario scenario = load_scenario(scenario_file);
  bench::RunConfig config;
  config.mode = planning_mode_from_string(mode);
  config.cycles = cycles;
  config.use_plpp = parse_switch(plpp);
  config.retries = retries;
  config.seed = seed;
  config.reproducible = parse_switch(reproducible);
  config.save_results = parse_switch(results);
  if (config.cycles == 0) throw InvalidInput("--cycles must be at least 1");
  if (config.retries == 0) throw InvalidInput("--retries must be at least 1");

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  if (config.save_results) fs::create_directories(out_dir / "results");

  const auto total = config.cycles * scenario.queries.size();
  auto sink = [&](const bench::QueryRecord& record, const PlanResult& result) {
    if (config.save_results) {
      char name[64];
      std::snprintf(name, sizeof name, "q%05zu.json", record.index);
      std::ofstream f(out_dir / "results" / name);
      f << bench::result_to_json(scenario, record, result).dump() << '\n';
      if (!f) throw std::runtime_error(std::string("failed writing result ") + name);
    }
    if (!quiet) {
      std::fprintf(stderr, "[%zu/%zu] %-20s %-21s %.3f s\n", record.index + 1, total,
                   record.query.c_str(), std::string(to_string(record.outcome)).c_str(),
                   record.times.motion_planning);
    }
  };
  const bench::BenchReport report = bench::run(scenario, config, sink);
  bench::write_query_csv(report, out_dir / "queries.csv");
  bench::write_timing_csv(report, out_dir / "timings.csv");
  bench::write_summary_text(report, out_dir / "summary.txt");
  bench::write_summary_csv(report, out_dir / "summary.csv");
  std::ifstream summary(out_dir / "summary.txt");
  std::cout << summary.rdbuf();
  return 0;
}

int export_command(const std::string& result, const std::string& out, double resolution) {
  const bench::LoadedResult loaded = bench::load_result(result);
  bench::ExportOptions options;
  options.diagram_resolution = resolution;
  for (const auto& f : bench::export_artifacts(loaded, out, options)) {
    std::cout << (fs::path(out) / f).string() << '\n';
  }
  return 0;
}

int gradcheck_command(const std::string& scenario_file, std::size_t trials, std::uint64_t seed,
                      const std::string& out) {
  const Scenario scenario = load_scenario(scenario_file);
  const auto report = bench::gradient_bench(scenario, seed, trials);
  if (!out.empty()) {
    fs::create_directories(out);
    bench::write_gradient_report(report, fs::path(out) / "gradcheck.csv");
  }
  std::printf("problems solved         %zu of %zu\n", report.trials.size(), trials);
  std::printf("analytic gradient [s]   %.6g +- %.6g\n", report.analytic_seconds.mean,
              report.analytic_seconds.stddev);
  std::printf("numeric gradient [s]    %.6g +- %.6g\n", report.numeric_seconds.mean,
              report.numeric_seconds.stddev);
  std::printf("speedup                 %.3f\n", report.speedup);
  std::printf("max objective gap       %.3g\n", report.max_objective_gap);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-arm motion planning benchmark"};
  app.require_subcommand(1);

  std::string scenario, mode = "centralized", plpp = "on", out = "bench_out", results = "on",
              reproducible = "on";
  std::size_t cycles = 1, retries = 1;
  std::uint64_t seed = 1;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run query cycles through one pipeline");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--mode", mode, "centralized or decoupled");
  run->add_option("--cycles", cycles, "Number of query cycles");
  run->add_option("--plpp", plpp, "Path length post-processing: on or off");
  run->add_option("--retries", retries, "Concurrent attempts per query");
  run->add_option("--seed", seed, "Run seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--results", results, "Write per-query result files: on or off");
  run->add_option("--reproducible", reproducible,
                  "Drop the simplifier's time cap so repeated runs match: on or off");
  run->add_flag("--quiet", quiet, "No per-query progress lines");

  std::string result, export_out = "export_out";
  double resolution = 0.01;
  auto* exp = app.add_subcommand("export", "Write plot-ready files for one stored result");
  exp->add_option("--result", result, "Result file written by run")->required();
  exp->add_option("--out", export_out, "Output directory");
  exp->add_option("--resolution", resolution, "Coordination diagram cell size [s]");

  std::string grad_scenario = DUALARM_DEFAULT_SCENARIO, grad_out;
  std::size_t trials = 10;
  std::uint64_t grad_seed = 1;
  auto* grad = app.add_subcommand("gradcheck", "Analytic versus finite-difference gradient timing");
  grad->add_option("--trials", trials, "Number of problems");
  grad->add_option("--seed", grad_seed, "Seed");
  grad->add_option("--scenario", grad_scenario, "Scenario supplying the chains and queries");
  grad->add_option("--out", grad_out, "Directory for gradcheck.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(scenario, mode, cycles, plpp, retries, seed, out, results, reproducible,
                         quiet);
    }
    if (exp->parsed()) return export_command(result, export_out, resolution);
    return gradcheck_command(grad_scenario, trials, grad_seed, grad_out);
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
