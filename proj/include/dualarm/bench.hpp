#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualarm/pipeline.hpp"
#include "dualarm/scenario.hpp"

namespace dualarm::bench {

struct RunConfig {
  PlanningMode mode{PlanningMode::centralized};
  std::size_t cycles{1};
  bool use_plpp{true};
  std::size_t retries{1};
  std::uint64_t seed{1};
  /// Lifts the simplifier's time cap (its attempt cap stays) so that
  /// repeated runs produce identical paths.
  bool reproducible{true};
  bool save_results{true};
};

/// Seed handed to query `index` (cycle-major numbering) of a run.
std::uint64_t query_seed(std::uint64_t run_seed, std::size_t index);

struct QueryRecord {
  std::size_t index{0};
  std::size_t cycle{0};
  std::string query;
  std::uint64_t seed{0};
  Outcome outcome{Outcome::planning_failure};
  std::string detail;
  std::size_t attempt{0};
  StageTimes times;
  std::uint64_t distance_calls{0};
  double motion_duration{0.0};
  double original_length{0.0};
  double modified_length{0.0};
  std::string plpp_status;  // per arm, joined with '|'; empty without post-processing
  std::size_t plpp_iterations{0};
  std::size_t raw_waypoints{0};
  std::size_t final_waypoints{0};
  std::size_t validation_samples{0};
};

QueryRecord make_record(const PlanResult& result, std::size_t index, std::size_t cycle,
                        const std::string& query);

/// Mean and sample (n - 1) standard deviation; the deviation is 0 below two values.
struct Statistic {
  double mean{0.0};
  double stddev{0.0};
  std::size_t count{0};
};
Statistic summarize(const std::vector<double>& values);

struct ReportRow {
  std::string label;
  Statistic value;
  bool is_count{false};  // failure rows carry a plain count in value.count
};

inline constexpr std::size_t kOutcomeCount = 5;
inline constexpr std::array<Outcome, kOutcomeCount> kOutcomes{
    Outcome::success, Outcome::collision_failure, Outcome::coordination_failure,
    Outcome::planning_failure, Outcome::infeasible_start};

struct BenchReport {
  std::string scenario;
  RunConfig config;
  std::vector<QueryRecord> records;

  std::size_t count(Outcome outcome) const;
  /// Table rows: stage times over all queries, motion duration over successes,
  /// path lengths over queries that reached post-processing, failure counts.
  std::vector<ReportRow> rows() const;
};

using ResultSink = std::function<void(const QueryRecord&, const PlanResult&)>;

/// Runs cycles x queries sequentially. Queries whose endpoints violate the
/// preconditions abort the run before anything is planned.
BenchReport run(const Scenario& scenario, const RunConfig& config, const ResultSink& sink = {});

/// queries.csv holds only seed-determined fields; timings.csv the measurements.
void write_query_csv(const BenchReport& report, const std::filesystem::path& file);
void write_timing_csv(const BenchReport& report, const std::filesystem::path& file);
void write_summary_text(const BenchReport& report, const std::filesystem::path& file);
void write_summary_csv(const BenchReport& report, const std::filesystem::path& file);

/// Self-contained record of one planned query (scenario document included).
nlohmann::json result_to_json(const Scenario& scenario, const QueryRecord& record,
                              const PlanResult& result);

struct LoadedResult {
  Scenario scenario;
  QueryRecord record;
  PlanResult result;  // trajectories and coordination map rebuilt from the stored paths
};
LoadedResult load_result(const std::filesystem::path& file);

struct ExportOptions {
  double diagram_resolution{0.01};  // [s] per cell
  double sample_dt{1e-3};
};

/// Writes the plot-ready files for one result and returns their names.
std::vector<std::string> export_artifacts(const LoadedResult& loaded,
                                          const std::filesystem::path& out_dir,
                                          const ExportOptions& options = {});

struct GradientTrial {
  std::size_t waypoints{0};
  double analytic_seconds{0.0};
  double numeric_seconds{0.0};
  double analytic_objective{0.0};
  double numeric_objective{0.0};
  std::size_t analytic_iterations{0};
  std::size_t numeric_iterations{0};
  PlppStatus analytic_status{PlppStatus::converged};
  PlppStatus numeric_status{PlppStatus::converged};
};

struct GradientBenchReport {
  std::vector<GradientTrial> trials;
  Statistic analytic_seconds;
  Statistic numeric_seconds;
  double speedup{0.0};              // mean numeric / mean analytic time
  double max_objective_gap{0.0};    // max relative difference of final objectives
};

/// Optimizes identical single-arm problems drawn from the scenario's queries
/// with analytic and with forward-difference gradients. Throws
/// PreconditionError for fewer than 10 trials.
GradientBenchReport gradient_bench(const Scenario& scenario, std::uint64_t seed,
                                   std::size_t trials);

void write_gradient_report(const GradientBenchReport& report, const std::filesystem::path& file);

}  // namespace dualarm::bench
