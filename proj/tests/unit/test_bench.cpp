#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dualarm/bench.hpp"
#include "dualarm/errors.hpp"
#include "fixtures.hpp"

using namespace dualarm;
using dualarm::testing::desk;
namespace fs = std::filesystem;

namespace {

std::size_t line_count(const fs::path& file) {
  std::ifstream in(file);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("summary statistics") {
  const bench::Statistic s = bench::summarize({1.0, 2.0, 3.0});
  CHECK(s.mean == 2.0);
  CHECK(s.stddev == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.count == 3);
  const bench::Statistic one = bench::summarize({4.0});
  CHECK(one.mean == 4.0);
  CHECK(one.stddev == 0.0);
  CHECK(bench::summarize({}).count == 0);
}

TEST_CASE("query seeds differ per index and repeat per run seed") {
  CHECK(bench::query_seed(1, 0) != bench::query_seed(1, 1));
  CHECK(bench::query_seed(1, 3) == bench::query_seed(1, 3));
  CHECK(bench::query_seed(1, 3) != bench::query_seed(2, 3));
}

TEST_CASE("run configuration errors") {
  bench::RunConfig config;
  config.retries = 0;
  CHECK_THROWS_AS(bench::run(desk(), config), InvalidInput);
  Scenario empty = desk();
  empty.queries.clear();
  CHECK_THROWS_AS(bench::run(empty, bench::RunConfig{}), InvalidInput);
  CHECK_THROWS_AS(bench::gradient_bench(desk(), 1, 9), PreconditionError);
}

TEST_CASE("a decoupled run writes reports and round-trips its results") {
  TempDir dir("dualarm_bench_test");
  bench::RunConfig config;
  config.mode = PlanningMode::decoupled;
  config.seed = 11;
  std::vector<fs::path> saved;
  const bench::BenchReport report = bench::run(
      desk(), config, [&](const bench::QueryRecord& record, const PlanResult& result) {
        const fs::path file = dir.path / ("result_" + std::to_string(record.index) + ".json");
        std::ofstream(file) << bench::result_to_json(desk(), record, result).dump();
        saved.push_back(file);
      });
  REQUIRE(report.records.size() == desk().queries.size());
  std::size_t total = 0;
  for (Outcome o : bench::kOutcomes) total += report.count(o);
  CHECK(total == report.records.size());
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    CHECK(report.records[i].index == i);
    CHECK(report.records[i].seed == attempt_seed(bench::query_seed(11, i), report.records[i].attempt));
  }

  const auto rows = report.rows();
  REQUIRE(rows.size() == 15);
  CHECK(rows.front().value.count == report.records.size());
  CHECK(rows.back().label == "Success");
  CHECK(rows.back().value.count == report.count(Outcome::success));

  bench::write_query_csv(report, dir.path / "queries.csv");
  bench::write_timing_csv(report, dir.path / "timings.csv");
  bench::write_summary_text(report, dir.path / "summary.txt");
  bench::write_summary_csv(report, dir.path / "summary.csv");
  CHECK(line_count(dir.path / "queries.csv") == report.records.size() + 1);
  CHECK(line_count(dir.path / "timings.csv") == report.records.size() + 1);
  CHECK(line_count(dir.path / "summary.csv") == rows.size() + 1);
  CHECK(slurp(dir.path / "summary.txt").find("Motion Planning Time [s]") != std::string::npos);

  std::size_t success = 0;
  for (std::size_t i = 0; i < saved.size(); ++i) {
    const bench::LoadedResult loaded = bench::load_result(saved[i]);
    const bench::QueryRecord& rec = report.records[i];
    CHECK(loaded.record.query == rec.query);
    CHECK(loaded.result.outcome == rec.outcome);
    CHECK(loaded.result.motion_duration == rec.motion_duration);
    CHECK(loaded.result.modified_length == rec.modified_length);
    CHECK(loaded.scenario.queries.size() == desk().queries.size());
    if (rec.outcome != Outcome::success || success++ > 0) continue;
    REQUIRE(loaded.result.arms.size() == 2);
    CHECK(loaded.result.coordination_map.duration() == doctest::Approx(rec.motion_duration).epsilon(1e-12));

    const fs::path out = dir.path / "export";
    const auto files = bench::export_artifacts(loaded, out, {0.05, 0.01});
    for (const char* name : {"diagram.pgm", "diagram.csv", "cpath_profiles.csv", "ee_traces.csv",
                             "joint_profiles.csv", "manifest.json"}) {
      CHECK(std::find(files.begin(), files.end(), name) != files.end());
      CHECK(fs::exists(out / name));
    }
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("outcome") == "success");
    CHECK(manifest.at("coordination_time_scale").get<double>() >= 1.0);
  }
  CHECK(success > 0);
}

TEST_CASE("loading a broken result file fails with LoadError") {
  TempDir dir("dualarm_bad_result");
  std::ofstream(dir.path / "bad.json") << "{\"query\": ";
  CHECK_THROWS_AS(bench::load_result(dir.path / "bad.json"), LoadError);
  std::ofstream(dir.path / "partial.json") << "{\"query\": \"x\"}";
  CHECK_THROWS_AS(bench::load_result(dir.path / "partial.json"), LoadError);
  CHECK_THROWS_AS(bench::load_result(dir.path / "missing.json"), LoadError);
}
