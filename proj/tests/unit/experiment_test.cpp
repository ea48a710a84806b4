#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "json_schema.hpp"
#include "mlspgemm/chunking.hpp"
#include "mlspgemm/error.hpp"
#include "mlspgemm/experiment.hpp"
#include "mlspgemm/matrix_market.hpp"
#include "mlspgemm/spgemm.hpp"

using namespace mlspgemm;

namespace {

nlohmann::json load_schema() {
  std::ifstream f(MLSPGEMM_TEST_DATA "/report_schema.json");
  return nlohmann::json::parse(f);
}

std::string render(const RunReport& r, ReportFormat fmt, bool wall = true) {
  std::ostringstream out;
  emit_report(r, {fmt, wall}, out);
  return out.str();
}

ExperimentSpec small_spec(RunMode mode) {
  ExperimentSpec s;
  s.grid = {9, 9, 9};
  s.mode = mode;
  s.repetitions = 3;
  return s;
}

}  // namespace

TEST(Experiment, FlopsAreTwiceMultiplications) {
  const auto spec = small_spec(RunMode::all_slow);
  const auto r = run_experiment(spec);
  const auto ops = build_operands(spec);
  EXPECT_EQ(r.flops, 2 * count_multiplications(ops.a, ops.b));
  EXPECT_EQ(r.runs.size(), 3u);
  EXPECT_EQ(r.c.nnz, multiply(ops.a, ops.b).nnz());
}

TEST(Experiment, SelectivePlacementIsNoSlower) {
  for (auto product : {ProductKind::AxP, ProductKind::RxA}) {
    auto spec = small_spec(RunMode::all_slow);
    spec.product = product;
    const auto slow = run_experiment(spec);
    spec.mode = RunMode::b_in_fast;
    const auto dp = run_experiment(spec);
    EXPECT_LE(dp.median_simulated_seconds(), slow.median_simulated_seconds());
  }
}

TEST(Experiment, ChunkLedgerMatchesPlan) {
  for (auto mode : {RunMode::chunk, RunMode::knl_chunk}) {
    auto spec = small_spec(mode);
    spec.product = ProductKind::RxA;
    spec.verify = true;
    const auto ops = build_operands(spec);
    spec.fast_size = ops.b.byte_size() * 2 / 3;
    const auto r = run_experiment(spec);
    ASSERT_TRUE(r.plan.has_value());
    for (const auto& run : r.runs) {
      EXPECT_EQ(run.copy_bytes, r.plan->predicted_copy_bytes);
      EXPECT_EQ(run.verified, std::optional<bool>(true));
    }
    ASSERT_TRUE(r.ledger.has_value());
    EXPECT_EQ(r.ledger->copy_bytes(), r.plan->predicted_copy_bytes);
  }
}

TEST(Experiment, Validation) {
  auto spec = small_spec(RunMode::chunk);
  EXPECT_THROW((void)run_experiment(spec), InvalidArgument);
  spec.mode = RunMode::all_slow;
  spec.repetitions = 0;
  EXPECT_THROW((void)run_experiment(spec), InvalidArgument);
  spec.repetitions = 1;
  spec.problem = ProblemKind::file;
  EXPECT_THROW((void)run_experiment(spec), InvalidArgument);
  spec.problem = ProblemKind::laplace3d;
  spec.mode = RunMode::all_fast;
  spec.fast_size = 1000;
  EXPECT_THROW((void)run_experiment(spec), CapacityExceeded);
  EXPECT_THROW((void)parse_mode("fastest"), InvalidArgument);
  EXPECT_EQ(parse_product("RxA"), ProductKind::RxA);
}

TEST(Experiment, FileProblem) {
  auto spec = small_spec(RunMode::all_slow);
  spec.problem = ProblemKind::bigstar2d;
  spec.grid = {9, 9};
  const auto ops = build_operands(spec);
  const auto path = std::filesystem::temp_directory_path() / "mlspgemm_exp_a.mtx";
  write_matrix_market(ops.a, path);
  ExperimentSpec file = spec;
  file.problem = ProblemKind::file;
  file.matrix_path = path;
  file.repetitions = 1;
  const auto r = run_experiment(file);
  EXPECT_EQ(r.flops, 2 * count_multiplications(ops.a, ops.a));
  std::filesystem::remove(path);
}

TEST(Report, JsonMatchesSchema) {
  const auto schema = load_schema();
  auto spec = small_spec(RunMode::chunk);
  spec.product = ProductKind::RxA;
  spec.fast_size = 40000;
  for (auto mode : {RunMode::chunk, RunMode::all_slow}) {
    spec.mode = mode;
    const auto r = run_experiment(spec);
    const auto j = nlohmann::json::parse(render(r, ReportFormat::json));
    const auto errors = schema::validate(j, schema);
    EXPECT_TRUE(errors.empty()) << (errors.empty() ? "" : errors.front());
    EXPECT_EQ(j["runs"].size(), 3u);
  }
}

TEST(Report, SchemaCheckerRejectsBrokenReports) {
  const auto schema = load_schema();
  const auto r = run_experiment(small_spec(RunMode::all_slow));
  auto j = nlohmann::json::parse(render(r, ReportFormat::json));
  j["schema_version"] = 2;
  EXPECT_FALSE(schema::validate(j, schema).empty());
  j = nlohmann::json::parse(render(r, ReportFormat::json));
  j["runs"] = nlohmann::json::array();
  EXPECT_FALSE(schema::validate(j, schema).empty());
  j = nlohmann::json::parse(render(r, ReportFormat::json));
  j.erase("median");
  EXPECT_FALSE(schema::validate(j, schema).empty());
}

TEST(Report, CsvRowCount) {
  auto spec = small_spec(RunMode::all_slow);
  spec.repetitions = 4;
  const auto text = render(run_experiment(spec), ReportFormat::csv);
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 1u + 4u + 1u);
  EXPECT_NE(lines.front().find("simulated_seconds"), std::string::npos);
  EXPECT_NE(lines.back().find(",median,"), std::string::npos);
  const auto columns = std::count(lines.front().begin(), lines.front().end(), ',');
  for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), columns) << l;
}

TEST(Report, DeterministicWithoutWallClock) {
  auto spec = small_spec(RunMode::chunk);
  spec.product = ProductKind::RxA;
  spec.fast_size = 40000;
  spec.workers = 1;
  const auto a = render(run_experiment(spec), ReportFormat::json, false);
  spec.workers = 4;
  const auto b = render(run_experiment(spec), ReportFormat::json, false);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("wall"), std::string::npos);
}

TEST(Report, MedianIsTrueMedian) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW((void)median({}), InvalidArgument);
}

TEST(Report, UnwritablePath) {
  const auto r = run_experiment(small_spec(RunMode::all_slow));
  EXPECT_THROW(emit_report(r, ReportOptions{}, std::filesystem::path("/nonexistent/dir/x.json")),
               Error);
}

TEST(Sweep, OneReportPerSizeAndMode) {
  auto spec = small_spec(RunMode::all_slow);
  spec.repetitions = 1;
  const auto reports = run_sweep(spec, {5, 9}, {RunMode::all_slow, RunMode::b_in_fast});
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[2].spec.grid, (std::vector<index_t>{9, 9, 9}));
  std::ostringstream out;
  emit_report(reports, {ReportFormat::json, false}, out);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["sweep"].size(), 4u);
  const auto schema = load_schema();
  for (const auto& r : j["sweep"]) EXPECT_TRUE(schema::validate(r, schema).empty());
}
