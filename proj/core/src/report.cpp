#include <charconv>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "mlspgemm/error.hpp"
#include "mlspgemm/experiment.hpp"

namespace mlspgemm {

namespace {

using Json = nlohmann::ordered_json;

Json space_json(const MemorySpaceSpec& s) {
  Json j;
  j["capacity"] = s.capacity ? Json(*s.capacity) : Json(nullptr);
  j["bandwidth"] = s.bandwidth;
  j["latency"] = s.latency;
  return j;
}

Json matrix_json(const MatrixSummary& m) {
  return {{"rows", m.rows}, {"cols", m.cols}, {"nnz", m.nnz}, {"bytes", m.bytes}};
}

Json experiment_json(const ExperimentSpec& s) {
  Json j;
  j["problem"] = to_string(s.problem);
  j["product"] = to_string(s.product);
  if (s.problem == ProblemKind::file) {
    j["matrix"] = s.matrix_path.filename().string();
    j["rhs"] = s.rhs_path.empty() ? Json(nullptr) : Json(s.rhs_path.filename().string());
  } else {
    j["grid"] = s.grid;
  }
  j["mode"] = to_string(s.mode);
  j["fast_size"] = s.fast_size ? Json(*s.fast_size) : Json(nullptr);
  j["seed"] = s.seed;
  j["repetitions"] = s.repetitions;
  j["verify"] = s.verify;
  const MemoryModel m = s.effective_model();
  j["memory"] = {{"fast", space_json(m.fast)},
                 {"slow", space_json(m.slow)},
                 {"insert_seconds", m.insert_seconds}};
  return j;
}

Json report_json(const RunReport& r, bool include_wall) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["experiment"] = experiment_json(r.spec);
  j["matrices"] = {{"A", matrix_json(r.a)}, {"B", matrix_json(r.b)}, {"C", matrix_json(r.c)}};
  j["multiplications"] = r.multiplications;
  j["flops"] = r.flops;
  if (r.plan) {
    j["plan"] = Json::parse(to_json(*r.plan, r.runs.empty() ? std::nullopt
                                                            : std::optional(r.runs[0].copy_bytes)));
  } else {
    j["plan"] = nullptr;
  }
  Json runs = Json::array();
  for (const auto& run : r.runs) {
    Json x;
    x["rep"] = run.rep;
    x["flops"] = r.flops;
    x["nnz_c"] = run.nnz_c;
    x["simulated_seconds"] = run.simulated_seconds;
    x["kernel_seconds"] = run.kernel_seconds;
    x["copy_seconds"] = run.copy_seconds;
    x["ledger"] = {{"copy_bytes", run.copy_bytes},
                   {"slow_to_fast", run.copy_bytes_slow_to_fast},
                   {"fast_to_slow", run.copy_bytes_fast_to_slow},
                   {"stream_bytes", run.stream_bytes}};
    x["verified"] = run.verified ? Json(*run.verified) : Json(nullptr);
    if (include_wall) x["wall_seconds_informational"] = run.wall_seconds_informational;
    runs.push_back(std::move(x));
  }
  j["runs"] = std::move(runs);
  Json med;
  med["simulated_seconds"] = r.median_simulated_seconds();
  med["copy_bytes"] = r.median_copy_bytes();
  if (include_wall) med["wall_seconds_informational"] = r.median_wall_seconds();
  j["median"] = std::move(med);
  return j;
}

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_header(bool include_wall) {
  std::string h =
      "problem,product,grid,mode,fast_size,rep,flops,nnz_c,simulated_seconds,kernel_seconds,"
      "copy_seconds,copy_bytes,stream_bytes,verified";
  if (include_wall) h += ",wall_seconds_informational";
  return h;
}

void csv_rows(const RunReport& r, bool include_wall, std::ostream& out) {
  std::string prefix = std::string(to_string(r.spec.problem)) + "," +
                       std::string(to_string(r.spec.product)) + ",";
  if (r.spec.problem == ProblemKind::file) {
    prefix += r.spec.matrix_path.filename().string();
  } else {
    for (std::size_t i = 0; i < r.spec.grid.size(); ++i) {
      if (i) prefix += 'x';
      prefix += std::to_string(r.spec.grid[i]);
    }
  }
  prefix += "," + std::string(to_string(r.spec.mode)) + "," +
            (r.spec.fast_size ? std::to_string(*r.spec.fast_size) : std::string()) + ",";
  for (const auto& run : r.runs) {
    out << prefix << run.rep << ',' << r.flops << ',' << run.nnz_c << ','
        << num(run.simulated_seconds) << ',' << num(run.kernel_seconds) << ','
        << num(run.copy_seconds) << ',' << run.copy_bytes << ',' << run.stream_bytes << ','
        << (run.verified ? (*run.verified ? "true" : "false") : "");
    if (include_wall) out << ',' << num(run.wall_seconds_informational);
    out << '\n';
  }
  const auto& last = r.runs.back();
  out << prefix << "median," << r.flops << ',' << last.nnz_c << ','
      << num(r.median_simulated_seconds()) << ",,," << r.median_copy_bytes() << ",,";
  if (include_wall) out << ',' << num(r.median_wall_seconds());
  out << '\n';
}

template <class Report>
void emit_to_file(const Report& report, const ReportOptions& options,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  emit_report(report, options, out);
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

ReportFormat parse_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw InvalidArgument("unknown format '" + std::string(s) + "'");
}

void emit_report(const RunReport& report, const ReportOptions& options, std::ostream& out) {
  if (report.runs.empty()) throw InvalidArgument("report has no runs");
  if (options.format == ReportFormat::json) {
    out << report_json(report, options.include_wall).dump(2) << '\n';
    return;
  }
  out << csv_header(options.include_wall) << '\n';
  csv_rows(report, options.include_wall, out);
}

void emit_report(const std::vector<RunReport>& reports, const ReportOptions& options,
                 std::ostream& out) {
  for (const auto& r : reports) {
    if (r.runs.empty()) throw InvalidArgument("report has no runs");
  }
  if (options.format == ReportFormat::json) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(report_json(r, options.include_wall));
    j["sweep"] = std::move(arr);
    out << j.dump(2) << '\n';
    return;
  }
  out << csv_header(options.include_wall) << '\n';
  for (const auto& r : reports) csv_rows(r, options.include_wall, out);
}

void emit_report(const TriangleReport& report, const ReportOptions& options, std::ostream& out) {
  if (options.format == ReportFormat::json) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["experiment"] = "triangles";
    j["graph"] = {{"source", report.source}, {"vertices", report.vertices}, {"edges", report.edges}};
    j["triangles"] = report.triangles;
    j["repetitions"] = report.wall_seconds_informational.size();
    if (options.include_wall) {
      j["wall_seconds_informational"] = report.wall_seconds_informational;
      j["median"] = {{"wall_seconds_informational", median(report.wall_seconds_informational)}};
    }
    out << j.dump(2) << '\n';
    return;
  }
  out << "source,vertices,edges,triangles,rep";
  if (options.include_wall) out << ",wall_seconds_informational";
  out << '\n';
  const auto& w = report.wall_seconds_informational;
  for (std::size_t i = 0; i <= w.size(); ++i) {
    out << report.source << ',' << report.vertices << ',' << report.edges << ','
        << report.triangles << ',' << (i < w.size() ? std::to_string(i) : "median");
    if (options.include_wall) out << ',' << num(i < w.size() ? w[i] : median(w));
    out << '\n';
  }
}

void emit_report(const RunReport& report, const ReportOptions& options,
                 const std::filesystem::path& path) {
  emit_to_file(report, options, path);
}

void emit_report(const std::vector<RunReport>& reports, const ReportOptions& options,
                 const std::filesystem::path& path) {
  emit_to_file(reports, options, path);
}

void emit_report(const TriangleReport& report, const ReportOptions& options,
                 const std::filesystem::path& path) {
  emit_to_file(report, options, path);
}

}  // namespace mlspgemm
