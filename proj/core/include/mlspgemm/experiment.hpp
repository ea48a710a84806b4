#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlspgemm/chunking.hpp"
#include "mlspgemm/csr_matrix.hpp"
#include "mlspgemm/memory_model.hpp"

namespace mlspgemm {

enum class ProblemKind { laplace3d, bigstar2d, brick3d, elasticity3d, random, file };
/// AxP multiplies the operator by the prolongation; RxA multiplies the
/// restriction by the operator.
enum class ProductKind { AxP, RxA };
enum class RunMode { all_fast, all_slow, b_in_fast, chunk, knl_chunk };

[[nodiscard]] std::string_view to_string(ProblemKind p) noexcept;
[[nodiscard]] std::string_view to_string(ProductKind p) noexcept;
[[nodiscard]] std::string_view to_string(RunMode m) noexcept;
[[nodiscard]] ProblemKind parse_problem(std::string_view s);
[[nodiscard]] ProductKind parse_product(std::string_view s);
[[nodiscard]] RunMode parse_mode(std::string_view s);

struct ExperimentSpec {
  ProblemKind problem = ProblemKind::laplace3d;
  ProductKind product = ProductKind::AxP;
  /// Grid points per axis; 2D problems use the first two. For `random`:
  /// rows of A, rows of B, nonzeros per row.
  std::vector<index_t> grid{9, 9, 9};
  /// `file` problem: A from this Matrix Market file, B from `rhs_path`
  /// or A itself when empty.
  std::filesystem::path matrix_path;
  std::filesystem::path rhs_path;
  RunMode mode = RunMode::all_slow;
  /// Fast memory capacity; required by the chunked modes.
  std::optional<index_t> fast_size;
  MemoryModel model = MemoryModel::desk_preset();
  std::uint64_t seed = 1;
  unsigned repetitions = 5;
  bool verify = false;
  /// Not part of any report: results do not depend on it.
  unsigned workers = 0;

  /// Throws InvalidArgument on a spec that cannot run.
  void validate() const;
  /// Model with fast capacity replaced by fast_size when set.
  [[nodiscard]] MemoryModel effective_model() const;
};

struct Operands {
  CsrMatrix a;
  CsrMatrix b;
};

/// The two factors of the product described by `spec`.
[[nodiscard]] Operands build_operands(const ExperimentSpec& spec);

struct MatrixSummary {
  index_t rows = 0;
  index_t cols = 0;
  index_t nnz = 0;
  index_t bytes = 0;
};

struct RunRecord {
  unsigned rep = 0;
  double simulated_seconds = 0.0;
  double kernel_seconds = 0.0;
  double copy_seconds = 0.0;
  index_t copy_bytes = 0;
  index_t copy_bytes_slow_to_fast = 0;
  index_t copy_bytes_fast_to_slow = 0;
  index_t stream_bytes = 0;
  index_t nnz_c = 0;
  std::optional<bool> verified;
  double wall_seconds_informational = 0.0;
};

struct RunReport {
  ExperimentSpec spec;
  MatrixSummary a;
  MatrixSummary b;
  MatrixSummary c;
  index_t multiplications = 0;
  index_t flops = 0;
  std::optional<ChunkPlan> plan;
  std::vector<RunRecord> runs;
  /// Ledger of the last chunked repetition; not part of the emitted report.
  std::optional<CopyLedger> ledger;

  [[nodiscard]] double median_simulated_seconds() const;
  [[nodiscard]] double median_wall_seconds() const;
  [[nodiscard]] index_t median_copy_bytes() const;
};

/// Builds the operands and runs every repetition of the selected mode.
/// With spec.verify the result is checked against a single-worker plain
/// product (same structure, per-entry relative error at most 1e-12) and a
/// mismatch throws VerifyMismatch.
[[nodiscard]] RunReport run_experiment(const ExperimentSpec& spec);

/// One report per (grid size, mode): every size n becomes an n^d grid.
[[nodiscard]] std::vector<RunReport> run_sweep(const ExperimentSpec& base,
                                               const std::vector<index_t>& sizes,
                                               const std::vector<RunMode>& modes);

struct TriangleReport {
  std::string source;
  index_t vertices = 0;
  index_t edges = 0;
  std::uint64_t triangles = 0;
  std::vector<double> wall_seconds_informational;
};

[[nodiscard]] TriangleReport run_triangles(const std::filesystem::path& graph,
                                           unsigned repetitions, unsigned workers);

enum class ReportFormat { json, csv };
[[nodiscard]] ReportFormat parse_format(std::string_view s);

struct ReportOptions {
  ReportFormat format = ReportFormat::json;
  /// When false, wall-clock fields are left out so output is reproducible.
  bool include_wall = true;
};

/// JSON: {schema_version, experiment, matrices, flops, plan, runs, median}.
/// CSV: a header, one row per run and a final median row.
void emit_report(const RunReport& report, const ReportOptions& options, std::ostream& out);
/// JSON wraps the reports in {schema_version, sweep: [...]}; CSV shares one
/// header across all reports.
void emit_report(const std::vector<RunReport>& reports, const ReportOptions& options,
                 std::ostream& out);
void emit_report(const TriangleReport& report, const ReportOptions& options, std::ostream& out);

/// File variants; throw Error when `path` cannot be written.
void emit_report(const RunReport& report, const ReportOptions& options,
                 const std::filesystem::path& path);
void emit_report(const std::vector<RunReport>& reports, const ReportOptions& options,
                 const std::filesystem::path& path);
void emit_report(const TriangleReport& report, const ReportOptions& options,
                 const std::filesystem::path& path);

inline constexpr int kReportSchemaVersion = 1;

/// Median of a non-empty list; the mean of the two middle values for even
/// sizes.
[[nodiscard]] double median(std::vector<double> values);

}  // namespace mlspgemm
