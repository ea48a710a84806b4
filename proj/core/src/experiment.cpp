#include "mlspgemm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "mlspgemm/compressed_matrix.hpp"
#include "mlspgemm/error.hpp"
#include "mlspgemm/generators.hpp"
#include "mlspgemm/matrix_market.hpp"
#include "mlspgemm/spgemm.hpp"
#include "mlspgemm/triangle.hpp"

namespace mlspgemm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MatrixSummary summarize(const CsrMatrix& m) {
  return {m.num_rows(), m.num_cols(), m.nnz(), m.byte_size()};
}

/// Same rows, same column sets, values within `rtol` relative per entry.
bool close_to_reference(const CsrMatrix& got, const CsrMatrix& reference, double rtol) {
  const CsrMatrix g = got.canonical();
  if (g.num_rows() != reference.num_rows() || g.num_cols() != reference.num_cols() ||
      g.row_ptr().size() != reference.row_ptr().size()) {
    return false;
  }
  if (!std::equal(g.row_ptr().begin(), g.row_ptr().end(), reference.row_ptr().begin()) ||
      !std::equal(g.col_idx().begin(), g.col_idx().end(), reference.col_idx().begin(),
                  reference.col_idx().end())) {
    return false;
  }
  const auto gv = g.values();
  const auto rv = reference.values();
  for (std::size_t k = 0; k < gv.size(); ++k) {
    const double scale = std::max(std::abs(gv[k]), std::abs(rv[k]));
    if (std::abs(gv[k] - rv[k]) > rtol * scale) return false;
  }
  return true;
}

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view s, const Enum (&all)[N], std::string_view what) {
  for (Enum e : all) {
    if (to_string(e) == s) return e;
  }
  throw InvalidArgument("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr ProblemKind kProblems[] = {ProblemKind::laplace3d,    ProblemKind::bigstar2d,
                                     ProblemKind::brick3d,      ProblemKind::elasticity3d,
                                     ProblemKind::random,       ProblemKind::file};
constexpr ProductKind kProducts[] = {ProductKind::AxP, ProductKind::RxA};
constexpr RunMode kModes[] = {RunMode::all_fast, RunMode::all_slow, RunMode::b_in_fast,
                              RunMode::chunk, RunMode::knl_chunk};

bool is_chunked(RunMode m) { return m == RunMode::chunk || m == RunMode::knl_chunk; }

StencilKind stencil_of(ProblemKind p) {
  switch (p) {
    case ProblemKind::laplace3d:
      return StencilKind::laplace3d;
    case ProblemKind::bigstar2d:
      return StencilKind::bigstar2d;
    case ProblemKind::brick3d:
      return StencilKind::brick3d;
    case ProblemKind::elasticity3d:
      return StencilKind::elasticity3d;
    default:
      throw InvalidArgument("problem has no stencil");
  }
}

}  // namespace

std::string_view to_string(ProblemKind p) noexcept {
  switch (p) {
    case ProblemKind::laplace3d:
      return "laplace3d";
    case ProblemKind::bigstar2d:
      return "bigstar2d";
    case ProblemKind::brick3d:
      return "brick3d";
    case ProblemKind::elasticity3d:
      return "elasticity3d";
    case ProblemKind::random:
      return "random";
    case ProblemKind::file:
      return "file";
  }
  return "unknown";
}

std::string_view to_string(ProductKind p) noexcept { return p == ProductKind::AxP ? "AxP" : "RxA"; }

std::string_view to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::all_fast:
      return "all_fast";
    case RunMode::all_slow:
      return "all_slow";
    case RunMode::b_in_fast:
      return "b_in_fast";
    case RunMode::chunk:
      return "chunk";
    case RunMode::knl_chunk:
      return "knl_chunk";
  }
  return "unknown";
}

ProblemKind parse_problem(std::string_view s) { return parse_enum(s, kProblems, "problem"); }
ProductKind parse_product(std::string_view s) { return parse_enum(s, kProducts, "product"); }
RunMode parse_mode(std::string_view s) { return parse_enum(s, kModes, "mode"); }

void ExperimentSpec::validate() const {
  if (repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  if (is_chunked(mode) && !fast_size) {
    throw InvalidArgument(std::string(to_string(mode)) + " mode requires a fast size");
  }
  if (fast_size && *fast_size == 0) throw InvalidArgument("fast size must be positive");
  model.validate();
  if (problem == ProblemKind::file) {
    if (matrix_path.empty()) throw InvalidArgument("file problem requires a matrix path");
    return;
  }
  const std::size_t need = problem == ProblemKind::bigstar2d ? 2 : 3;
  if (grid.size() < need) {
    throw InvalidArgument(std::string(to_string(problem)) + " needs " + std::to_string(need) +
                          " grid values");
  }
}

MemoryModel ExperimentSpec::effective_model() const {
  return fast_size ? model.with_fast_capacity(*fast_size) : model;
}

Operands build_operands(const ExperimentSpec& spec) {
  switch (spec.problem) {
    case ProblemKind::file: {
      CsrMatrix a = read_matrix_market(spec.matrix_path);
      CsrMatrix b = spec.rhs_path.empty() ? a : read_matrix_market(spec.rhs_path);
      if (a.num_cols() != b.num_rows()) {
        throw DimensionMismatch("file operands have incompatible shapes");
      }
      return {std::move(a), std::move(b)};
    }
    case ProblemKind::random: {
      const index_t m = spec.grid[0];
      const index_t k = spec.grid[1];
      const index_t delta = spec.grid[2];
      return {generate_random_rhs(m, k, delta, spec.seed),
              generate_random_rhs(k, k, delta, spec.seed + 1)};
    }
    default:
      break;
  }
  StencilSpec st{stencil_of(spec.problem), {}};
  st.grid_dims.assign(spec.grid.begin(),
                      spec.grid.begin() + static_cast<std::ptrdiff_t>(spatial_dims(st.kind)));
  CsrMatrix op = generate_stencil(st);
  Interpolation interp = generate_interpolation(st);
  if (spec.product == ProductKind::AxP) return {std::move(op), std::move(interp.prolongation)};
  return {std::move(interp.restriction), std::move(op)};
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double RunReport::median_simulated_seconds() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.simulated_seconds);
  return median(std::move(v));
}

double RunReport::median_wall_seconds() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.wall_seconds_informational);
  return median(std::move(v));
}

index_t RunReport::median_copy_bytes() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(static_cast<double>(r.copy_bytes));
  return static_cast<index_t>(std::llround(median(std::move(v))));
}

RunReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const Operands ops = build_operands(spec);
  const CsrMatrix& a = ops.a;
  const CsrMatrix& b = ops.b;
  const ExecPolicy policy{spec.workers};
  const MemoryModel model = spec.effective_model();

  RunReport report;
  report.spec = spec;
  const auto counts = spgemm_symbolic(a, compress(b), policy);
  report.a = summarize(a);
  report.b = summarize(b);
  report.c = {a.num_rows(), b.num_cols(), 0, csr_byte_size(counts)};
  for (index_t n : counts) report.c.nnz += n;
  report.multiplications = count_multiplications(a, b);
  report.flops = 2 * report.multiplications;

  if (spec.mode == RunMode::chunk) {
    report.plan = decide_chunking(a.byte_size(), b.byte_size(), report.c.bytes,
                                  a.row_byte_sizes(), b.row_byte_sizes(),
                                  csr_row_byte_sizes(counts), *spec.fast_size);
  } else if (spec.mode == RunMode::knl_chunk) {
    report.plan = plan_knl_chunk(b.row_byte_sizes(), *spec.fast_size);
  }

  PlacementPolicy placement;
  if (!report.plan) {
    placement = PlacementPolicy::from_name(to_string(spec.mode));
    placement.validate(a.byte_size(), b.byte_size(), report.c.bytes, model);
  }

  CsrMatrix reference;
  if (spec.verify) reference = multiply(a, b, ExecPolicy{1}).canonical();

  for (unsigned rep = 0; rep < spec.repetitions; ++rep) {
    RunRecord rec;
    rec.rep = rep;
    const auto t0 = Clock::now();
    CsrMatrix c;
    if (report.plan) {
      const auto rep_counts = spgemm_symbolic(a, compress(b), policy);
      ChunkedResult res = execute_plan(*report.plan, a, b, rep_counts, model, policy);
      rec.wall_seconds_informational = seconds_since(t0);
      rec.kernel_seconds = res.kernel_seconds;
      rec.copy_seconds = res.ledger.total_seconds();
      rec.copy_bytes = res.ledger.copy_bytes();
      rec.copy_bytes_slow_to_fast = res.ledger.copy_bytes(Space::slow, Space::fast);
      rec.copy_bytes_fast_to_slow = res.ledger.copy_bytes(Space::fast, Space::slow);
      rec.stream_bytes = res.ledger.stream_bytes();
      c = std::move(res.c);
      report.ledger = std::move(res.ledger);
    } else {
      const auto rep_counts = spgemm_symbolic(a, compress(b), policy);
      c = spgemm_numeric(a, b, rep_counts, policy);
      rec.wall_seconds_informational = seconds_since(t0);
      rec.kernel_seconds =
          estimate_kernel_time(compute_access_stats(a, b, rep_counts), placement, model);
    }
    rec.simulated_seconds = rec.kernel_seconds + rec.copy_seconds;
    rec.nnz_c = c.nnz();
    if (spec.verify) {
      rec.verified = close_to_reference(c, reference, 1e-12);
      if (!*rec.verified) {
        throw VerifyMismatch(std::string(to_string(spec.mode)) + " result differs from the plain product");
      }
    }
    report.runs.push_back(std::move(rec));
  }
  return report;
}

std::vector<RunReport> run_sweep(const ExperimentSpec& base, const std::vector<index_t>& sizes,
                                 const std::vector<RunMode>& modes) {
  if (sizes.empty() || modes.empty()) throw InvalidArgument("sweep needs sizes and modes");
  if (base.problem == ProblemKind::file || base.problem == ProblemKind::random) {
    throw InvalidArgument("sweep needs a stencil problem");
  }
  std::vector<RunReport> out;
  for (index_t n : sizes) {
    for (RunMode m : modes) {
      ExperimentSpec spec = base;
      spec.grid.assign(3, n);
      spec.mode = m;
      out.push_back(run_experiment(spec));
    }
  }
  return out;
}

TriangleReport run_triangles(const std::filesystem::path& graph, unsigned repetitions,
                             unsigned workers) {
  if (repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  TriangleReport report;
  report.source = graph.filename().string();
  const CsrMatrix g = load_graph(graph);
  report.vertices = g.num_rows();
  report.edges = g.nnz() / 2;
  for (unsigned rep = 0; rep < repetitions; ++rep) {
    const auto t0 = Clock::now();
    const std::uint64_t t = count_triangles(g, ExecPolicy{workers});
    report.wall_seconds_informational.push_back(seconds_since(t0));
    if (rep > 0 && t != report.triangles) throw InternalError("triangle count changed between runs");
    report.triangles = t;
  }
  return report;
}

}  // namespace mlspgemm
