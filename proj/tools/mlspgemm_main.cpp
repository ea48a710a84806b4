// Command-line driver: generate problems, run products under a placement or
// chunking mode, sweep grids, count triangles.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlspgemm/error.hpp"
#include "mlspgemm/experiment.hpp"
#include "mlspgemm/matrix_market.hpp"

namespace fs = std::filesystem;
using namespace mlspgemm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitVerify = 3;

struct Options {
  std::string problem = "laplace3d";
  std::string product = "AxP";
  std::vector<index_t> grid{9, 9, 9};
  std::string matrix;
  std::string rhs;
  std::string mode = "all_slow";
  std::optional<index_t> fast_size;
  std::optional<double> fast_bandwidth;
  std::optional<double> slow_bandwidth;
  std::optional<double> fast_latency;
  std::optional<double> slow_latency;
  std::optional<double> insert_seconds;
  std::uint64_t seed = 1;
  unsigned reps = 5;
  bool verify = false;
  std::string format = "json";
  std::string out;
  unsigned workers = 0;
  bool omit_wall = false;
  std::string ledger_out;
  std::vector<index_t> sizes;
  std::vector<std::string> modes;
  std::string graph;
};

ExperimentSpec to_spec(const Options& o) {
  ExperimentSpec s;
  s.problem = parse_problem(o.problem);
  s.product = parse_product(o.product);
  s.grid = o.grid;
  s.matrix_path = o.matrix;
  s.rhs_path = o.rhs;
  s.mode = parse_mode(o.mode);
  s.fast_size = o.fast_size;
  if (o.fast_bandwidth) s.model.fast.bandwidth = *o.fast_bandwidth;
  if (o.slow_bandwidth) s.model.slow.bandwidth = *o.slow_bandwidth;
  if (o.fast_latency) s.model.fast.latency = *o.fast_latency;
  if (o.slow_latency) s.model.slow.latency = *o.slow_latency;
  if (o.insert_seconds) s.model.insert_seconds = *o.insert_seconds;
  s.seed = o.seed;
  s.repetitions = o.reps;
  s.verify = o.verify;
  s.workers = o.workers;
  return s;
}

ReportOptions report_options(const Options& o) {
  return {parse_format(o.format), !o.omit_wall};
}

template <class Report>
void write(const Report& r, const Options& o) {
  if (o.out.empty()) {
    emit_report(r, report_options(o), std::cout);
  } else {
    emit_report(r, report_options(o), fs::path(o.out));
  }
}

int cmd_generate(const Options& o) {
  if (o.out.empty()) throw InvalidArgument("generate needs --out <directory>");
  const ExperimentSpec spec = to_spec(o);
  spec.validate();
  const Operands ops = build_operands(spec);
  fs::create_directories(o.out);
  write_matrix_market(ops.a, fs::path(o.out) / "A.mtx");
  write_matrix_market(ops.b, fs::path(o.out) / "B.mtx");
  std::cout << "A " << ops.a.num_rows() << "x" << ops.a.num_cols() << " nnz " << ops.a.nnz()
            << "\nB " << ops.b.num_rows() << "x" << ops.b.num_cols() << " nnz " << ops.b.nnz()
            << '\n';
  return kExitOk;
}

int cmd_multiply(const Options& o) {
  const RunReport r = run_experiment(to_spec(o));
  write(r, o);
  if (!o.ledger_out.empty()) {
    std::ofstream ls(o.ledger_out);
    if (!ls) throw Error("cannot open " + o.ledger_out + " for writing");
    if (r.ledger) r.ledger->write_json_lines(ls);
  }
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  if (o.sizes.empty()) throw InvalidArgument("sweep needs --sizes");
  std::vector<RunMode> modes;
  for (const auto& m : o.modes) modes.push_back(parse_mode(m));
  if (modes.empty()) modes = {RunMode::all_slow, RunMode::b_in_fast, RunMode::all_fast};
  write(run_sweep(to_spec(o), o.sizes, modes), o);
  return kExitOk;
}

int cmd_triangles(const Options& o) {
  if (o.graph.empty()) throw InvalidArgument("triangles needs --graph <file>");
  if (o.reps < 1) throw InvalidArgument("repetitions must be at least 1");
  write(run_triangles(o.graph, o.reps, o.workers), o);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tier memory SpGEMM experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file; command-line flags win");

  Options o;
  app.add_option("--problem", o.problem, "laplace3d, bigstar2d, brick3d, elasticity3d, random, file");
  app.add_option("--product", o.product, "AxP or RxA");
  app.add_option("--grid", o.grid, "Points per axis (X Y [Z]); random: rows, cols, nnz per row")
      ->expected(2, 3);
  app.add_option("--matrix", o.matrix, "Matrix Market file for --problem file");
  app.add_option("--rhs", o.rhs, "Right operand for --problem file (default: the matrix)");
  app.add_option("--mode", o.mode, "all_fast, all_slow, b_in_fast, chunk, knl_chunk");
  app.add_option("--fast-size", o.fast_size, "Fast memory capacity (bytes, or e.g. 64KiB)")
      ->transform(CLI::AsSizeValue(false));
  app.add_option("--fast-bandwidth", o.fast_bandwidth, "Bytes per second");
  app.add_option("--slow-bandwidth", o.slow_bandwidth, "Bytes per second");
  app.add_option("--fast-latency", o.fast_latency, "Seconds per transfer");
  app.add_option("--slow-latency", o.slow_latency, "Seconds per transfer");
  app.add_option("--insert-seconds", o.insert_seconds, "Simulated cost per accumulator insert");
  app.add_option("--seed", o.seed);
  app.add_option("--reps", o.reps, "Repetitions per experiment");
  app.add_flag("--verify", o.verify, "Check the result against the plain product");
  app.add_option("--format", o.format, "json or csv");
  app.add_option("--out", o.out, "Report file (generate: output directory)");
  app.add_option("--workers", o.workers, "Worker threads, 0 = all hardware threads");
  app.add_flag("--omit-wall", o.omit_wall, "Leave wall-clock fields out of reports");

  auto* generate = app.add_subcommand("generate", "Write the operands as Matrix Market files");
  auto* multiply = app.add_subcommand("multiply", "Run one product in one mode");
  multiply->add_option("--ledger-out", o.ledger_out, "Copy ledger as JSON lines");
  auto* sweep = app.add_subcommand("sweep", "Grid sizes x modes");
  sweep->add_option("--sizes", o.sizes, "Points per axis for each experiment");
  sweep->add_option("--modes", o.modes, "Modes to run at each size");
  auto* triangles = app.add_subcommand("triangles", "Count triangles in a graph file");
  triangles->add_option("--graph", o.graph, "Edge list or Matrix Market file");
  for (auto* sub : {generate, multiply, sweep, triangles}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (generate->parsed()) return cmd_generate(o);
    if (multiply->parsed()) return cmd_multiply(o);
    if (sweep->parsed()) return cmd_sweep(o);
    return cmd_triangles(o);
  } catch (const VerifyMismatch& e) {
    std::cerr << "verify failed: " << e.what() << '\n';
    return kExitVerify;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DimensionMismatch& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvalidMatrix& e) {
    std::cerr << "invalid matrix: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
