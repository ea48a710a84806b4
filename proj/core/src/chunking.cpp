#include "mlspgemm/chunking.hpp"

#include <string>
#include <utility>

#include <json.hpp>

#include "mlspgemm/error.hpp"

namespace mlspgemm {

namespace {

std::string range_label(std::string_view name, RowRange r) {
  return std::string(name) + "[" + std::to_string(r.begin) + "," + std::to_string(r.end) + ")";
}

index_t ceil_div(index_t x, index_t y) { return x / y + (x % y != 0); }

index_t sum(std::span<const index_t> v) {
  index_t t = 0;
  for (index_t x : v) t += x;
  return t;
}

void check_operands(const CsrMatrix& a, const CsrMatrix& b, std::span<const index_t> c_counts) {
  if (a.num_cols() != b.num_rows()) {
    throw DimensionMismatch("A has " + std::to_string(a.num_cols()) + " columns, B has " +
                            std::to_string(b.num_rows()) + " rows");
  }
  if (c_counts.size() != a.num_rows()) {
    throw InvalidArgument("c_counts must have one entry per row of A");
  }
}

void check_partition(const RowPartition& p, index_t num_rows, std::string_view name) {
  try {
    p.validate(num_rows, ~index_t{0});
  } catch (const InternalError& e) {
    throw InvalidArgument(std::string(name) + ": " + e.what());
  }
}

/// Bytes of C's row pointers attributed to `r`.
index_t c_row_ptr_bytes(RowRange r) {
  return (r.size() + (r.begin == 0 ? 1 : 0)) * kIndexBytes;
}

index_t c_entry_bytes(std::span<const index_t> c_counts, RowRange r) {
  index_t n = 0;
  for (index_t i = r.begin; i < r.end; ++i) n += c_counts[i];
  return n * (kIndexBytes + kValueBytes);
}

struct FusedStep {
  CsrMatrix result;
  double seconds;
};

FusedStep fused_step(const CsrMatrix& a, const CsrMatrix& b_chunk, const CsrMatrix& partial,
                     RowRange a_rows, RowRange b_rows, std::span<const index_t> bounds,
                     const PlacementPolicy& placement, const MemoryModel& model,
                     const ExecPolicy& policy) {
  CsrMatrix result = spgemm_numeric_fused(a, b_chunk, partial, a_rows, b_rows, bounds, policy);
  const auto stats = compute_fused_access_stats(a, b_chunk, partial, result, a_rows, b_rows);
  const double seconds = estimate_kernel_time(stats, placement, model);
  return {std::move(result), seconds};
}

}  // namespace

std::string_view to_string(ChunkAlgorithm algorithm) noexcept {
  switch (algorithm) {
    case ChunkAlgorithm::knl_chunk:
      return "knl_chunk";
    case ChunkAlgorithm::gpu_chunk1_ac_in_place:
      return "gpu_chunk1_ac_in_place";
    case ChunkAlgorithm::gpu_chunk2_b_in_place:
      return "gpu_chunk2_b_in_place";
  }
  return "unknown";
}

std::string to_json(const ChunkPlan& plan, std::optional<index_t> actual_copy_bytes) {
  auto ranges = [](const RowPartition& p) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < p.size(); ++i) {
      arr.push_back({{"begin", p.ranges[i].begin}, {"end", p.ranges[i].end}, {"bytes", p.bytes[i]}});
    }
    return arr;
  };
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(plan.algorithm);
  j["branch"] = plan.branch;
  j["fast_size"] = plan.fast_size;
  j["big_portion"] = plan.big_portion;
  j["small_portion"] = plan.small_portion;
  j["partition_b"] = ranges(plan.partition_b);
  j["partition_ac"] = plan.partition_ac ? ranges(*plan.partition_ac) : nlohmann::ordered_json(nullptr);
  j["cost_chunk1"] = plan.cost_chunk1;
  j["cost_chunk2"] = plan.cost_chunk2;
  j["predicted_copy_bytes"] = plan.predicted_copy_bytes;
  if (actual_copy_bytes) j["actual_copy_bytes"] = *actual_copy_bytes;
  return j.dump();
}

index_t copy_cost_chunk1(index_t size_a, index_t size_b, index_t size_c, index_t n_ac_parts) {
  if (n_ac_parts == 0) throw InvalidArgument("chunk1 cost needs at least one A/C part");
  return size_a + size_c + size_b * n_ac_parts;
}

index_t copy_cost_chunk2(index_t size_a, index_t size_b, index_t size_c, index_t n_b_parts) {
  if (n_b_parts == 0) throw InvalidArgument("chunk2 cost needs at least one B part");
  return size_b + size_a * n_b_parts + size_c * (n_b_parts - 1);
}

ChunkPlan plan_knl_chunk(std::span<const index_t> b_row_bytes, index_t fast_size) {
  if (fast_size == 0) throw InvalidArgument("fast_size must be positive");
  const index_t size_b = sum(b_row_bytes);
  ChunkPlan plan;
  plan.algorithm = ChunkAlgorithm::knl_chunk;
  plan.fast_size = fast_size;
  if (size_b == 0) {
    plan.partition_b = single_range_partition(b_row_bytes);
  } else {
    const index_t np = ceil_div(size_b, fast_size);
    const index_t p_size = ceil_div(size_b, np);
    plan.partition_b = binary_search_partition(b_row_bytes, p_size, fast_size);
  }
  plan.predicted_copy_bytes = size_b;
  return plan;
}

ChunkPlan decide_chunking(index_t size_a, index_t size_b, index_t size_c,
                          std::span<const index_t> a_row_bytes,
                          std::span<const index_t> b_row_bytes,
                          std::span<const index_t> c_row_bytes, index_t fast_size) {
  if (fast_size == 0) throw InvalidArgument("fast_size must be positive");
  if (sum(a_row_bytes) != size_a || sum(b_row_bytes) != size_b || sum(c_row_bytes) != size_c) {
    throw InvalidArgument("matrix sizes do not match their row byte sums");
  }
  const auto ac_rows = combine_row_bytes(a_row_bytes, c_row_bytes);

  ChunkPlan plan;
  plan.fast_size = fast_size;
  plan.big_portion = fast_size / 4 * 3 + (fast_size % 4) * 3 / 4;
  plan.small_portion = fast_size - plan.big_portion;
  const index_t big = plan.big_portion;
  const index_t small = plan.small_portion;

  auto fill_costs = [&] {
    plan.cost_chunk1 = copy_cost_chunk1(size_a, size_b, size_c, plan.partition_ac->size());
    plan.cost_chunk2 = copy_cost_chunk2(size_a, size_b, size_c, plan.partition_b.size());
  };
  auto pick_cheaper = [&] {
    fill_costs();
    if (plan.cost_chunk1 <= plan.cost_chunk2) {
      plan.algorithm = ChunkAlgorithm::gpu_chunk1_ac_in_place;
      plan.predicted_copy_bytes = plan.cost_chunk1;
    } else {
      plan.algorithm = ChunkAlgorithm::gpu_chunk2_b_in_place;
      plan.predicted_copy_bytes = plan.cost_chunk2;
    }
  };

  if (size_b < big) {
    plan.branch = 1;
    plan.partition_b = single_range_partition(b_row_bytes);
    plan.partition_ac = balanced_partition(ac_rows, small + (big - size_b));
    fill_costs();
    plan.algorithm = ChunkAlgorithm::gpu_chunk2_b_in_place;
    plan.predicted_copy_bytes = plan.cost_chunk2;
  } else if (size_a + size_c < big) {
    plan.branch = 2;
    plan.partition_ac = single_range_partition(ac_rows);
    plan.partition_b = balanced_partition(b_row_bytes, small + (big - (size_a + size_c)));
    fill_costs();
    plan.algorithm = ChunkAlgorithm::gpu_chunk1_ac_in_place;
    plan.predicted_copy_bytes = plan.cost_chunk1;
  } else if (size_a + 2 * size_c > size_b) {
    plan.branch = 3;
    plan.partition_ac = balanced_partition(ac_rows, big);
    plan.partition_b = balanced_partition(b_row_bytes, small + (big - plan.partition_ac->max_bytes()));
    pick_cheaper();
  } else {
    plan.branch = 4;
    plan.partition_b = balanced_partition(b_row_bytes, big);
    plan.partition_ac = balanced_partition(ac_rows, small + (big - plan.partition_b.max_bytes()));
    pick_cheaper();
  }
  return plan;
}

ChunkedResult knl_chunk_multiply(const CsrMatrix& a, const CsrMatrix& b,
                                 std::span<const index_t> c_counts, index_t fast_size,
                                 const MemoryModel& model, const ExecPolicy& policy) {
  check_operands(a, b, c_counts);
  const ChunkPlan plan = plan_knl_chunk(b.row_byte_sizes(), fast_size);
  const PlacementPolicy placement{"knl_chunk", Space::slow, Space::fast, Space::slow, true};

  ChunkedResult out{CsrMatrix(a.num_rows(), b.num_cols()),
                    CopyLedger(model.with_fast_capacity(fast_size)), 0.0, 0};
  const RowRange all_a{0, a.num_rows()};
  for (std::size_t q = 0; q < plan.partition_b.size(); ++q) {
    const RowRange br = plan.partition_b.ranges[q];
    const index_t bytes = plan.partition_b.bytes[q];
    out.ledger.copy(bytes, Space::slow, Space::fast, range_label("B", br));
    const CsrMatrix b_chunk = b.slice_rows(br);
    auto step = fused_step(a, b_chunk, out.c, all_a, br, c_counts, placement, model, policy);
    out.c = std::move(step.result);
    out.kernel_seconds += step.seconds;
    ++out.fused_calls;
    out.ledger.release(Space::fast, bytes);
  }
  return out;
}

ChunkedResult gpu_chunk_multiply_1(const CsrMatrix& a, const CsrMatrix& b,
                                   std::span<const index_t> c_counts, const RowPartition& p_ac,
                                   const RowPartition& p_b, const MemoryModel& model,
                                   const ExecPolicy& policy) {
  check_operands(a, b, c_counts);
  check_partition(p_ac, a.num_rows(), "A/C partition");
  check_partition(p_b, b.num_rows(), "B partition");
  const auto placement = PlacementPolicy::all_fast();

  ChunkedResult out{CsrMatrix(), CopyLedger(model), 0.0, 0};
  std::vector<CsrMatrix> b_chunks;
  b_chunks.reserve(p_b.size());
  for (const auto& br : p_b.ranges) b_chunks.push_back(b.slice_rows(br));

  std::vector<CsrMatrix> pieces;
  pieces.reserve(p_ac.size());
  for (const auto& ar : p_ac.ranges) {
    const index_t ptr_bytes = c_row_ptr_bytes(ar);
    const index_t entry_bytes = c_entry_bytes(c_counts, ar);
    const index_t a_bytes = a.range_byte_size(ar);
    const auto bounds = c_counts.subspan(ar.begin, ar.size());
    out.ledger.copy(ptr_bytes, Space::slow, Space::fast, range_label("C.row_ptr", ar));
    out.ledger.reserve(Space::fast, entry_bytes);
    out.ledger.copy(a_bytes, Space::slow, Space::fast, range_label("A", ar));

    CsrMatrix c_range(ar.size(), b.num_cols());
    for (std::size_t q = 0; q < p_b.size(); ++q) {
      const RowRange br = p_b.ranges[q];
      out.ledger.copy(p_b.bytes[q], Space::slow, Space::fast, range_label("B", br));
      auto step = fused_step(a, b_chunks[q], c_range, ar, br, bounds, placement, model, policy);
      c_range = std::move(step.result);
      out.kernel_seconds += step.seconds;
      ++out.fused_calls;
      out.ledger.release(Space::fast, p_b.bytes[q]);
    }
    out.ledger.write_back(entry_bytes, Space::fast, Space::slow, range_label("C.entries", ar));
    out.ledger.release(Space::fast, ptr_bytes + entry_bytes + a_bytes);
    pieces.push_back(std::move(c_range));
  }
  out.c = vstack(pieces);
  return out;
}

ChunkedResult gpu_chunk_multiply_2(const CsrMatrix& a, const CsrMatrix& b,
                                   std::span<const index_t> c_counts, const RowPartition& p_ac,
                                   const RowPartition& p_b, const MemoryModel& model,
                                   const ExecPolicy& policy) {
  check_operands(a, b, c_counts);
  check_partition(p_ac, a.num_rows(), "A/C partition");
  check_partition(p_b, b.num_rows(), "B partition");
  const auto placement = PlacementPolicy::all_fast();

  ChunkedResult out{CsrMatrix(), CopyLedger(model), 0.0, 0};
  std::vector<CsrMatrix> partials;
  partials.reserve(p_ac.size());
  for (const auto& ar : p_ac.ranges) partials.emplace_back(ar.size(), b.num_cols());

  for (std::size_t q = 0; q < p_b.size(); ++q) {
    const RowRange br = p_b.ranges[q];
    out.ledger.copy(p_b.bytes[q], Space::slow, Space::fast, range_label("B", br));
    const CsrMatrix b_chunk = b.slice_rows(br);
    for (std::size_t r = 0; r < p_ac.size(); ++r) {
      const RowRange ar = p_ac.ranges[r];
      const index_t a_bytes = a.range_byte_size(ar);
      const index_t c_bytes = csr_range_byte_size(c_counts, ar);
      const auto bounds = c_counts.subspan(ar.begin, ar.size());
      out.ledger.copy(a_bytes, Space::slow, Space::fast, range_label("A", ar));
      if (q == 0) {
        out.ledger.reserve(Space::fast, c_bytes);
      } else {
        out.ledger.copy(c_bytes, Space::slow, Space::fast, range_label("C.partial", ar));
      }
      auto step = fused_step(a, b_chunk, partials[r], ar, br, bounds, placement, model, policy);
      partials[r] = std::move(step.result);
      out.kernel_seconds += step.seconds;
      ++out.fused_calls;
      out.ledger.stream(c_bytes, Space::fast, Space::slow, range_label("C", ar));
      out.ledger.release(Space::fast, a_bytes + c_bytes);
    }
    out.ledger.release(Space::fast, p_b.bytes[q]);
  }
  out.c = vstack(partials);
  return out;
}

ChunkedResult execute_plan(const ChunkPlan& plan, const CsrMatrix& a, const CsrMatrix& b,
                           std::span<const index_t> c_counts, const MemoryModel& model,
                           const ExecPolicy& policy) {
  const MemoryModel m = model.with_fast_capacity(plan.fast_size);
  switch (plan.algorithm) {
    case ChunkAlgorithm::knl_chunk:
      return knl_chunk_multiply(a, b, c_counts, plan.fast_size, m, policy);
    case ChunkAlgorithm::gpu_chunk1_ac_in_place:
    case ChunkAlgorithm::gpu_chunk2_b_in_place:
      if (!plan.partition_ac) throw InvalidArgument("GPU plan without an A/C partition");
      if (plan.algorithm == ChunkAlgorithm::gpu_chunk1_ac_in_place) {
        return gpu_chunk_multiply_1(a, b, c_counts, *plan.partition_ac, plan.partition_b, m, policy);
      }
      return gpu_chunk_multiply_2(a, b, c_counts, *plan.partition_ac, plan.partition_b, m, policy);
  }
  throw InternalError("unknown chunk algorithm");
}

}  // namespace mlspgemm
