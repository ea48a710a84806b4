#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlspgemm/csr_matrix.hpp"
#include "mlspgemm/memory_model.hpp"
#include "mlspgemm/partition.hpp"
#include "mlspgemm/spgemm.hpp"

namespace mlspgemm {

enum class ChunkAlgorithm {
  knl_chunk,               ///< B streamed through fast memory, A and C stay slow
  gpu_chunk1_ac_in_place,  ///< outer loop over A/C ranges
  gpu_chunk2_b_in_place    ///< outer loop over B ranges
};

[[nodiscard]] std::string_view to_string(ChunkAlgorithm algorithm) noexcept;

struct ChunkPlan {
  ChunkAlgorithm algorithm = ChunkAlgorithm::knl_chunk;
  /// Decision branch 1-4; 0 for knl_chunk.
  int branch = 0;
  index_t fast_size = 0;
  index_t big_portion = 0;
  index_t small_portion = 0;
  RowPartition partition_b;
  /// Absent for knl_chunk.
  std::optional<RowPartition> partition_ac;
  index_t predicted_copy_bytes = 0;
  /// Both closed-form costs for the computed partition counts (GPU plans).
  index_t cost_chunk1 = 0;
  index_t cost_chunk2 = 0;
};

/// Algorithm name, portions, partition boundaries, predicted bytes and,
/// when given, the executed bytes.
[[nodiscard]] std::string to_json(const ChunkPlan& plan,
                                  std::optional<index_t> actual_copy_bytes = std::nullopt);

/// size_a + size_c + size_b * n_ac_parts
[[nodiscard]] index_t copy_cost_chunk1(index_t size_a, index_t size_b, index_t size_c,
                                       index_t n_ac_parts);
/// size_b + size_a * n_b_parts + size_c * (n_b_parts - 1)
[[nodiscard]] index_t copy_cost_chunk2(index_t size_a, index_t size_b, index_t size_c,
                                       index_t n_b_parts);

/// B split into np = ceil(size(B) / fast_size) ranges of about
/// ceil(size(B) / np) bytes, none above fast_size.
[[nodiscard]] ChunkPlan plan_knl_chunk(std::span<const index_t> b_row_bytes, index_t fast_size);

/// Picks a GPU chunking order and its partitions. BigPortion is 3/4 of
/// fast_size and SmallPortion the rest:
///   1. size(B) < big: B whole, A/C share the remainder, chunk2.
///   2. size(A) + size(C) < big: A/C whole, B shares the remainder, chunk1.
///   3. size(A) + 2 size(C) > size(B): A/C partitioned in big, B in what is
///      left, cheaper closed form wins.
///   4. otherwise B partitioned in big, A/C in what is left, same comparison.
/// Leftover is the portion minus the largest range actually placed in it.
/// Cost ties go to chunk1. C's row sizes come from symbolic counts.
[[nodiscard]] ChunkPlan decide_chunking(index_t size_a, index_t size_b, index_t size_c,
                                        std::span<const index_t> a_row_bytes,
                                        std::span<const index_t> b_row_bytes,
                                        std::span<const index_t> c_row_bytes,
                                        index_t fast_size);

struct ChunkedResult {
  CsrMatrix c;
  CopyLedger ledger;
  /// Sum of estimate_kernel_time over the fused calls.
  double kernel_seconds = 0.0;
  std::size_t fused_calls = 0;

  [[nodiscard]] double simulated_seconds() const { return ledger.total_seconds() + kernel_seconds; }
};

/// Each B range is copied to fast memory once and multiplied against all of
/// A; A and C are accessed in slow memory.
[[nodiscard]] ChunkedResult knl_chunk_multiply(const CsrMatrix& a, const CsrMatrix& b,
                                               std::span<const index_t> c_counts,
                                               index_t fast_size, const MemoryModel& model,
                                               const ExecPolicy& policy = {});

/// Outer loop over A/C ranges: C row pointers and the A range go in, every
/// B range passes through, the finished C entries are copied out once.
[[nodiscard]] ChunkedResult gpu_chunk_multiply_1(const CsrMatrix& a, const CsrMatrix& b,
                                                 std::span<const index_t> c_counts,
                                                 const RowPartition& p_ac,
                                                 const RowPartition& p_b,
                                                 const MemoryModel& model,
                                                 const ExecPolicy& policy = {});

/// Outer loop over B ranges: each B range goes in once; per A/C range the A
/// range is copied in, the partial C is copied in after the first B range,
/// and the updated C range is streamed back to slow memory. Streamed bytes
/// are logged as stream events, not copy bytes.
[[nodiscard]] ChunkedResult gpu_chunk_multiply_2(const CsrMatrix& a, const CsrMatrix& b,
                                                 std::span<const index_t> c_counts,
                                                 const RowPartition& p_ac,
                                                 const RowPartition& p_b,
                                                 const MemoryModel& model,
                                                 const ExecPolicy& policy = {});

/// Runs `plan` with the fast capacity set to plan.fast_size.
[[nodiscard]] ChunkedResult execute_plan(const ChunkPlan& plan, const CsrMatrix& a,
                                         const CsrMatrix& b, std::span<const index_t> c_counts,
                                         const MemoryModel& model,
                                         const ExecPolicy& policy = {});

}  // namespace mlspgemm
