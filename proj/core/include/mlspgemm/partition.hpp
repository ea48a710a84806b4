#pragma once

#include <span>
#include <vector>

#include "mlspgemm/csr_matrix.hpp"

namespace mlspgemm {

/// Contiguous ranges covering [0, num_rows) with their byte sizes.
struct RowPartition {
  std::vector<RowRange> ranges;
  std::vector<index_t> bytes;

  [[nodiscard]] std::size_t size() const noexcept { return ranges.size(); }
  [[nodiscard]] index_t max_bytes() const noexcept;
  [[nodiscard]] index_t total_bytes() const noexcept;
  /// Throws InternalError unless the ranges tile [0, num_rows) in order and
  /// every range fits `capacity`.
  void validate(index_t num_rows, index_t capacity) const;
};

/// Splits rows into consecutive ranges of roughly `target` bytes.
///
/// Boundaries are located by binary search on the prefix sums: range i ends
/// at the last row whose cumulative size stays within i * target (or the
/// first multiple past its start, if a forced row overshot), clamped so no
/// range exceeds `capacity`. A range always takes
/// at least one row; a single row larger than `capacity` throws
/// UnsplittableRow. Zero rows give one empty range.
[[nodiscard]] RowPartition binary_search_partition(std::span<const index_t> row_bytes,
                                                   index_t target,
                                                   index_t capacity = ~index_t{0});

/// Fewest ranges that fit `portion`, evened out: np = ceil(total / portion)
/// ranges of target ceil(total / np), each capped at `portion`.
[[nodiscard]] RowPartition balanced_partition(std::span<const index_t> row_bytes,
                                              index_t portion);

/// The whole row set as one range.
[[nodiscard]] RowPartition single_range_partition(std::span<const index_t> row_bytes);

/// Element-wise sum, e.g. joint A and C row sizes.
[[nodiscard]] std::vector<index_t> combine_row_bytes(std::span<const index_t> x,
                                                     std::span<const index_t> y);

}  // namespace mlspgemm
