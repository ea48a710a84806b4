#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlspgemm/csr_matrix.hpp"

namespace mlspgemm {

/// Columns per compressed set.
inline constexpr index_t kSetWidth = 64;

/// Column structure of a CSR matrix packed into (set, bitmask) pairs:
/// column c maps to set c / 64, bit c % 64. Values are dropped.
struct CompressedMatrix {
  index_t num_rows = 0;
  index_t num_cols = 0;
  std::vector<index_t> row_ptr{0};
  std::vector<index_t> set_idx;
  std::vector<std::uint64_t> set_bits;

  [[nodiscard]] index_t row_sets(index_t row) const noexcept {
    return row_ptr[row + 1] - row_ptr[row];
  }
  [[nodiscard]] std::span<const index_t> row_set_idx(index_t row) const noexcept {
    return std::span<const index_t>(set_idx).subspan(row_ptr[row], row_sets(row));
  }
  [[nodiscard]] std::span<const std::uint64_t> row_set_bits(index_t row) const noexcept {
    return std::span<const std::uint64_t>(set_bits).subspan(row_ptr[row], row_sets(row));
  }
  [[nodiscard]] index_t num_entries() const noexcept { return set_idx.size(); }
  /// Popcount over the row; equals the source row's nnz.
  [[nodiscard]] index_t row_popcount(index_t row) const noexcept;
};

/// Sets inside a row appear in order of first occurrence in the source row.
[[nodiscard]] CompressedMatrix compress(const CsrMatrix& m);

}  // namespace mlspgemm
