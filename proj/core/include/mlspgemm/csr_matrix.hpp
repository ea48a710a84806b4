#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mlspgemm {

/// Row offsets, column indices and dimensions are 64-bit unsigned throughout.
using index_t = std::uint64_t;

inline constexpr index_t kIndexBytes = sizeof(index_t);
inline constexpr index_t kValueBytes = sizeof(double);

/// Half-open row interval [begin, end).
struct RowRange {
  index_t begin = 0;
  index_t end = 0;

  [[nodiscard]] constexpr index_t size() const noexcept { return end - begin; }
  [[nodiscard]] constexpr bool empty() const noexcept { return begin == end; }
  [[nodiscard]] constexpr bool contains(index_t row) const noexcept {
    return row >= begin && row < end;
  }
  friend constexpr bool operator==(const RowRange&, const RowRange&) = default;
};

/// Compressed sparse row matrix.
///
/// Column indices inside a row carry no ordering guarantee. A matrix built
/// without values is pattern-only; its byte size excludes the value array.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Empty (all-zero) matrix of the given shape.
  CsrMatrix(index_t num_rows, index_t num_cols, bool pattern_only = false);

  /// Takes ownership of the arrays and validates the structural invariants.
  /// Pass an empty `values` together with `pattern_only = true` for a
  /// pattern matrix.
  CsrMatrix(index_t num_rows, index_t num_cols, std::vector<index_t> row_ptr,
            std::vector<index_t> col_idx, std::vector<double> values,
            bool pattern_only = false);

  [[nodiscard]] index_t num_rows() const noexcept { return num_rows_; }
  [[nodiscard]] index_t num_cols() const noexcept { return num_cols_; }
  [[nodiscard]] index_t nnz() const noexcept { return col_idx_.size(); }
  [[nodiscard]] bool pattern_only() const noexcept { return pattern_only_; }

  [[nodiscard]] std::span<const index_t> row_ptr() const noexcept { return row_ptr_; }
  [[nodiscard]] std::span<const index_t> col_idx() const noexcept { return col_idx_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] index_t row_nnz(index_t row) const noexcept {
    return row_ptr_[row + 1] - row_ptr_[row];
  }
  [[nodiscard]] std::span<const index_t> row_cols(index_t row) const noexcept {
    return std::span<const index_t>(col_idx_).subspan(row_ptr_[row], row_nnz(row));
  }
  /// Empty span for pattern-only matrices.
  [[nodiscard]] std::span<const double> row_values(index_t row) const noexcept {
    if (pattern_only_) return {};
    return std::span<const double>(values_).subspan(row_ptr_[row], row_nnz(row));
  }

  /// bytes(row_ptr) + bytes(col_idx) + bytes(values).
  [[nodiscard]] index_t byte_size() const noexcept;

  /// Bytes attributed to each row such that the sum equals byte_size().
  /// Row i owns row_ptr[i+1], its column indices and values; row 0 also owns
  /// row_ptr[0].
  [[nodiscard]] std::vector<index_t> row_byte_sizes() const;

  /// Sum of row_byte_sizes() over `range`.
  [[nodiscard]] index_t range_byte_size(RowRange range) const;

  /// Throws InvalidMatrix on any violated invariant, including duplicate
  /// columns inside a row.
  void validate() const;

  /// Copy with every row's columns sorted ascending (values permuted along).
  [[nodiscard]] CsrMatrix canonical() const;

  /// Rows [range.begin, range.end) as a standalone matrix with rebased rows.
  [[nodiscard]] CsrMatrix slice_rows(RowRange range) const;

  /// Exact storage equality (row-internal order matters).
  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  index_t num_rows_ = 0;
  index_t num_cols_ = 0;
  std::vector<index_t> row_ptr_{0};
  std::vector<index_t> col_idx_;
  std::vector<double> values_;
  bool pattern_only_ = false;
};

/// Byte size a CSR matrix with these per-row counts would occupy.
[[nodiscard]] index_t csr_byte_size(std::span<const index_t> row_counts,
                                    bool pattern_only = false);

/// Per-row byte attribution (see CsrMatrix::row_byte_sizes) from counts alone.
[[nodiscard]] std::vector<index_t> csr_row_byte_sizes(std::span<const index_t> row_counts,
                                                      bool pattern_only = false);

/// Byte size of rows `range` in a matrix described by counts.
[[nodiscard]] index_t csr_range_byte_size(std::span<const index_t> row_counts,
                                          RowRange range, bool pattern_only = false);

[[nodiscard]] CsrMatrix transpose(const CsrMatrix& m);

/// Rows stacked vertically; all parts must share num_cols and value kind.
[[nodiscard]] CsrMatrix vstack(std::span<const CsrMatrix> parts);

/// Dense row-major copy; intended for tiny matrices in tests and tools.
[[nodiscard]] std::vector<double> to_dense(const CsrMatrix& m);

}  // namespace mlspgemm
