#include "mlspgemm/csr_matrix.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mlspgemm/error.hpp"

namespace mlspgemm {

namespace {

index_t entry_bytes(bool pattern_only) {
  return pattern_only ? kIndexBytes : kIndexBytes + kValueBytes;
}

}  // namespace

CsrMatrix::CsrMatrix(index_t num_rows, index_t num_cols, bool pattern_only)
    : num_rows_(num_rows),
      num_cols_(num_cols),
      row_ptr_(num_rows + 1, 0),
      pattern_only_(pattern_only) {}

CsrMatrix::CsrMatrix(index_t num_rows, index_t num_cols, std::vector<index_t> row_ptr,
                     std::vector<index_t> col_idx, std::vector<double> values,
                     bool pattern_only)
    : num_rows_(num_rows),
      num_cols_(num_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)),
      pattern_only_(pattern_only) {
  if (pattern_only_ && !values_.empty()) {
    throw InvalidMatrix("pattern-only matrix given a value array");
  }
  validate();
}

index_t CsrMatrix::byte_size() const noexcept {
  return (num_rows_ + 1) * kIndexBytes + nnz() * entry_bytes(pattern_only_);
}

std::vector<index_t> CsrMatrix::row_byte_sizes() const {
  std::vector<index_t> bytes(num_rows_);
  const index_t per_entry = entry_bytes(pattern_only_);
  for (index_t i = 0; i < num_rows_; ++i) {
    bytes[i] = kIndexBytes + row_nnz(i) * per_entry;
  }
  if (num_rows_ > 0) bytes[0] += kIndexBytes;
  return bytes;
}

index_t CsrMatrix::range_byte_size(RowRange range) const {
  if (range.end > num_rows_ || range.begin > range.end) {
    throw InvalidArgument("row range out of bounds");
  }
  index_t bytes = range.size() * kIndexBytes +
                  (row_ptr_[range.end] - row_ptr_[range.begin]) * entry_bytes(pattern_only_);
  if (range.begin == 0 && !range.empty()) bytes += kIndexBytes;
  return bytes;
}

void CsrMatrix::validate() const {
  if (row_ptr_.size() != num_rows_ + 1) {
    throw InvalidMatrix("row_ptr length " + std::to_string(row_ptr_.size()) +
                        " != num_rows + 1");
  }
  if (row_ptr_.front() != 0) throw InvalidMatrix("row_ptr[0] must be 0");
  if (row_ptr_.back() != col_idx_.size()) {
    throw InvalidMatrix("row_ptr[num_rows] != nnz");
  }
  if (!pattern_only_ && values_.size() != col_idx_.size()) {
    throw InvalidMatrix("values length != nnz");
  }
  std::vector<index_t> scratch;
  for (index_t i = 0; i < num_rows_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) throw InvalidMatrix("row_ptr is decreasing");
    auto cols = row_cols(i);
    scratch.assign(cols.begin(), cols.end());
    for (index_t c : scratch) {
      if (c >= num_cols_) {
        throw InvalidMatrix("column index " + std::to_string(c) + " out of range in row " +
                            std::to_string(i));
      }
    }
    std::sort(scratch.begin(), scratch.end());
    if (std::adjacent_find(scratch.begin(), scratch.end()) != scratch.end()) {
      throw InvalidMatrix("duplicate column index in row " + std::to_string(i));
    }
  }
}

CsrMatrix CsrMatrix::canonical() const {
  CsrMatrix out = *this;
  std::vector<index_t> order;
  std::vector<index_t> cols;
  std::vector<double> vals;
  for (index_t i = 0; i < num_rows_; ++i) {
    const index_t begin = row_ptr_[i];
    const index_t len = row_nnz(i);
    order.resize(len);
    std::iota(order.begin(), order.end(), index_t{0});
    std::sort(order.begin(), order.end(), [&](index_t x, index_t y) {
      return col_idx_[begin + x] < col_idx_[begin + y];
    });
    for (index_t k = 0; k < len; ++k) {
      out.col_idx_[begin + k] = col_idx_[begin + order[k]];
      if (!pattern_only_) out.values_[begin + k] = values_[begin + order[k]];
    }
  }
  return out;
}

CsrMatrix CsrMatrix::slice_rows(RowRange range) const {
  if (range.end > num_rows_ || range.begin > range.end) {
    throw InvalidArgument("row range out of bounds");
  }
  const index_t first = row_ptr_[range.begin];
  const index_t last = row_ptr_[range.end];
  std::vector<index_t> ptr(range.size() + 1);
  for (index_t i = 0; i <= range.size(); ++i) ptr[i] = row_ptr_[range.begin + i] - first;
  std::vector<index_t> cols(col_idx_.begin() + first, col_idx_.begin() + last);
  std::vector<double> vals;
  if (!pattern_only_) vals.assign(values_.begin() + first, values_.begin() + last);
  CsrMatrix out;
  out.num_rows_ = range.size();
  out.num_cols_ = num_cols_;
  out.row_ptr_ = std::move(ptr);
  out.col_idx_ = std::move(cols);
  out.values_ = std::move(vals);
  out.pattern_only_ = pattern_only_;
  return out;
}

index_t csr_byte_size(std::span<const index_t> row_counts, bool pattern_only) {
  const index_t nnz = std::accumulate(row_counts.begin(), row_counts.end(), index_t{0});
  return (row_counts.size() + 1) * kIndexBytes + nnz * entry_bytes(pattern_only);
}

std::vector<index_t> csr_row_byte_sizes(std::span<const index_t> row_counts,
                                        bool pattern_only) {
  std::vector<index_t> bytes(row_counts.size());
  for (std::size_t i = 0; i < row_counts.size(); ++i) {
    bytes[i] = kIndexBytes + row_counts[i] * entry_bytes(pattern_only);
  }
  if (!bytes.empty()) bytes[0] += kIndexBytes;
  return bytes;
}

index_t csr_range_byte_size(std::span<const index_t> row_counts, RowRange range,
                            bool pattern_only) {
  if (range.end > row_counts.size() || range.begin > range.end) {
    throw InvalidArgument("row range out of bounds");
  }
  index_t nnz = 0;
  for (index_t i = range.begin; i < range.end; ++i) nnz += row_counts[i];
  index_t bytes = range.size() * kIndexBytes + nnz * entry_bytes(pattern_only);
  if (range.begin == 0 && !range.empty()) bytes += kIndexBytes;
  return bytes;
}

CsrMatrix transpose(const CsrMatrix& m) {
  const index_t rows = m.num_cols();
  std::vector<index_t> ptr(rows + 1, 0);
  for (index_t c : m.col_idx()) ++ptr[c + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<index_t> cursor(ptr.begin(), ptr.end() - 1);
  std::vector<index_t> cols(m.nnz());
  std::vector<double> vals(m.pattern_only() ? 0 : m.nnz());
  for (index_t i = 0; i < m.num_rows(); ++i) {
    auto rc = m.row_cols(i);
    auto rv = m.row_values(i);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      const index_t dst = cursor[rc[k]]++;
      cols[dst] = i;
      if (!m.pattern_only()) vals[dst] = rv[k];
    }
  }
  return CsrMatrix(rows, m.num_rows(), std::move(ptr), std::move(cols), std::move(vals),
                   m.pattern_only());
}

CsrMatrix vstack(std::span<const CsrMatrix> parts) {
  if (parts.empty()) return CsrMatrix{};
  const index_t cols = parts.front().num_cols();
  const bool pattern = parts.front().pattern_only();
  index_t rows = 0;
  index_t nnz = 0;
  for (const auto& p : parts) {
    if (p.num_cols() != cols) throw DimensionMismatch("vstack: column counts differ");
    if (p.pattern_only() != pattern) throw InvalidArgument("vstack: mixed value kinds");
    rows += p.num_rows();
    nnz += p.nnz();
  }
  std::vector<index_t> ptr;
  ptr.reserve(rows + 1);
  ptr.push_back(0);
  std::vector<index_t> col_idx;
  col_idx.reserve(nnz);
  std::vector<double> values;
  if (!pattern) values.reserve(nnz);
  for (const auto& p : parts) {
    const index_t base = col_idx.size();
    for (index_t i = 1; i <= p.num_rows(); ++i) ptr.push_back(base + p.row_ptr()[i]);
    col_idx.insert(col_idx.end(), p.col_idx().begin(), p.col_idx().end());
    if (!pattern) values.insert(values.end(), p.values().begin(), p.values().end());
  }
  return CsrMatrix(rows, cols, std::move(ptr), std::move(col_idx), std::move(values), pattern);
}

std::vector<double> to_dense(const CsrMatrix& m) {
  std::vector<double> dense(m.num_rows() * m.num_cols(), 0.0);
  for (index_t i = 0; i < m.num_rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      dense[i * m.num_cols() + cols[k]] += m.pattern_only() ? 1.0 : vals[k];
    }
  }
  return dense;
}

}  // namespace mlspgemm
