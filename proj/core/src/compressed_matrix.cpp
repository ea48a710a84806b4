#include "mlspgemm/compressed_matrix.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

namespace mlspgemm {

index_t CompressedMatrix::row_popcount(index_t row) const noexcept {
  index_t total = 0;
  for (auto bits : row_set_bits(row)) total += static_cast<index_t>(std::popcount(bits));
  return total;
}

namespace {

// Rows up to this length look up their sets by linear scan.
constexpr index_t kLinearProbeLimit = 32;

}  // namespace

CompressedMatrix compress(const CsrMatrix& m) {
  CompressedMatrix out;
  out.num_rows = m.num_rows();
  out.num_cols = m.num_cols();
  out.row_ptr.assign(m.num_rows() + 1, 0);
  out.set_idx.reserve(m.nnz());
  out.set_bits.reserve(m.nnz());
  std::unordered_map<index_t, std::size_t> slot_of_set;
  for (index_t i = 0; i < m.num_rows(); ++i) {
    const std::size_t row_begin = out.set_idx.size();
    const bool long_row = m.row_nnz(i) > kLinearProbeLimit;
    if (long_row) slot_of_set.clear();
    for (index_t c : m.row_cols(i)) {
      const index_t set = c / kSetWidth;
      const std::uint64_t bit = std::uint64_t{1} << (c % kSetWidth);
      std::size_t slot = out.set_idx.size();
      if (long_row) {
        auto [it, inserted] = slot_of_set.try_emplace(set, slot);
        if (!inserted) slot = it->second;
      } else {
        auto first = out.set_idx.begin() + static_cast<std::ptrdiff_t>(row_begin);
        auto it = std::find(first, out.set_idx.end(), set);
        slot = static_cast<std::size_t>(it - out.set_idx.begin());
      }
      if (slot == out.set_idx.size()) {
        out.set_idx.push_back(set);
        out.set_bits.push_back(bit);
      } else {
        out.set_bits[slot] |= bit;
      }
    }
    out.row_ptr[i + 1] = out.set_idx.size();
  }
  out.set_idx.shrink_to_fit();
  out.set_bits.shrink_to_fit();
  return out;
}

}  // namespace mlspgemm
