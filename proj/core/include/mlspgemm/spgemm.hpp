#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlspgemm/compressed_matrix.hpp"
#include "mlspgemm/csr_matrix.hpp"

namespace mlspgemm {

/// Row-parallel execution knobs. workers == 0 uses the hardware concurrency.
/// Results never depend on the worker count.
struct ExecPolicy {
  unsigned workers = 0;
};

/// Nonzeros per row of A * B, from the compressed structure of B. Set
/// indices are united in a hash accumulator with OR-ed masks; the row count
/// is the popcount of the union.
[[nodiscard]] std::vector<index_t> spgemm_symbolic(const CsrMatrix& a, const CompressedMatrix& cb,
                                                   const ExecPolicy& policy = {});

/// C = A * B into storage sized by `c_counts`. Entries of A are visited in
/// storage order, so every row's floating-point summation order is fixed.
/// Pattern-only operands contribute 1.0 per entry.
[[nodiscard]] CsrMatrix spgemm_numeric(const CsrMatrix& a, const CsrMatrix& b,
                                       std::span<const index_t> c_counts,
                                       const ExecPolicy& policy = {});

/// Symbolic followed by numeric.
[[nodiscard]] CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b,
                                 const ExecPolicy& policy = {});

/// Fused multiply-add over a block of B rows:
///
///   result = c_partial + A[a_rows, b_rows] * B[b_rows, :]
///
/// `b_chunk` holds exactly rows `b_rows` of B, rebased to start at 0, and
/// `c_partial` holds the running product for rows `a_rows` (one row per A
/// row in the range). Columns of A outside `b_rows` are skipped by a linear
/// scan; A's columns need not be sorted. The row's products are accumulated
/// first and the existing c_partial entries folded in afterwards.
///
/// `c_bounds`, when given, holds the symbolic count of each row of the full
/// product and sizes the accumulators; a row of `c_partial` that already
/// exceeds its bound is rejected.
[[nodiscard]] CsrMatrix spgemm_numeric_fused(const CsrMatrix& a, const CsrMatrix& b_chunk,
                                             const CsrMatrix& c_partial, RowRange a_rows,
                                             RowRange b_rows,
                                             std::span<const index_t> c_bounds = {},
                                             const ExecPolicy& policy = {});

/// Sum over rows i of L and j in row i of |cols(L_j) & cols(L_i)|, with row
/// i's mask held in an accumulator and AND-ed against the compressed rows j.
/// For a strictly lower triangular adjacency this is the triangle count.
[[nodiscard]] std::uint64_t masked_row_intersect_count(const CsrMatrix& l,
                                                       const CompressedMatrix& cl,
                                                       const ExecPolicy& policy = {});

/// Sum over nonzeros (i, k) of A of nnz(B row k). flops = 2 * this.
[[nodiscard]] index_t count_multiplications(const CsrMatrix& a, const CsrMatrix& b);

}  // namespace mlspgemm
