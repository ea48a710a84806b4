#include "mlspgemm/spgemm.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>
#include <string>

#include "mlspgemm/accumulator.hpp"
#include "mlspgemm/error.hpp"
#include "parallel.hpp"

namespace mlspgemm {

namespace {

struct Worker {
  MemoryPool::Slab slab;
  HashAccumulator acc;

  explicit Worker(MemoryPool& pool) : slab(pool.acquire()), acc(slab.words(), false) {}
};

void finish_row(HashAccumulator& acc) {
  acc.reset();
  assert(acc.scan_empty());
}

double value_or_one(std::span<const double> vals, std::size_t k) {
  return vals.empty() ? 1.0 : vals[k];
}

}  // namespace

std::vector<index_t> spgemm_symbolic(const CsrMatrix& a, const CompressedMatrix& cb,
                                     const ExecPolicy& policy) {
  if (a.num_cols() != cb.num_rows) {
    throw DimensionMismatch("symbolic: A has " + std::to_string(a.num_cols()) +
                            " columns, compressed B has " + std::to_string(cb.num_rows) + " rows");
  }
  const index_t n = a.num_rows();
  std::vector<index_t> bounds(n, 0);
  index_t max_bound = 0;
  for (index_t i = 0; i < n; ++i) {
    index_t b = 0;
    for (index_t k : a.row_cols(i)) b += cb.row_sets(k);
    bounds[i] = b;
    max_bound = std::max(max_bound, b);
  }

  const unsigned workers = detail::resolve_workers(policy.workers);
  MemoryPool pool(HashAccumulator::words_for(max_bound), workers);
  std::vector<index_t> counts(n, 0);
  detail::parallel_rows(
      n, workers, [&](unsigned) { return Worker(pool); },
      [&](Worker& w, index_t i) {
        auto& acc = w.acc;
        acc.begin_row(bounds[i]);
        for (index_t k : a.row_cols(i)) {
          auto sets = cb.row_set_idx(k);
          auto bits = cb.row_set_bits(k);
          for (std::size_t s = 0; s < sets.size(); ++s) acc.merge_bits(sets[s], bits[s]);
        }
        index_t count = 0;
        for (index_t s = 0; s < acc.size(); ++s) {
          count += static_cast<index_t>(std::popcount(acc.payload_at(s)));
        }
        counts[i] = count;
        finish_row(acc);
      });
  return counts;
}

CsrMatrix spgemm_numeric(const CsrMatrix& a, const CsrMatrix& b, std::span<const index_t> c_counts,
                         const ExecPolicy& policy) {
  if (a.num_cols() != b.num_rows()) {
    throw DimensionMismatch("numeric: A has " + std::to_string(a.num_cols()) +
                            " columns, B has " + std::to_string(b.num_rows()) + " rows");
  }
  const index_t n = a.num_rows();
  if (c_counts.size() != n) throw InvalidArgument("numeric: c_counts length != rows of A");

  std::vector<index_t> row_ptr(n + 1, 0);
  std::inclusive_scan(c_counts.begin(), c_counts.end(), row_ptr.begin() + 1);
  const index_t nnz = row_ptr[n];
  const index_t max_bound = c_counts.empty() ? 0 : *std::max_element(c_counts.begin(), c_counts.end());
  std::vector<index_t> cols(nnz);
  std::vector<double> vals(nnz);

  const unsigned workers = detail::resolve_workers(policy.workers);
  MemoryPool pool(HashAccumulator::words_for(max_bound), workers);
  detail::parallel_rows(
      n, workers, [&](unsigned) { return Worker(pool); },
      [&](Worker& w, index_t i) {
        auto& acc = w.acc;
        acc.begin_row(c_counts[i]);
        auto acols = a.row_cols(i);
        auto avals = a.row_values(i);
        for (std::size_t p = 0; p < acols.size(); ++p) {
          const index_t k = acols[p];
          const double av = value_or_one(avals, p);
          auto bcols = b.row_cols(k);
          auto bvals = b.row_values(k);
          for (std::size_t q = 0; q < bcols.size(); ++q) acc.add(bcols[q], av * value_or_one(bvals, q));
        }
        if (acc.size() != c_counts[i]) {
          throw InternalError("numeric: row " + std::to_string(i) + " produced " +
                              std::to_string(acc.size()) + " entries, symbolic counted " +
                              std::to_string(c_counts[i]));
        }
        const index_t base = row_ptr[i];
        for (index_t s = 0; s < acc.size(); ++s) {
          cols[base + s] = acc.key_at(s);
          vals[base + s] = acc.value_at(s);
        }
        finish_row(acc);
      });
  return CsrMatrix(n, b.num_cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b, const ExecPolicy& policy) {
  const auto counts = spgemm_symbolic(a, compress(b), policy);
  return spgemm_numeric(a, b, counts, policy);
}

CsrMatrix spgemm_numeric_fused(const CsrMatrix& a, const CsrMatrix& b_chunk,
                               const CsrMatrix& c_partial, RowRange a_rows, RowRange b_rows,
                               std::span<const index_t> c_bounds, const ExecPolicy& policy) {
  if (a_rows.begin > a_rows.end || a_rows.end > a.num_rows()) {
    throw InvalidArgument("fused: A row range out of bounds");
  }
  if (b_rows.begin > b_rows.end || b_rows.end > a.num_cols()) {
    throw InvalidArgument("fused: B row range out of bounds");
  }
  if (b_chunk.num_rows() != b_rows.size()) {
    throw DimensionMismatch("fused: B chunk has " + std::to_string(b_chunk.num_rows()) +
                            " rows, range holds " + std::to_string(b_rows.size()));
  }
  if (c_partial.num_rows() != a_rows.size() || c_partial.num_cols() != b_chunk.num_cols()) {
    throw DimensionMismatch("fused: partial C shape does not match the A range and B columns");
  }
  if (!c_bounds.empty() && c_bounds.size() != a_rows.size()) {
    throw InvalidArgument("fused: c_bounds length != A range length");
  }
  if (a_rows.empty()) return c_partial;

  const index_t n = a_rows.size();
  std::vector<index_t> bounds(n);
  for (index_t r = 0; r < n; ++r) {
    if (!c_bounds.empty()) {
      bounds[r] = c_bounds[r];
      if (c_partial.row_nnz(r) > bounds[r]) {
        throw InvalidArgument("fused: partial C row " + std::to_string(a_rows.begin + r) +
                              " holds more entries than its symbolic bound");
      }
      continue;
    }
    index_t b = c_partial.row_nnz(r);
    for (index_t k : a.row_cols(a_rows.begin + r)) {
      if (b_rows.contains(k)) b += b_chunk.row_nnz(k - b_rows.begin);
    }
    bounds[r] = b;
  }

  // Stage rows at their bound, then compact.
  std::vector<index_t> stage_ptr(n + 1, 0);
  std::inclusive_scan(bounds.begin(), bounds.end(), stage_ptr.begin() + 1);
  const index_t max_bound = *std::max_element(bounds.begin(), bounds.end());
  std::vector<index_t> stage_cols(stage_ptr[n]);
  std::vector<double> stage_vals(stage_ptr[n]);
  std::vector<index_t> row_counts(n, 0);

  const unsigned workers = detail::resolve_workers(policy.workers);
  MemoryPool pool(HashAccumulator::words_for(max_bound), workers);
  detail::parallel_rows(
      n, workers, [&](unsigned) { return Worker(pool); },
      [&](Worker& w, index_t r) {
        auto& acc = w.acc;
        acc.begin_row(bounds[r]);
        const index_t i = a_rows.begin + r;
        auto acols = a.row_cols(i);
        auto avals = a.row_values(i);
        for (std::size_t p = 0; p < acols.size(); ++p) {
          const index_t k = acols[p];
          if (!b_rows.contains(k)) continue;
          const index_t local = k - b_rows.begin;
          const double av = value_or_one(avals, p);
          auto bcols = b_chunk.row_cols(local);
          auto bvals = b_chunk.row_values(local);
          for (std::size_t q = 0; q < bcols.size(); ++q) acc.add(bcols[q], av * value_or_one(bvals, q));
        }
        auto ccols = c_partial.row_cols(r);
        auto cvals = c_partial.row_values(r);
        for (std::size_t q = 0; q < ccols.size(); ++q) acc.add(ccols[q], value_or_one(cvals, q));

        const index_t base = stage_ptr[r];
        for (index_t s = 0; s < acc.size(); ++s) {
          stage_cols[base + s] = acc.key_at(s);
          stage_vals[base + s] = acc.value_at(s);
        }
        row_counts[r] = acc.size();
        finish_row(acc);
      });

  std::vector<index_t> row_ptr(n + 1, 0);
  std::inclusive_scan(row_counts.begin(), row_counts.end(), row_ptr.begin() + 1);
  std::vector<index_t> cols(row_ptr[n]);
  std::vector<double> vals(row_ptr[n]);
  for (index_t r = 0; r < n; ++r) {
    std::copy_n(stage_cols.begin() + static_cast<std::ptrdiff_t>(stage_ptr[r]), row_counts[r],
                cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]));
    std::copy_n(stage_vals.begin() + static_cast<std::ptrdiff_t>(stage_ptr[r]), row_counts[r],
                vals.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]));
  }
  return CsrMatrix(n, b_chunk.num_cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

std::uint64_t masked_row_intersect_count(const CsrMatrix& l, const CompressedMatrix& cl,
                                         const ExecPolicy& policy) {
  if (l.num_rows() != l.num_cols() || cl.num_rows != l.num_rows()) {
    throw DimensionMismatch("masked count: L must be square and match its compressed form");
  }
  index_t max_bound = 0;
  for (index_t i = 0; i < l.num_rows(); ++i) {
    for (index_t j : l.row_cols(i)) {
      if (j >= i) {
        throw InvalidArgument("masked count: L is not strictly lower triangular (row " +
                              std::to_string(i) + ", column " + std::to_string(j) + ")");
      }
    }
    max_bound = std::max(max_bound, cl.row_sets(i));
  }

  const unsigned workers = detail::resolve_workers(policy.workers);
  MemoryPool pool(HashAccumulator::words_for(max_bound), workers);
  std::vector<std::uint64_t> partial(workers, 0);
  struct CountingWorker {
    Worker w;
    std::uint64_t* sum;
  };
  detail::parallel_rows(
      l.num_rows(), workers,
      [&](unsigned id) { return CountingWorker{Worker(pool), &partial[id]}; },
      [&](CountingWorker& cw, index_t i) {
        auto& acc = cw.w.acc;
        acc.begin_row(cl.row_sets(i));
        auto own_sets = cl.row_set_idx(i);
        auto own_bits = cl.row_set_bits(i);
        for (std::size_t s = 0; s < own_sets.size(); ++s) acc.merge_bits(own_sets[s], own_bits[s]);
        std::uint64_t count = 0;
        for (index_t j : l.row_cols(i)) {
          auto sets = cl.row_set_idx(j);
          auto bits = cl.row_set_bits(j);
          for (std::size_t s = 0; s < sets.size(); ++s) {
            if (const std::uint64_t* mask = acc.find(sets[s])) {
              count += static_cast<std::uint64_t>(std::popcount(*mask & bits[s]));
            }
          }
        }
        *cw.sum += count;
        finish_row(acc);
      });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

index_t count_multiplications(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.num_cols() != b.num_rows()) {
    throw DimensionMismatch("count_multiplications: A columns != B rows");
  }
  index_t total = 0;
  for (index_t k : a.col_idx()) total += b.row_nnz(k);
  return total;
}

}  // namespace mlspgemm
