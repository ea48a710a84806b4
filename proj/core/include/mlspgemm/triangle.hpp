#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "mlspgemm/csr_matrix.hpp"
#include "mlspgemm/spgemm.hpp"

namespace mlspgemm {

/// Undirected graphs are square pattern-only CSR matrices with a symmetric
/// pattern and an empty diagonal. Rows are column-sorted.

/// Throws InvalidArgument unless `g` is square, symmetric and loop-free.
void validate_graph(const CsrMatrix& g);

/// Graph on `num_vertices` vertices from arbitrary (u, v) pairs: edges are
/// made undirected, duplicates merged and self-loops dropped.
[[nodiscard]] CsrMatrix graph_from_edges(index_t num_vertices,
                                         std::span<const std::pair<index_t, index_t>> edges);

/// Pattern of m + m^T without the diagonal.
[[nodiscard]] CsrMatrix symmetrize_graph(const CsrMatrix& m);

/// Whitespace separated `u v` lines; '#' and '%' start comments. Indices are
/// 1-based when the smallest index is at least 1, else 0-based.
[[nodiscard]] CsrMatrix read_edge_list(std::istream& in);

/// `.mtx` files go through the Matrix Market reader, anything else is read
/// as an edge list; either way the result is symmetrized.
[[nodiscard]] CsrMatrix load_graph(const std::filesystem::path& path);

/// perm[k] is the vertex placed at position k: ascending degree, ties by
/// vertex index.
[[nodiscard]] std::vector<index_t> degree_sort_permutation(const CsrMatrix& g);

/// Strictly lower triangular pattern of g relabeled by `perm`
/// (vertex perm[k] becomes k).
[[nodiscard]] CsrMatrix lower_triangle(const CsrMatrix& g, std::span<const index_t> perm);

/// Exact number of triangles, each counted once.
[[nodiscard]] std::uint64_t count_triangles(const CsrMatrix& g, const ExecPolicy& policy = {});

/// Same count with an explicit vertex order.
[[nodiscard]] std::uint64_t count_triangles(const CsrMatrix& g, std::span<const index_t> perm,
                                            const ExecPolicy& policy = {});

}  // namespace mlspgemm
