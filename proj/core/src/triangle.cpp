#include "mlspgemm/triangle.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "mlspgemm/compressed_matrix.hpp"
#include "mlspgemm/error.hpp"
#include "mlspgemm/matrix_market.hpp"

namespace mlspgemm {

namespace {

CsrMatrix from_adjacency(std::vector<std::vector<index_t>> adj) {
  const index_t n = adj.size();
  std::vector<index_t> row_ptr(n + 1, 0);
  std::vector<index_t> cols;
  for (index_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    cols.insert(cols.end(), row.begin(), row.end());
    row_ptr[i + 1] = cols.size();
  }
  return CsrMatrix(n, n, std::move(row_ptr), std::move(cols), {}, true);
}

void check_permutation(std::span<const index_t> perm, index_t n) {
  if (perm.size() != n) throw InvalidArgument("permutation length differs from vertex count");
  std::vector<char> seen(n, 0);
  for (index_t v : perm) {
    if (v >= n || seen[v]) throw InvalidArgument("not a permutation");
    seen[v] = 1;
  }
}

}  // namespace

void validate_graph(const CsrMatrix& g) {
  if (g.num_rows() != g.num_cols()) throw InvalidArgument("graph matrix must be square");
  const CsrMatrix t = transpose(g).canonical();
  const CsrMatrix c = g.canonical();
  for (index_t i = 0; i < g.num_rows(); ++i) {
    const auto r = c.row_cols(i);
    if (std::binary_search(r.begin(), r.end(), i)) {
      throw InvalidArgument("graph has a self-loop at vertex " + std::to_string(i));
    }
    const auto rt = t.row_cols(i);
    if (!std::equal(r.begin(), r.end(), rt.begin(), rt.end())) {
      throw InvalidArgument("graph pattern is not symmetric at row " + std::to_string(i));
    }
  }
}

CsrMatrix graph_from_edges(index_t num_vertices,
                           std::span<const std::pair<index_t, index_t>> edges) {
  std::vector<std::vector<index_t>> adj(num_vertices);
  for (auto [u, v] : edges) {
    if (u >= num_vertices || v >= num_vertices) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return from_adjacency(std::move(adj));
}

CsrMatrix symmetrize_graph(const CsrMatrix& m) {
  if (m.num_rows() != m.num_cols()) throw InvalidArgument("graph matrix must be square");
  std::vector<std::vector<index_t>> adj(m.num_rows());
  for (index_t i = 0; i < m.num_rows(); ++i) {
    for (index_t j : m.row_cols(i)) {
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  return from_adjacency(std::move(adj));
}

CsrMatrix read_edge_list(std::istream& in) {
  std::vector<std::pair<index_t, index_t>> edges;
  index_t lo = std::numeric_limits<index_t>::max();
  index_t hi = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cut = line.find_first_of("#%");
    if (cut != std::string::npos) line.resize(cut);
    std::istringstream ls(line);
    long long u = 0;
    long long v = 0;
    if (!(ls >> u)) continue;
    if (!(ls >> v) || u < 0 || v < 0) {
      throw ParseError("edge list line " + std::to_string(line_no) + ": expected two indices");
    }
    edges.emplace_back(static_cast<index_t>(u), static_cast<index_t>(v));
    lo = std::min({lo, edges.back().first, edges.back().second});
    hi = std::max({hi, edges.back().first, edges.back().second});
  }
  if (edges.empty()) return CsrMatrix(0, 0, true);
  const index_t base = lo >= 1 ? 1 : 0;
  for (auto& [u, v] : edges) {
    u -= base;
    v -= base;
  }
  return graph_from_edges(hi - base + 1, edges);
}

CsrMatrix load_graph(const std::filesystem::path& path) {
  if (path.extension() == ".mtx") return symmetrize_graph(read_matrix_market(path));
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_edge_list(in);
}

std::vector<index_t> degree_sort_permutation(const CsrMatrix& g) {
  std::vector<index_t> perm(g.num_rows());
  std::iota(perm.begin(), perm.end(), index_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](index_t x, index_t y) { return g.row_nnz(x) < g.row_nnz(y); });
  return perm;
}

CsrMatrix lower_triangle(const CsrMatrix& g, std::span<const index_t> perm) {
  validate_graph(g);
  const index_t n = g.num_rows();
  check_permutation(perm, n);
  std::vector<index_t> label(n);
  for (index_t k = 0; k < n; ++k) label[perm[k]] = k;
  std::vector<std::vector<index_t>> adj(n);
  for (index_t k = 0; k < n; ++k) {
    for (index_t v : g.row_cols(perm[k])) {
      if (label[v] < k) adj[k].push_back(label[v]);
    }
  }
  return from_adjacency(std::move(adj));
}

std::uint64_t count_triangles(const CsrMatrix& g, const ExecPolicy& policy) {
  return count_triangles(g, degree_sort_permutation(g), policy);
}

std::uint64_t count_triangles(const CsrMatrix& g, std::span<const index_t> perm,
                              const ExecPolicy& policy) {
  const CsrMatrix l = lower_triangle(g, perm);
  return masked_row_intersect_count(l, compress(l), policy);
}

}  // namespace mlspgemm
