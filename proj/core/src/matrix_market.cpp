#include "mlspgemm/matrix_market.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>

#include "mlspgemm/error.hpp"

namespace mlspgemm {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Triplet {
  index_t row;
  index_t col;
  double value;
};

}  // namespace

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market stream");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'");
  if (format != "coordinate") throw ParseError("only coordinate format is supported");
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer" && field != "double") {
    throw ParseError("unsupported field '" + field + "'");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw ParseError("unsupported symmetry '" + symmetry + "'");
  }

  do {
    if (!std::getline(in, line)) throw ParseError("missing size line");
  } while (line.empty() || line.front() == '%');

  index_t rows = 0, cols = 0, entries = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries)) throw ParseError("malformed size line");
  }
  if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square");

  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * entries : entries);
  index_t seen = 0;
  while (seen < entries && std::getline(in, line)) {
    if (line.empty() || line.front() == '%') continue;
    std::istringstream entry(line);
    index_t r = 0, c = 0;
    double v = 1.0;
    if (!(entry >> r >> c)) throw ParseError("malformed entry line: '" + line + "'");
    if (!pattern && !(entry >> v)) throw ParseError("missing value: '" + line + "'");
    if (r < 1 || r > rows || c < 1 || c > cols) {
      throw ParseError("entry (" + std::to_string(r) + ", " + std::to_string(c) +
                       ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    triplets.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) triplets.push_back({c - 1, r - 1, v});
    ++seen;
  }
  if (seen != entries) {
    throw ParseError("expected " + std::to_string(entries) + " entries, found " +
                     std::to_string(seen));
  }

  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  auto dup = std::adjacent_find(triplets.begin(), triplets.end(),
                                [](const Triplet& a, const Triplet& b) {
                                  return a.row == b.row && a.col == b.col;
                                });
  if (dup != triplets.end()) {
    throw ParseError("duplicate entry (" + std::to_string(dup->row + 1) + ", " +
                     std::to_string(dup->col + 1) + ")");
  }

  std::vector<index_t> row_ptr(rows + 1, 0);
  std::vector<index_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  if (!pattern) values.reserve(triplets.size());
  for (const auto& t : triplets) {
    ++row_ptr[t.row + 1];
    col_idx.push_back(t.col);
    if (!pattern) values.push_back(t.value);
  }
  for (index_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values),
                   pattern);
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_matrix_market(in);
}

void write_matrix_market(const CsrMatrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate " << (m.pattern_only() ? "pattern" : "real")
      << " general\n";
  out << m.num_rows() << ' ' << m.num_cols() << ' ' << m.nnz() << '\n';
  std::array<char, 64> buf{};
  for (index_t i = 0; i < m.num_rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << (i + 1) << ' ' << (cols[k] + 1);
      if (!m.pattern_only()) {
        auto res = std::to_chars(buf.data(), buf.data() + buf.size(), vals[k]);
        out << ' ' << std::string_view(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
      }
      out << '\n';
    }
  }
}

void write_matrix_market(const CsrMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_matrix_market(m, out);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace mlspgemm
