#include "mlspgemm/generators.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <unordered_set>

#include "mlspgemm/error.hpp"

namespace mlspgemm {

std::string_view to_string(StencilKind kind) noexcept {
  switch (kind) {
    case StencilKind::laplace3d: return "laplace3d";
    case StencilKind::bigstar2d: return "bigstar2d";
    case StencilKind::brick3d: return "brick3d";
    case StencilKind::elasticity3d: return "elasticity3d";
  }
  return "unknown";
}

StencilKind parse_stencil_kind(std::string_view name) {
  for (auto k : {StencilKind::laplace3d, StencilKind::bigstar2d, StencilKind::brick3d,
                 StencilKind::elasticity3d}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown stencil kind '" + std::string(name) + "'");
}

int spatial_dims(StencilKind kind) noexcept { return kind == StencilKind::bigstar2d ? 2 : 3; }

int dofs_per_point(StencilKind kind) noexcept {
  return kind == StencilKind::elasticity3d ? 3 : 1;
}

index_t interior_row_nnz(StencilKind kind) noexcept {
  switch (kind) {
    case StencilKind::laplace3d: return 7;
    case StencilKind::bigstar2d: return 13;
    case StencilKind::brick3d: return 27;
    case StencilKind::elasticity3d: return 81;
  }
  return 0;
}

index_t StencilSpec::num_points() const noexcept {
  index_t n = 1;
  for (index_t d : grid_dims) n *= d;
  return n;
}

namespace {

struct Offset {
  std::array<int, 3> d;
  double weight;
};

std::vector<Offset> stencil_offsets(StencilKind kind) {
  std::vector<Offset> out;
  switch (kind) {
    case StencilKind::laplace3d:
      out.push_back({{0, 0, 0}, 6.0});
      for (int axis = 0; axis < 3; ++axis) {
        for (int s : {-1, 1}) {
          std::array<int, 3> d{0, 0, 0};
          d[axis] = s;
          out.push_back({d, -1.0});
        }
      }
      break;
    case StencilKind::bigstar2d:
      out.push_back({{0, 0, 0}, 20.0});
      for (int axis = 0; axis < 2; ++axis) {
        for (int s : {-1, 1}) {
          std::array<int, 3> d{0, 0, 0};
          d[axis] = s;
          out.push_back({d, -8.0});
          d[axis] = 2 * s;
          out.push_back({d, 1.0});
        }
      }
      for (int sx : {-1, 1}) {
        for (int sy : {-1, 1}) out.push_back({{sx, sy, 0}, 2.0});
      }
      break;
    case StencilKind::brick3d:
    case StencilKind::elasticity3d:
      for (int z = -1; z <= 1; ++z) {
        for (int y = -1; y <= 1; ++y) {
          for (int x = -1; x <= 1; ++x) {
            const bool center = x == 0 && y == 0 && z == 0;
            out.push_back({{x, y, z}, center ? 26.0 : -1.0});
          }
        }
      }
      break;
  }
  // Sort by linear offset so rows come out column-sorted.
  std::sort(out.begin(), out.end(), [](const Offset& a, const Offset& b) {
    return std::tie(a.d[2], a.d[1], a.d[0]) < std::tie(b.d[2], b.d[1], b.d[0]);
  });
  return out;
}

void check_dims(const StencilSpec& spec, index_t min_dim) {
  const auto want = static_cast<std::size_t>(spatial_dims(spec.kind));
  if (spec.grid_dims.size() != want) {
    throw InvalidArgument(std::string(to_string(spec.kind)) + " expects " +
                          std::to_string(want) + " grid dimensions, got " +
                          std::to_string(spec.grid_dims.size()));
  }
  for (index_t d : spec.grid_dims) {
    if (d < min_dim) {
      throw InvalidArgument("grid dimension " + std::to_string(d) + " below minimum " +
                            std::to_string(min_dim));
    }
  }
}

std::array<index_t, 3> padded_dims(const StencilSpec& spec) {
  std::array<index_t, 3> n{1, 1, 1};
  for (std::size_t i = 0; i < spec.grid_dims.size(); ++i) n[i] = spec.grid_dims[i];
  return n;
}

// Coupling between displacement components inside an elasticity block.
constexpr double kElasticOffDiagonal = 0.25;

}  // namespace

CsrMatrix generate_stencil(const StencilSpec& spec) {
  check_dims(spec, 5);
  const auto n = padded_dims(spec);
  const auto offsets = stencil_offsets(spec.kind);
  const index_t dofs = static_cast<index_t>(dofs_per_point(spec.kind));
  const index_t points = spec.num_points();
  const index_t rows = points * dofs;

  std::vector<index_t> row_ptr;
  row_ptr.reserve(rows + 1);
  row_ptr.push_back(0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  cols.reserve(rows * offsets.size() * dofs);
  vals.reserve(rows * offsets.size() * dofs);

  for (index_t z = 0; z < n[2]; ++z) {
    for (index_t y = 0; y < n[1]; ++y) {
      for (index_t x = 0; x < n[0]; ++x) {
        for (index_t comp = 0; comp < dofs; ++comp) {
          for (const auto& off : offsets) {
            const auto px = static_cast<std::int64_t>(x) + off.d[0];
            const auto py = static_cast<std::int64_t>(y) + off.d[1];
            const auto pz = static_cast<std::int64_t>(z) + off.d[2];
            if (px < 0 || py < 0 || pz < 0 || px >= static_cast<std::int64_t>(n[0]) ||
                py >= static_cast<std::int64_t>(n[1]) || pz >= static_cast<std::int64_t>(n[2])) {
              continue;
            }
            const index_t point = static_cast<index_t>(px) +
                                  n[0] * (static_cast<index_t>(py) + n[1] * static_cast<index_t>(pz));
            for (index_t other = 0; other < dofs; ++other) {
              cols.push_back(point * dofs + other);
              const double coupling = (dofs == 1 || other == comp) ? 1.0 : kElasticOffDiagonal;
              vals.push_back(off.weight * coupling);
            }
          }
          row_ptr.push_back(cols.size());
        }
      }
    }
  }
  return CsrMatrix(rows, rows, std::move(row_ptr), std::move(cols), std::move(vals));
}

Interpolation generate_interpolation(const StencilSpec& spec) {
  check_dims(spec, 3);
  for (index_t d : spec.grid_dims) {
    if (d % 2 == 0) {
      throw InvalidArgument("interpolation requires odd grid dimensions, got " +
                            std::to_string(d));
    }
  }
  const auto fine = padded_dims(spec);
  std::array<index_t, 3> coarse{1, 1, 1};
  for (std::size_t i = 0; i < spec.grid_dims.size(); ++i) coarse[i] = (fine[i] + 1) / 2;
  const index_t dofs = static_cast<index_t>(dofs_per_point(spec.kind));
  const index_t fine_rows = spec.num_points() * dofs;
  const index_t coarse_cols = coarse[0] * coarse[1] * coarse[2] * dofs;

  // Per-axis (coarse index, weight) contributions of a fine coordinate.
  auto axis_support = [](index_t f, index_t axis_len) {
    std::vector<std::pair<index_t, double>> s;
    if (axis_len == 1) {
      s.emplace_back(0, 1.0);
    } else if (f % 2 == 0) {
      s.emplace_back(f / 2, 1.0);
    } else {
      s.emplace_back((f - 1) / 2, 0.5);
      s.emplace_back((f + 1) / 2, 0.5);
    }
    return s;
  };

  std::vector<index_t> row_ptr;
  row_ptr.reserve(fine_rows + 1);
  row_ptr.push_back(0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  for (index_t z = 0; z < fine[2]; ++z) {
    const auto sz = axis_support(z, fine[2]);
    for (index_t y = 0; y < fine[1]; ++y) {
      const auto sy = axis_support(y, fine[1]);
      for (index_t x = 0; x < fine[0]; ++x) {
        const auto sx = axis_support(x, fine[0]);
        for (index_t comp = 0; comp < dofs; ++comp) {
          for (const auto& [cz, wz] : sz) {
            for (const auto& [cy, wy] : sy) {
              for (const auto& [cx, wx] : sx) {
                const index_t cpoint = cx + coarse[0] * (cy + coarse[1] * cz);
                cols.push_back(cpoint * dofs + comp);
                vals.push_back(wx * wy * wz);
              }
            }
          }
          row_ptr.push_back(cols.size());
        }
      }
    }
  }
  CsrMatrix p(fine_rows, coarse_cols, std::move(row_ptr), std::move(cols), std::move(vals));
  CsrMatrix r = transpose(p);
  return Interpolation{std::move(p), std::move(r)};
}

namespace {

// Uniform integer in [0, bound) by rejection on the raw 64-bit output.
index_t bounded(std::mt19937_64& rng, index_t bound) {
  const index_t limit = std::numeric_limits<index_t>::max() -
                        std::numeric_limits<index_t>::max() % bound;
  index_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in (0, 1] from the top 53 bits.
double unit_open_closed(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

CsrMatrix generate_random_rhs(index_t num_rows, index_t num_cols, index_t delta,
                              std::uint64_t seed) {
  if (delta > num_cols) {
    throw InvalidArgument("delta " + std::to_string(delta) + " exceeds column count " +
                          std::to_string(num_cols));
  }
  std::mt19937_64 rng(seed);
  std::vector<index_t> row_ptr(num_rows + 1);
  std::vector<index_t> cols;
  std::vector<double> vals;
  cols.reserve(num_rows * delta);
  vals.reserve(num_rows * delta);
  std::unordered_set<index_t> picked;
  for (index_t i = 0; i < num_rows; ++i) {
    // Floyd's sampling: delta distinct columns in O(delta).
    picked.clear();
    for (index_t j = num_cols - delta; j < num_cols; ++j) {
      const index_t t = bounded(rng, j + 1);
      const index_t c = picked.insert(t).second ? t : j;
      if (c == j) picked.insert(j);
      cols.push_back(c);
      vals.push_back(unit_open_closed(rng));
    }
    row_ptr[i + 1] = cols.size();
  }
  return CsrMatrix(num_rows, num_cols, std::move(row_ptr), std::move(cols), std::move(vals));
}

double mean_row_nnz(const CsrMatrix& m) noexcept {
  if (m.num_rows() == 0) return 0.0;
  return static_cast<double>(m.nnz()) / static_cast<double>(m.num_rows());
}

}  // namespace mlspgemm
