#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "mlspgemm/csr_matrix.hpp"

namespace mlspgemm {

enum class StencilKind { laplace3d, bigstar2d, brick3d, elasticity3d };

[[nodiscard]] std::string_view to_string(StencilKind kind) noexcept;
/// Throws InvalidArgument on an unknown name.
[[nodiscard]] StencilKind parse_stencil_kind(std::string_view name);

/// Spatial dimension of the grid a stencil lives on (2 or 3).
[[nodiscard]] int spatial_dims(StencilKind kind) noexcept;
/// Unknowns per grid point: 3 for elasticity3d, 1 otherwise.
[[nodiscard]] int dofs_per_point(StencilKind kind) noexcept;
/// Nonzeros in a row whose grid point is away from the boundary.
[[nodiscard]] index_t interior_row_nnz(StencilKind kind) noexcept;

struct StencilSpec {
  StencilKind kind = StencilKind::laplace3d;
  /// Points per axis, x fastest. Length must equal spatial_dims(kind).
  std::vector<index_t> grid_dims;

  [[nodiscard]] index_t num_points() const noexcept;
};

/// Symmetric operator on the grid. Grid point (x, y, z) has linear index
/// x + nx * (y + ny * z); elasticity unknowns are point * 3 + component.
///
/// Weights: laplace3d 6/-1, brick3d 26/-1, bigstar2d the 13-point biharmonic
/// star (20, -8 axial, 2 diagonal, 1 at distance two), elasticity3d dense 3x3
/// blocks on the 27-point neighbourhood.
[[nodiscard]] CsrMatrix generate_stencil(const StencilSpec& spec);

struct Interpolation {
  CsrMatrix prolongation;  ///< fine x coarse
  CsrMatrix restriction;   ///< coarse x fine, exactly transpose(prolongation)
};

/// Geometric coarsening by two: coarse point c sits on fine point 2c along
/// each axis; fine points interpolate (bi/tri)linearly from the enclosing
/// coarse points. Every grid dimension must be odd and at least 3.
[[nodiscard]] Interpolation generate_interpolation(const StencilSpec& spec);

/// Exactly `delta` nonzeros per row, columns drawn uniformly without
/// replacement and values uniform in (0, 1], from std::mt19937_64 seeded with
/// `seed`. Bounded integers use rejection sampling on raw engine output so
/// results do not depend on the standard library's distributions.
[[nodiscard]] CsrMatrix generate_random_rhs(index_t num_rows, index_t num_cols, index_t delta,
                                            std::uint64_t seed);

/// Mean nonzeros per row.
[[nodiscard]] double mean_row_nnz(const CsrMatrix& m) noexcept;

}  // namespace mlspgemm
