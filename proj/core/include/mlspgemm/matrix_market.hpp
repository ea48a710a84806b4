#pragma once

#include <filesystem>
#include <iosfwd>

#include "mlspgemm/csr_matrix.hpp"

namespace mlspgemm {

/// Reads a Matrix Market coordinate file (real, integer or pattern field;
/// general or symmetric). Symmetric input is expanded to full storage and
/// rows come out column-sorted. Duplicate entries, out-of-range indices and
/// malformed headers raise ParseError.
[[nodiscard]] CsrMatrix read_matrix_market(std::istream& in);
[[nodiscard]] CsrMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes `general` coordinate format: `real` with shortest round-trip
/// decimal values, or `pattern` for pattern-only matrices.
void write_matrix_market(const CsrMatrix& m, std::ostream& out);
void write_matrix_market(const CsrMatrix& m, const std::filesystem::path& path);

}  // namespace mlspgemm
