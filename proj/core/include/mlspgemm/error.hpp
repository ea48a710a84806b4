#pragma once

#include <stdexcept>
#include <string>

namespace mlspgemm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument that violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operand shapes are incompatible (e.g. a.num_cols != b.num_rows).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix does not satisfy the CSR invariants.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A simulated allocation or copy would exceed a memory space's capacity.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

/// A single row is larger than the capacity it must fit into.
class UnsplittableRow : public Error {
 public:
  using Error::Error;
};

/// Internal consistency failure, e.g. numeric phase produced more entries
/// than the symbolic phase counted.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// A verified run disagreed with the reference kernel.
class VerifyMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace mlspgemm
