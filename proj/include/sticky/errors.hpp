#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace sticky {

using Index = Eigen::Index;

/// Bad input: malformed configuration, out-of-domain arguments, violated
/// preconditions the caller controls.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested point is not a node of the grid it is used with.
class OffGridError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Failure inside a numerical routine (bad grid for the coefficients,
/// breakdown of a solver, loss of sub-stochasticity).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An off-diagonal rate of the generator is nonpositive at `row()`.
class NegativeRateError : public NumericalError {
 public:
  NegativeRateError(Index row, const std::string& what)
      : NumericalError(what), row_(row) {}
  Index row() const noexcept { return row_; }

 private:
  Index row_;
};

/// Scheme 2 boundary factor has a nonpositive denominator on this grid.
class StickinessTooLargeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// diag(M) G is not symmetric, or the boundary row cannot be symmetrized.
class SymmetrizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EigenSolverError : public NumericalError {
 public:
  EigenSolverError(Index index, const std::string& what)
      : NumericalError(what), index_(index) {}
  Index index() const noexcept { return index_; }

 private:
  Index index_;
};

/// Zero pivot during tridiagonal elimination.
class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(Index row, const std::string& what)
      : NumericalError(what), row_(row) {}
  Index row() const noexcept { return row_; }

 private:
  Index row_;
};

}  // namespace sticky
