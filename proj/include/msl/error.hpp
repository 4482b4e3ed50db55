#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace msl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside the domain of an expression (zero denominator, overflow).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A certification precondition (perturbation gate) does not hold.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// The contraction iteration left its (r/2)^k envelope.
class NonContractionError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration did not converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A critical point with a (numerically) singular Hessian.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A diffeomorphism could not be built from the supplied data.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// The sphere-tangent trivialization field is undefined at `witness()`.
class TangentDegeneracyError : public Error {
 public:
  TangentDegeneracyError(const std::string& what, std::vector<double> witness)
      : Error(what), witness_(std::move(witness)) {}
  const std::vector<double>& witness() const noexcept { return witness_; }

 private:
  std::vector<double> witness_;
};

}  // namespace msl
