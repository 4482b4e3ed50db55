#pragma once

// Flat instruction tape for evaluating several expressions at once. Shared
// subtrees (and structurally identical ones) are evaluated a single time.

#include <span>
#include <vector>

#include "msl/expr.hpp"

namespace msl {

class Program {
 public:
  Program() = default;
  explicit Program(std::span<const Expr> outputs);

  int arity() const { return arity_; }
  std::size_t num_outputs() const { return outputs_.size(); }
  std::size_t num_instructions() const { return code_.size(); }

  /// Writes every output at x into `out`. Throws DomainError on a zero
  /// denominator, and on a non-finite output when `check_finite` is set.
  template <class T>
  void run(std::span<const T> x, std::span<T> out, bool check_finite = true) const;

  template <class T>
  std::vector<T> operator()(std::span<const T> x) const {
    std::vector<T> out(outputs_.size());
    run<T>(x, out);
    return out;
  }

  /// Like run(), and also a rounding-magnitude bound per output: the
  /// accumulated absolute error is of order eps(T) * magnitude.
  template <class T>
  void run_with_magnitude(std::span<const T> x, std::span<T> out, std::span<T> magnitude) const;

 private:
  struct Instr {
    Op op;
    int a = -1;
    int b = -1;
    double constant = 0.0;
    int index = 0;
  };

  std::vector<Instr> code_;
  std::vector<int> outputs_;
  int arity_ = 0;
};

}  // namespace msl
