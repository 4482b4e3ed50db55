#pragma once

// Closed-form smooth functions R^n -> R: parsing, printing, exact symbolic
// partial derivatives and evaluation of k-jets.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msl/error.hpp"

namespace msl {

using Point = std::vector<double>;

/// Throws DomainError unless every coordinate is finite.
void require_finite(std::span<const double> x, std::string_view what = "point");

enum class Op : std::uint8_t {
  constant,
  variable,
  add,
  sub,
  mul,
  div,
  pow,
  neg,
  exp,
  sin,
  cos,
};

class Program;
struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// One AST node. Unary nodes use `lhs` only; `index` is the 1-based variable
/// index for Op::variable and the exponent for Op::pow.
struct Node {
  Op op = Op::constant;
  double constant = 0.0;
  int index = 0;
  NodePtr lhs;
  NodePtr rhs;
};

/// Immutable expression of arity n. Copies share structure.
class Expr {
 public:
  Expr();
  Expr(NodePtr root, int arity);

  static Expr constant(double c, int arity = 0);
  static Expr variable(int index, int arity);

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  int arity() const { return arity_; }

  /// Same function viewed on R^n for a larger n.
  Expr with_arity(int arity) const;

  bool is_constant() const { return root_->op == Op::constant; }

 private:
  NodePtr root_;
  int arity_ = 0;
};

/// Parses `text` against the expression grammar; variables must satisfy
/// 1 <= index <= arity.
Expr parse(std::string_view text, int arity);

/// Prints in the grammar accepted by `parse`; parse(to_string(e)) is
/// structurally identical to e.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Exact partial derivative with respect to x_variable (1-based). Only
/// constant folding and 0/1 identities are applied.
Expr differentiate(const Expr& e, int variable);

/// True if the tree uses no exp, sin, cos or division by a non-constant.
bool is_polynomial(const Expr& e);

/// Number of distinct nodes of the (shared) AST.
std::size_t node_count(const Expr& e);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(double c, const Expr& a);
Expr pow(const Expr& a, int exponent);
Expr exp(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);

/// Value at x. Throws DomainError on a zero denominator or a non-finite result.
template <class T>
T evaluate(const Expr& e, std::span<const T> x);

double evaluate(const Expr& e, const Point& x);

/// Value and partial-derivative tensors up to `order` at one point.
struct JetK {
  int order = 0;
  int dim = 0;
  double value = 0.0;
  /// tensors[j-1] holds the dim^j partials of order j, row-major in the
  /// index tuple (i_1, ..., i_j).
  std::vector<std::vector<double>> tensors;

  std::span<const double> gradient() const { return tensors.at(0); }
  std::span<const double> hessian() const { return tensors.at(1); }
  /// Entry for a 0-based index tuple; an empty tuple gives the value.
  double at(std::span<const int> indices) const;
  JetK truncated(int order) const;
};

/// Cached symbolic derivatives of one expression up to a fixed order,
/// compiled for repeated evaluation. Thread-safe after construction.
class JetEvaluator {
 public:
  static constexpr int kMaxOrder = 4;

  JetEvaluator(const Expr& e, int order);

  int order() const { return order_; }
  int dim() const { return dim_; }
  const Expr& expression() const { return expr_; }

  JetK operator()(std::span<const double> x) const;

  /// Symbolic derivative for a nondecreasing 0-based index tuple.
  const Expr& derivative(std::span<const int> sorted_indices) const;

 private:
  Expr expr_;
  int order_;
  int dim_;
  std::vector<std::vector<int>> unique_tuples_;  // per slot, ordered by order
  std::vector<Expr> derivatives_;                // per slot
  std::vector<std::vector<int>> fan_out_;        // per order: full index -> slot
  std::vector<int> order_offset_;
  std::shared_ptr<const Program> program_;
};

JetK eval_jet(const Expr& e, std::span<const double> x, int order);

}  // namespace msl
