#include "msl/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "expr_internal.hpp"
#include "msl/program.hpp"

namespace msl {

void require_finite(std::span<const double> x, std::string_view what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " has a non-finite coordinate");
  }
}

namespace detail {

NodePtr make_constant(double c) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->constant = c;
  return n;
}

NodePtr make_variable(int index) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->index = index;
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_unary(Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  return n;
}

NodePtr make_pow(NodePtr a, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::pow;
  n->index = exponent;
  n->lhs = std::move(a);
  return n;
}

bool is_const(const NodePtr& n, double c) { return n->op == Op::constant && n->constant == c; }

namespace {

bool is_constant(const NodePtr& n) { return n->op == Op::constant; }

double ipow(double base, int exponent) {
  double result = 1.0;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

}  // namespace

NodePtr add(NodePtr a, NodePtr b) {
  if (is_constant(a) && is_constant(b)) return make_constant(a->constant + b->constant);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_binary(Op::add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_constant(a) && is_constant(b)) return make_constant(a->constant - b->constant);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return make_binary(Op::sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_constant(a) && is_constant(b)) return make_constant(a->constant * b->constant);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(std::move(b));
  if (is_const(b, -1.0)) return neg(std::move(a));
  return make_binary(Op::mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_constant(a) && is_constant(b) && b->constant != 0.0) {
    return make_constant(a->constant / b->constant);
  }
  if (is_const(a, 0.0)) return make_constant(0.0);
  if (is_const(b, 1.0)) return a;
  return make_binary(Op::div, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (is_constant(a)) return make_constant(-a->constant);
  if (a->op == Op::neg) return a->lhs;
  return make_unary(Op::neg, std::move(a));
}

NodePtr pow(NodePtr a, int exponent) {
  if (exponent == 0) return make_constant(1.0);
  if (exponent == 1) return a;
  if (is_constant(a)) return make_constant(ipow(a->constant, exponent));
  return make_pow(std::move(a), exponent);
}

NodePtr apply(Op fn, NodePtr a) {
  if (is_constant(a)) {
    switch (fn) {
      case Op::exp: return make_constant(std::exp(a->constant));
      case Op::sin: return make_constant(std::sin(a->constant));
      case Op::cos: return make_constant(std::cos(a->constant));
      default: break;
    }
  }
  return make_unary(fn, std::move(a));
}

int max_variable(const Node& root) {
  int best = 0;
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{&root};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->op == Op::variable) best = std::max(best, n->index);
    if (n->lhs) stack.push_back(n->lhs.get());
    if (n->rhs) stack.push_back(n->rhs.get());
  }
  return best;
}

}  // namespace detail

Expr::Expr() : root_(detail::make_constant(0.0)), arity_(0) {}

Expr::Expr(NodePtr root, int arity) : root_(std::move(root)), arity_(arity) {
  if (!root_) throw Error("Expr: null root");
  if (arity_ < 0) throw Error("Expr: negative arity");
  if (detail::max_variable(*root_) > arity_) throw Error("Expr: variable index exceeds arity");
}

Expr Expr::constant(double c, int arity) {
  if (!std::isfinite(c)) throw DomainError("non-finite constant");
  return Expr(detail::make_constant(c), arity);
}

Expr Expr::variable(int index, int arity) {
  if (index < 1 || index > arity) throw Error("variable index out of range");
  return Expr(detail::make_variable(index), arity);
}

Expr Expr::with_arity(int arity) const {
  if (arity < arity_) throw Error("with_arity cannot shrink the arity");
  return Expr(root_, arity);
}

// --- printing ---------------------------------------------------------------

namespace {

// Binding levels: 1 sum, 2 product, 3 factor (negation, power), 4 primary.
int level(const Node& n) {
  switch (n.op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg:
    case Op::pow: return 3;
    case Op::constant: return std::signbit(n.constant) ? 3 : 4;
    default: return 4;
  }
}

void format_number(double c, std::string& out) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, c);
  out.append(buf, res.ptr);
}

void print(const Node& n, int min_level, std::string& out) {
  const bool parens = level(n) < min_level;
  if (parens) out.push_back('(');
  switch (n.op) {
    case Op::constant: format_number(n.constant, out); break;
    case Op::variable:
      out.push_back('x');
      out += std::to_string(n.index);
      break;
    case Op::add:
    case Op::sub:
      print(*n.lhs, 1, out);
      out.push_back(n.op == Op::add ? '+' : '-');
      print(*n.rhs, 2, out);
      break;
    case Op::mul:
    case Op::div:
      print(*n.lhs, 2, out);
      out.push_back(n.op == Op::mul ? '*' : '/');
      print(*n.rhs, 3, out);
      break;
    case Op::neg:
      out.push_back('-');
      print(*n.lhs, 3, out);
      break;
    case Op::pow:
      print(*n.lhs, 4, out);
      out.push_back('^');
      out += std::to_string(n.index);
      break;
    case Op::exp:
    case Op::sin:
    case Op::cos:
      out += n.op == Op::exp ? "exp(" : n.op == Op::sin ? "sin(" : "cos(";
      print(*n.lhs, 0, out);
      out.push_back(')');
      break;
  }
  if (parens) out.push_back(')');
}

bool equal_nodes(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::constant: return a->constant == b->constant;
    case Op::variable: return a->index == b->index;
    case Op::pow: return a->index == b->index && equal_nodes(a->lhs.get(), b->lhs.get());
    case Op::neg:
    case Op::exp:
    case Op::sin:
    case Op::cos: return equal_nodes(a->lhs.get(), b->lhs.get());
    default:
      return equal_nodes(a->lhs.get(), b->lhs.get()) && equal_nodes(a->rhs.get(), b->rhs.get());
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e.root(), 0, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  return equal_nodes(a.root_ptr().get(), b.root_ptr().get());
}

// --- differentiation --------------------------------------------------------

Expr differentiate(const Expr& e, int variable) {
  if (variable < 1 || variable > e.arity()) throw Error("differentiate: variable index out of range");
  using namespace detail;
  std::unordered_map<const Node*, NodePtr> memo;
  const NodePtr zero = make_constant(0.0);
  const NodePtr one = make_constant(1.0);

  std::function<NodePtr(const NodePtr&)> d = [&](const NodePtr& p) -> NodePtr {
    if (auto it = memo.find(p.get()); it != memo.end()) return it->second;
    const Node& n = *p;
    NodePtr r;
    switch (n.op) {
      case Op::constant: r = zero; break;
      case Op::variable: r = n.index == variable ? one : zero; break;
      case Op::add: r = add(d(n.lhs), d(n.rhs)); break;
      case Op::sub: r = sub(d(n.lhs), d(n.rhs)); break;
      case Op::mul: r = add(mul(d(n.lhs), n.rhs), mul(n.lhs, d(n.rhs))); break;
      case Op::div: {
        NodePtr numer = sub(mul(d(n.lhs), n.rhs), mul(n.lhs, d(n.rhs)));
        r = div(numer, pow(n.rhs, 2));
        break;
      }
      case Op::pow:
        r = n.index == 0 ? zero
                         : mul(mul(make_constant(static_cast<double>(n.index)), pow(n.lhs, n.index - 1)),
                               d(n.lhs));
        break;
      case Op::neg: r = neg(d(n.lhs)); break;
      case Op::exp: r = mul(p, d(n.lhs)); break;
      case Op::sin: r = mul(apply(Op::cos, n.lhs), d(n.lhs)); break;
      case Op::cos: r = neg(mul(apply(Op::sin, n.lhs), d(n.lhs))); break;
    }
    memo.emplace(p.get(), r);
    return r;
  };
  return Expr(d(e.root_ptr()), e.arity());
}

bool is_polynomial(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{&e.root()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->op == Op::exp || n->op == Op::sin || n->op == Op::cos) return false;
    if (n->op == Op::div && n->rhs->op != Op::constant) return false;
    if (n->lhs) stack.push_back(n->lhs.get());
    if (n->rhs) stack.push_back(n->rhs.get());
  }
  return true;
}

std::size_t node_count(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{&e.root()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->lhs) stack.push_back(n->lhs.get());
    if (n->rhs) stack.push_back(n->rhs.get());
  }
  return seen.size();
}

// --- arithmetic -------------------------------------------------------------

Expr operator+(const Expr& a, const Expr& b) {
  return Expr(detail::add(a.root_ptr(), b.root_ptr()), std::max(a.arity(), b.arity()));
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr(detail::sub(a.root_ptr(), b.root_ptr()), std::max(a.arity(), b.arity()));
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr(detail::mul(a.root_ptr(), b.root_ptr()), std::max(a.arity(), b.arity()));
}
Expr operator/(const Expr& a, const Expr& b) {
  return Expr(detail::div(a.root_ptr(), b.root_ptr()), std::max(a.arity(), b.arity()));
}
Expr operator-(const Expr& a) { return Expr(detail::neg(a.root_ptr()), a.arity()); }
Expr operator*(double c, const Expr& a) { return Expr::constant(c, a.arity()) * a; }
Expr pow(const Expr& a, int exponent) {
  if (exponent < 0) throw Error("pow: negative exponent");
  return Expr(detail::pow(a.root_ptr(), exponent), a.arity());
}
Expr exp(const Expr& a) { return Expr(detail::apply(Op::exp, a.root_ptr()), a.arity()); }
Expr sin(const Expr& a) { return Expr(detail::apply(Op::sin, a.root_ptr()), a.arity()); }
Expr cos(const Expr& a) { return Expr(detail::apply(Op::cos, a.root_ptr()), a.arity()); }

// --- evaluation -------------------------------------------------------------

template <class T>
T evaluate(const Expr& e, std::span<const T> x) {
  if (static_cast<int>(x.size()) != e.arity()) throw Error("evaluate: point dimension does not match arity");
  const Program program(std::span<const Expr>(&e, 1));
  T out{};
  program.run<T>(x, std::span<T>(&out, 1));
  return out;
}

template double evaluate<double>(const Expr&, std::span<const double>);
template long double evaluate<long double>(const Expr&, std::span<const long double>);

double evaluate(const Expr& e, const Point& x) { return evaluate<double>(e, std::span<const double>(x)); }

// --- jets -------------------------------------------------------------------

double JetK::at(std::span<const int> indices) const {
  if (indices.empty()) return value;
  const auto order_j = indices.size();
  if (static_cast<int>(order_j) > order) throw Error("JetK::at: order exceeds jet order");
  std::size_t flat = 0;
  for (int i : indices) {
    if (i < 0 || i >= dim) throw Error("JetK::at: index out of range");
    flat = flat * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
  }
  return tensors[order_j - 1][flat];
}

JetK JetK::truncated(int k) const {
  if (k < 0 || k > order) throw Error("JetK::truncated: invalid order");
  JetK out;
  out.order = k;
  out.dim = dim;
  out.value = value;
  out.tensors.assign(tensors.begin(), tensors.begin() + k);
  return out;
}

namespace {

void nondecreasing_tuples(int dim, int length, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == length) {
    out.push_back(current);
    return;
  }
  const int start = current.empty() ? 0 : current.back();
  for (int i = start; i < dim; ++i) {
    current.push_back(i);
    nondecreasing_tuples(dim, length, current, out);
    current.pop_back();
  }
}

}  // namespace

JetEvaluator::JetEvaluator(const Expr& e, int order) : expr_(e), order_(order), dim_(e.arity()) {
  if (order < 0 || order > kMaxOrder) throw Error("JetEvaluator: order must be in 0..4");
  std::vector<std::vector<int>> tuples{{}};
  derivatives_.push_back(expr_);
  order_offset_.push_back(0);
  std::map<std::vector<int>, int> slot_of;
  slot_of[{}] = 0;
  for (int j = 1; j <= order_; ++j) {
    order_offset_.push_back(static_cast<int>(tuples.size()));
    std::vector<std::vector<int>> level;
    std::vector<int> current;
    nondecreasing_tuples(dim_, j, current, level);
    for (auto& t : level) {
      std::vector<int> parent(t.begin(), t.end() - 1);
      const Expr& base = derivatives_[static_cast<std::size_t>(slot_of.at(parent))];
      derivatives_.push_back(differentiate(base, t.back() + 1));
      slot_of[t] = static_cast<int>(tuples.size());
      tuples.push_back(std::move(t));
    }
  }
  unique_tuples_ = std::move(tuples);

  fan_out_.resize(static_cast<std::size_t>(order_));
  for (int j = 1; j <= order_; ++j) {
    std::size_t total = 1;
    for (int r = 0; r < j; ++r) total *= static_cast<std::size_t>(dim_);
    auto& table = fan_out_[static_cast<std::size_t>(j - 1)];
    table.resize(total);
    std::vector<int> idx(static_cast<std::size_t>(j));
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int r = j - 1; r >= 0; --r) {
        idx[static_cast<std::size_t>(r)] = static_cast<int>(rem % static_cast<std::size_t>(dim_));
        rem /= static_cast<std::size_t>(dim_);
      }
      std::vector<int> sorted = idx;
      std::sort(sorted.begin(), sorted.end());
      table[flat] = slot_of.at(sorted);
    }
  }
  program_ = std::make_shared<const Program>(std::span<const Expr>(derivatives_));
}

const Expr& JetEvaluator::derivative(std::span<const int> sorted_indices) const {
  for (std::size_t s = 0; s < unique_tuples_.size(); ++s) {
    const auto& t = unique_tuples_[s];
    if (std::equal(t.begin(), t.end(), sorted_indices.begin(), sorted_indices.end())) return derivatives_[s];
  }
  throw Error("JetEvaluator::derivative: index tuple not available");
}

JetK JetEvaluator::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw Error("JetEvaluator: point dimension does not match arity");
  std::vector<double> slots(derivatives_.size());
  program_->run<double>(x, slots);
  JetK jet;
  jet.order = order_;
  jet.dim = dim_;
  jet.value = slots[0];
  jet.tensors.resize(static_cast<std::size_t>(order_));
  for (int j = 1; j <= order_; ++j) {
    const auto& table = fan_out_[static_cast<std::size_t>(j - 1)];
    auto& tensor = jet.tensors[static_cast<std::size_t>(j - 1)];
    tensor.resize(table.size());
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      tensor[flat] = slots[static_cast<std::size_t>(table[flat])];
    }
  }
  return jet;
}

JetK eval_jet(const Expr& e, std::span<const double> x, int order) {
  require_finite(x);
  return JetEvaluator(e, order)(x);
}

}  // namespace msl
