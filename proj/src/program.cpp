#include "msl/program.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

namespace msl {
namespace {

struct Key {
  Op op;
  int a;
  int b;
  std::uint64_t constant_bits;
  int index;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(k.op);
    auto mix = [&h](std::uint64_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.a)));
    mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.b)));
    mix(k.constant_bits);
    mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.index)));
    return h;
  }
};

template <class T>
T ipow(T base, int exponent) {
  T result = 1;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

}  // namespace

Program::Program(std::span<const Expr> outputs) {
  std::unordered_map<const Node*, int> by_pointer;
  std::unordered_map<Key, int, KeyHash> by_shape;

  // Iterative post-order so deep derivative trees cannot blow the stack.
  auto emit = [&](const NodePtr& root) -> int {
    std::vector<std::pair<const Node*, bool>> stack{{root.get(), false}};
    while (!stack.empty()) {
      auto [node, expanded] = stack.back();
      stack.pop_back();
      if (by_pointer.count(node)) continue;
      if (!expanded) {
        stack.push_back({node, true});
        if (node->rhs && !by_pointer.count(node->rhs.get())) stack.push_back({node->rhs.get(), false});
        if (node->lhs && !by_pointer.count(node->lhs.get())) stack.push_back({node->lhs.get(), false});
        continue;
      }
      Key key{node->op, node->lhs ? by_pointer.at(node->lhs.get()) : -1,
              node->rhs ? by_pointer.at(node->rhs.get()) : -1, 0, node->index};
      if (node->op == Op::constant) std::memcpy(&key.constant_bits, &node->constant, sizeof(double));
      if (node->op != Op::variable && node->op != Op::pow) key.index = 0;
      auto found = by_shape.find(key);
      int id;
      if (found != by_shape.end()) {
        id = found->second;
      } else {
        id = static_cast<int>(code_.size());
        code_.push_back(Instr{node->op, key.a, key.b, node->constant, node->index});
        by_shape.emplace(key, id);
      }
      by_pointer.emplace(node, id);
    }
    return by_pointer.at(root.get());
  };

  for (const Expr& e : outputs) {
    arity_ = std::max(arity_, e.arity());
    outputs_.push_back(emit(e.root_ptr()));
  }
}

template <class T>
void Program::run(std::span<const T> x, std::span<T> out, bool check_finite) const {
  if (static_cast<int>(x.size()) < arity_) throw Error("Program::run: point dimension below arity");
  if (out.size() < outputs_.size()) throw Error("Program::run: output span too small");
  thread_local std::vector<T> reg;
  reg.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    T v{};
    switch (in.op) {
      case Op::constant: v = static_cast<T>(in.constant); break;
      case Op::variable: v = x[static_cast<std::size_t>(in.index - 1)]; break;
      case Op::add: v = reg[in.a] + reg[in.b]; break;
      case Op::sub: v = reg[in.a] - reg[in.b]; break;
      case Op::mul: v = reg[in.a] * reg[in.b]; break;
      case Op::div:
        if (reg[in.b] == T(0)) throw DomainError("zero denominator");
        v = reg[in.a] / reg[in.b];
        break;
      case Op::pow: v = ipow(reg[in.a], in.index); break;
      case Op::neg: v = -reg[in.a]; break;
      case Op::exp: v = std::exp(reg[in.a]); break;
      case Op::sin: v = std::sin(reg[in.a]); break;
      case Op::cos: v = std::cos(reg[in.a]); break;
    }
    reg[i] = v;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) {
    const T v = reg[static_cast<std::size_t>(outputs_[k])];
    if (check_finite && !std::isfinite(v)) throw DomainError("non-finite value (overflow)");
    out[k] = v;
  }
}

template <class T>
void Program::run_with_magnitude(std::span<const T> x, std::span<T> out, std::span<T> magnitude) const {
  if (static_cast<int>(x.size()) < arity_) throw Error("Program::run: point dimension below arity");
  thread_local std::vector<T> reg;
  thread_local std::vector<T> mag;
  reg.resize(code_.size());
  mag.resize(code_.size());
  using std::abs;
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    T v{};
    T m{};
    switch (in.op) {
      case Op::constant:
        v = static_cast<T>(in.constant);
        m = abs(v);
        break;
      case Op::variable:
        v = x[static_cast<std::size_t>(in.index - 1)];
        m = abs(v);
        break;
      case Op::add:
        v = reg[in.a] + reg[in.b];
        m = mag[in.a] + mag[in.b];
        break;
      case Op::sub:
        v = reg[in.a] - reg[in.b];
        m = mag[in.a] + mag[in.b];
        break;
      case Op::mul:
        v = reg[in.a] * reg[in.b];
        m = abs(reg[in.b]) * mag[in.a] + abs(reg[in.a]) * mag[in.b] + abs(v);
        break;
      case Op::div: {
        const T den = reg[in.b];
        if (den == T(0)) throw DomainError("zero denominator");
        v = reg[in.a] / den;
        m = mag[in.a] / abs(den) + abs(reg[in.a]) * mag[in.b] / (den * den) + abs(v);
        break;
      }
      case Op::pow:
        v = ipow(reg[in.a], in.index);
        m = in.index == 0 ? T(0) : T(in.index) * ipow(abs(reg[in.a]), in.index - 1) * mag[in.a];
        break;
      case Op::neg:
        v = -reg[in.a];
        m = mag[in.a];
        break;
      case Op::exp:
        v = std::exp(reg[in.a]);
        m = v * (T(1) + mag[in.a]);
        break;
      case Op::sin:
        v = std::sin(reg[in.a]);
        m = abs(v) + mag[in.a];
        break;
      case Op::cos:
        v = std::cos(reg[in.a]);
        m = abs(v) + mag[in.a];
        break;
    }
    reg[i] = v;
    mag[i] = m;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) {
    const auto slot = static_cast<std::size_t>(outputs_[k]);
    if (!std::isfinite(reg[slot])) throw DomainError("non-finite value (overflow)");
    out[k] = reg[slot];
    magnitude[k] = mag[slot];
  }
}

template void Program::run<double>(std::span<const double>, std::span<double>, bool) const;
template void Program::run<long double>(std::span<const long double>, std::span<long double>, bool) const;
template void Program::run_with_magnitude<double>(std::span<const double>, std::span<double>,
                                                  std::span<double>) const;
template void Program::run_with_magnitude<long double>(std::span<const long double>, std::span<long double>,
                                                       std::span<long double>) const;

}  // namespace msl
