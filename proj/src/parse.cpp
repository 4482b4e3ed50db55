// Recursive-descent parser.
//
//   expr    := term (("+" | "-") term)*
//   term    := factor (("*" | "/") factor)*
//   factor  := "-" factor | primary ("^" int)?
//   primary := number | var | fn "(" expr ")" | "(" expr ")"
//   fn      := "exp" | "sin" | "cos"
//   var     := "x" digit+ | "x" | "y" | "z"
//
// Unary minus binds looser than "^", so "-x1^2" is -(x1^2). A minus applied
// directly to a numeric literal folds into a negative constant.

#include <cctype>
#include <charconv>
#include <cmath>

#include "expr_internal.hpp"
#include "msl/expr.hpp"

namespace msl {
namespace {

class Parser {
 public:
  Parser(std::string_view text, int arity) : text_(text), arity_(arity) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = detail::make_binary(Op::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = detail::make_binary(Op::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = detail::make_binary(Op::mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = detail::make_binary(Op::div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    if (accept('-')) {
      NodePtr operand = parse_factor();
      if (operand->op == Op::constant) return detail::make_constant(-operand->constant);
      return detail::make_unary(Op::neg, operand);
    }
    NodePtr base = parse_primary();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected a non-negative integer exponent");
      int exponent = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
      if (ec != std::errc{} || ptr != text_.data() + pos_) {
        pos_ = start;
        fail("exponent out of range");
      }
      return detail::make_pow(base, exponent);
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected an operand");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("expected an operand");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail("malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = mark;  // "2exp(...)" style: not an exponent
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail("malformed number");
    }
    return detail::make_constant(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word == "exp" || word == "sin" || word == "cos") {
      expect('(');
      NodePtr arg = parse_expr();
      expect(')');
      const Op op = word == "exp" ? Op::exp : word == "sin" ? Op::sin : Op::cos;
      return detail::make_unary(op, arg);
    }
    int index = 0;
    if (word == "x") {
      const std::size_t digit_start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digit_start) {
        index = 1;
      } else {
        auto [ptr, ec] = std::from_chars(text_.data() + digit_start, text_.data() + pos_, index);
        if (ec != std::errc{}) {
          pos_ = start;
          fail("variable index out of range");
        }
      }
    } else if (word == "y") {
      index = 2;
    } else if (word == "z") {
      index = 3;
    } else {
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    if (index < 1 || index > arity_) {
      const std::size_t at = start;
      throw ParseError("variable x" + std::to_string(index) + " exceeds arity " + std::to_string(arity_), at);
    }
    return detail::make_variable(index);
  }

  std::string_view text_;
  int arity_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int arity) {
  if (arity < 0) throw Error("parse: negative arity");
  Parser parser(text, arity);
  return Expr(parser.parse_all(), arity);
}

}  // namespace msl
