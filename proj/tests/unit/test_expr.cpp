#include <doctest.h>

#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "msl/expr.hpp"
#include "msl/program.hpp"
#include "oracles.hpp"

using namespace msl;

TEST_CASE("parse: decaying sine exp(-x1^2)*sin(x1)") {
  const Expr f = parse("exp(-x1^2)*sin(x1)", 1);
  CHECK(f.arity() == 1);
  CHECK(f.root().op == Op::mul);
  CHECK(f.root().lhs->op == Op::exp);
  // unary minus binds looser than ^, so the exponent is -(x1^2)
  CHECK(f.root().lhs->lhs->op == Op::neg);
  CHECK(f.root().lhs->lhs->lhs->op == Op::pow);
  const double x = 0.7;
  CHECK(evaluate(f, Point{x}) == doctest::Approx(std::exp(-x * x) * std::sin(x)).epsilon(1e-15));
}

TEST_CASE("parse: saddle in two variables") {
  const Expr g = parse("x1^2 - x2^2", 2);
  CHECK(evaluate(g, Point{3.0, 1.0}) == 8.0);
  CHECK(to_string(g) == "x1^2-x2^2");
}

TEST_CASE("parse errors carry the byte offset") {
  try {
    parse("x1 +", 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse("x1^^2", 1), ParseError);
  CHECK_THROWS_AS(parse("x3", 2), ParseError);
  CHECK_THROWS_AS(parse("x0", 2), ParseError);
  CHECK_THROWS_AS(parse("tan(x1)", 1), ParseError);
  CHECK_THROWS_AS(parse("exp x1", 1), ParseError);
  CHECK_THROWS_AS(parse("(x1", 1), ParseError);
  CHECK_THROWS_AS(parse("x1^-1", 1), ParseError);
  CHECK_THROWS_AS(parse("", 1), ParseError);
}

TEST_CASE("parse: aliases and numbers") {
  CHECK(structurally_equal(parse("x+y*z", 3), parse("x1+x2*x3", 3)));
  CHECK(evaluate(parse("1.5e2 + .5", 0), Point{}) == 150.5);
  CHECK(evaluate(parse("2^10", 0), Point{}) == 1024.0);
  CHECK(evaluate(parse("-2^2", 0), Point{}) == -4.0);
  CHECK(evaluate(parse("2*-3", 0), Point{}) == -6.0);
}

TEST_CASE("print/parse round trip is structural identity") {
  const char* samples[] = {
      "exp(-x1^2)*sin(x1)", "x1^2-x2^2", "-(x1+x2)^3", "x1-(x2-x3)", "x1/(x2*x3)", "(x1/x2)/x3",
      "-x1*-x2",            "2*-3",      "(-2)^2",     "-(-x1)",    "cos(-1.25e-7*x1)", "x1^0",
  };
  for (const char* s : samples) {
    const Expr e = parse(s, 3);
    const Expr back = parse(to_string(e), 3);
    INFO(s, " -> ", to_string(e));
    CHECK(structurally_equal(e, back));
  }
  gen::Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    const auto rf = gen::random_expression(rng, 3, 4);
    const Expr e = parse(rf.text, 3);
    INFO(rf.text);
    CHECK(structurally_equal(e, parse(to_string(e), 3)));
  }
}

TEST_CASE("differentiate examples") {
  CHECK(to_string(differentiate(parse("x1^2 - x2^2", 2), 1)) == "2*x1");
  CHECK(to_string(differentiate(parse("x1", 2), 2)) == "0");

  const Expr f = parse("exp(-x1^2)*sin(x1)", 1);
  const Expr df = differentiate(f, 1);
  const Expr expected = parse("exp(-x1^2)*(-2*x1*sin(x1)+cos(x1))", 1);
  for (double x : {-3.0, -0.4, 0.0, 0.9, 2.5}) {
    CHECK(evaluate(df, Point{x}) == doctest::Approx(evaluate(expected, Point{x})).epsilon(1e-14));
  }
  // derivative of the function is e^{-x^2}(cos x - 2x sin x) by hand
  const double x = 1.3;
  CHECK(evaluate(df, Point{x}) ==
        doctest::Approx(std::exp(-x * x) * (std::cos(x) - 2 * x * std::sin(x))).epsilon(1e-14));
}

TEST_CASE("simplification: 0/1 identities and folding only") {
  CHECK(to_string(parse("0*x1+1*x2", 2)) == "0*x1+1*x2");  // parser never simplifies
  CHECK(to_string(differentiate(parse("3*x1+x2", 2), 1)) == "3");
  CHECK(to_string(differentiate(parse("x1*x2", 2), 1)) == "x2");
  CHECK(to_string(differentiate(parse("5", 1), 1)) == "0");
}

TEST_CASE("eval_jet examples") {
  const Expr g = parse("x1^2 - x2^2", 2);
  const JetK j = eval_jet(g, Point{1.0, 2.0}, 2);
  CHECK(j.value == -3.0);
  REQUIRE(j.tensors.size() == 2);
  CHECK(j.gradient()[0] == 2.0);
  CHECK(j.gradient()[1] == -4.0);
  CHECK(j.hessian()[0] == 2.0);
  CHECK(j.hessian()[1] == 0.0);
  CHECK(j.hessian()[2] == 0.0);
  CHECK(j.hessian()[3] == -2.0);

  const JetK j1 = eval_jet(parse("x1", 1), Point{0.0}, 1);
  CHECK(j1.value == 0.0);
  CHECK(j1.gradient()[0] == 1.0);

  const JetK j0 = eval_jet(parse("sin(x1)*x2", 2), Point{0.5, 2.0}, 0);
  CHECK(j0.value == doctest::Approx(2 * std::sin(0.5)));
  CHECK(j0.tensors.empty());
}

TEST_CASE("zero denominator is a domain error, never NaN") {
  const Expr e = parse("1/x1", 1);
  CHECK_THROWS_AS(evaluate(e, Point{0.0}), DomainError);
  CHECK_THROWS_AS(eval_jet(e, Point{0.0}, 2), DomainError);
  CHECK_THROWS_AS(evaluate(parse("exp(x1)", 1), Point{1000.0}), DomainError);
}

TEST_CASE("jet tensors are exactly symmetric") {
  gen::Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    const auto rf = gen::random_expression(rng, 3, 3);
    const Expr e = parse(rf.text, 3);
    const Point x{gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
    const JetK j = eval_jet(e, x, 3);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          const int abc[] = {a, b, c};
          const int cab[] = {c, a, b};
          const int bca[] = {b, c, a};
          const int acb[] = {a, c, b};
          CHECK(j.at(abc) == j.at(cab));
          CHECK(j.at(abc) == j.at(bca));
          CHECK(j.at(abc) == j.at(acb));
        }
  }
}

TEST_CASE("symbolic partials match central differences of an independent evaluator") {
  gen::Rng rng(2024);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = gen::uniform_int(rng, 1, 3);
    const auto rf = gen::random_expression(rng, n, 4);
    const Expr e = parse(rf.text, n);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = gen::uniform(rng, -1.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const double sym = evaluate(differentiate(e, i + 1), x);
      const double fd = oracle::central_difference(rf.eval, x, i);
      INFO(rf.text);
      CHECK(std::abs(sym - fd) / std::max(std::abs(sym), 1.0) < 1e-6);
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("jet truncation and linearity") {
  gen::Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    const auto a = gen::random_expression(rng, 2, 3);
    const auto b = gen::random_expression(rng, 2, 3);
    const Expr e1 = parse(a.text, 2);
    const Expr e2 = parse(b.text, 2);
    const Point x{gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
    const JetK j2 = eval_jet(e1, x, 2);
    const JetK j1 = eval_jet(e1, x, 1);
    const JetK tr = j2.truncated(1);
    CHECK(tr.value == j1.value);
    CHECK(tr.tensors == j1.tensors);

    const double s = gen::uniform(rng, -2, 2);
    const JetK lin = eval_jet(s * e1 + e2, x, 3);
    const JetK ja = eval_jet(e1, x, 3);
    const JetK jb = eval_jet(e2, x, 3);
    auto close = [](double u, double v) { return std::abs(u - v) <= 1e-12 * std::max(1.0, std::abs(v)); };
    CHECK(close(lin.value, s * ja.value + jb.value));
    for (std::size_t o = 0; o < lin.tensors.size(); ++o)
      for (std::size_t k = 0; k < lin.tensors[o].size(); ++k)
        CHECK(close(lin.tensors[o][k], s * ja.tensors[o][k] + jb.tensors[o][k]));
  }
}

TEST_CASE("program shares identical subtrees") {
  const Expr a = parse("sin(x1)*sin(x1)+sin(x1)", 1);
  const Program p(std::span<const Expr>(&a, 1));
  CHECK(p.num_instructions() == 4);  // x1, sin, mul, add
  const std::vector<double> x{0.3};
  CHECK(p(std::span<const double>(x))[0] == doctest::Approx(std::sin(0.3) * std::sin(0.3) + std::sin(0.3)));
}

TEST_CASE("long double evaluation agrees with double") {
  const Expr f = parse("exp(-x1^2)*sin(x1)", 1);
  const long double x = 3.25L;
  const long double v = evaluate<long double>(f, std::span<const long double>(&x, 1));
  CHECK(static_cast<double>(v) == doctest::Approx(evaluate(f, Point{3.25})).epsilon(1e-14));
}

TEST_CASE("node_count, is_polynomial, with_arity") {
  CHECK(is_polynomial(parse("x1^3-2*x1*x2+1/4", 2)));
  CHECK_FALSE(is_polynomial(parse("x1/x2", 2)));
  CHECK_FALSE(is_polynomial(parse("sin(x1)", 1)));
  CHECK(node_count(parse("x1+x1", 1)) == 3);
  const Expr e = parse("x1", 1).with_arity(3);
  CHECK(e.arity() == 3);
  CHECK_THROWS_AS(parse("x2", 2).with_arity(1), Error);
}
