#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "msl/jets.hpp"
#include "oracles.hpp"

using namespace msl;

TEST_CASE("dk_norm examples") {
  const Expr g = parse("x1^2 - x2^2", 2);
  CHECK(dk_norm(g, Point{1, 2}, 1) == doctest::Approx(std::sqrt(20.0)).epsilon(1e-15));
  CHECK(dk_norm(g, Point{-0.3, 7}, 2) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  CHECK(dk_norm(parse("5", 2), Point{1, 1}, 1) == 0.0);
  CHECK(dk_norm(g, Point{1, 2}, 0) == 3.0);
}

TEST_CASE("ck_norm_at examples") {
  const CkNorm n = ck_norm_at(parse("x1^2 - x2^2", 2), Point{1, 2}, 2);
  CHECK(n.total == doctest::Approx(3 + std::sqrt(20.0) + std::sqrt(8.0)).epsilon(1e-15));
  CHECK(n.total == doctest::Approx(10.300563).epsilon(1e-7));
  REQUIRE(n.parts.size() == 3);
  CHECK(n.parts[0] + n.parts[1] + n.parts[2] == n.total);
  CHECK_FALSE(n.over_set);
  CHECK(ck_norm_at(parse("0", 3), Point{1, 2, 3}, 4).total == 0.0);
  CHECK(ck_norm_at(parse("x1", 1), Point{0.0}, 1).total == 1.0);
}

TEST_CASE("ck_norm_over examples") {
  const CompactBox box = CompactBox::box({-0.5, -0.5}, {0.5, 0.5});
  const CkNorm n = ck_norm_over(parse("0.01*x1", 2), box, 2);
  CHECK(n.total == doctest::Approx(0.015).epsilon(1e-12));
  CHECK(n.over_set);
  CHECK(n.grid_lower_bound);
  CHECK(n.samples == 101 * 101);
  CHECK(std::abs(n.argmax[0]) == 0.5);
  CHECK(ck_norm_over(parse("0", 2), box, 2).total == 0.0);
  const Expr q = parse("x1^2+x2^2", 2);
  CHECK(ck_norm_over(q - q, box, 2).total == 0.0);
}

TEST_CASE("ball mask keeps only points of the closed ball") {
  const CompactBox b = CompactBox::ball(2, 0.5, 11);
  const auto pts = b.points();
  CHECK(pts.size() < 121);
  for (const auto& p : pts) CHECK(p[0] * p[0] + p[1] * p[1] <= 0.25 + 1e-15);
  CHECK(b.contains(Point{0.5, 0.0}));
  CHECK_FALSE(b.contains(Point{0.5, 0.5}));
  CHECK_THROWS_AS(CompactBox::box({0, 1}, {1, 1}), Error);
}

TEST_CASE("perturbation_gate examples") {
  const Expr f = parse("x1^2+x2^2", 2);
  const CompactBox b = CompactBox::box({-0.5, -0.5}, {0.5, 0.5});
  const GateResult ok = perturbation_gate(f, parse("x1^2+x2^2+0.01*x1", 2), b, 2, 0.25);
  CHECK(ok.passed);
  CHECK(ok.margin == doctest::Approx(0.235).epsilon(1e-12));
  const GateResult same = perturbation_gate(f, f, b, 2, 0.25);
  CHECK(same.passed);
  CHECK(same.margin == 0.25);
  const GateResult bad = perturbation_gate(f, parse("x1^2+x2^2+x1", 2), b, 2, 0.25);
  CHECK_FALSE(bad.passed);
  CHECK(bad.norm >= 1.0);
}

TEST_CASE("triangle inequality on identical grids") {
  gen::Rng rng(3);
  const CompactBox box = CompactBox::box({-1, -1}, {1, 1}, 21);
  for (int t = 0; t < 30; ++t) {
    const Expr a = parse(gen::random_expression(rng, 2, 3).text, 2);
    const Expr b = parse(gen::random_expression(rng, 2, 3).text, 2);
    const double lhs = ck_norm_over(a + b, box, 2).total;
    const double rhs = ck_norm_over(a, box, 2).total + ck_norm_over(b, box, 2).total;
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("monotone in k pointwise") {
  gen::Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const Expr e = parse(gen::random_expression(rng, 3, 3).text, 3);
    const Point x{gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
    for (int k = 0; k < 4; ++k) CHECK(ck_norm_at(e, x, k + 1).total >= ck_norm_at(e, x, k).total);
  }
}

TEST_CASE("grid refinement by doubling never decreases the norm") {
  gen::Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const Expr e = parse(gen::random_expression(rng, 2, 3).text, 2);
    // s -> 2s-1 keeps every old sample, which is what makes the max monotone
    const CompactBox coarse = CompactBox::box({-1, -0.5}, {0.5, 1}, 17);
    const CompactBox fine = coarse.resampled(33);
    CHECK(ck_norm_over(e, fine, 2).total >= ck_norm_over(e, coarse, 2).total);
  }
}

TEST_CASE("second-order norm equals the eigenvalue formula") {
  gen::Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const int n = gen::uniform_int(rng, 1, 4);
    std::string text = "0";
    std::vector<double> h(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double c = gen::uniform(rng, -2, 2);
        text += "+" + gen::number(c) + "*x" + std::to_string(i + 1) + "*x" + std::to_string(j + 1);
        h[static_cast<std::size_t>(i * n + j)] += i == j ? 2 * c : c;
        if (i != j) h[static_cast<std::size_t>(j * n + i)] += c;
      }
    const auto eig = oracle::jacobi_eigenvalues(h, n);
    double s = 0.0;
    for (double l : eig) s += l * l;
    const Point x(static_cast<std::size_t>(n), 0.25);
    CHECK(dk_norm(parse(text, n), x, 2) == doctest::Approx(std::sqrt(s)).epsilon(1e-9));
  }
}
