#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "msl/critical.hpp"
#include "oracles.hpp"

using namespace msl;

namespace {

struct Instance {
  ModelQuadratic model;
  double r = 0.5;
  Expr g;
  std::string text;
};

Instance random_instance(gen::Rng& rng, int n) {
  Instance inst;
  for (int i = 0; i < n; ++i) inst.model.signs.push_back(gen::uniform_int(rng, 0, 1));
  inst.model.offset = gen::uniform(rng, -1, 1);
  inst.r = gen::uniform(rng, 0.1, 0.9);
  const auto p = gen::random_perturbation(rng, n, inst.r, 0.8 * 0.9 * inst.r / n);
  inst.text = gen::model_text(inst.model.signs, inst.model.offset) + "+" + p.text;
  inst.g = parse(inst.text, n);
  return inst;
}

double gradient_norm_fd(const Expr& g, std::vector<double> x) {
  double s = 0.0;
  const oracle::Fn f = [&](std::span<const double> p) { return evaluate(g, Point(p.begin(), p.end())); };
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    const double d = oracle::central_difference(f, x, i, 1e-6);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("contraction_solve examples") {
  const ModelQuadratic bowl{{0, 0}, 0.0};
  const CriticalPoint p = contraction_solve(parse("x1^2+x2^2+0.01*x1", 2), bowl, 0.5);
  CHECK(p.location[0] == doctest::Approx(-0.005).epsilon(1e-12));
  CHECK(std::abs(p.location[1]) < 1e-15);
  CHECK(p.value == doctest::Approx(-0.000025).epsilon(1e-10));
  CHECK(p.morse_index == 0);
  REQUIRE(p.cert_radius.has_value());
  CHECK(*p.cert_radius == 0.5);

  const CriticalPoint fixed = contraction_solve(bowl.expr(), bowl, 0.5);
  CHECK(fixed.location == Point{0.0, 0.0});
  CHECK(fixed.iterates.size() == 1);
  for (double s : fixed.iterates) CHECK(s == 0.0);

  const ModelQuadratic saddle{{0, 1}, 0.0};
  const CriticalPoint q = contraction_solve(parse("x1^2-x2^2+0.01*x1-0.02*x2", 2), saddle, 0.5);
  CHECK(q.location[0] == doctest::Approx(-0.005).epsilon(1e-12));
  CHECK(q.location[1] == doctest::Approx(-0.01).epsilon(1e-12));
  CHECK(q.morse_index == 1);
}

TEST_CASE("contraction_solve refuses inputs outside the hypothesis") {
  const ModelQuadratic bowl{{0, 0}, 0.0};
  CHECK_THROWS_AS(contraction_solve(parse("x1^2+x2^2+x1", 2), bowl, 0.5), HypothesisError);
  CHECK_THROWS_AS(contraction_solve(bowl.expr(), bowl, 1.0), HypothesisError);
  CHECK_THROWS_AS(contraction_solve(bowl.expr(), bowl, 0.0), HypothesisError);
  CHECK_THROWS_AS(contraction_solve(parse("x1^2", 1), bowl, 0.5), Error);
}

TEST_CASE("certify_unique examples") {
  const ModelQuadratic bowl{{0, 0}, 0.0};
  const auto cert = certify_unique(parse("x1^2+x2^2+0.01*x1", 2), bowl, 0.5);
  CHECK(cert.unique);
  CHECK(cert.point.location[0] == doctest::Approx(-0.005).epsilon(1e-12));
  CHECK(cert.failing_cells == 0);
  CHECK(cert.suspicious_cells >= 1);
  CHECK(cert.cells_scanned > 100000);

  // two wells at x1 = +-0.1: the perturbation is far too large for the gate
  try {
    certify_unique(parse("40*(x1^2-0.01)^2+x2^2", 2), bowl, 0.5);
    FAIL("expected a hypothesis error");
  } catch (const HypothesisError& e) {
    CHECK(std::string(e.what()).find("hypothesis not met") != std::string::npos);
  }
}

TEST_CASE("random gated perturbations certify; brute-force scan agrees") {
  gen::Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 4;
    const Instance inst = random_instance(rng, n);
    INFO(inst.text, " r=", inst.r);
    const auto cert = certify_unique(inst.g, inst.model, inst.r);
    CHECK(cert.unique);
    CHECK(cert.point.grad_residual < 1e-9);
    if (n <= 2) {
      // Oracle: the grid point of B(r) with the smallest finite-difference
      // gradient must sit next to the certified point.
      const int m = n == 1 ? 2001 : 201;
      const double h = 2 * inst.r / (m - 1);
      double best = 1e300;
      std::vector<double> arg;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < (n == 2 ? m : 1); ++b) {
          std::vector<double> x{-inst.r + a * h};
          if (n == 2) x.push_back(-inst.r + b * h);
          double rad = 0;
          for (double v : x) rad += v * v;
          if (rad > inst.r * inst.r) continue;
          const double gn = gradient_norm_fd(inst.g, x);
          if (gn < best) {
            best = gn;
            arg = x;
          }
        }
      double d = 0;
      for (int i = 0; i < n; ++i) d += std::pow(arg[i] - cert.point.location[i], 2);
      CHECK(std::sqrt(d) <= h * std::sqrt(2.0));
    }
  }
}

TEST_CASE("contraction trace and agreement with Newton") {
  gen::Rng rng(21);
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + t % 4;
    const Instance inst = random_instance(rng, n);
    INFO(inst.text);
    const CriticalPoint p = contraction_solve(inst.g, inst.model, inst.r);
    double env = 1.0;
    for (double s : p.iterates) {
      env *= inst.r / 2;
      CHECK(s < env);
    }
    CHECK(p.grad_residual < 1e-9);
    const CriticalPoint q = newton_refine(inst.g, p.location);
    double d = 0;
    for (int i = 0; i < n; ++i) d += std::pow(p.location[i] - q.location[i], 2);
    CHECK(std::sqrt(d) < 1e-9);
    CHECK(p.morse_index == q.morse_index);
    int negatives = 0;
    for (int s : inst.model.signs) negatives += s;
    CHECK(p.morse_index == negatives);
  }
}

TEST_CASE("dg is injective on B(r) with the half-distance estimate") {
  gen::Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 4;
    const Instance inst = random_instance(rng, n);
    std::vector<Expr> dg;
    for (int i = 1; i <= n; ++i) dg.push_back(differentiate(inst.g, i));
    auto random_in_ball = [&] {
      std::vector<double> x(n);
      double rad;
      do {
        rad = 0;
        for (auto& v : x) {
          v = gen::uniform(rng, -inst.r, inst.r);
          rad += v * v;
        }
      } while (rad >= inst.r * inst.r);
      return x;
    };
    for (int pair = 0; pair < 100; ++pair) {
      const auto x = random_in_ball();
      const auto y = random_in_ball();
      double lhs = 0, dist = 0;
      for (int i = 0; i < n; ++i) {
        const double sign = inst.model.signs[i] ? -1.0 : 1.0;
        const double d = (evaluate(dg[i], x) - evaluate(dg[i], y)) / (2 * sign);
        lhs += d * d;
        dist += (x[i] - y[i]) * (x[i] - y[i]);
      }
      CHECK(std::sqrt(lhs) > 0.5 * std::sqrt(dist));
    }
  }
}

TEST_CASE("Morse index is unchanged by adding a constant") {
  gen::Rng rng(29);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 4;
    const Instance inst = random_instance(rng, n);
    ModelQuadratic shifted = inst.model;
    shifted.offset += 3.5;
    const auto a = contraction_solve(inst.g, inst.model, inst.r);
    const auto b = contraction_solve(inst.g + Expr::constant(3.5, n), shifted, inst.r);
    CHECK(a.morse_index == b.morse_index);
    CHECK(b.value == doctest::Approx(a.value + 3.5).epsilon(1e-14));
  }
}

TEST_CASE("perturbation_bounds examples") {
  const ModelQuadratic bowl{{0, 0}, 0.0};
  const Expr g = parse("x1^2+x2^2+0.01*x1", 2);
  const Expr h = parse("x1^2+x2^2+0.02*x2", 2);
  const CompactBox U = CompactBox::ball(2, 0.5);
  const auto b = perturbation_bounds(g, h, bowl, 0.5, U);
  CHECK(b.dist_x == doctest::Approx(std::sqrt(0.000125)).epsilon(1e-9));
  // the sup of |0.01 x1 - 0.02 x2| on the ball is not a grid point, so the
  // grid value sits a little below 0.5 * |(0.01, -0.02)|
  CHECK(b.bound_x == doctest::Approx(std::sqrt(2.0) * 1.5 * std::sqrt(0.0005)).epsilon(1e-3));
  CHECK(b.bound_x <= std::sqrt(2.0) * 1.5 * std::sqrt(0.0005));
  CHECK(b.both_hold);

  const auto same = perturbation_bounds(g, g, bowl, 0.5, U);
  CHECK(same.dist_x == 0.0);
  CHECK(same.dist_y == 0.0);
  CHECK(same.bound_x >= 0.0);
  CHECK(same.both_hold);

  const CompactBox far = CompactBox::box({0.2, 0.2}, {0.3, 0.3});
  CHECK_THROWS_AS(perturbation_bounds(g, h, bowl, 0.5, far), HypothesisError);
}

TEST_CASE("random gated pairs satisfy both estimates strictly") {
  gen::Rng rng(31);
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + t % 3;
    Instance a = random_instance(rng, n);
    const auto p = gen::random_perturbation(rng, n, a.r, 0.8 * 0.9 * a.r / n);
    const Expr h = parse(gen::model_text(a.model.signs, a.model.offset) + "+" + p.text, n);
    const auto b = perturbation_bounds(a.g, h, a.model, a.r, CompactBox::ball(n, a.r, n == 3 ? 31 : 61));
    INFO(a.text);
    CHECK(b.dist_x < b.bound_x);
    CHECK(b.dist_y < b.bound_y);
  }
}

TEST_CASE("newton_refine examples") {
  const CriticalPoint p = newton_refine(parse("x1^2", 1), Point{0.3});
  CHECK(std::abs(p.location[0]) < 1e-12);
  CHECK(p.morse_index == 0);

  const double a1 = oracle::bisect(oracle::tan_residual, M_PI, 1.5 * M_PI);
  const CriticalPoint q = newton_refine(parse("exp(-x1^2)*sin(x1)", 1), Point{3.3});
  CHECK(q.location[0] == doctest::Approx(a1).epsilon(1e-12));
  CHECK(q.location[0] == doctest::Approx(3.2923).epsilon(1e-4));
  // F'' > 0 at a_1 (a negative local minimum), so the index is 0
  CHECK(q.hessian_eigenvalues[0] > 0);
  CHECK(q.morse_index == 0);

  CHECK_THROWS_AS(newton_refine(parse("x1^3", 1), Point{0.1}), DegenerateError);
  CHECK_THROWS_AS(newton_refine(parse("exp(x1)", 1), Point{0.0}), DivergenceError);
}
