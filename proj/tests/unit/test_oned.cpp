#include <doctest.h>

#include <cmath>
#include <regex>

#include "msl/oned.hpp"
#include "oracles.hpp"

using namespace msl;

namespace {

const char* kF = "exp(-x1^2)*sin(x1)";

std::string reflect(const std::string& text) { return std::regex_replace(text, std::regex("x1"), "(-x1)"); }

}  // namespace

TEST_CASE("critical_locus: parabola, line, cubic") {
  const auto loc = critical_locus(parse("x1^2", 1), 5);
  REQUIRE(loc.points.size() == 1);
  CHECK(loc.points[0].x == 0.0L);
  CHECK(loc.points[0].value == 0.0L);
  CHECK(loc.points[0].morse_index == 0);
  CHECK(loc.complete_in_window);

  const auto line = critical_locus(parse("x1", 1), 5);
  CHECK(line.points.empty());
  CHECK(line.complete_in_window);

  const auto cubic = critical_locus(parse("x1^3", 1), 2);
  CHECK(cubic.points.empty());
  REQUIRE(cubic.degenerate.size() == 1);
  CHECK(std::abs(cubic.degenerate[0]) < 1e-12L);

  const auto quartic = critical_locus(parse("x1^4", 1), 2);
  CHECK(quartic.points.empty());
  CHECK(quartic.degenerate.size() == 1);

  const auto constant = critical_locus(parse("3", 1), 2);
  CHECK(constant.derivative_identically_zero);
}

TEST_CASE("critical_locus of the case-study function in [-20, 20]") {
  const auto loc = critical_locus(parse(kF, 1), 20);
  CHECK(loc.complete_in_window);
  CHECK(loc.degenerate.empty());
  // +-a_1..+-a_6 plus the pair +-a_0 with a_0 in (0, pi/2)
  REQUIRE(loc.points.size() == 14);
  std::vector<double> positive;
  for (const auto& p : loc.points)
    if (p.x > 0) positive.push_back(static_cast<double>(p.x));
  REQUIRE(positive.size() == 7);
  CHECK(positive[0] > 0.0);
  CHECK(positive[0] < M_PI / 2);
  for (int n = 1; n <= 6; ++n) {
    const double an = positive[n];
    CHECK(an > n * M_PI);
    CHECK(an < (2 * n + 1) * M_PI / 2);
    const double oracle_root = oracle::bisect(oracle::tan_residual, n * M_PI, (2 * n + 1) * M_PI / 2);
    CHECK(an == doctest::Approx(oracle_root).epsilon(1e-14));
  }
  for (std::size_t i = 1; i < loc.points.size(); ++i) CHECK(loc.points[i].x > loc.points[i - 1].x);
  // odd function: mirrored points and values
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(loc.points[i].x == -loc.points[13 - i].x);
    CHECK(loc.points[i].value == -loc.points[13 - i].value);
  }
}

TEST_CASE("a pair of critical points between two samples is recovered") {
  LocusOptions coarse;
  coarse.density = 10;  // samples 0.1 apart; the roots are 0.04 and 0.06
  const auto loc = critical_locus(parse("(x1-0.05)^3/3-0.0001*x1", 1), 1, coarse);
  REQUIRE(loc.points.size() == 2);
  CHECK(static_cast<double>(loc.points[0].x) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(static_cast<double>(loc.points[1].x) == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(loc.points[0].morse_index == 1);
  CHECK(loc.points[1].morse_index == 0);
}

TEST_CASE("tan_equation_roots") {
  const auto a = tan_equation_roots(50);
  REQUIRE(a.size() == 50);
  CHECK(static_cast<double>(a[0]) == doctest::Approx(3.2923).epsilon(1e-4));
  CHECK(static_cast<double>(a[0]) ==
        doctest::Approx(oracle::bisect(oracle::tan_residual, M_PI, 1.5 * M_PI)).epsilon(1e-15));
  for (int n = 1; n <= 50; ++n) {
    const long double an = a[n - 1];
    CHECK(an > n * M_PIl);
    CHECK(an < (2 * n + 1) * M_PIl / 2);
    CHECK(std::abs(2 * an * std::sin(an) - std::cos(an)) < 1e-12L);
    if (n < 50) {
      CHECK(std::abs(std::sin(an)) > std::abs(std::sin(a[n])));
      CHECK(std::abs(std::sin(a[n])) > 0);
    }
  }
  CHECK_THROWS_AS(tan_equation_roots(0), Error);
}

TEST_CASE("end_behavior examples") {
  const auto F = end_behavior(parse(kF, 1));
  CHECK(F.plus.kind == EndKind::limit);
  CHECK(F.minus.kind == EndKind::limit);
  CHECK(*F.plus.limit == 0.0L);
  CHECK(*F.minus.limit == 0.0L);

  const auto sq = end_behavior(parse("x1^2", 1));
  CHECK(sq.plus.kind == EndKind::diverges_up);
  CHECK(sq.minus.kind == EndKind::diverges_up);

  const auto s = end_behavior(parse("sin(x1)", 1));
  CHECK(s.plus.kind == EndKind::oscillating);
  CHECK_FALSE(s.plus.limit.has_value());
  CHECK(static_cast<double>(s.plus.liminf) == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(static_cast<double>(s.plus.limsup) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(s.plus.liminf <= s.plus.limsup);

  const auto e = end_behavior(parse("exp(x1)", 1));
  CHECK(e.plus.kind == EndKind::diverges_up);  // overflow
  CHECK(e.minus.kind == EndKind::limit);

  const auto line = end_behavior(parse("x1", 1));
  CHECK(line.plus.kind == EndKind::diverges_up);
  CHECK(line.minus.kind == EndKind::diverges_down);

  // converges like 1/x: not within tolerance by 2^21, so undecided
  const auto slow = end_behavior(parse("x1/(1+x1^2)", 1));
  CHECK(slow.plus.kind == EndKind::inconclusive);
}

TEST_CASE("classify the case-study function") {
  const auto r = classify(parse(kF, 1), 30);
  CHECK(r.is_morse.value == Tri::yes);
  CHECK(r.locally_stable.value == Tri::yes);
  CHECK(r.infinitesimally_stable.value == Tri::no);
  CHECK(r.quasi_proper.value == Tri::yes);
  CHECK(r.strongly_stable.value == Tri::yes);
  CHECK(r.dimca_stable.value == Tri::yes);
  CHECK(r.quasi_proper.margin > 0);
  REQUIRE(r.z_f.size() == 1);
  CHECK(r.z_f[0].lo == 0.0L);
  for (const EndSigma* e : {&r.z_sigma_plus, &r.z_sigma_minus}) {
    REQUIRE(e->state == EndSigma::State::clusters);
    REQUIRE(e->clusters.size() == 1);
    CHECK(std::abs(e->clusters[0].lo) <= 1e-6L);
  }
}

TEST_CASE("classify parabola and sine") {
  const auto p = classify(parse("x1^2", 1), 10);
  for (const Flag* f : {&p.is_morse, &p.locally_stable, &p.infinitesimally_stable, &p.quasi_proper, &p.dimca_stable,
                        &p.strongly_stable})
    CHECK(f->value == Tri::yes);
  CHECK(p.z_f.empty());

  const auto s = classify(parse("sin(x1)", 1), 10);
  CHECK(s.is_morse.value == Tri::no);
  CHECK(s.locally_stable.value == Tri::no);
  CHECK(s.strongly_stable.value == Tri::no);
}

TEST_CASE("the emptiness margin of 0 in Delta equals the smallest critical value") {
  for (double W : {10.0, 15.0, 20.0, 25.0, 30.0}) {
    const auto r = classify(parse(kF, 1), W);
    REQUIRE(r.quasi_proper.value == Tri::yes);
    long double smallest = INFINITY;
    for (const auto& p : r.locus.points) smallest = std::min(smallest, std::abs(p.value));
    CHECK(r.quasi_proper.margin > 0);
    CHECK(r.quasi_proper.margin == smallest);
  }
}

TEST_CASE("strongly stable is exactly Morse and quasi-proper") {
  for (const char* text : {kF, "x1^2", "sin(x1)", "x1^3", "x1^3-x1", "exp(x1)", "x1/(1+x1^2)", "cos(x1)*exp(-x1^2)"}) {
    const auto r = classify(parse(text, 1), 8);
    INFO(text);
    CHECK(r.strongly_stable.value == tri_and(r.is_morse.value, r.quasi_proper.value));
    CHECK(r.locally_stable.value == r.is_morse.value);
  }
}

TEST_CASE("reflection swaps the ends and keeps every flag") {
  for (std::string text : {std::string(kF), std::string("x1^2+0.3*sin(x1)"), std::string("exp(x1)*x1"),
                           std::string("x1^3-x1")}) {
    const auto a = classify(parse(text, 1), 12);
    const auto b = classify(parse(reflect(text), 1), 12);
    INFO(text);
    CHECK(a.is_morse.value == b.is_morse.value);
    CHECK(a.infinitesimally_stable.value == b.infinitesimally_stable.value);
    CHECK(a.quasi_proper.value == b.quasi_proper.value);
    CHECK(a.dimca_stable.value == b.dimca_stable.value);
    CHECK(a.strongly_stable.value == b.strongly_stable.value);
    CHECK(a.ends.plus.kind == b.ends.minus.kind);
    CHECK(a.ends.minus.kind == b.ends.plus.kind);
    CHECK(a.z_sigma_plus.state == b.z_sigma_minus.state);
  }
}

TEST_CASE("enlarging the window only resolves inconclusive flags") {
  std::vector<StabilityReport> runs;
  for (double W : {3.0, 5.0, 8.0, 12.0, 20.0, 30.0}) runs.push_back(classify(parse(kF, 1), W));
  auto flags = [](const StabilityReport& r) {
    return std::vector<Tri>{r.is_morse.value, r.infinitesimally_stable.value, r.quasi_proper.value,
                            r.dimca_stable.value, r.strongly_stable.value};
  };
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto prev = flags(runs[i - 1]);
    const auto next = flags(runs[i]);
    for (std::size_t k = 0; k < prev.size(); ++k)
      if (prev[k] != Tri::inconclusive) CHECK(next[k] == prev[k]);
  }
  CHECK(flags(runs.back())[1] == Tri::no);
}
