#include "msl/oned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "msl/parallel.hpp"
#include "msl/program.hpp"

namespace msl {
namespace {

using ld = long double;

constexpr ld kEps = std::numeric_limits<ld>::epsilon();
constexpr ld kInf = std::numeric_limits<ld>::infinity();
// Rounding bound is kRoundingFactor * eps * magnitude.
constexpr ld kRoundingFactor = 16;

class Scalar {
 public:
  explicit Scalar(const Expr& e) : program_(std::span<const Expr>(&e, 1)) {}

  ld operator()(ld x) const {
    ld out;
    program_.run<ld>(std::span<const ld>(&x, 1), std::span<ld>(&out, 1));
    return out;
  }

  /// Value and its rounding bound.
  std::pair<ld, ld> bounded(ld x) const {
    ld out, mag;
    program_.run_with_magnitude<ld>(std::span<const ld>(&x, 1), std::span<ld>(&out, 1), std::span<ld>(&mag, 1));
    return {out, kRoundingFactor * kEps * mag};
  }

 private:
  Program program_;
};

int sign(ld v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

/// Bisection of a sign change of `g` on [a, b]; returns midpoint and width.
std::pair<ld, ld> bisect(const Scalar& g, ld a, ld b) {
  ld ga = g(a);
  for (int it = 0; it < 256; ++it) {
    const ld mid = 0.5L * (a + b);
    if (mid <= a || mid >= b) break;
    const ld gm = g(mid);
    if (gm == 0) return {mid, 0};
    if (sign(gm) == sign(ga)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return {0.5L * (a + b), b - a};
}

struct Candidate {
  ld x;
  ld width;
  bool touching;  // extremum of f' that reaches zero
};

struct ScanResult {
  std::vector<Candidate> roots;
  bool failed = false;
  bool plateau = false;
  std::string reason;
};

ScanResult scan(const Scalar& d1, const Scalar& d2, double W, std::size_t N) {
  ScanResult res;
  const ld h = 2.0L * W / static_cast<ld>(N - 1);
  auto xs = [&](std::size_t j) { return -static_cast<ld>(W) + h * static_cast<ld>(j); };
  std::vector<ld> d(N);
  const std::size_t chunk = 16384;
  const std::size_t chunks = (N + chunk - 1) / chunk;
  std::vector<char> failed(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(N, (c + 1) * chunk);
    for (std::size_t j = c * chunk; j < end; ++j) {
      try {
        d[j] = d1(xs(j));
      } catch (const DomainError&) {
        d[j] = std::numeric_limits<ld>::quiet_NaN();
        failed[c] = 1;
      }
    }
  });
  if (std::find(failed.begin(), failed.end(), 1) != failed.end()) {
    res.failed = true;
    res.reason = "f' could not be evaluated at every sample";
  }

  for (std::size_t j = 0; j + 1 < N; ++j) {
    const ld a = d[j];
    const ld b = d[j + 1];
    if (std::isnan(a) || std::isnan(b)) continue;
    if (a == 0 && b == 0) {
      res.plateau = true;
      res.reason = "f' vanishes on consecutive samples";
      continue;
    }
    if (a == 0) {
      if (j > 0) res.roots.push_back({xs(j), 0, false});
      continue;
    }
    if (sign(a) * sign(b) < 0) {
      const auto [x, w] = bisect(d1, xs(j), xs(j + 1));
      res.roots.push_back({x, w, false});
    }
  }

  // A local minimum of |f'| without a sign change may hide a pair of roots
  // (or a touching zero) between samples. Locate the extremum of f' there.
  for (std::size_t j = 1; j + 1 < N; ++j) {
    const ld a = d[j - 1], m = d[j], b = d[j + 1];
    if (std::isnan(a) || std::isnan(m) || std::isnan(b) || m == 0) continue;
    if (sign(a) != sign(m) || sign(b) != sign(m)) continue;
    // strict on the left so a tie between two samples is examined once
    if (!(std::abs(m) < std::abs(a) && std::abs(m) <= std::abs(b))) continue;
    ld s_lo, s_hi;
    try {
      s_lo = d2(xs(j - 1));
      s_hi = d2(xs(j + 1));
    } catch (const DomainError&) {
      continue;
    }
    if (sign(s_lo) * sign(s_hi) >= 0) continue;
    const ld xe = bisect(d2, xs(j - 1), xs(j + 1)).first;
    const auto [ve, de] = d1.bounded(xe);
    if (std::abs(ve) <= de) {
      res.roots.push_back({xe, 0, true});
    } else if (sign(ve) != sign(m)) {
      const auto [x1, w1] = bisect(d1, xs(j - 1), xe);
      const auto [x2, w2] = bisect(d1, xe, xs(j + 1));
      res.roots.push_back({x1, w1, false});
      res.roots.push_back({x2, w2, false});
    }
  }
  std::sort(res.roots.begin(), res.roots.end(), [](const Candidate& p, const Candidate& q) { return p.x < q.x; });
  return res;
}

std::size_t odd_count(double W, double density) {
  auto n = static_cast<std::size_t>(std::ceil(2.0 * W * density)) + 1;
  if (n % 2 == 0) ++n;
  return std::max<std::size_t>(n, 3);
}

}  // namespace

CriticalPoint Critical1D::as_point() const {
  CriticalPoint p;
  p.location = {static_cast<double>(x)};
  p.value = static_cast<double>(value);
  p.morse_index = morse_index;
  p.grad_residual = static_cast<double>(residual);
  p.hessian_eigenvalues = {static_cast<double>(second_derivative)};
  return p;
}

std::vector<long double> CriticalLocus1D::values() const {
  std::vector<long double> v;
  for (const auto& p : points) v.push_back(p.value);
  return v;
}

CriticalLocus1D critical_locus(const Expr& f_in, double W, const LocusOptions& options) {
  if (f_in.arity() > 1) throw Error("critical_locus: expected a function of one variable");
  if (!(W > 0.0) || !std::isfinite(W)) throw Error("critical_locus: window must be positive");
  if (!(options.density > 0.0)) throw Error("critical_locus: density must be positive");
  const Expr f = f_in.with_arity(1);
  const Expr f1 = differentiate(f, 1);
  const Expr f2 = differentiate(f1, 1);

  CriticalLocus1D locus;
  locus.window = W;
  locus.density = options.density;
  if (f1.is_constant()) {
    locus.derivative_identically_zero = f1.root().constant == 0.0;
    locus.complete_in_window = true;
    return locus;
  }

  const Scalar value(f), d1(f1), d2(f2);
  const std::size_t N = odd_count(W, options.density);
  const ld h = 2.0L * W / static_cast<ld>(N - 1);
  const ScanResult first = scan(d1, d2, W, N);

  for (const Candidate& c : first.roots) {
    const auto [s2, e2] = d2.bounded(c.x);
    bool nondegenerate = !c.touching && std::abs(s2) > e2;
    if (nondegenerate) {
      const ld side = std::max(std::abs(d1(c.x - h)), std::abs(d1(c.x + h)));
      nondegenerate = side > 0 && std::abs(s2) * h > static_cast<ld>(options.nondeg_ratio) * side;
    }
    if (!nondegenerate) {
      locus.degenerate.push_back(c.x);
      continue;
    }
    Critical1D p;
    p.x = c.x;
    const auto [v, ev] = value.bounded(c.x);
    p.value = v;
    p.residual = std::abs(d1(c.x));
    p.second_derivative = s2;
    p.value_error = ev + p.residual * c.width + 0.5L * std::abs(s2) * c.width * c.width;
    p.morse_index = s2 < 0 ? 1 : 0;
    locus.points.push_back(p);
  }

  locus.complete_in_window = !first.failed && !first.plateau;
  locus.incomplete_reason = first.reason;
  for (std::size_t i = 1; i < first.roots.size(); ++i) {
    if (first.roots[i].x - first.roots[i - 1].x <= std::max(first.roots[i].width, first.roots[i - 1].width)) {
      locus.complete_in_window = false;
      locus.incomplete_reason = "two refined critical points collide";
    }
  }
  if (options.rescan && locus.complete_in_window) {
    const ScanResult second = scan(d1, d2, W, 2 * N - 1);
    locus.rescan_count = second.roots.size();
    if (second.failed || second.plateau || second.roots.size() != first.roots.size()) {
      locus.complete_in_window = false;
      locus.incomplete_reason = "doubling the density changed the number of critical points";
    }
  }
  return locus;
}

std::vector<long double> tan_equation_roots(int m) {
  if (m < 1) throw Error("tan_equation_roots: count must be at least 1");
  const Expr g = parse("2*x1*sin(x1)-cos(x1)", 1);
  const Scalar eval(g);
  std::vector<long double> roots;
  const ld pi = std::numbers::pi_v<ld>;
  for (int n = 1; n <= m; ++n) roots.push_back(bisect(eval, n * pi, (2 * n + 1) * pi / 2).first);
  return roots;
}

const char* to_string(EndKind k) {
  switch (k) {
    case EndKind::limit: return "limit";
    case EndKind::diverges_up: return "diverges_up";
    case EndKind::diverges_down: return "diverges_down";
    case EndKind::oscillating: return "oscillating";
    case EndKind::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

EndSide end_side(const Scalar& f, int direction, const EndOptions& o) {
  EndSide side;
  side.direction = direction;
  const int S = std::max(o.samples_per_window, 2);
  ld last_finite = 0;
  for (int k = 0; k <= o.k_max; ++k) {
    EndWindow w;
    w.lo = std::ldexp(1.0L, k);
    w.hi = std::ldexp(1.0L, k + 1);
    w.min = kInf;
    w.max = -kInf;
    for (int i = 0; i < S; ++i) {
      const ld x = direction * (w.lo + (w.hi - w.lo) * static_cast<ld>(i) / (S - 1));
      ld v;
      try {
        v = f(x);
      } catch (const DomainError& e) {
        if (std::string(e.what()).find("non-finite") != std::string::npos) {
          side.kind = last_finite >= 0 ? EndKind::diverges_up : EndKind::diverges_down;
          side.liminf = side.limsup = last_finite >= 0 ? kInf : -kInf;
        } else {
          side.kind = EndKind::inconclusive;
        }
        return side;
      }
      last_finite = v;
      w.min = std::min(w.min, v);
      w.max = std::max(w.max, v);
    }
    side.windows.push_back(w);
  }

  const std::size_t n = side.windows.size();
  const EndWindow& last = side.windows.back();
  side.liminf = last.min;
  side.limsup = last.max;
  if (n < 3) return side;
  const ld tol = static_cast<ld>(o.tol_lim);
  ld osc = 0, drift = 0;
  for (std::size_t i = n - 3; i < n; ++i) {
    osc = std::max(osc, side.windows[i].max - side.windows[i].min);
    if (i > n - 3) {
      const ld m0 = 0.5L * (side.windows[i - 1].max + side.windows[i - 1].min);
      const ld m1 = 0.5L * (side.windows[i].max + side.windows[i].min);
      drift = std::max(drift, std::abs(m1 - m0));
    }
  }
  if (osc < tol && drift < tol) {
    side.kind = EndKind::limit;
    side.limit = 0.5L * (last.max + last.min);
    side.limit_uncertainty = osc + drift;
    return side;
  }
  auto growing = [&](auto pick) {
    for (std::size_t i = n - 2; i < n; ++i) {
      const ld a = pick(side.windows[i - 1]);
      const ld b = pick(side.windows[i]);
      if (!(a > 0) || !(b > 1.5L * a)) return false;
    }
    return true;
  };
  if (growing([](const EndWindow& w) { return w.min; })) {
    side.kind = EndKind::diverges_up;
    side.liminf = side.limsup = kInf;
    return side;
  }
  if (growing([](const EndWindow& w) { return -w.max; })) {
    side.kind = EndKind::diverges_down;
    side.liminf = side.limsup = -kInf;
    return side;
  }
  bool shrinking = true;
  for (std::size_t i = n - 2; i < n; ++i) {
    const ld a = side.windows[i - 1].max - side.windows[i - 1].min;
    const ld b = side.windows[i].max - side.windows[i].min;
    if (!(b < 0.75L * a)) shrinking = false;
  }
  side.kind = shrinking ? EndKind::inconclusive : EndKind::oscillating;
  return side;
}

enum class Sep { separated, meets, unknown };

struct Separation {
  Sep state;
  ld distance;
  ld ratio;
};

/// Decides whether a computed value y (error dy) lies in the set S.
Separation separate(ld y, ld dy, const ValueSet& S, ld tol_sep) {
  const ld d = y < S.lo ? S.lo - y : (y > S.hi ? y - S.hi : 0);
  if (!S.is_point()) {
    // sampled cluster interval: only tol_sep resolution is meaningful
    return {d > tol_sep ? Sep::separated : Sep::meets, d, d / tol_sep};
  }
  const ld tol = dy + S.uncertainty;
  const ld ratio = tol > 0 ? d / tol : (d > 0 ? kInf : 0);
  if (d > tol) return {Sep::separated, d, ratio};
  if (S.uncertainty <= dy) return {Sep::meets, d, ratio};
  return {Sep::unknown, d, ratio};
}

void fold(Flag& flag, const Separation& s, const std::string& what) {
  if (s.state == Sep::meets) {
    if (flag.value != Tri::no) {
      flag.value = Tri::no;
      flag.margin = s.distance;
      flag.margin_ratio = s.ratio;
      flag.basis = what;
    }
    return;
  }
  if (flag.value == Tri::no) return;
  if (s.state == Sep::unknown) {
    flag.value = Tri::inconclusive;
    flag.basis = what + " (separation below uncertainty)";
  }
  if (s.distance < flag.margin || flag.margin_ratio == 0) {
    flag.margin = s.distance;
    flag.margin_ratio = s.ratio;
  }
}

Flag combine(const Flag& a, const Flag& b, const std::string& basis) {
  Flag out;
  out.value = tri_and(a.value, b.value);
  const Flag& pick = a.value == out.value && a.value != Tri::yes ? a : (b.value == out.value ? b : a);
  out.margin = out.value == Tri::yes ? std::min(a.margin, b.margin) : pick.margin;
  out.margin_ratio = out.value == Tri::yes ? std::min(a.margin_ratio, b.margin_ratio) : pick.margin_ratio;
  out.basis = out.value == Tri::yes ? basis : pick.basis;
  return out;
}

/// True when f' keeps one sign at every nonzero sample of [W, 2^{k_max+1}]
/// on the given side.
bool monotone_beyond(const Scalar& d1, int direction, double W, const EndOptions& o) {
  int seen = 0;
  const int S = std::max(o.samples_per_window, 2);
  for (int k = 0; k <= o.k_max; ++k) {
    const ld lo = std::max<ld>(std::ldexp(1.0L, k), W);
    const ld hi = std::ldexp(1.0L, k + 1);
    if (lo >= hi) continue;
    for (int i = 0; i < S; ++i) {
      ld v;
      try {
        v = d1(direction * (lo + (hi - lo) * static_cast<ld>(i) / (S - 1)));
      } catch (const DomainError&) {
        return seen != 0;  // overflow: f' keeps growing in the sign seen so far
      }
      const int sg = sign(v);
      if (sg == 0) continue;
      if (seen != 0 && sg != seen) return false;
      seen = sg;
    }
  }
  return seen != 0;
}

EndSigma sigma_end(const CriticalLocus1D& locus, const EndSide& end, const std::vector<ValueSet>& z_end,
                   const Scalar& d1, double W, ld tol_sep, const EndOptions& o) {
  EndSigma out;
  std::vector<const Critical1D*> tail;
  ld outermost = 0;
  bool band_a = false, band_b = false;
  for (const auto& p : locus.points) {
    const ld s = end.direction * p.x;
    if (s <= 0) continue;
    outermost = std::max(outermost, s);
    if (s > W / 2.0L) {
      tail.push_back(&p);
      (s > 0.75L * W ? band_b : band_a) = true;
    }
  }
  if (end.kind == EndKind::diverges_up || end.kind == EndKind::diverges_down) {
    // Z(f|Sigma) lies inside Z(f), which is empty at a divergent end
    out.state = EndSigma::State::empty;
    out.margin = W - outermost;
    out.basis = "f diverges at this end";
    return out;
  }
  if (tail.empty() && monotone_beyond(d1, end.direction, W, o)) {
    out.state = EndSigma::State::empty;
    out.margin = W - outermost;
    out.basis = "f' keeps one sign beyond the last critical point";
    return out;
  }
  if (!band_a || !band_b) {
    out.basis = "too few critical points near the window edge to see a trend";
    return out;
  }

  std::vector<ld> values;
  for (const auto* p : tail) values.push_back(p->value);
  std::sort(values.begin(), values.end());
  std::vector<std::pair<ld, ld>> groups{{values.front(), values.front()}};
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] - groups.back().second <= tol_sep) {
      groups.back().second = values[i];
    } else {
      groups.push_back({values[i], values[i]});
    }
  }
  for (const auto& [lo, hi] : groups) {
    const ValueSet* snap = nullptr;
    for (const auto& z : z_end) {
      const ld d = hi < z.lo ? z.lo - hi : (lo > z.hi ? lo - z.hi : 0);
      if (d <= tol_sep) snap = &z;
    }
    if (!snap) {
      out.basis = "critical values near the window edge do not settle on an improper value";
      return out;
    }
    if (snap->is_point()) {
      out.clusters.push_back(*snap);
    } else {
      const ld mid = 0.5L * (lo + hi);
      out.clusters.push_back({mid, mid, tol_sep});
    }
  }
  out.state = EndSigma::State::clusters;
  out.basis = "critical values near the window edge cluster at improper values";
  return out;
}

}  // namespace

EndBehavior end_behavior(const Expr& f_in, const EndOptions& options) {
  if (f_in.arity() > 1) throw Error("end_behavior: expected a function of one variable");
  const Scalar f(f_in.with_arity(1));
  EndBehavior b;
  b.plus = end_side(f, 1, options);
  b.minus = end_side(f, -1, options);
  return b;
}

const char* to_string(Tri t) {
  switch (t) {
    case Tri::yes: return "true";
    case Tri::no: return "false";
    case Tri::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::no || b == Tri::no) return Tri::no;
  if (a == Tri::yes && b == Tri::yes) return Tri::yes;
  return Tri::inconclusive;
}

bool StabilityReport::any_inconclusive() const {
  for (const Flag* f : {&is_morse, &locally_stable, &infinitesimally_stable, &quasi_proper, &dimca_stable,
                        &strongly_stable})
    if (f->value == Tri::inconclusive) return true;
  return false;
}

StabilityReport classify(const Expr& f_in, double W, const ClassifyOptions& options) {
  const Expr f = f_in.with_arity(1);
  const ld tol_sep = static_cast<ld>(options.tol_sep);
  StabilityReport r;
  r.locus = critical_locus(f, W, options.locus);
  r.ends = end_behavior(f, options.ends);
  r.delta = r.locus.values();

  // Z(f) and L(f) from the ends, kept per end for the critical-value tails.
  std::vector<ValueSet> z_plus, z_minus;
  r.z_f_known = true;
  for (const EndSide* side : {&r.ends.plus, &r.ends.minus}) {
    auto& z = side->direction > 0 ? z_plus : z_minus;
    switch (side->kind) {
      case EndKind::limit:
        z.push_back({*side->limit, *side->limit, side->limit_uncertainty});
        r.l_f.push_back(*side->limit);
        break;
      case EndKind::oscillating:
        z.push_back({side->liminf, side->limsup, tol_sep});
        break;
      case EndKind::inconclusive:
        r.z_f_known = false;
        break;
      default:
        break;
    }
  }
  for (const auto* z : {&z_plus, &z_minus})
    for (const auto& piece : *z) {
      const bool dup = std::any_of(r.z_f.begin(), r.z_f.end(), [&](const ValueSet& q) {
        return q.lo == piece.lo && q.hi == piece.hi;
      });
      if (!dup) r.z_f.push_back(piece);
    }
  std::sort(r.l_f.begin(), r.l_f.end());
  r.l_f.erase(std::unique(r.l_f.begin(), r.l_f.end()), r.l_f.end());

  const Scalar d1(differentiate(f, 1));
  r.z_sigma_plus = sigma_end(r.locus, r.ends.plus, z_plus, d1, W, tol_sep, options.ends);
  r.z_sigma_minus = sigma_end(r.locus, r.ends.minus, z_minus, d1, W, tol_sep, options.ends);

  // Morse: nondegenerate points with pairwise distinct values.
  Flag& morse = r.is_morse;
  if (r.locus.derivative_identically_zero) {
    morse = {Tri::no, 0, 0, "f' vanishes identically"};
  } else if (!r.locus.degenerate.empty()) {
    morse = {Tri::no, 0, 0, "degenerate critical point"};
  } else {
    morse = {Tri::yes, kInf, kInf, "nondegenerate critical points with distinct values"};
    std::vector<const Critical1D*> byval;
    for (const auto& p : r.locus.points) byval.push_back(&p);
    std::sort(byval.begin(), byval.end(), [](auto a, auto b) { return a->value < b->value; });
    for (std::size_t i = 1; i < byval.size(); ++i) {
      const ValueSet other{byval[i - 1]->value, byval[i - 1]->value, byval[i - 1]->value_error};
      fold(morse, separate(byval[i]->value, byval[i]->value_error, other, tol_sep), "repeated critical value");
    }
    if (morse.value == Tri::yes && !r.locus.complete_in_window) {
      morse.value = Tri::inconclusive;
      morse.basis = "critical locus incomplete: " + r.locus.incomplete_reason;
    }
  }
  r.locally_stable = morse;

  // Z(f|_Sigma) empty.
  Flag zsig{Tri::yes, W, kInf, "no critical points in the outer half of the window"};
  for (const EndSigma* e : {&r.z_sigma_plus, &r.z_sigma_minus}) {
    if (e->state == EndSigma::State::clusters) {
      zsig = {Tri::no, 0, 0, "critical values accumulate at an end"};
      break;
    }
    if (e->state == EndSigma::State::inconclusive) {
      zsig.value = Tri::inconclusive;
      zsig.basis = "critical values near an end show no settled trend";
    } else if (zsig.value == Tri::yes) {
      zsig.margin = std::min(zsig.margin, e->margin);
    }
  }
  r.infinitesimally_stable = combine(morse, zsig, "Morse and Z(f|Sigma) empty");

  // Z(f) and Delta disjoint.
  Flag qp{Tri::yes, kInf, kInf, "Z(f) and Delta(f) are disjoint"};
  if (r.locus.points.empty() && r.locus.degenerate.empty() && r.locus.complete_in_window &&
      !r.locus.derivative_identically_zero) {
    qp.basis = "no critical values";
  } else if (!r.z_f_known) {
    qp = {Tri::inconclusive, 0, 0, "an end has no settled behaviour"};
  } else if (r.locus.derivative_identically_zero) {
    qp = {r.z_f.empty() ? Tri::yes : Tri::no, 0, 0, "f is constant"};
  } else {
    for (const auto& p : r.locus.points)
      for (const auto& z : r.z_f) fold(qp, separate(p.value, p.value_error, z, tol_sep), "a critical value is improper");
    if (qp.value == Tri::yes && !r.locus.complete_in_window) {
      qp.value = Tri::inconclusive;
      qp.basis = "critical locus incomplete";
    }
  }
  r.quasi_proper = qp;

  // Delta disjoint from Z(f|_Sigma) and L(f).
  Flag dm{Tri::yes, kInf, kInf, "Delta(f) misses Z(f|Sigma) and L(f)"};
  std::vector<ValueSet> bad;
  for (const EndSigma* e : {&r.z_sigma_plus, &r.z_sigma_minus}) {
    if (e->state == EndSigma::State::inconclusive) {
      dm = {Tri::inconclusive, 0, 0, "Z(f|Sigma) undetermined"};
    }
    bad.insert(bad.end(), e->clusters.begin(), e->clusters.end());
  }
  for (const EndSide* side : {&r.ends.plus, &r.ends.minus}) {
    if (side->kind == EndKind::inconclusive) dm = {Tri::inconclusive, 0, 0, "L(f) undetermined"};
    if (side->limit) bad.push_back({*side->limit, *side->limit, side->limit_uncertainty});
  }
  if (dm.value == Tri::yes) {
    for (const auto& p : r.locus.points)
      for (const auto& z : bad) fold(dm, separate(p.value, p.value_error, z, tol_sep), "a critical value is a limit value");
    if (dm.value == Tri::yes && !r.locus.complete_in_window) {
      dm.value = Tri::inconclusive;
      dm.basis = "critical locus incomplete";
    }
  }
  r.dimca_stable = combine(morse, dm, "Morse and Delta(f) misses Z(f|Sigma) and L(f)");
  r.strongly_stable = combine(morse, qp, "Morse and quasi-proper");
  return r;
}

}  // namespace msl
