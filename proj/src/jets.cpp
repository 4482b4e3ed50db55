#include "msl/jets.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "msl/parallel.hpp"

namespace msl {

CompactBox CompactBox::box(Point lower, Point upper, int samples_per_axis) {
  if (lower.size() != upper.size()) throw Error("CompactBox: corner dimensions differ");
  require_finite(lower, "box corner");
  require_finite(upper, "box corner");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i])) throw Error("CompactBox: lower must be below upper in every coordinate");
  if (samples_per_axis < 1) throw Error("CompactBox: samples_per_axis must be positive");
  CompactBox b;
  b.lower = std::move(lower);
  b.upper = std::move(upper);
  b.samples_per_axis = samples_per_axis;
  return b;
}

CompactBox CompactBox::ball(int n, double r, int samples_per_axis) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error("CompactBox::ball: radius must be positive");
  CompactBox b = box(Point(static_cast<std::size_t>(n), -r), Point(static_cast<std::size_t>(n), r), samples_per_axis);
  b.ball_mask = true;
  b.ball_radius = r;
  return b;
}

std::size_t CompactBox::grid_size() const {
  std::size_t total = 1;
  for (int i = 0; i < dim(); ++i) total *= static_cast<std::size_t>(samples_per_axis);
  return total;
}

Point CompactBox::center() const {
  Point c(lower.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

Point CompactBox::grid_point(std::size_t flat) const {
  Point p(lower.size());
  const auto s = static_cast<std::size_t>(samples_per_axis);
  for (std::size_t i = p.size(); i-- > 0;) {
    const std::size_t j = flat % s;
    flat /= s;
    p[i] = s == 1 ? 0.5 * (lower[i] + upper[i])
                  : lower[i] + (upper[i] - lower[i]) * static_cast<double>(j) / static_cast<double>(s - 1);
  }
  return p;
}

bool CompactBox::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  if (!ball_mask) return true;
  const Point c = center();
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - c[i]) * (x[i] - c[i]);
  return d2 <= ball_radius * ball_radius * (1.0 + 1e-15);
}

std::vector<Point> CompactBox::points() const {
  std::vector<Point> out;
  const std::size_t total = grid_size();
  out.reserve(total);
  for (std::size_t f = 0; f < total; ++f) {
    Point p = grid_point(f);
    if (contains(p)) out.push_back(std::move(p));
  }
  return out;
}

CompactBox CompactBox::resampled(int samples) const {
  CompactBox b = *this;
  if (samples < 1) throw Error("CompactBox: samples_per_axis must be positive");
  b.samples_per_axis = samples;
  return b;
}

std::vector<double> jet_part_norms(const JetK& jet) {
  std::vector<double> parts{std::abs(jet.value)};
  for (const auto& t : jet.tensors) {
    double s = 0.0;
    for (double v : t) s += v * v;
    parts.push_back(std::sqrt(s));
  }
  return parts;
}

double dk_norm(const Expr& e, std::span<const double> x, int k) {
  if (k < 0 || k > JetEvaluator::kMaxOrder) throw Error("dk_norm: order must be in 0..4");
  return jet_part_norms(eval_jet(e, x, k)).at(static_cast<std::size_t>(k));
}

namespace {

CkNorm norm_from_jet(const JetK& jet, int k) {
  CkNorm n;
  n.k = k;
  n.parts = jet_part_norms(jet);
  for (double p : n.parts) n.total += p;
  n.samples = 1;
  return n;
}

}  // namespace

CkNorm ck_norm_at(const Expr& e, std::span<const double> x, int k) {
  if (k < 0 || k > JetEvaluator::kMaxOrder) throw Error("ck_norm_at: order must be in 0..4");
  require_finite(x);
  CkNorm n = norm_from_jet(eval_jet(e, x, k), k);
  n.argmax.assign(x.begin(), x.end());
  return n;
}

CkNorm ck_norm_over(const Expr& e, const CompactBox& X, int k) {
  if (k < 0 || k > JetEvaluator::kMaxOrder) throw Error("ck_norm_over: order must be in 0..4");
  if (e.arity() > X.dim()) throw Error("ck_norm_over: box dimension below expression arity");
  const JetEvaluator jet(e.with_arity(X.dim()), k);
  const std::size_t total = X.grid_size();
  const std::size_t chunk = 4096;
  const std::size_t chunks = (total + chunk - 1) / chunk;

  struct Best {
    double total = -1.0;
    std::size_t index = 0;
    std::vector<double> parts;
    std::size_t samples = 0;
  };
  std::vector<Best> best(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Best& b = best[c];
    const std::size_t end = std::min(total, (c + 1) * chunk);
    for (std::size_t f = c * chunk; f < end; ++f) {
      const Point p = X.grid_point(f);
      if (!X.contains(p)) continue;
      ++b.samples;
      const JetK j = jet(p);
      std::vector<double> parts = jet_part_norms(j);
      double t = 0.0;
      for (double v : parts) t += v;
      if (t > b.total) {
        b.total = t;
        b.index = f;
        b.parts = std::move(parts);
      }
    }
  });

  CkNorm n;
  n.k = k;
  n.over_set = true;
  n.grid_lower_bound = true;
  n.parts.assign(static_cast<std::size_t>(k + 1), 0.0);
  double winner = -1.0;
  for (const Best& b : best) {
    n.samples += b.samples;
    // chunks are visited in index order, so ties keep the first grid point
    if (b.total > winner) {
      winner = b.total;
      n.total = b.total;
      n.parts = b.parts;
      n.argmax = X.grid_point(b.index);
    }
  }
  if (n.samples == 0) throw Error("ck_norm_over: the grid has no samples inside the set");
  return n;
}

GateResult perturbation_gate(const Expr& f, const Expr& g, const CompactBox& X, int k, double bound) {
  const int n = std::max(f.arity(), g.arity());
  if (f.arity() != g.arity()) throw Error("perturbation_gate: f and g must have the same arity");
  GateResult r;
  r.detail = ck_norm_over(g.with_arity(n) - f.with_arity(n), X, k);
  r.norm = r.detail.total;
  r.bound = bound;
  r.margin = bound - r.norm;
  r.passed = r.norm < bound;
  return r;
}

}  // namespace msl
