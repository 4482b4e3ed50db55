#pragma once

// Whitney C^k norms of a function at a point and over a sampled compact set.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "msl/expr.hpp"

namespace msl {

/// Axis-aligned box sampled on a uniform grid, optionally masked to the
/// closed ball of radius `ball_radius` around the box center.
struct CompactBox {
  static constexpr int kDefaultSamples = 101;

  Point lower;
  Point upper;
  int samples_per_axis = kDefaultSamples;
  bool ball_mask = false;
  double ball_radius = 0.0;

  static CompactBox box(Point lower, Point upper, int samples_per_axis = kDefaultSamples);
  /// [-r, r]^n masked to |x| <= r.
  static CompactBox ball(int n, double r, int samples_per_axis = kDefaultSamples);

  int dim() const { return static_cast<int>(lower.size()); }
  /// samples_per_axis^n, before masking.
  std::size_t grid_size() const;
  Point center() const;
  /// Grid point for a flat row-major index; ignores the mask.
  Point grid_point(std::size_t flat) const;
  bool contains(std::span<const double> x) const;
  /// Grid points that survive the mask, in row-major order.
  std::vector<Point> points() const;
  /// Same box with a different sample count.
  CompactBox resampled(int samples_per_axis) const;
};

struct CkNorm {
  int k = 0;
  bool over_set = false;
  /// Over a set the value is a grid maximum: a lower bound of the true sup.
  bool grid_lower_bound = false;
  double total = 0.0;
  /// parts[j] = |D^j h| for j = 0..k at the maximizing sample.
  std::vector<double> parts;
  Point argmax;
  std::size_t samples = 0;
};

/// Euclidean norm of the tensor of k-th partials at x; k = 0 gives |e(x)|.
double dk_norm(const Expr& e, std::span<const double> x, int k);

/// Norms of each order from an already evaluated jet.
std::vector<double> jet_part_norms(const JetK& jet);

CkNorm ck_norm_at(const Expr& e, std::span<const double> x, int k);
CkNorm ck_norm_over(const Expr& e, const CompactBox& X, int k);

struct GateResult {
  bool passed = false;
  double norm = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - norm
  CkNorm detail;
};

/// Checks |g - f|_{k,X} < bound on the grid of X.
GateResult perturbation_gate(const Expr& f, const Expr& g, const CompactBox& X, int k, double bound);

}  // namespace msl
