#pragma once

// Behaviour of functions on R^n near infinity: an empirical test that the
// origin is not an improper value of the gradient, the sphere-tangent flow
// that trivializes f over a value band, the classification of the model
// quadratics G_k, and a scan of random linear perturbations.

#include <cstdint>
#include <string>
#include <vector>

#include "msl/critical.hpp"
#include "msl/expr.hpp"

namespace msl {

/// Deterministic points of the sphere of radius R in R^n: +-R (n = 1),
/// uniform angles (n = 2), a Fibonacci lattice (n = 3), a product grid of
/// hyperspherical angles (n >= 4).
std::vector<Point> sphere_points(int n, double R, std::size_t samples);

struct GradientProfileOptions {
  std::vector<double> radii = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  std::size_t sphere_samples = 10000;
  double tol_eps = 1e-3;
};

struct GradientProfile {
  enum class Verdict { origin_excluded, inconclusive };

  std::vector<double> radii;
  std::vector<double> min_grad;  // per radius, over the sampled sphere
  std::vector<Point> argmin;
  /// tail_min[j] = min over radii i >= j of min_grad[i].
  std::vector<double> tail_min;
  double epsilon_hat = 0.0;  // max_j tail_min[j]
  double r_star = 0.0;       // first radius whose tail minimum is epsilon_hat
  double tol_eps = 0.0;
  Verdict verdict = Verdict::inconclusive;

  bool excluded() const { return verdict == Verdict::origin_excluded; }
};

const char* to_string(GradientProfile::Verdict v);

/// Sphere minima of |grad f| over the radius schedule. The origin counts as
/// excluded from Z(grad f) when epsilon_hat >= tol_eps. Gradients that
/// overflow are recorded as +inf.
GradientProfile gradient_improper_test(const Expr& f, const GradientProfileOptions& options = {});

/// G_k = x_1^2 + ... + x_k^2 - x_{k+1}^2 - ... - x_n^2.
Expr model_gk(int n, int k);

struct GkRecord {
  int n = 0;
  int k = 0;
  bool morse = false;
  int morse_index = 0;
  bool proper = false;
  bool quasi_proper = false;
  bool strongly_stable = false;
  bool stable = false;
  std::string stable_basis;
  /// min |G_k| / R^2 over each sampled sphere; about 1 when proper.
  std::vector<double> min_abs_ratio;
  /// |G_k| along R (e_1 + e_n) / sqrt 2 for every radius; all 0 on the null cone.
  std::vector<double> null_cone_values;
  bool zero_is_improper = false;
  GradientProfile profile;
};

/// Properness, quasi-properness, strong stability and stability of G_k,
/// each backed by a numeric check.
GkRecord classify_Gk(int n, int k, const GradientProfileOptions& options = {});

struct TrivializeOptions {
  double half_range = 0.04;  // t runs over [q - half_range, q + half_range]
  double epsilon = 0.2;      // value band; the field is cut off outside q +- epsilon / 2
  double step = 1e-3;
  double tol_tangent = 1e-8;
  double tol_flow = 1e-6;
};

struct TrivializationOrbit {
  Point start;
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<double> value_residual;  // |f(Phi(p, t)) - t|
  std::vector<double> radius_drift;    // ||Phi(p, t)| - |p||
  double max_value_residual = 0.0;
  double max_radius_drift = 0.0;
};

struct Trivialization {
  double q = 0.0;
  double R = 0.0;
  std::vector<TrivializationOrbit> orbits;
  double max_value_residual = 0.0;
  double max_radius_drift = 0.0;
  double tol_flow = 0.0;
  bool passed = false;
};

/// Tangential part of grad f at p and the field T / |T|^2. Throws
/// TangentDegeneracyError when |T| <= tol_tangent.
Point tangent_field(const Expr& f, std::span<const double> p, double tol_tangent = 1e-8);

/// Integrates dp/dt = rho(4 (f(p) - q) / epsilon) T / |T|^2 from each start
/// point (on f = q, outside B(R)) over the t range with RK4.
Trivialization end_trivialize(const Expr& f, double q, double R, const std::vector<Point>& starts,
                              const TrivializeOptions& options = {});

/// Up to `count` points of f = q with |p| in (R, 8R], found by bisection
/// along arcs of deterministic spheres.
std::vector<Point> level_points(const Expr& f, double q, double R, std::size_t count);

/// splitmix64 finalizer; seeds the per-trial generators.
std::uint64_t splitmix64(std::uint64_t x);

struct ScanOptions {
  std::size_t trials = 20;
  double window = 10.0;
  std::uint64_t seed = 7;
  GradientProfileOptions profile;
  /// Newton starts per axis for n >= 2.
  int starts_per_axis = 21;
  double tol_nondeg = 1e-8;
  double tol_value = 1e-9;
};

struct ScanTrial {
  Point a;
  std::size_t critical_points = 0;
  double min_abs_eigenvalue = 0.0;  // +inf without critical points
  double min_value_gap = 0.0;       // +inf with fewer than two
  bool locally_stable = false;
  std::string failure;
  double epsilon_hat = 0.0;
  bool origin_excluded = false;
  bool passed = false;
};

struct ScanStatistics {
  std::size_t trials = 0;
  std::size_t passes = 0;
  double pass_fraction = 0.0;
  std::uint64_t seed = 0;
  double window = 0.0;
  std::vector<ScanTrial> results;
  std::vector<std::size_t> failing;
};

/// For random a in the unit ball, checks local stability of
/// f_a = f + sum a_i x_i in [-W, W]^n and runs gradient_improper_test on f_a.
/// Trial i draws a from mt19937_64(splitmix64(seed ^ i)).
ScanStatistics linear_perturbation_scan(const Expr& f, const ScanOptions& options = {});

/// Critical points in [-W, W]^n from Newton runs started on a
/// starts_per_axis^n grid, merged within 1e-6.
std::vector<CriticalPoint> multistart_critical_points(const Expr& f, double W, int starts_per_axis = 21);

/// Local stability of f in [-W, W]^n: nondegenerate critical points with
/// distinct values (n = 1 by sign-change scan, else multistart Newton).
ScanTrial local_stability(const Expr& f, const ScanOptions& options);

}  // namespace msl
