#pragma once

// Critical points: the contraction iteration around a model quadratic, its
// uniqueness certificate and perturbation bounds, and a plain Newton refiner.

#include <optional>
#include <vector>

#include "msl/expr.hpp"
#include "msl/jets.hpp"

namespace msl {

/// f(w) = sum (-1)^{signs_i} w_i^2 + offset.
struct ModelQuadratic {
  std::vector<int> signs;
  double offset = 0.0;

  int dim() const { return static_cast<int>(signs.size()); }
  Expr expr() const;
};

struct CriticalPoint {
  Point location;
  double value = 0.0;
  int morse_index = 0;
  double grad_residual = 0.0;
  std::vector<double> hessian_eigenvalues;  // ascending
  std::optional<double> cert_radius;
  /// Step norms |x_k - x_{k-1}| for k = 1, 2, ...
  std::vector<double> iterates;
};

struct CertifyOptions {
  double gate_factor = 0.9;
  /// Grid for the C^2 gate on B(r); 0 picks the largest odd count with
  /// samples^n <= gate_point_cap (and at most 101).
  int gate_samples = 0;
  std::size_t gate_point_cap = 120000;
  double step_tol = 1e-14;
  int max_steps = 200;
  /// Uniqueness scan: cell edge r * scan_step (n <= 2), else capped cell count.
  double scan_step = 1.0 / 200.0;
  std::size_t scan_cell_cap = 160000;
};

/// Gate samples actually used for dimension n.
int gate_samples_for(int n, const CertifyOptions& options);

/// Runs x_{k+1} = x_k - (df)^{-1} dg(x_k) from x_0 = 0. Throws HypothesisError
/// if |g - f|_{2,B(r)} < gate_factor * r / n fails on the grid, and
/// NonContractionError if a step leaves the (r/2)^k envelope.
CriticalPoint contraction_solve(const Expr& g, const ModelQuadratic& model, double r,
                                const CertifyOptions& options = {});

struct UniquenessCertificate {
  bool unique = false;
  CriticalPoint point;
  double gate_norm = 0.0;
  double gate_bound = 0.0;
  std::size_t cells_scanned = 0;
  std::size_t suspicious_cells = 0;
  /// Cells that might hold a zero of dg but lie too far from the located point.
  std::size_t failing_cells = 0;
  /// Suspicious cells must have centers within this distance of the point.
  double exclusion_radius = 0.0;
  std::optional<Point> witness;  // center of the first failing cell
};

/// contraction_solve plus an exhaustive cell scan of B(r). A cell with center
/// c and half-diameter s can contain a zero of dg only if |dg(c)| <= s L with
/// L = 2 + r/n; such a cell must lie within sqrt(n) s L / (2 - r) of x*.
UniquenessCertificate certify_unique(const Expr& g, const ModelQuadratic& model, double r,
                                     const CertifyOptions& options = {});

struct PerturbationBounds {
  CriticalPoint g_point;
  CriticalPoint h_point;
  double dist_x = 0.0;
  double bound_x = 0.0;
  double dist_y = 0.0;
  double bound_y = 0.0;
  double norm_g_minus_h = 0.0;  // |g - h|_{1,U}, grid
  double norm_g = 0.0;          // |g|_{1,U}, grid
  bool holds_x = false;
  bool holds_y = false;
  bool both_hold = false;
};

/// Compares the critical points of g and h (both gated around `model` on
/// B(r)) against the two estimates. U must be convex and inside B(r).
PerturbationBounds perturbation_bounds(const Expr& g, const Expr& h, const ModelQuadratic& model, double r,
                                       const CompactBox& U, const CertifyOptions& options = {});

struct NewtonOptions {
  double tol_grad = 1e-10;
  double tol_nondeg = 1e-8;
  int max_iter = 100;
};

/// Newton's method on dg = 0. Throws DivergenceError if it does not converge
/// in max_iter steps and DegenerateError at a singular Hessian.
CriticalPoint newton_refine(const Expr& g, std::span<const double> x0, const NewtonOptions& options = {});

/// Value, gradient residual, Hessian eigenvalues and Morse index at x.
CriticalPoint morse_data(const Expr& g, std::span<const double> x);

/// Ascending eigenvalues of a symmetric row-major n x n matrix.
std::vector<double> symmetric_eigenvalues(std::span<const double> matrix, int n);

}  // namespace msl
