#pragma once

// Normalizing diffeomorphisms for a perturbation g of a Morse function f:
// the target shift psi_g, the end shift Psi^1 (n = 1), the translation flow
// Psi^2, and a numerical check that psi_g^{-1} o g o Psi^1 o Psi^2 has the
// critical points and critical values of f.

#include <optional>
#include <string>
#include <vector>

#include "msl/expr.hpp"
#include "msl/jets.hpp"

namespace msl {

/// Value and first two derivatives of a function of one variable.
struct Jet2 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Even smooth bump: 1 on |y| <= 1, 0 on |y| >= 2, decreasing in |y|.
/// Transition s(t) = sigma(t) / (sigma(t) + sigma(1 - t)) with
/// sigma(t) = t exp(-0.1 / t), whose slope peaks at 1.2.
struct BumpRho {
  static Jet2 jet(double y);
  static double value(double y);
  static double derivative(double y);
};

struct RhoCertificate {
  std::size_t samples = 0;
  double min_value = 0.0;
  double max_value = 0.0;
  double max_slope = 0.0;
  double plateau_error = 0.0;  // max |rho - 1| on |y| <= 1
  double tail_error = 0.0;     // max |rho| on |y| >= 2
  bool symmetric = false;
  bool monotone = false;
  bool holds = false;
};

/// Samples [-2.5, 2.5] and checks every stated property of BumpRho.
RhoCertificate certify_rho(std::size_t samples = 100000);

/// gamma = (nu / 4)^{4 / nu}.
double gamma_for(double nu);

/// One critical value y of f, its perturbed value y_g and the radius nu.
struct ValueShift {
  double y = 0.0;
  double y_g = 0.0;
  double nu = 0.0;
};

/// psi(y) = y + (y_g - y) rho(4 (y - y_i) / nu_i) near each y_i, identity
/// elsewhere.
class TargetShift {
 public:
  TargetShift() = default;
  explicit TargetShift(std::vector<ValueShift> shifts);

  const std::vector<ValueShift>& shifts() const { return shifts_; }

  double operator()(double y) const;
  double derivative(double y) const;
  double inverse(double z) const;
  double inverse_derivative(double z) const;
  /// True where psi is the identity by construction (outside every
  /// (y_i - nu_i / 2, y_i + nu_i / 2)).
  bool identity_at(double y) const;
  /// Smallest psi' over `samples` points of each support.
  double min_derivative(std::size_t samples = 20001) const;

 private:
  const ValueShift* active(double y) const;
  std::vector<ValueShift> shifts_;  // sorted by y
};

/// Validates the data and builds psi. Throws HypothesisError if two intervals
/// (y_i - nu_i, y_i + nu_i) meet or a shift reaches nu_i / 8.
TargetShift build_psi(std::vector<ValueShift> shifts);

/// A box of the cover. Boxes around a critical point carry their radius nu.
struct AdmissibleBox {
  CompactBox box;
  std::optional<double> nu;
};

/// mu = gamma(nu) / (4 n) on critical boxes, min |Df| / 2 on the others.
/// Throws HypothesisError when a non-critical box meets a critical point.
std::vector<double> admissible_perturbation(const Expr& f, const std::vector<AdmissibleBox>& boxes);

struct FlowOptions {
  double step = 1e-3;
  /// Map points whose straight orbit stays in a core by plain translation.
  bool shortcut = true;
};

/// lambda(w) = rho(|w - center| / core_radius) times a constant displacement.
struct FlowBump {
  Point center;
  Point displacement;
  double core_radius = 0.0;
};

/// Time-1 map of X(w) = sum_i lambda_i(w) d_i.
class FlowPsi2 {
 public:
  struct Image {
    Point point;
    std::vector<double> jacobian;  // row-major n x n
    double det = 1.0;
    bool fixed = false;     // outside every support
    bool straight = false;  // orbit inside a core
  };

  FlowPsi2() = default;
  FlowPsi2(int dim, std::vector<FlowBump> bumps, FlowOptions options = {});

  int dim() const { return dim_; }
  const std::vector<FlowBump>& bumps() const { return bumps_; }

  Point field(std::span<const double> w) const;
  Image map(std::span<const double> x) const;
  Point operator()(std::span<const double> x) const { return map(x).point; }
  /// Time-1 map of -X.
  Point inverse(std::span<const double> x) const;
  bool in_support(std::span<const double> x) const;

 private:
  Image integrate(std::span<const double> x, double direction) const;
  int dim_ = 0;
  std::vector<FlowBump> bumps_;
  FlowOptions options_;
};

/// Flow moving each x_i to x_{i,g}. Throws HypothesisError if some
/// |x_{i,g} - x_i| reaches its core radius or two supports meet.
FlowPsi2 build_flow_psi2(const std::vector<Point>& x_f, const std::vector<Point>& x_g,
                         const std::vector<double>& core_radii, FlowOptions options = {});

/// q(x - center) rho(2 (x - center) / halfwidth), q a polynomial; supported in
/// (center - halfwidth, center + halfwidth).
struct BumpPerturbation {
  double center = 0.0;
  double halfwidth = 1.0;
  std::vector<double> coefficients;  // q(t) = sum c_j t^j

  Jet2 jet(double x) const;
  std::string describe() const;
};

/// An expression of one variable plus compactly supported bumps.
class Function1D {
 public:
  Function1D() = default;
  explicit Function1D(const Expr& base, std::vector<BumpPerturbation> bumps = {});

  const Expr& base() const { return base_; }
  const std::vector<BumpPerturbation>& bumps() const { return bumps_; }

  Jet2 jet(double x) const;
  double operator()(double x) const { return jet(x).value; }
  std::string describe() const;

 private:
  Expr base_;
  std::vector<BumpPerturbation> bumps_;
  std::shared_ptr<const JetEvaluator> eval_;
};

struct Critical1DPoint {
  double x = 0.0;
  double value = 0.0;
  double second_derivative = 0.0;
};

/// Sign changes of h' on [-W, W], refined by bisection.
std::vector<Critical1DPoint> critical_points_1d(const Function1D& h, double W, double density);

/// Psi^1 for n = 1: identity on [-K, K]; on an end ray where f is monotone
/// it sends x to the point x' of the same ray with
/// f(x') = f(x) + (psi(f(x)) - f(x)) eta(|x|), eta rising from 0 at K to 1
/// at K + band.
class EndShift1D {
 public:
  EndShift1D() = default;
  EndShift1D(Function1D f, TargetShift psi, double K, double band, bool active_plus, bool active_minus);

  bool active(int direction) const { return direction > 0 ? plus_ : minus_; }
  bool is_identity() const { return !plus_ && !minus_; }
  double K() const { return K_; }
  double band() const { return band_; }

  double operator()(double x) const;
  double derivative(double x) const;

 private:
  double target(double x, double* dtarget) const;
  double solve_on_ray(double x, double value) const;
  Function1D f_;
  TargetShift psi_;
  double K_ = 0.0;
  double band_ = 1.0;
  bool plus_ = false;
  bool minus_ = false;
};

/// Decides per end whether f^{-1} of the shifted value bands reaches beyond
/// K (sampling |x| up to 2^{k_max + 1}) and builds Psi^1. Throws Error when an
/// active end ray is not monotone or does not cover the bands.
EndShift1D build_end_shift_psi1(const Function1D& f, const TargetShift& psi, double K, double band = 1.0,
                                int k_max = 20);

struct NormalizeOptions {
  double window = 8.0;       // critical points are matched in [-window, window]
  double density = 2000.0;   // scan samples per unit length
  double nu_cap = 0.5;
  /// Core radius of every flow bump; 0 uses gamma(nu_i) / 8.
  double core_radius = 0.0;
  /// Psi^1 is the identity on [-end_K, end_K]; 0 uses the window.
  double end_K = 0.0;
  double end_band = 1.0;
  FlowOptions flow;
};

struct NormalizationData {
  Function1D f;
  Function1D g;
  std::vector<Critical1DPoint> sigma_f;
  std::vector<Critical1DPoint> sigma_g;  // matched to sigma_f by index
  std::vector<double> nu;
  std::vector<double> core;
  std::vector<double> improper_values;  // limits, liminf and limsup of f at the ends
  TargetShift psi;
  EndShift1D psi1;
  FlowPsi2 psi2;

  /// psi^{-1}(g(Psi^1(Psi^2(x)))) and its derivative.
  Jet2 composite(double x) const;
};

/// Locates and matches the critical points of f and g, picks nu_i as the
/// smaller of nu_cap and half the distance from y_i to the other critical
/// and improper values, then builds psi, Psi^1 and Psi^2. Throws
/// HypothesisError when g is not admissible for the construction.
NormalizationData normalize_1d(const Function1D& f, const Function1D& g, const NormalizeOptions& options = {});

struct NormalizationResiduals {
  std::vector<double> sigma_composite;
  std::vector<double> delta_composite;
  bool count_matches = false;
  double sigma_error = 0.0;  // max |x_C - x_f|
  double delta_error = 0.0;  // max |C(x_C) - f(x_f)|
  double c0_residual = 0.0;  // max |C - f| on the grid
  double c0_perturbation = 0.0;  // max |g - f| on the grid
  double psi_min_derivative = 0.0;
  double psi2_min_det = 0.0;
  double psi1_min_derivative = 0.0;
  std::size_t identity_checks = 0;
  std::size_t identity_violations = 0;
  std::size_t grid_points = 0;
  double tolerance = 1e-8;

  bool sigma_ok() const { return count_matches && sigma_error <= tolerance; }
  bool delta_ok() const { return count_matches && delta_error <= tolerance; }
  bool c0_ok() const { return c0_residual <= 5.0 * c0_perturbation; }
  bool diffeo_ok() const { return psi_min_derivative > 0 && psi2_min_det > 0 && psi1_min_derivative > 0; }
  bool passed() const { return sigma_ok() && delta_ok() && c0_ok() && diffeo_ok() && identity_violations == 0; }
};

/// Samples the composite on a grid of [-window, window] and records the
/// residuals; never throws for failed checks.
NormalizationResiduals verify_normalization(const NormalizationData& data, const NormalizeOptions& options = {},
                                            double tolerance = 1e-8);

}  // namespace msl
