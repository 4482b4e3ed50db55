#pragma once

// Stability classification of functions R -> R: critical locus, end
// behaviour, improper values and the resulting stability flags.
//
// Values are carried in long double. Critical values of decaying functions
// such as exp(-x^2) sin(x) reach 1e-390 inside moderate windows, which is
// below the double range, so separations are certified against per-point
// rounding bounds rather than one absolute tolerance.

#include <optional>
#include <string>
#include <vector>

#include "msl/critical.hpp"
#include "msl/expr.hpp"

namespace msl {

struct Critical1D {
  long double x = 0;
  long double value = 0;
  /// Bound on the rounding and location error of `value`.
  long double value_error = 0;
  long double second_derivative = 0;
  long double residual = 0;  // |f'(x)|
  int morse_index = 0;

  CriticalPoint as_point() const;
};

struct CriticalLocus1D {
  double window = 0;   // the locus covers [-window, window]
  double density = 0;  // samples per unit length
  std::vector<Critical1D> points;  // nondegenerate, strictly increasing in x
  std::vector<long double> degenerate;  // critical points with vanishing f''
  bool derivative_identically_zero = false;
  bool complete_in_window = false;
  std::string incomplete_reason;
  std::size_t rescan_count = 0;

  std::vector<long double> values() const;
};

struct LocusOptions {
  double density = 1e4;
  /// A root x* of f' is nondegenerate when |f''(x*)| h exceeds this fraction
  /// of max |f'(x* +- h)|, h the grid step.
  double nondeg_ratio = 1e-6;
  bool rescan = true;
};

/// Sign-change scan of f' on [-W, W] with long double bisection, plus
/// recovery of root pairs hidden between two samples.
CriticalLocus1D critical_locus(const Expr& f, double W, const LocusOptions& options = {});

/// a_1 < ... < a_m: the root of 2x sin x - cos x in (n pi, (2n+1) pi / 2).
std::vector<long double> tan_equation_roots(int m);

enum class EndKind { limit, diverges_up, diverges_down, oscillating, inconclusive };

const char* to_string(EndKind k);

struct EndWindow {
  long double lo = 0, hi = 0;      // x range, |x| in [2^k, 2^{k+1}]
  long double min = 0, max = 0;    // sampled f range
};

struct EndSide {
  int direction = 1;  // +1 for x -> +inf, -1 for x -> -inf
  EndKind kind = EndKind::inconclusive;
  long double liminf = 0;
  long double limsup = 0;
  std::optional<long double> limit;
  /// Uncertainty of `limit`: oscillation over the last windows plus midpoint drift.
  long double limit_uncertainty = 0;
  std::vector<EndWindow> windows;
};

struct EndBehavior {
  EndSide plus;
  EndSide minus;
};

struct EndOptions {
  int k_max = 20;
  int samples_per_window = 4096;
  double tol_lim = 1e-9;
};

EndBehavior end_behavior(const Expr& f, const EndOptions& options = {});

enum class Tri { yes, no, inconclusive };

const char* to_string(Tri t);
Tri tri_and(Tri a, Tri b);

struct Flag {
  Tri value = Tri::inconclusive;
  /// Smallest separation backing the claim (0 when none applies) and its
  /// ratio to the uncertainty it had to beat.
  long double margin = 0;
  long double margin_ratio = 0;
  std::string basis;
};

/// One connected piece of Z(f) or Z(f|_Sigma): a point or a closed interval.
struct ValueSet {
  long double lo = 0;
  long double hi = 0;
  long double uncertainty = 0;
  bool is_point() const { return lo == hi; }
};

struct EndSigma {
  enum class State { empty, clusters, inconclusive } state = State::inconclusive;
  std::vector<ValueSet> clusters;
  /// For `empty`: distance from the outermost critical point to the window edge.
  long double margin = 0;
  std::string basis;
};

struct StabilityReport {
  CriticalLocus1D locus;
  EndBehavior ends;
  std::vector<ValueSet> z_f;        // empty when both ends diverge
  bool z_f_known = false;
  EndSigma z_sigma_plus;
  EndSigma z_sigma_minus;
  std::vector<long double> l_f;     // actual limits at +-inf
  std::vector<long double> delta;   // critical values in the window

  Flag is_morse;
  Flag locally_stable;
  Flag infinitesimally_stable;
  Flag quasi_proper;
  Flag dimca_stable;
  Flag strongly_stable;

  bool any_inconclusive() const;
};

struct ClassifyOptions {
  LocusOptions locus;
  EndOptions ends;
  double tol_sep = 1e-6;
};

StabilityReport classify(const Expr& f, double W, const ClassifyOptions& options = {});

}  // namespace msl
