#pragma once

// Random inputs for property tests. Every generated function comes with an
// independent closure evaluator or an analytic bound, so tests never need the
// library to grade itself.

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "msl/normalize.hpp"

namespace gen {

using Rng = std::mt19937_64;

struct RandomFunction {
  std::string text;
  int arity = 0;
  std::function<double(std::span<const double>)> eval;
};

/// Random grammar expression of bounded size. Denominators have the form
/// c + q^2 with c >= 0.5, so the function is smooth everywhere.
RandomFunction random_expression(Rng& rng, int arity, int depth = 3);

/// A sum of monomials of degree <= 3 and sine terms, scaled so that the
/// analytic bound on its C^2 norm over B(r) equals `bound`.
struct Perturbation {
  std::string text;
  double c2_bound = 0.0;  // upper bound of |p| + |Dp| + |D^2 p| on B(r)
  double c1_bound = 0.0;  // upper bound of |p| + |Dp| on B(r)
};

Perturbation random_perturbation(Rng& rng, int arity, double r, double bound);

/// Model quadratic sum (-1)^eps_i x_i^2 + c as text.
std::string model_text(const std::vector<int>& signs, double offset);

std::string number(double v);

/// Polynomial in two variables with every monomial x1^i x2^j, i + j <= degree,
/// and coefficients uniform in [-1, 1].
RandomFunction random_polynomial2(Rng& rng, int degree);

/// Quadratic times a bump supported inside [-1, 1], with coefficients of
/// size at most `amplitude`.
msl::BumpPerturbation random_bump(Rng& rng, double amplitude);

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace gen
