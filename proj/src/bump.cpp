#include <cmath>
#include <sstream>

#include "msl/normalize.hpp"

namespace msl {
namespace {

constexpr double kSigmaScale = 0.1;

struct Sigma {
  double v, d, dd;
};

// sigma(t) = t exp(-c/t) for t > 0; all derivatives vanish at 0.
Sigma sigma(double t) {
  if (t <= 0) return {0, 0, 0};
  const double e = std::exp(-kSigmaScale / t);
  const double q = kSigmaScale / t;
  return {t * e, e * (1 + q), e * q * q / t};
}

// s(t) = sigma(t) / (sigma(t) + sigma(1 - t)) on (0, 1).
Jet2 transition(double t) {
  if (t <= 0) return {0, 0, 0};
  if (t >= 1) return {1, 0, 0};
  const Sigma a = sigma(t);
  const Sigma b0 = sigma(1 - t);
  const double b = b0.v, db = -b0.d, ddb = b0.dd;
  const double S = a.v + b, dS = a.d + db;
  const double N = a.d * b - a.v * db;
  const double dN = a.dd * b - a.v * ddb;
  return {a.v / S, N / (S * S), (dN * S - 2 * N * dS) / (S * S * S)};
}

}  // namespace

Jet2 BumpRho::jet(double y) {
  const double a = std::abs(y);
  if (a <= 1) return {1, 0, 0};
  if (a >= 2) return {0, 0, 0};
  const Jet2 s = transition(2 - a);
  return {s.value, y > 0 ? -s.d1 : s.d1, s.d2};
}

double BumpRho::value(double y) { return jet(y).value; }

double BumpRho::derivative(double y) { return jet(y).d1; }

RhoCertificate certify_rho(std::size_t samples) {
  RhoCertificate c;
  c.samples = samples;
  c.min_value = 1;
  c.symmetric = true;
  c.monotone = true;
  const double lo = -2.5, hi = 2.5;
  double prev_right = 1;
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const Jet2 r = BumpRho::jet(y);
    c.min_value = std::min(c.min_value, r.value);
    c.max_value = std::max(c.max_value, r.value);
    c.max_slope = std::max(c.max_slope, std::abs(r.d1));
    if (std::abs(y) <= 1) c.plateau_error = std::max(c.plateau_error, std::abs(r.value - 1));
    if (std::abs(y) >= 2) c.tail_error = std::max(c.tail_error, std::abs(r.value));
    if (BumpRho::value(-y) != r.value) c.symmetric = false;
    if (y >= 0) {
      if (r.value > prev_right) c.monotone = false;
      prev_right = r.value;
    }
  }
  c.holds = c.min_value >= 0 && c.max_value <= 1 && c.max_slope < 1.5 && c.plateau_error <= 1e-15 &&
            c.tail_error <= 1e-15 && c.symmetric && c.monotone;
  return c;
}

double gamma_for(double nu) { return std::pow(nu / 4, 4 / nu); }

Jet2 BumpPerturbation::jet(double x) const {
  const double t = x - center;
  if (std::abs(t) >= halfwidth) return {0, 0, 0};
  const double k = 2 / halfwidth;
  const Jet2 r = BumpRho::jet(k * t);
  // Horner for q and its first two derivatives
  double q = 0, dq = 0, ddq = 0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    ddq = ddq * t + 2 * dq;
    dq = dq * t + q;
    q = q * t + *it;
  }
  const double rv = r.value, rd = r.d1 * k, rdd = r.d2 * k * k;
  return {q * rv, dq * rv + q * rd, ddq * rv + 2 * dq * rd + q * rdd};
}

std::string BumpPerturbation::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "bump(center=" << center << ", halfwidth=" << halfwidth << ", q=[";
  for (std::size_t i = 0; i < coefficients.size(); ++i) os << (i ? ", " : "") << coefficients[i];
  os << "])";
  return os.str();
}

Function1D::Function1D(const Expr& base, std::vector<BumpPerturbation> bumps)
    : base_(base), bumps_(std::move(bumps)) {
  if (base.arity() != 1) throw Error("Function1D needs an expression of arity 1");
  for (const auto& b : bumps_)
    if (!(b.halfwidth > 0) || !std::isfinite(b.center)) throw Error("bump needs a positive halfwidth");
  eval_ = std::make_shared<JetEvaluator>(base_, 2);
}

Jet2 Function1D::jet(double x) const {
  const JetK k = (*eval_)(std::span<const double>(&x, 1));
  Jet2 out{k.value, k.tensors[0][0], k.tensors[1][0]};
  for (const auto& b : bumps_) {
    const Jet2 p = b.jet(x);
    out.value += p.value;
    out.d1 += p.d1;
    out.d2 += p.d2;
  }
  return out;
}

std::string Function1D::describe() const {
  std::string s = to_string(base_);
  for (const auto& b : bumps_) s += " + " + b.describe();
  return s;
}

}  // namespace msl
