#include "msl/critical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "msl/parallel.hpp"
#include "msl/program.hpp"

namespace msl {
namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Program gradient_program(const Expr& g) {
  std::vector<Expr> partials;
  for (int i = 1; i <= g.arity(); ++i) partials.push_back(differentiate(g, i));
  return Program(partials);
}

void check_model(const Expr& g, const ModelQuadratic& model, double r) {
  if (model.dim() < 1) throw Error("model quadratic needs at least one variable");
  for (int s : model.signs)
    if (s != 0 && s != 1) throw Error("model signs must be 0 or 1");
  if (g.arity() != model.dim()) throw Error("g and the model quadratic must have the same arity");
  if (!(r > 0.0 && r < 1.0)) throw HypothesisError("hypothesis not met: the radius must lie in (0, 1)");
}

GateResult gate(const Expr& g, const ModelQuadratic& model, double r, const CertifyOptions& options) {
  const int n = model.dim();
  const CompactBox ball = CompactBox::ball(n, r, gate_samples_for(n, options));
  const double bound = options.gate_factor * r / n;
  GateResult result = perturbation_gate(model.expr(), g, ball, 2, bound);
  if (!result.passed) {
    throw HypothesisError("hypothesis not met: |g - f|_{2,B(r)} = " + std::to_string(result.norm) +
                          " is not below " + std::to_string(bound));
  }
  return result;
}

}  // namespace

Expr ModelQuadratic::expr() const {
  const int n = dim();
  Expr e = Expr::constant(offset, n);
  for (int i = 0; i < n; ++i) {
    const Expr sq = pow(Expr::variable(i + 1, n), 2);
    e = signs[static_cast<std::size_t>(i)] ? e - sq : e + sq;
  }
  return e;
}

int gate_samples_for(int n, const CertifyOptions& options) {
  if (options.gate_samples > 0) return options.gate_samples;
  int s = CompactBox::kDefaultSamples;
  while (s > 3 && std::pow(static_cast<double>(s), n) > static_cast<double>(options.gate_point_cap)) s -= 2;
  return s;
}

std::vector<double> symmetric_eigenvalues(std::span<const double> matrix, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = matrix[static_cast<std::size_t>(i * n + j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return out;
}

CriticalPoint morse_data(const Expr& g, std::span<const double> x) {
  const JetK jet = eval_jet(g, x, 2);
  CriticalPoint p;
  p.location.assign(x.begin(), x.end());
  p.value = jet.value;
  p.grad_residual = norm2(jet.gradient());
  p.hessian_eigenvalues = symmetric_eigenvalues(jet.hessian(), g.arity());
  p.morse_index = static_cast<int>(
      std::count_if(p.hessian_eigenvalues.begin(), p.hessian_eigenvalues.end(), [](double l) { return l < 0; }));
  return p;
}

CriticalPoint contraction_solve(const Expr& g, const ModelQuadratic& model, double r, const CertifyOptions& options) {
  check_model(g, model, r);
  gate(g, model, r, options);

  const int n = model.dim();
  const Program dg = gradient_program(g);
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> grad(static_cast<std::size_t>(n));
  std::vector<double> steps;
  double envelope = 1.0;
  for (int k = 1; k <= options.max_steps; ++k) {
    envelope *= r / 2.0;
    dg.run<double>(x, grad);
    double step2 = 0.0;
    for (int i = 0; i < n; ++i) {
      // (df)^{-1} is diag(1 / (2 (-1)^{eps_i}))
      const double sign = model.signs[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
      const double delta = grad[static_cast<std::size_t>(i)] / (2.0 * sign);
      x[static_cast<std::size_t>(i)] -= delta;
      step2 += delta * delta;
    }
    const double step = std::sqrt(step2);
    steps.push_back(step);
    if (!(step < envelope)) {
      throw NonContractionError("contraction step " + std::to_string(k) + " has norm " + std::to_string(step) +
                                ", not below (r/2)^k = " + std::to_string(envelope));
    }
    if (step < options.step_tol) break;
  }
  CriticalPoint p = morse_data(g, x);
  p.cert_radius = r;
  p.iterates = std::move(steps);
  return p;
}

UniquenessCertificate certify_unique(const Expr& g, const ModelQuadratic& model, double r,
                                     const CertifyOptions& options) {
  check_model(g, model, r);
  const GateResult gated = gate(g, model, r, options);
  UniquenessCertificate cert;
  cert.point = contraction_solve(g, model, r, options);
  cert.gate_norm = gated.norm;
  cert.gate_bound = gated.bound;

  const int n = model.dim();
  std::size_t per_axis;
  if (n <= 2) {
    per_axis = static_cast<std::size_t>(std::ceil(2.0 / options.scan_step));
  } else {
    per_axis = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(options.scan_cell_cap), 1.0 / n)));
  }
  per_axis = std::max<std::size_t>(per_axis, 2);
  const double edge = 2.0 * r / static_cast<double>(per_axis);
  const double half_diag = 0.5 * edge * std::sqrt(static_cast<double>(n));
  const double lipschitz = 2.0 + r / n;
  const double threshold = half_diag * lipschitz;
  cert.exclusion_radius = std::sqrt(static_cast<double>(n)) * threshold / (2.0 - r);

  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= per_axis;
  const Program dg = gradient_program(g);
  const Point& xs = cert.point.location;

  const std::size_t chunk = 8192;
  const std::size_t chunks = (total + chunk - 1) / chunk;
  struct Tally {
    std::size_t scanned = 0, suspicious = 0, failing = 0;
    std::optional<Point> witness;
  };
  std::vector<Tally> tallies(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Tally& t = tallies[c];
    std::vector<double> center(static_cast<std::size_t>(n));
    std::vector<double> grad(static_cast<std::size_t>(n));
    const std::size_t end = std::min(total, (c + 1) * chunk);
    for (std::size_t flat = c * chunk; flat < end; ++flat) {
      std::size_t rest = flat;
      double radius2 = 0.0;
      for (int i = n; i-- > 0;) {
        const std::size_t j = rest % per_axis;
        rest /= per_axis;
        center[static_cast<std::size_t>(i)] = -r + edge * (static_cast<double>(j) + 0.5);
        radius2 += center[static_cast<std::size_t>(i)] * center[static_cast<std::size_t>(i)];
      }
      const double radius = std::sqrt(radius2);
      if (radius > r + half_diag) continue;  // cell misses the ball
      if (radius > r) {
        // Nearest point of the closed ball; projection does not increase
        // distances, so every ball point of the cell is within half_diag.
        for (double& v : center) v *= r / radius;
      }
      ++t.scanned;
      dg.run<double>(center, grad);
      if (norm2(grad) > threshold) continue;
      ++t.suspicious;
      double d2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = center[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(i)];
        d2 += d * d;
      }
      if (std::sqrt(d2) > cert.exclusion_radius) {
        ++t.failing;
        if (!t.witness) t.witness = center;
      }
    }
  });
  for (const Tally& t : tallies) {
    cert.cells_scanned += t.scanned;
    cert.suspicious_cells += t.suspicious;
    cert.failing_cells += t.failing;
    if (!cert.witness && t.witness) cert.witness = t.witness;
  }
  cert.unique = cert.failing_cells == 0;
  return cert;
}

PerturbationBounds perturbation_bounds(const Expr& g, const Expr& h, const ModelQuadratic& model, double r,
                                       const CompactBox& U, const CertifyOptions& options) {
  PerturbationBounds b;
  b.g_point = contraction_solve(g, model, r, options);
  b.h_point = contraction_solve(h, model, r, options);
  if (!U.contains(b.g_point.location) || !U.contains(b.h_point.location))
    throw HypothesisError("hypothesis not met: a critical point lies outside U");

  const int n = model.dim();
  b.norm_g_minus_h = ck_norm_over(g - h, U, 1).total;
  b.norm_g = ck_norm_over(g, U, 1).total;
  double d2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = b.g_point.location[static_cast<std::size_t>(i)] - b.h_point.location[static_cast<std::size_t>(i)];
    d2 += d * d;
  }
  b.dist_x = std::sqrt(d2);
  b.dist_y = std::abs(b.g_point.value - b.h_point.value);
  const double rn = std::sqrt(static_cast<double>(n));
  b.bound_x = rn * b.norm_g_minus_h;
  b.bound_y = (rn * b.norm_g + 1.0) * b.norm_g_minus_h;
  // g = h gives 0 < 0; the estimates are strict only for distinct critical points
  b.holds_x = b.dist_x < b.bound_x || (b.dist_x == 0.0 && b.bound_x == 0.0);
  b.holds_y = b.dist_y < b.bound_y || (b.dist_y == 0.0 && b.bound_y == 0.0);
  b.both_hold = b.holds_x && b.holds_y;
  return b;
}

CriticalPoint newton_refine(const Expr& g, std::span<const double> x0, const NewtonOptions& options) {
  const int n = g.arity();
  if (static_cast<int>(x0.size()) != n) throw Error("newton_refine: start point dimension differs from arity");
  require_finite(x0, "start point");
  const JetEvaluator jet(g, 2);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = x0[static_cast<std::size_t>(i)];
  for (int it = 0; it < options.max_iter; ++it) {
    std::vector<double> xv(x.data(), x.data() + n);
    const JetK j = jet(xv);
    Eigen::VectorXd grad(n);
    Eigen::MatrixXd hess(n, n);
    for (int a = 0; a < n; ++a) {
      grad(a) = j.gradient()[static_cast<std::size_t>(a)];
      for (int b = 0; b < n; ++b) hess(a, b) = j.hessian()[static_cast<std::size_t>(a * n + b)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
    const double lmin = eig.eigenvalues().cwiseAbs().minCoeff();
    if (lmin == 0.0) throw DegenerateError("singular Hessian during Newton iteration");
    const Eigen::VectorXd step = eig.eigenvectors() *
                                 (eig.eigenvalues().cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * grad));
    const bool small_grad = grad.norm() < options.tol_grad;
    if (small_grad && step.norm() < 1e-12 * (1.0 + x.norm())) {
      CriticalPoint p = morse_data(g, xv);
      double smallest = std::abs(p.hessian_eigenvalues.front());
      for (double l : p.hessian_eigenvalues) smallest = std::min(smallest, std::abs(l));
      if (smallest < options.tol_nondeg)
        throw DegenerateError("degenerate critical point: smallest |Hessian eigenvalue| " + std::to_string(smallest));
      return p;
    }
    x -= step;
    if (!x.allFinite()) throw DivergenceError("Newton iteration left the finite range");
  }
  throw DivergenceError("Newton iteration did not converge in " + std::to_string(options.max_iter) + " steps");
}

}  // namespace msl
