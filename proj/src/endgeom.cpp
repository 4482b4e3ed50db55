#include "msl/endgeom.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "msl/critical.hpp"
#include "msl/normalize.hpp"
#include "msl/oned.hpp"
#include "msl/parallel.hpp"
#include "msl/program.hpp"

namespace msl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Gradient of f compiled once.
class Gradient {
 public:
  explicit Gradient(const Expr& f) : n_(f.arity()) {
    std::vector<Expr> parts;
    for (int i = 1; i <= n_; ++i) parts.push_back(differentiate(f, i));
    program_ = std::make_shared<Program>(std::span<const Expr>(parts));
  }
  void operator()(std::span<const double> x, std::span<double> out) const { program_->run<double>(x, out); }
  int dim() const { return n_; }

 private:
  int n_;
  std::shared_ptr<Program> program_;
};

}  // namespace

// ---------------------------------------------------------------- sphere sampling

std::vector<Point> sphere_points(int n, double R, std::size_t samples) {
  if (n < 1) throw Error("sphere dimension must be positive");
  if (samples < 2) samples = 2;
  std::vector<Point> pts;
  if (n == 1) return {{R}, {-R}};
  if (n == 2) {
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples);
      pts.push_back({R * std::cos(t), R * std::sin(t)});
    }
    return pts;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3 - std::sqrt(5.0));
    for (std::size_t i = 0; i < samples; ++i) {
      const double z = 1 - 2 * (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
      const double r = std::sqrt(std::max(0.0, 1 - z * z));
      const double phi = golden * static_cast<double>(i);
      pts.push_back({R * r * std::cos(phi), R * r * std::sin(phi), R * z});
    }
    return pts;
  }
  // n - 2 polar angles in (0, pi) at cell midpoints, one azimuth in [0, 2 pi)
  const int axes = n - 1;
  const int m = std::max(2, static_cast<int>(std::floor(std::pow(static_cast<double>(samples), 1.0 / axes) + 1e-9)));
  std::vector<int> idx(axes, 0);
  for (;;) {
    Point p(n);
    double s = R;
    for (int a = 0; a < axes - 1; ++a) {
      const double th = std::numbers::pi * (idx[a] + 0.5) / m;
      p[a] = s * std::cos(th);
      s *= std::sin(th);
    }
    const double phi = 2 * std::numbers::pi * idx[axes - 1] / m;
    p[n - 2] = s * std::cos(phi);
    p[n - 1] = s * std::sin(phi);
    pts.push_back(std::move(p));
    int a = axes - 1;
    while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
    if (a < 0) break;
  }
  return pts;
}

// ---------------------------------------------------------------- gradient profile

const char* to_string(GradientProfile::Verdict v) {
  return v == GradientProfile::Verdict::origin_excluded ? "origin_excluded" : "inconclusive";
}

GradientProfile gradient_improper_test(const Expr& f, const GradientProfileOptions& options) {
  if (options.radii.empty()) throw Error("empty radius schedule");
  for (std::size_t i = 1; i < options.radii.size(); ++i)
    if (!(options.radii[i] > options.radii[i - 1])) throw Error("radii must increase");
  const Gradient grad(f);
  const int n = f.arity();
  GradientProfile p;
  p.radii = options.radii;
  p.tol_eps = options.tol_eps;
  for (double R : options.radii) {
    const auto pts = sphere_points(n, R, options.sphere_samples);
    std::vector<double> g(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      std::vector<double> out(static_cast<std::size_t>(n));
      try {
        grad(pts[i], out);
        g[i] = norm(out);
      } catch (const DomainError&) {
        g[i] = kInf;
      }
    });
    const std::size_t best = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
    p.min_grad.push_back(g[best]);
    p.argmin.push_back(pts[best]);
  }
  const std::size_t m = p.radii.size();
  p.tail_min.assign(m, kInf);
  for (std::size_t j = m; j-- > 0;) p.tail_min[j] = std::min(p.min_grad[j], j + 1 < m ? p.tail_min[j + 1] : kInf);
  p.epsilon_hat = -kInf;
  for (std::size_t j = 0; j < m; ++j)
    if (p.tail_min[j] > p.epsilon_hat) {
      p.epsilon_hat = p.tail_min[j];
      p.r_star = p.radii[j];
    }
  p.verdict = p.epsilon_hat >= options.tol_eps ? GradientProfile::Verdict::origin_excluded
                                              : GradientProfile::Verdict::inconclusive;
  return p;
}

// ---------------------------------------------------------------- G_k

Expr model_gk(int n, int k) {
  if (n < 1 || k < 0 || k > n) throw Error("G_k needs 0 <= k <= n and n >= 1");
  Expr e = Expr::constant(0.0, n);
  for (int i = 1; i <= n; ++i) {
    const Expr sq = pow(Expr::variable(i, n), 2);
    e = i <= k ? e + sq : e - sq;
  }
  return e;
}

GkRecord classify_Gk(int n, int k, const GradientProfileOptions& options) {
  const Expr G = model_gk(n, k);
  GkRecord r;
  r.n = n;
  r.k = k;

  // the only critical point is the origin: grad G_k = 2 diag(+-1) x
  const CriticalPoint origin = morse_data(G, Point(static_cast<std::size_t>(n), 0.0));
  double min_eig = kInf;
  for (double l : origin.hessian_eigenvalues) min_eig = std::min(min_eig, std::abs(l));
  r.morse = origin.grad_residual == 0 && min_eig > 1e-8;
  r.morse_index = origin.morse_index;
  const double critical_value = origin.value;

  // properness: |G| on spheres, and the null cone R (e_1 + e_n) / sqrt 2
  const Program prog(std::span<const Expr>(&G, 1));
  auto value = [&](std::span<const double> x) {
    double out;
    prog.run<double>(x, std::span<double>(&out, 1));
    return out;
  };
  double worst_ratio = kInf;
  r.zero_is_improper = k > 0 && k < n;
  for (double R : options.radii) {
    double m = kInf;
    for (const auto& p : sphere_points(n, R, options.sphere_samples)) m = std::min(m, std::abs(value(p)));
    r.min_abs_ratio.push_back(m / (R * R));
    worst_ratio = std::min(worst_ratio, m / (R * R));
    if (k > 0 && k < n) {
      Point w(static_cast<std::size_t>(n), 0.0);
      w[0] = R / std::sqrt(2.0);
      w[n - 1] = R / std::sqrt(2.0);
      const double v = value(w);
      r.null_cone_values.push_back(v);
      if (std::abs(v) > 1e-9) r.zero_is_improper = false;
    }
  }
  r.proper = worst_ratio > 0.5;
  // Z(G_k) meets Delta(G_k) = {G_k(0)} exactly when 0 is improper
  r.quasi_proper = r.proper || !(r.zero_is_improper && critical_value == 0);
  r.strongly_stable = r.quasi_proper && r.morse;
  r.profile = gradient_improper_test(G, options);
  if (r.morse && r.proper) {
    r.stable = true;
    r.stable_basis = "proper Morse function";
  } else if (r.morse && r.profile.excluded()) {
    r.stable = true;
    r.stable_basis = "Morse and the origin is not an improper value of the gradient (epsilon_hat = " +
                     fmt(r.profile.epsilon_hat) + ")";
  } else {
    r.stable = false;
    r.stable_basis = "undetermined: gradient profile inconclusive";
  }
  return r;
}

// ---------------------------------------------------------------- trivialization

Point tangent_field(const Expr& f, std::span<const double> p, double tol_tangent) {
  const int n = f.arity();
  Point g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = evaluate(differentiate(f, i + 1), Point(p.begin(), p.end()));
  const double r2 = [&] {
    double s = 0;
    for (double v : p) s += v * v;
    return s;
  }();
  if (r2 == 0) throw TangentDegeneracyError("the sphere field is undefined at the origin", Point(p.begin(), p.end()));
  double radial = 0;
  for (int i = 0; i < n; ++i) radial += g[i] * p[i];
  for (int i = 0; i < n; ++i) g[i] -= radial * p[i] / r2;
  const double t = norm(g);
  if (!(t > tol_tangent))
    throw TangentDegeneracyError("tangential gradient " + fmt(t) + " <= " + fmt(tol_tangent) +
                                     ": the kernel of df is tangent to the sphere",
                                 Point(p.begin(), p.end()));
  for (double& v : g) v /= t * t;
  return g;
}

Trivialization end_trivialize(const Expr& f, double q, double R, const std::vector<Point>& starts,
                              const TrivializeOptions& o) {
  if (!(o.half_range > 0) || !(o.step > 0) || !(o.epsilon > 0)) throw Error("trivialization options must be positive");
  if (!(o.half_range < o.epsilon / 4)) throw Error("the t range must lie inside q +- epsilon / 4");
  const int n = f.arity();
  const Gradient grad(f);
  const Program prog(std::span<const Expr>(&f, 1));
  auto value = [&](std::span<const double> x) {
    double out;
    prog.run<double>(x, std::span<double>(&out, 1));
    return out;
  };
  auto field = [&](const Point& p) {
    Point g(static_cast<std::size_t>(n));
    grad(p, g);
    double r2 = 0, radial = 0;
    for (int i = 0; i < n; ++i) {
      r2 += p[i] * p[i];
      radial += g[i] * p[i];
    }
    for (int i = 0; i < n; ++i) g[i] -= radial * p[i] / r2;
    const double t = norm(g);
    if (!(t > o.tol_tangent))
      throw TangentDegeneracyError("tangential gradient " + fmt(t) + " <= " + fmt(o.tol_tangent) + " at a visited point",
                                   p);
    const double cut = BumpRho::value(4 * (value(p) - q) / o.epsilon);
    for (double& v : g) v *= cut / (t * t);
    return g;
  };

  Trivialization out;
  out.q = q;
  out.R = R;
  out.tol_flow = o.tol_flow;
  out.orbits.resize(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    const Point& p0 = starts[s];
    if (static_cast<int>(p0.size()) != n) throw Error("start point dimension mismatch");
    const double r0 = norm(p0);
    if (!(r0 > R)) throw Error("start point lies inside B(R)");
    if (!(std::abs(value(p0) - q) <= 1e-9 * (1 + std::abs(q)))) throw Error("start point is not on the level f = q");
    TrivializationOrbit& orb = out.orbits[s];
    orb.start = p0;
    auto record = [&](double t, const Point& p) {
      orb.times.push_back(t);
      orb.points.push_back(p);
      orb.value_residual.push_back(std::abs(value(p) - t));
      orb.radius_drift.push_back(std::abs(norm(p) - r0));
    };
    auto add = [&](const Point& a, const Point& b, double c) {
      Point r(a);
      for (int i = 0; i < n; ++i) r[i] += c * b[i];
      return r;
    };
    // integrate each direction from the start, then record in increasing t
    std::vector<std::pair<double, Point>> sides[2];
    for (int side = 0; side < 2; ++side) {
      const double dir = side == 0 ? -1.0 : 1.0;
      Point p = p0;
      double done = 0;
      while (done < o.half_range * (1 - 1e-12)) {
        const double h = dir * std::min(o.step, o.half_range - done);
        const Point k1 = field(p);
        const Point k2 = field(add(p, k1, h / 2));
        const Point k3 = field(add(p, k2, h / 2));
        const Point k4 = field(add(p, k3, h));
        for (int i = 0; i < n; ++i) p[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        done += std::abs(h);
        sides[side].push_back({q + dir * done, p});
      }
    }
    for (auto it = sides[0].rbegin(); it != sides[0].rend(); ++it) record(it->first, it->second);
    record(q, p0);
    for (const auto& [t, pt] : sides[1]) record(t, pt);
    for (double v : orb.value_residual) orb.max_value_residual = std::max(orb.max_value_residual, v);
    for (double v : orb.radius_drift) orb.max_radius_drift = std::max(orb.max_radius_drift, v);
  });
  for (const auto& orb : out.orbits) {
    out.max_value_residual = std::max(out.max_value_residual, orb.max_value_residual);
    out.max_radius_drift = std::max(out.max_radius_drift, orb.max_radius_drift);
  }
  out.passed = out.max_value_residual < o.tol_flow && out.max_radius_drift < o.tol_flow;
  return out;
}

std::vector<Point> level_points(const Expr& f, double q, double R, std::size_t count) {
  const int n = f.arity();
  const Program prog(std::span<const Expr>(&f, 1));
  auto phi = [&](const Point& x) {
    double out;
    prog.run<double>(x, std::span<double>(&out, 1));
    return out - q;
  };
  auto safe_phi = [&](const Point& x, double& v) {
    try {
      v = phi(x);
      return true;
    } catch (const DomainError&) {
      return false;
    }
  };
  std::vector<Point> out;
  // one point per sphere |p| = rho_j in (R, 8R], found by bisection along the
  // sphere between two samples where f - q changes sign
  const std::size_t shells = std::max<std::size_t>(count, 1);
  for (std::size_t j = 0; j < shells && out.size() < count; ++j) {
    const double rho = R * (1.05 + 6.9 * static_cast<double>(j) / static_cast<double>(shells));
    const auto pts = sphere_points(n, rho, 720);
    auto on_sphere = [&](const Point& a, const Point& b, double lambda) {
      Point x(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) x[i] = (1 - lambda) * a[i] + lambda * b[i];
      const double s = rho / norm(x);
      for (double& v : x) v *= s;
      return x;
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      double va, vb;
      if (!safe_phi(pts[i], va) || !safe_phi(pts[i + 1], vb)) continue;
      if (va == 0) {
        out.push_back(pts[i]);
        break;
      }
      if ((va > 0) == (vb > 0) || vb == 0) continue;
      double dot = 0;
      for (int k = 0; k < n; ++k) dot += pts[i][k] * pts[i + 1][k];
      if (dot <= -0.5 * rho * rho) continue;  // keep the path away from the origin
      double lo = 0, hi = 1;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ((phi(on_sphere(pts[i], pts[i + 1], mid)) > 0) == (va > 0) ? lo : hi) = mid;
      }
      const Point a = on_sphere(pts[i], pts[i + 1], lo), b = on_sphere(pts[i], pts[i + 1], hi);
      out.push_back(std::abs(phi(a)) <= std::abs(phi(b)) ? a : b);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- linear perturbations

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<CriticalPoint> multistart_critical_points(const Expr& f, double W, int starts_per_axis) {
  const int n = f.arity();
  const JetEvaluator jet(f, 2);
  const int m = std::max(2, starts_per_axis);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(m);
  std::vector<std::optional<Point>> found(total);
  parallel_for(total, [&](std::size_t flat) {
    Point x(static_cast<std::size_t>(n));
    std::size_t rest = flat;
    for (int i = n - 1; i >= 0; --i) {
      x[i] = -W + 2 * W * static_cast<double>(rest % m) / (m - 1);
      rest /= m;
    }
    Eigen::VectorXd g(n);
    Eigen::MatrixXd H(n, n);
    for (int it = 0; it < 60; ++it) {
      JetK j;
      try {
        j = jet(x);
      } catch (const DomainError&) {
        return;
      }
      for (int a = 0; a < n; ++a) {
        g[a] = j.tensors[0][a];
        for (int b = 0; b < n; ++b) H(a, b) = j.tensors[1][a * n + b];
      }
      double scale = 0;
      for (double v : x) scale = std::max(scale, std::abs(v));
      if (g.norm() <= 1e-11 * (1 + scale)) {
        bool inside = true;
        for (double v : x) inside = inside && std::abs(v) <= W;
        if (inside) found[flat] = x;
        return;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd step = lu.solve(g);
      if (!step.allFinite()) return;
      for (int a = 0; a < n; ++a) x[a] -= step[a];
      for (double v : x)
        if (std::abs(v) > 4 * W) return;
    }
  });
  std::vector<CriticalPoint> out;
  for (const auto& c : found) {
    if (!c) continue;
    bool dup = false;
    for (const auto& p : out) {
      double d = 0;
      for (int i = 0; i < n; ++i) d += ((*c)[i] - p.location[i]) * ((*c)[i] - p.location[i]);
      if (std::sqrt(d) <= 1e-6) dup = true;
    }
    if (!dup) out.push_back(morse_data(f, *c));
  }
  return out;
}

ScanTrial local_stability(const Expr& f, const ScanOptions& o) {
  const int n = f.arity();
  const double W = o.window;
  ScanTrial t;
  std::vector<Point> pts;
  std::vector<double> values, eig_min;
  if (n == 1) {
    const CriticalLocus1D loc = critical_locus(f, W);
    if (loc.derivative_identically_zero) {
      t.failure = "f' vanishes identically";
      return t;
    }
    if (!loc.degenerate.empty()) {
      t.failure = "degenerate critical point at x = " + fmt(static_cast<double>(loc.degenerate[0]));
      t.critical_points = loc.points.size() + loc.degenerate.size();
      t.min_abs_eigenvalue = 0;
      return t;
    }
    if (!loc.complete_in_window) {
      t.failure = "critical locus incomplete: " + loc.incomplete_reason;
      return t;
    }
    for (const auto& p : loc.points) {
      pts.push_back({static_cast<double>(p.x)});
      values.push_back(static_cast<double>(p.value));
      eig_min.push_back(std::abs(static_cast<double>(p.second_derivative)));
    }
  } else {
    for (const CriticalPoint& cp : multistart_critical_points(f, W, o.starts_per_axis)) {
      double e = kInf;
      for (double l : cp.hessian_eigenvalues) e = std::min(e, std::abs(l));
      pts.push_back(cp.location);
      values.push_back(cp.value);
      eig_min.push_back(e);
    }
  }
  t.critical_points = pts.size();
  t.min_abs_eigenvalue = kInf;
  for (double e : eig_min) t.min_abs_eigenvalue = std::min(t.min_abs_eigenvalue, e);
  t.min_value_gap = kInf;
  double vmax = 0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) t.min_value_gap = std::min(t.min_value_gap, std::abs(values[i] - values[j]));
  if (t.min_abs_eigenvalue <= o.tol_nondeg) {
    t.failure = "degenerate critical point (|eigenvalue| = " + fmt(t.min_abs_eigenvalue) + ")";
    return t;
  }
  if (t.min_value_gap <= o.tol_value * (1 + vmax)) {
    t.failure = "two critical points share a value (gap " + fmt(t.min_value_gap) + ")";
    return t;
  }
  t.locally_stable = true;
  return t;
}

ScanStatistics linear_perturbation_scan(const Expr& f, const ScanOptions& o) {
  if (!is_polynomial(f)) throw Error("linear_perturbation_scan needs a polynomial");
  const int n = f.arity();
  ScanStatistics st;
  st.trials = o.trials;
  st.seed = o.seed;
  st.window = o.window;
  st.results.resize(o.trials);
  for (std::size_t i = 0; i < o.trials; ++i) {
    std::mt19937_64 rng(splitmix64(o.seed ^ static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Point a(static_cast<std::size_t>(n));
    double r2;
    do {
      r2 = 0;
      for (double& v : a) {
        v = u(rng);
        r2 += v * v;
      }
    } while (r2 >= 1);
    Expr fa = f;
    for (int j = 0; j < n; ++j) fa = fa + Expr::constant(a[j], n) * Expr::variable(j + 1, n);
    ScanTrial t = local_stability(fa, o);
    t.a = a;
    const GradientProfile p = gradient_improper_test(fa, o.profile);
    t.epsilon_hat = p.epsilon_hat;
    t.origin_excluded = p.excluded();
    t.passed = t.locally_stable && t.origin_excluded;
    if (!t.origin_excluded && t.failure.empty()) t.failure = "gradient profile inconclusive";
    st.results[i] = std::move(t);
  }
  for (std::size_t i = 0; i < st.results.size(); ++i) {
    if (st.results[i].passed)
      ++st.passes;
    else
      st.failing.push_back(i);
  }
  st.pass_fraction = st.trials ? static_cast<double>(st.passes) / static_cast<double>(st.trials) : 0.0;
  return st;
}

}  // namespace msl
