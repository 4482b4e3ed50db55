#include "msl/normalize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "msl/oned.hpp"
#include "msl/parallel.hpp"

namespace msl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// eta(a) = 1 - rho(1 + (a - K) / band): 0 for a <= K, 1 for a >= K + band.
std::pair<double, double> eta(double a, double K, double band) {
  if (a <= K) return {0, 0};
  if (a >= K + band) return {1, 0};
  const Jet2 r = BumpRho::jet(1 + (a - K) / band);
  return {1 - r.value, -r.d1 / band};
}

}  // namespace

// ---------------------------------------------------------------- psi_g

TargetShift::TargetShift(std::vector<ValueShift> shifts) : shifts_(std::move(shifts)) {
  std::sort(shifts_.begin(), shifts_.end(), [](const ValueShift& a, const ValueShift& b) { return a.y < b.y; });
}

const ValueShift* TargetShift::active(double y) const {
  for (const auto& s : shifts_)
    if (std::abs(y - s.y) < s.nu / 2) return &s;
  return nullptr;
}

bool TargetShift::identity_at(double y) const { return active(y) == nullptr; }

double TargetShift::operator()(double y) const {
  const ValueShift* s = active(y);
  if (!s) return y;
  if (y == s->y) return s->y_g;
  return y + (s->y_g - s->y) * BumpRho::value(4 * (y - s->y) / s->nu);
}

double TargetShift::derivative(double y) const {
  const ValueShift* s = active(y);
  if (!s) return 1;
  return 1 + (s->y_g - s->y) * BumpRho::derivative(4 * (y - s->y) / s->nu) * 4 / s->nu;
}

double TargetShift::inverse(double z) const {
  // psi maps each (y_i - nu_i/2, y_i + nu_i/2) onto itself
  const ValueShift* s = active(z);
  if (!s) return z;
  if (z == s->y_g) return s->y;
  double a = s->y - s->nu / 2, b = s->y + s->nu / 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    ((*this)(mid) < z ? a : b) = mid;
  }
  return std::abs((*this)(a)-z) <= std::abs((*this)(b)-z) ? a : b;
}

double TargetShift::inverse_derivative(double z) const { return 1 / derivative(inverse(z)); }

double TargetShift::min_derivative(std::size_t samples) const {
  double m = 1;
  for (const auto& s : shifts_)
    for (std::size_t i = 0; i < samples; ++i) {
      const double y = s.y - s.nu + 2 * s.nu * static_cast<double>(i) / static_cast<double>(samples - 1);
      m = std::min(m, derivative(y));
    }
  return m;
}

TargetShift build_psi(std::vector<ValueShift> shifts) {
  for (const auto& s : shifts) {
    if (!(s.nu > 0) || !std::isfinite(s.y) || !std::isfinite(s.y_g))
      throw ConstructionError("target shift needs finite values and nu > 0");
    if (!(std::abs(s.y_g - s.y) < s.nu / 8))
      throw HypothesisError("hypothesis not met: shift |y_g - y| = " + fmt(std::abs(s.y_g - s.y)) + " at y = " +
                            fmt(s.y) + " is not below nu/8 = " + fmt(s.nu / 8));
  }
  TargetShift psi(std::move(shifts));
  const auto& v = psi.shifts();
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1].y + v[i - 1].nu > v[i].y - v[i].nu)
      throw ConstructionError("value intervals around " + fmt(v[i - 1].y) + " and " + fmt(v[i].y) + " overlap");
  if (!(psi.min_derivative() > 0)) throw ConstructionError("psi_g is not monotone on its grid");
  return psi;
}

// ---------------------------------------------------------------- mu

std::vector<double> admissible_perturbation(const Expr& f, const std::vector<AdmissibleBox>& boxes) {
  std::vector<double> mu;
  const int n = f.arity();
  for (const auto& b : boxes) {
    if (b.box.dim() != n) throw Error("box dimension differs from the arity of f");
    if (b.nu) {
      if (!(*b.nu > 0)) throw Error("nu must be positive");
      mu.push_back(gamma_for(*b.nu) / (4.0 * n));
      continue;
    }
    const auto pts = b.box.points();
    std::vector<double> grad(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { grad[i] = dk_norm(f, pts[i], 1); });
    double m = kInf;
    for (double g : grad) m = std::min(m, g);
    bool crosses = false;
    if (n == 1) {
      const Expr d = differentiate(f, 1);
      double prev = 0;
      for (const auto& p : pts) {
        const double v = evaluate(d, p);
        if (v == 0 || (prev != 0 && (v > 0) != (prev > 0))) crosses = true;
        prev = v;
      }
    }
    if (crosses || !(m > 1e-12))
      throw HypothesisError("hypothesis not met: a non-critical box contains a critical point of f (min |Df| = " +
                            fmt(m) + ")");
    mu.push_back(m / 2);
  }
  return mu;
}

// ---------------------------------------------------------------- Psi^2

FlowPsi2::FlowPsi2(int dim, std::vector<FlowBump> bumps, FlowOptions options)
    : dim_(dim), bumps_(std::move(bumps)), options_(options) {
  if (dim < 1) throw Error("flow dimension must be positive");
  if (!(options_.step > 0 && options_.step <= 1)) throw Error("flow step must lie in (0, 1]");
  for (std::size_t i = 0; i < bumps_.size(); ++i) {
    const auto& b = bumps_[i];
    if (static_cast<int>(b.center.size()) != dim || static_cast<int>(b.displacement.size()) != dim)
      throw Error("flow bump dimension mismatch");
    if (!(b.core_radius > 0)) throw Error("core radius must be positive");
    const double d = norm(b.displacement);
    if (!(d < b.core_radius))
      throw HypothesisError("hypothesis not met: displacement " + fmt(d) + " is not below the core radius " +
                            fmt(b.core_radius));
    for (std::size_t j = 0; j < i; ++j)
      if (distance(b.center, bumps_[j].center) < 2 * (b.core_radius + bumps_[j].core_radius))
        throw HypothesisError("hypothesis not met: flow supports overlap");
  }
}

bool FlowPsi2::in_support(std::span<const double> x) const {
  for (const auto& b : bumps_)
    if (distance(x, b.center) < 2 * b.core_radius) return true;
  return false;
}

Point FlowPsi2::field(std::span<const double> w) const {
  Point out(static_cast<std::size_t>(dim_), 0.0);
  for (const auto& b : bumps_) {
    const double l = BumpRho::value(distance(w, b.center) / b.core_radius);
    if (l == 0) continue;
    for (int i = 0; i < dim_; ++i) out[i] += l * b.displacement[i];
  }
  return out;
}

FlowPsi2::Image FlowPsi2::integrate(std::span<const double> x, double direction) const {
  const int n = dim_;
  Image img;
  img.point.assign(x.begin(), x.end());
  img.jacobian.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) img.jacobian[i * n + i] = 1;
  if (!in_support(x)) {
    img.fixed = true;
    return img;
  }
  if (options_.shortcut)
    for (const auto& b : bumps_)
      if (distance(x, b.center) + norm(b.displacement) <= b.core_radius) {
        for (int i = 0; i < n; ++i) img.point[i] += direction * b.displacement[i];
        img.straight = true;
        return img;
      }

  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;
  auto rhs = [&](const Vec& w, const Mat& J, Vec& dw, Mat& dJ) {
    dw = Vec::Zero(n);
    Mat DX = Mat::Zero(n, n);
    for (const auto& b : bumps_) {
      Vec rel(n);
      for (int i = 0; i < n; ++i) rel[i] = w[i] - b.center[i];
      const double r = rel.norm();
      const Jet2 l = BumpRho::jet(r / b.core_radius);
      if (l.value == 0 && l.d1 == 0) continue;
      const Vec d = Eigen::Map<const Vec>(b.displacement.data(), n) * direction;
      dw += l.value * d;
      if (r > 0 && l.d1 != 0) DX += d * (rel.transpose() * (l.d1 / (b.core_radius * r)));
    }
    dJ = DX * J;
  };
  Vec w = Eigen::Map<const Vec>(x.data(), n);
  Mat J = Mat::Identity(n, n);
  const int steps = static_cast<int>(std::lround(1.0 / options_.step));
  const double h = 1.0 / steps;
  Vec k1, k2, k3, k4;
  Mat K1, K2, K3, K4;
  for (int s = 0; s < steps; ++s) {
    rhs(w, J, k1, K1);
    rhs(w + 0.5 * h * k1, J + 0.5 * h * K1, k2, K2);
    rhs(w + 0.5 * h * k2, J + 0.5 * h * K2, k3, K3);
    rhs(w + h * k3, J + h * K3, k4, K4);
    w += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    J += h / 6 * (K1 + 2 * K2 + 2 * K3 + K4);
  }
  for (int i = 0; i < n; ++i) {
    img.point[i] = w[i];
    for (int j = 0; j < n; ++j) img.jacobian[i * n + j] = J(i, j);
  }
  img.det = J.determinant();
  return img;
}

FlowPsi2::Image FlowPsi2::map(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw Error("flow point dimension mismatch");
  return integrate(x, 1.0);
}

Point FlowPsi2::inverse(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw Error("flow point dimension mismatch");
  return integrate(x, -1.0).point;
}

FlowPsi2 build_flow_psi2(const std::vector<Point>& x_f, const std::vector<Point>& x_g,
                         const std::vector<double>& core_radii, FlowOptions options) {
  if (x_f.size() != x_g.size() || x_f.size() != core_radii.size())
    throw Error("flow data lists have different lengths");
  if (x_f.empty()) return FlowPsi2(1, {}, options);
  const int n = static_cast<int>(x_f[0].size());
  std::vector<FlowBump> bumps;
  for (std::size_t i = 0; i < x_f.size(); ++i) {
    if (static_cast<int>(x_f[i].size()) != n || static_cast<int>(x_g[i].size()) != n)
      throw Error("flow point dimension mismatch");
    Point d(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) d[j] = x_g[i][j] - x_f[i][j];
    if (norm(d) == 0) continue;  // the field would vanish identically
    bumps.push_back({x_f[i], d, core_radii[i]});
  }
  return FlowPsi2(n, std::move(bumps), options);
}

// ---------------------------------------------------------------- critical points in 1D

std::vector<Critical1DPoint> critical_points_1d(const Function1D& h, double W, double density) {
  if (!(W > 0) || !(density > 0)) throw Error("window and density must be positive");
  const std::size_t N = static_cast<std::size_t>(std::ceil(2 * W * density)) | 1u;
  const double step = 2 * W / static_cast<double>(N - 1);
  auto xs = [&](std::size_t j) { return j + 1 == N ? W : -W + step * static_cast<double>(j); };
  std::vector<double> d(N);
  parallel_for(N, [&](std::size_t j) { d[j] = h.jet(xs(j)).d1; });
  std::vector<Critical1DPoint> out;
  auto push = [&](double x) {
    const Jet2 j = h.jet(x);
    out.push_back({x, j.value, j.d2});
  };
  for (std::size_t j = 0; j < N; ++j) {
    if (d[j] == 0) {
      push(xs(j));
      continue;
    }
    if (j + 1 < N && d[j + 1] != 0 && (d[j] > 0) != (d[j + 1] > 0)) {
      double a = xs(j), b = xs(j + 1);
      const bool a_positive = d[j] > 0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double v = h.jet(mid).d1;
        if (v == 0) {
          a = b = mid;
          break;
        }
        ((v > 0) == a_positive ? a : b) = mid;
      }
      push(std::abs(h.jet(a).d1) <= std::abs(h.jet(b).d1) ? a : b);
    }
  }
  return out;
}

// ---------------------------------------------------------------- Psi^1

EndShift1D::EndShift1D(Function1D f, TargetShift psi, double K, double band, bool active_plus, bool active_minus)
    : f_(std::move(f)), psi_(std::move(psi)), K_(K), band_(band), plus_(active_plus), minus_(active_minus) {
  if (!(K >= 0) || !(band > 0)) throw Error("end shift needs K >= 0 and band > 0");
}

double EndShift1D::target(double x, double* dtarget) const {
  const Jet2 fx = f_.jet(x);
  const double p = psi_(fx.value);
  const auto [e, de] = eta(std::abs(x), K_, band_);
  if (dtarget)
    *dtarget = fx.d1 + (psi_.derivative(fx.value) - 1) * fx.d1 * e + (p - fx.value) * de * (x > 0 ? 1 : -1);
  return fx.value + (p - fx.value) * e;
}

double EndShift1D::solve_on_ray(double x, double value) const {
  const double s = x > 0 ? 1 : -1;
  auto phi = [&](double t) { return f_(t) - value; };
  double a = x, b = x;
  const double fa = phi(a);
  if (fa == 0) return x;
  // search outward and inward from x until the sign flips
  double span = std::max(band_, 1e-3 * std::abs(x));
  bool found = false;
  for (int it = 0; it < 80 && !found; ++it) {
    const double out_pt = x + s * span;
    const double in_pt = s * std::max(K_, std::abs(x) - span);
    if ((phi(out_pt) > 0) != (fa > 0)) {
      b = out_pt;
      found = true;
    } else if ((phi(in_pt) > 0) != (fa > 0)) {
      b = in_pt;
      found = true;
    }
    span *= 2;
  }
  if (!found) throw ConstructionError("end component does not cover the shifted value " + fmt(value));
  if (b < a) std::swap(a, b);
  const bool a_positive = phi(a) > 0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double v = phi(mid);
    if (v == 0) return mid;
    ((v > 0) == a_positive ? a : b) = mid;
  }
  return std::abs(phi(a)) <= std::abs(phi(b)) ? a : b;
}

double EndShift1D::operator()(double x) const {
  if (std::abs(x) <= K_ || !active(x > 0 ? 1 : -1)) return x;
  const double v = target(x, nullptr);
  if (v == f_(x)) return x;
  return solve_on_ray(x, v);
}

double EndShift1D::derivative(double x) const {
  if (std::abs(x) <= K_ || !active(x > 0 ? 1 : -1)) return 1;
  double dv = 0;
  const double v = target(x, &dv);
  if (v == f_(x) && dv == f_.jet(x).d1) return 1;
  return dv / f_.jet(solve_on_ray(x, v)).d1;
}

EndShift1D build_end_shift_psi1(const Function1D& f, const TargetShift& psi, double K, double band, int k_max) {
  bool active[2] = {false, false};
  for (int side = 0; side < 2; ++side) {
    const double s = side == 0 ? 1 : -1;
    // sample |x| from K outward through the dyadic windows
    std::vector<double> radii;
    const int per_window = 512;
    const double top = std::ldexp(1.0, k_max + 1);
    double lo = K;
    while (lo < top) {
      const double hi = std::max(lo * 2, lo + 1);
      for (int i = 0; i < per_window; ++i) radii.push_back(lo + (hi - lo) * i / per_window);
      lo = hi;
    }
    radii.push_back(top);
    double vmin = kInf, vmax = -kInf;
    int dsign = 0;
    bool monotone = true;
    for (double r : radii) {
      Jet2 j;
      try {
        j = f.jet(s * r);
      } catch (const DomainError&) {
        break;  // overflow: the values have left every bounded band
      }
      vmin = std::min(vmin, j.value);
      vmax = std::max(vmax, j.value);
      const int sg = j.d1 > 0 ? 1 : (j.d1 < 0 ? -1 : 0);
      if (sg != 0 && dsign != 0 && sg != dsign) monotone = false;
      if (sg != 0) dsign = sg;
    }
    bool meets = false;
    for (const auto& sh : psi.shifts())
      if (vmax > sh.y - sh.nu / 2 && vmin < sh.y + sh.nu / 2) meets = true;
    if (!meets) continue;
    if (!monotone)
      throw ConstructionError("end component beyond " + fmt(s * K) + " is not monotone but meets a value band");
    active[side] = true;
  }
  return EndShift1D(f, psi, K, band, active[0], active[1]);
}

// ---------------------------------------------------------------- pipeline

Jet2 NormalizationData::composite(double x) const {
  const FlowPsi2::Image m = psi2.map(std::span<const double>(&x, 1));
  const double u = m.point[0];
  const double v = psi1(u);
  const Jet2 gj = g.jet(v);
  const double z = psi.inverse(gj.value);
  return {z, gj.d1 * m.jacobian[0] * psi1.derivative(u) / psi.derivative(z), 0.0};
}

NormalizationData normalize_1d(const Function1D& f, const Function1D& g, const NormalizeOptions& options) {
  NormalizationData data;
  data.f = f;
  data.g = g;
  const double W = options.window;
  data.sigma_f = critical_points_1d(f, W, options.density);
  data.sigma_g = critical_points_1d(g, W, options.density);
  if (data.sigma_f.size() != data.sigma_g.size())
    throw HypothesisError("hypothesis not met: g has " + std::to_string(data.sigma_g.size()) +
                          " critical points in the window, f has " + std::to_string(data.sigma_f.size()));

  // values that nu_i must keep clear of
  std::vector<std::pair<double, double>> avoid;
  const EndBehavior ends = end_behavior(f.base());
  for (const EndSide* e : {&ends.plus, &ends.minus}) {
    if (e->kind == EndKind::diverges_up || e->kind == EndKind::diverges_down) continue;
    const double lo = static_cast<double>(e->liminf), hi = static_cast<double>(e->limsup);
    avoid.push_back({lo, hi});
    data.improper_values.push_back(lo);
    if (hi != lo) data.improper_values.push_back(hi);
  }

  std::vector<ValueShift> shifts;
  std::vector<Point> from, to;
  std::vector<double> cores;
  const double K = options.end_K > 0 ? options.end_K : W;
  for (std::size_t i = 0; i < data.sigma_f.size(); ++i) {
    const auto& p = data.sigma_f[i];
    const auto& q = data.sigma_g[i];
    double gap = kInf;
    for (std::size_t j = 0; j < data.sigma_f.size(); ++j) {
      if (j == i) continue;
      const double d = std::abs(data.sigma_f[j].value - p.value);
      if (d == 0) throw HypothesisError("hypothesis not met: f repeats the critical value " + fmt(p.value));
      gap = std::min(gap, d);
    }
    for (const auto& [lo, hi] : avoid) gap = std::min(gap, p.value < lo ? lo - p.value : (p.value > hi ? p.value - hi : 0.0));
    const double nu = std::min(options.nu_cap, gap / 2);
    const double core = options.core_radius > 0 ? options.core_radius : gamma_for(nu) / 8;
    data.nu.push_back(nu);
    data.core.push_back(core);
    if (q.x == p.x && q.value == p.value) continue;
    if (!(nu > 0))
      throw HypothesisError("hypothesis not met: critical value " + fmt(p.value) + " lies on an improper value of f");
    if (!(std::abs(q.x - p.x) < core))
      throw HypothesisError("hypothesis not met: critical point moved by " + fmt(std::abs(q.x - p.x)) +
                            ", core radius " + fmt(core));
    if (std::abs(p.x) + 2 * core > K || std::abs(q.x) > K)
      throw ConstructionError("critical point outside the region where Psi^1 is the identity");
    if (q.value != p.value) shifts.push_back({p.value, q.value, nu});
    from.push_back({p.x});
    to.push_back({q.x});
    cores.push_back(core);
  }
  data.psi = build_psi(std::move(shifts));
  data.psi1 = build_end_shift_psi1(f, data.psi, K, options.end_band);
  data.psi2 = from.empty() ? FlowPsi2(1, {}, options.flow) : build_flow_psi2(from, to, cores, options.flow);
  return data;
}

NormalizationResiduals verify_normalization(const NormalizationData& data, const NormalizeOptions& options,
                                            double tolerance) {
  NormalizationResiduals res;
  res.tolerance = tolerance;
  const double W = options.window;
  const std::size_t N = static_cast<std::size_t>(std::ceil(2 * W * options.density)) | 1u;
  const double step = 2 * W / static_cast<double>(N - 1);
  auto xs = [&](std::size_t j) { return j + 1 == N ? W : -W + step * static_cast<double>(j); };
  res.grid_points = N;

  struct Sample {
    Jet2 c;
    double f = 0, g = 0, det = 1;
    bool psi2_identity_ok = true, psi1_identity_ok = true, psi_identity_ok = true;
    bool psi2_checked = false, psi1_checked = false, psi_checked = false;
  };
  std::vector<Sample> s(N);
  parallel_for(N, [&](std::size_t j) {
    const double x = xs(j);
    Sample& o = s[j];
    o.f = data.f(x);
    o.g = data.g(x);
    const FlowPsi2::Image m = data.psi2.map(std::span<const double>(&x, 1));
    o.det = m.det;
    if (!data.psi2.in_support(std::span<const double>(&x, 1))) {
      o.psi2_checked = true;
      o.psi2_identity_ok = m.point[0] == x;
    }
    if (std::abs(x) <= data.psi1.K()) {
      o.psi1_checked = true;
      o.psi1_identity_ok = data.psi1(x) == x;
    }
    if (data.psi.identity_at(o.f)) {
      o.psi_checked = true;
      o.psi_identity_ok = data.psi(o.f) == o.f && data.psi.inverse(o.f) == o.f;
    }
    o.c = data.composite(x);
  });

  res.psi2_min_det = kInf;
  for (const auto& o : s) {
    res.c0_residual = std::max(res.c0_residual, std::abs(o.c.value - o.f));
    res.c0_perturbation = std::max(res.c0_perturbation, std::abs(o.g - o.f));
    res.psi2_min_det = std::min(res.psi2_min_det, o.det);
    for (auto [checked, ok] : {std::pair{o.psi2_checked, o.psi2_identity_ok}, std::pair{o.psi1_checked, o.psi1_identity_ok},
                               std::pair{o.psi_checked, o.psi_identity_ok}}) {
      res.identity_checks += checked;
      res.identity_violations += checked && !ok;
    }
  }
  res.psi_min_derivative = data.psi.min_derivative();

  // Psi^1 beyond K, where it may be active
  res.psi1_min_derivative = 1;
  for (int side : {1, -1}) {
    if (!data.psi1.active(side)) continue;
    const double K = data.psi1.K();
    for (int i = 0; i <= 4000; ++i) {
      const double x = side * (K + (3 * K + 4 * data.psi1.band()) * i / 4000.0);
      res.psi1_min_derivative = std::min(res.psi1_min_derivative, data.psi1.derivative(x));
    }
  }

  // critical points of the composite: sign changes of C'
  for (std::size_t j = 0; j < N; ++j) {
    double root;
    if (s[j].c.d1 == 0) {
      root = xs(j);
    } else if (j + 1 < N && s[j + 1].c.d1 != 0 && (s[j].c.d1 > 0) != (s[j + 1].c.d1 > 0)) {
      double a = xs(j), b = xs(j + 1);
      const bool a_positive = s[j].c.d1 > 0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double v = data.composite(mid).d1;
        if (v == 0) {
          a = b = mid;
          break;
        }
        ((v > 0) == a_positive ? a : b) = mid;
      }
      root = std::abs(data.composite(a).d1) <= std::abs(data.composite(b).d1) ? a : b;
    } else {
      continue;
    }
    res.sigma_composite.push_back(root);
    res.delta_composite.push_back(data.composite(root).value);
  }
  res.count_matches = res.sigma_composite.size() == data.sigma_f.size();
  if (res.count_matches) {
    for (std::size_t i = 0; i < data.sigma_f.size(); ++i) {
      res.sigma_error = std::max(res.sigma_error, std::abs(res.sigma_composite[i] - data.sigma_f[i].x));
      res.delta_error = std::max(res.delta_error, std::abs(res.delta_composite[i] - data.sigma_f[i].value));
    }
  } else {
    res.sigma_error = res.delta_error = kInf;
  }
  return res;
}

}  // namespace msl
