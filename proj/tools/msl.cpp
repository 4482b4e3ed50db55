// msl: command-line front end. Every command writes one JSON report
// (schema "msl/1") to --out or stdout and exits with 0 when the result is
// determined, 1 on usage or parse errors, 2 when a result is inconclusive or
// a hypothesis of the construction is not met.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "msl/critical.hpp"
#include "msl/endgeom.hpp"
#include "msl/jets.hpp"
#include "msl/normalize.hpp"
#include "msl/oned.hpp"
#include "msl/parallel.hpp"
#include "msl/report.hpp"

using namespace msl;

namespace {

struct Common {
  std::string out;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Write the JSON report here instead of stdout");
  cmd->add_flag("--no-timing", c.no_timing, "Omit wall-clock times so reports are byte-reproducible");
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "'" + text + "' is not a comma-separated list of numbers");
    }
  }
  if (v.empty()) throw CLI::ValidationError(what, "empty list");
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CLI::ValidationError("--out", "cannot open " + path);
  f << text;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CLI::ValidationError("--out-csv", "cannot open " + path);
  body(f);
}

Json critical_list(const std::vector<CriticalPoint>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(p);
  return a;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string expr;
  int dim = 1;
  double window = 10;
  double grid = 1e4;
  double tol_sep = 1e-6;
  int k_max = 20;
  int starts = 21;
  int norm_samples = 0;
};

void run_analyze(const AnalyzeArgs& a, Report& rep) {
  const Expr f = parse(a.expr, a.dim);
  rep.set_input(a.expr, a.dim);
  rep.input()["window"] = a.window;
  Point lo(static_cast<std::size_t>(a.dim), -a.window), hi(static_cast<std::size_t>(a.dim), a.window);
  int samples = a.norm_samples;
  if (samples <= 0) samples = a.dim == 1 ? 2001 : a.dim == 2 ? 101 : a.dim == 3 ? 31 : 11;
  const CompactBox box = CompactBox::box(lo, hi, samples);

  std::vector<CriticalPoint> points;
  if (a.dim == 1) {
    ClassifyOptions o;
    o.locus.density = a.grid;
    o.tol_sep = a.tol_sep;
    o.ends.k_max = a.k_max;
    StabilityReport r;
    rep.section("classification", [&] {
      r = classify(f, a.window, o);
      return Json(r);
    });
    for (const auto& p : r.locus.points) points.push_back(p.as_point());
    if (r.any_inconclusive()) rep.set_status(Status::inconclusive, "some stability flags are inconclusive");
  } else {
    rep.section("critical_points", [&] {
      points = multistart_critical_points(f, a.window, a.starts);
      Json s;
      s["method"] = "multistart Newton";
      s["starts_per_axis"] = a.starts;
      s["points"] = critical_list(points);
      return s;
    });
  }
  rep.section("norms", [&] {
    Json s;
    s["over_window"] = ck_norm_over(f, box, 2);
    Json at = Json::array();
    for (const auto& p : points) at.push_back(ck_norm_at(f, p.location, 2));
    s["at_critical_points"] = std::move(at);
    return s;
  });
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
  std::string expr;
  std::string signs = "0";
  double offset = 0;
  double radius = 0.5;
  double gate_factor = 0.9;
};

void run_certify(const CertifyArgs& a, Report& rep) {
  ModelQuadratic m;
  for (double s : parse_list(a.signs, "--signs")) {
    if (s != 0 && s != 1) throw CLI::ValidationError("--signs", "entries must be 0 or 1");
    m.signs.push_back(static_cast<int>(s));
  }
  m.offset = a.offset;
  const Expr g = parse(a.expr, m.dim());
  rep.set_input(a.expr, m.dim());
  rep.input()["model"] = {{"signs", m.signs}, {"offset", m.offset}, {"expression", to_string(m.expr())}};
  rep.input()["radius"] = a.radius;
  CertifyOptions o;
  o.gate_factor = a.gate_factor;
  rep.section("certificate", [&] {
    const UniquenessCertificate c = certify_unique(g, m, a.radius, o);
    if (!c.unique) rep.set_status(Status::inconclusive, "uniqueness scan found cells far from the critical point");
    return Json(c);
  });
}

// ---------------------------------------------------------------- normalize

struct NormalizeArgs {
  std::string f;
  std::string g;
  std::string perturb;
  std::string support = "0,0.6";
  double nu = 0.5;
  double core = 0;
  double window = 8;
  double density = 2000;
  double end_K = 0;
  double end_band = 1;
  double tolerance = 1e-8;
  std::string out_csv;
  int csv_samples = 801;
};

void run_normalize(const NormalizeArgs& a, Report& rep) {
  const Function1D f(parse(a.f, 1));
  Function1D g;
  if (!a.g.empty()) {
    g = Function1D(parse(a.g, 1));
  } else if (!a.perturb.empty()) {
    const auto sup = parse_list(a.support, "--support");
    if (sup.size() != 2 || !(sup[1] > 0)) throw CLI::ValidationError("--support", "expected center,halfwidth");
    g = Function1D(f.base(), {BumpPerturbation{sup[0], sup[1], parse_list(a.perturb, "--perturb")}});
  } else {
    g = f;
  }
  rep.set_input(a.f, 1);
  rep.input()["g"] = g.describe();

  NormalizeOptions o;
  o.window = a.window;
  o.density = a.density;
  o.nu_cap = a.nu;
  o.core_radius = a.core;
  o.end_K = a.end_K;
  o.end_band = a.end_band;

  NormalizationData data;
  rep.section("construction", [&] {
    data = normalize_1d(f, g, o);
    Json s;
    Json pts = Json::array();
    for (std::size_t i = 0; i < data.sigma_f.size(); ++i)
      pts.push_back({{"x_f", encode_number(data.sigma_f[i].x)},
                     {"y_f", encode_number(data.sigma_f[i].value)},
                     {"x_g", encode_number(data.sigma_g[i].x)},
                     {"y_g", encode_number(data.sigma_g[i].value)},
                     {"nu", encode_number(data.nu[i])},
                     {"gamma", encode_number(gamma_for(data.nu[i]))},
                     {"core_radius", encode_number(data.core[i])}});
    s["critical_points"] = std::move(pts);
    Json iv = Json::array();
    for (double v : data.improper_values) iv.push_back(encode_number(v));
    s["improper_values"] = std::move(iv);
    s["psi_shifts"] = data.psi.shifts().size();
    s["psi1"] = {{"plus_active", data.psi1.active(1)},
                 {"minus_active", data.psi1.active(-1)},
                 {"K", encode_number(data.psi1.K())},
                 {"band", encode_number(data.psi1.band())}};
    s["psi2_bumps"] = data.psi2.bumps().size();
    return s;
  });
  NormalizationResiduals res;
  rep.section("residuals", [&] {
    res = verify_normalization(data, o, a.tolerance);
    return Json(res);
  });
  if (!res.passed()) rep.set_status(Status::inconclusive, "normalization residuals exceed their tolerances");

  if (!a.out_csv.empty()) {
    double lo = 0, hi = 0;
    for (const auto& p : data.sigma_f) {
      lo = std::min(lo, p.value);
      hi = std::max(hi, p.value);
    }
    const double pad = std::max(1.0, 0.25 * (hi - lo));
    write_file(a.out_csv + "_psi.csv", [&](std::ostream& os) {
      write_psi_table(os, data.psi, lo - pad, hi + pad, static_cast<std::size_t>(a.csv_samples));
    });
    write_file(a.out_csv + "_maps.csv", [&](std::ostream& os) {
      write_map_table(os, data, a.window, static_cast<std::size_t>(a.csv_samples));
    });
  }
}

// ---------------------------------------------------------------- gk

struct GkArgs {
  int n = 3;
  int k = 1;
  std::size_t samples = 10000;
};

void run_gk(const GkArgs& a, Report& rep) {
  if (a.k > a.n) throw CLI::ValidationError("--k", "must not exceed --n");
  const Expr G = model_gk(a.n, a.k);
  rep.set_input(to_string(G), a.n);
  GradientProfileOptions o;
  o.sphere_samples = a.samples;
  rep.section("gk", [&] {
    const GkRecord r = classify_Gk(a.n, a.k, o);
    if (!r.stable) rep.set_status(Status::inconclusive, r.stable_basis);
    return Json(r);
  });
}

// ---------------------------------------------------------------- trivialize

struct TrivializeArgs {
  std::string expr;
  int dim = 2;
  double q = 1;
  double R = 5;
  std::size_t starts = 20;
  TrivializeOptions opt;
  std::string out_csv;
};

void run_trivialize(const TrivializeArgs& a, Report& rep) {
  const Expr f = parse(a.expr, a.dim);
  rep.set_input(a.expr, a.dim);
  rep.input()["q"] = a.q;
  rep.input()["R"] = a.R;
  std::vector<Point> starts;
  rep.section("start_points", [&] {
    starts = level_points(f, a.q, a.R, a.starts);
    Json s;
    s["requested"] = a.starts;
    s["found"] = starts.size();
    Json pts = Json::array();
    for (const auto& p : starts) pts.push_back(p);
    s["points"] = std::move(pts);
    return s;
  });
  if (starts.size() < a.starts) rep.set_status(Status::inconclusive, "fewer level points than requested");
  if (starts.empty()) return;
  Trivialization tr;
  bool ok = true;
  rep.section("trivialization", [&] {
    try {
      tr = end_trivialize(f, a.q, a.R, starts, a.opt);
    } catch (const TangentDegeneracyError& e) {
      ok = false;
      rep.set_status(Status::inconclusive, e.what());
      return Json{{"degenerate", true}, {"witness", e.witness()}, {"message", e.what()}};
    }
    if (!tr.passed) rep.set_status(Status::inconclusive, "flow residuals exceed tol_flow");
    return Json(tr);
  });
  if (ok && !a.out_csv.empty()) write_file(a.out_csv, [&](std::ostream& os) { write_orbit_table(os, tr); });
}

// ---------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string expr;
  int dim = 2;
  ScanOptions opt;
};

void run_perturb(const PerturbArgs& a, Report& rep) {
  const Expr f = parse(a.expr, a.dim);
  if (!is_polynomial(f)) throw CLI::ValidationError("--expr", "perturb needs a polynomial");
  rep.set_input(a.expr, a.dim);
  rep.section("scan", [&] { return Json(linear_perturbation_scan(f, a.opt)); });
}

const char* kNormalizeCsv =
    "CSV tables (RFC 4180, CRLF line ends), written when --out-csv PREFIX is given:\n"
    "  PREFIX_psi.csv   y, psi, psi_derivative, psi_inverse\n"
    "  PREFIX_maps.csv  x, psi2, psi2_det, psi1, psi1_derivative, composite, f, g\n"
    "where psi2 = Psi^2(x), psi1 = Psi^1(Psi^2(x)) and composite = psi^-1(g(psi1)).";

const char* kOrbitCsv =
    "CSV table (RFC 4180, CRLF line ends), written when --out-csv PATH is given:\n"
    "  orbit, t, x1..xn, value_residual, radius_drift\n"
    "one row per RK4 step of every orbit; value_residual = |f(Phi(p,t)) - t|,\n"
    "radius_drift = ||Phi(p,t)| - |p||.";

void hypothesis_failed(Report& rep, std::string message) {
  if (message.find("hypothesis not met") == std::string::npos) message = "hypothesis not met: " + message;
  rep.set_status(Status::hypothesis_not_met, message);
  std::cerr << "msl: " << message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis of smooth functions on R^n"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  app.footer(
      "Exit codes: 0 determined, 1 usage or parse error, 2 inconclusive or hypothesis not met.\n"
      "MSL_THREADS caps the number of worker threads.\n"
      "Expressions use variables x1..xn, + - * / ^ (integer powers), exp, sin, cos.");

  Common common;

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Classify f (n = 1) or list critical points and norms (n >= 2)");
  analyze->add_option("--expr", an.expr, "Expression in x1..xn")->required();
  analyze->add_option("--dim", an.dim, "Number of variables")->check(CLI::Range(1, 8))->capture_default_str();
  analyze->add_option("--window,-W", an.window, "Half-width W of the window [-W, W]^n")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze->add_option("--grid", an.grid, "Derivative scan samples per unit length (n = 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze->add_option("--tol-sep", an.tol_sep, "Value separation tolerance")->capture_default_str();
  analyze->add_option("--k-max", an.k_max, "End windows |x| in [2^k, 2^(k+1)], k <= k-max")->capture_default_str();
  analyze->add_option("--starts", an.starts, "Newton starts per axis (n >= 2)")->capture_default_str();
  analyze->add_option("--norm-samples", an.norm_samples, "Grid samples per axis for the C^2 norm (0: by dimension)");
  add_common(analyze, common);

  CertifyArgs ce;
  auto* certify =
      app.add_subcommand("certify", "Contraction solve and uniqueness certificate around a model quadratic");
  certify->add_option("--expr", ce.expr, "Perturbed function g")->required();
  certify->add_option("--signs", ce.signs, "Model signs, e.g. 0,1 for w1^2 - w2^2")->capture_default_str();
  certify->add_option("--offset", ce.offset, "Model constant")->capture_default_str();
  certify->add_option("--radius", ce.radius, "Ball radius r in (0, 1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  certify->add_option("--gate-factor", ce.gate_factor, "Gate |g - f|_2 < factor r / n")->capture_default_str();
  add_common(certify, common);

  NormalizeArgs no;
  auto* normalize = app.add_subcommand("normalize", "Build and verify the normalizing maps for g near f (n = 1)");
  normalize->add_option("--f", no.f, "Morse function f(x1)")->required();
  auto* g_opt = normalize->add_option("--g", no.g, "Perturbed function g(x1); default g = f");
  normalize->add_option("--perturb", no.perturb, "Bump polynomial coefficients c0,c1,... added to f")->excludes(g_opt);
  normalize->add_option("--support", no.support, "Bump center,halfwidth")->capture_default_str();
  normalize->add_option("--nu", no.nu, "Cap on the value radii nu_i")->capture_default_str();
  normalize->add_option("--core", no.core, "Flow core radius (0: gamma(nu) / 8)")->capture_default_str();
  normalize->add_option("--window", no.window, "Critical points are matched in [-W, W]")->capture_default_str();
  normalize->add_option("--density", no.density, "Scan samples per unit length")->capture_default_str();
  normalize->add_option("--end-K", no.end_K, "Psi^1 is the identity on [-K, K] (0: the window)");
  normalize->add_option("--end-band", no.end_band, "Width of the Psi^1 transition")->capture_default_str();
  normalize->add_option("--tolerance", no.tolerance, "Critical point and value tolerance")->capture_default_str();
  normalize->add_option("--out-csv", no.out_csv, "Prefix for the CSV tables");
  normalize->add_option("--csv-samples", no.csv_samples, "Rows per table")->capture_default_str();
  normalize->footer(kNormalizeCsv);
  add_common(normalize, common);

  GkArgs gk;
  auto* gkcmd = app.add_subcommand("gk", "Classify the model quadratic G_k on R^n");
  gkcmd->add_option("--n", gk.n, "Dimension")->check(CLI::Range(1, 8))->capture_default_str();
  gkcmd->add_option("--k", gk.k, "Number of positive squares")->check(CLI::NonNegativeNumber)->capture_default_str();
  gkcmd->add_option("--samples", gk.samples, "Points per sphere")->capture_default_str();
  add_common(gkcmd, common);

  TrivializeArgs tz;
  auto* trivialize = app.add_subcommand("trivialize", "Flow along the sphere-tangent field over a value band");
  trivialize->add_option("--expr", tz.expr, "Function f")->required();
  trivialize->add_option("--dim", tz.dim, "Number of variables")->check(CLI::Range(1, 8))->capture_default_str();
  trivialize->add_option("--q", tz.q, "Level value q")->capture_default_str();
  trivialize->add_option("--R", tz.R, "Start points lie outside B(R)")->capture_default_str();
  trivialize->add_option("--starts", tz.starts, "Number of start points")->capture_default_str();
  trivialize->add_option("--half-range", tz.opt.half_range, "t runs over q +- half-range")->capture_default_str();
  trivialize->add_option("--epsilon", tz.opt.epsilon, "Cut-off band width")->capture_default_str();
  trivialize->add_option("--step", tz.opt.step, "RK4 step")->capture_default_str();
  trivialize->add_option("--tol-tangent", tz.opt.tol_tangent, "Tangent degeneracy threshold")->capture_default_str();
  trivialize->add_option("--tol-flow", tz.opt.tol_flow, "Residual tolerance")->capture_default_str();
  trivialize->add_option("--out-csv", tz.out_csv, "Path for the orbit table");
  trivialize->footer(kOrbitCsv);
  add_common(trivialize, common);

  PerturbArgs pe;
  auto* perturb = app.add_subcommand("perturb", "Scan random linear perturbations f + a.x of a polynomial");
  perturb->add_option("--expr", pe.expr, "Polynomial f")->required();
  perturb->add_option("--dim", pe.dim, "Number of variables")->check(CLI::Range(1, 8))->capture_default_str();
  perturb->add_option("--trials", pe.opt.trials, "Number of random a")->capture_default_str();
  perturb->add_option("--seed", pe.opt.seed, "Seed")->capture_default_str();
  perturb->add_option("--window", pe.opt.window, "Local stability window W")->capture_default_str();
  perturb->add_option("--samples", pe.opt.profile.sphere_samples, "Points per sphere in the gradient profile")
      ->capture_default_str();
  perturb->add_option("--starts", pe.opt.starts_per_axis, "Newton starts per axis")->capture_default_str();
  perturb->add_option("--tol-eps", pe.opt.profile.tol_eps, "Gradient profile threshold")->capture_default_str();
  add_common(perturb, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* cmd = app.get_subcommands().front();
  std::vector<std::string> echo(argv + 1, argv + argc);
  Report rep(cmd->get_name(), echo, !common.no_timing);
  try {
    try {
      if (cmd == analyze) run_analyze(an, rep);
      if (cmd == certify) run_certify(ce, rep);
      if (cmd == normalize) run_normalize(no, rep);
      if (cmd == gkcmd) run_gk(gk, rep);
      if (cmd == trivialize) run_trivialize(tz, rep);
      if (cmd == perturb) run_perturb(pe, rep);
    } catch (const HypothesisError& e) {
      hypothesis_failed(rep, e.what());
    } catch (const NonContractionError& e) {
      hypothesis_failed(rep, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      rep.set_status(Status::inconclusive, e.what());
      std::cerr << "msl: inconclusive: " << e.what() << "\n";
    }
    write_text(common.out, rep.dump());
  } catch (const ParseError& e) {
    std::cerr << "msl: parse error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "msl: " << e.what() << "\n";
    return 1;
  }
  return exit_code(rep.status());
}
