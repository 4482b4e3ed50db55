#include "msl/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>

namespace msl {

void to_json(Json& j, const EndWindow& v);
void from_json(const Json& j, EndWindow& v);

namespace {

// Each struct lists its fields once in a visit() overload; Writer and Reader
// walk that list in the two directions. Writer::extra adds derived keys that
// Reader ignores.

template <class T>
Json encode(const T& v);
template <class T>
void decode(const Json& j, T& v);

struct Writer {
  Json& j;
  template <class T>
  void operator()(const char* key, const T& v) {
    j[key] = encode(v);
  }
  template <class T>
  void extra(const char* key, const T& v) {
    j[key] = encode(v);
  }
  static constexpr bool reading = false;
};

struct Reader {
  const Json& j;
  template <class T>
  void operator()(const char* key, T& v) {
    decode(j.at(key), v);
  }
  template <class T>
  void extra(const char*, const T&) {}
  static constexpr bool reading = true;
};

template <class E>
struct EnumNames;

template <>
struct EnumNames<Tri> {
  static constexpr std::pair<Tri, const char*> table[] = {
      {Tri::yes, "yes"}, {Tri::no, "no"}, {Tri::inconclusive, "inconclusive"}};
};
template <>
struct EnumNames<EndKind> {
  static constexpr std::pair<EndKind, const char*> table[] = {{EndKind::limit, "limit"},
                                                              {EndKind::diverges_up, "diverges_up"},
                                                              {EndKind::diverges_down, "diverges_down"},
                                                              {EndKind::oscillating, "oscillating"},
                                                              {EndKind::inconclusive, "inconclusive"}};
};
template <>
struct EnumNames<EndSigma::State> {
  static constexpr std::pair<EndSigma::State, const char*> table[] = {{EndSigma::State::empty, "empty"},
                                                                      {EndSigma::State::clusters, "clusters"},
                                                                      {EndSigma::State::inconclusive, "inconclusive"}};
};
template <>
struct EnumNames<GradientProfile::Verdict> {
  static constexpr std::pair<GradientProfile::Verdict, const char*> table[] = {
      {GradientProfile::Verdict::origin_excluded, "origin_excluded"},
      {GradientProfile::Verdict::inconclusive, "inconclusive"}};
};

template <class E>
concept Named = requires { EnumNames<E>::table; };

template <class T>
struct is_vector : std::false_type {};
template <class T, class A>
struct is_vector<std::vector<T, A>> : std::true_type {};

template <class T>
struct is_optional : std::false_type {};
template <class T>
struct is_optional<std::optional<T>> : std::true_type {};

template <class T>
Json encode(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return Json(v);
  } else if constexpr (std::is_same_v<T, double>) {
    return encode_number(v);
  } else if constexpr (std::is_same_v<T, long double>) {
    return encode_long(v);
  } else if constexpr (std::is_integral_v<T>) {
    return Json(v);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return Json(v);
  } else if constexpr (Named<T>) {
    for (const auto& [e, name] : EnumNames<T>::table)
      if (e == v) return Json(name);
    throw Error("unnamed enum value");
  } else if constexpr (is_vector<T>::value) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(encode(x));
    return a;
  } else if constexpr (is_optional<T>::value) {
    return v ? encode(*v) : Json(nullptr);
  } else {
    Json j;
    to_json(j, v);
    return j;
  }
}

template <class T>
void decode(const Json& j, T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    v = j.get<bool>();
  } else if constexpr (std::is_same_v<T, double>) {
    v = decode_number(j);
  } else if constexpr (std::is_same_v<T, long double>) {
    v = decode_long(j);
  } else if constexpr (std::is_integral_v<T>) {
    v = j.get<T>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    v = j.get<std::string>();
  } else if constexpr (Named<T>) {
    const std::string s = j.get<std::string>();
    for (const auto& [e, name] : EnumNames<T>::table)
      if (s == name) {
        v = e;
        return;
      }
    throw Error("unknown enum name '" + s + "'");
  } else if constexpr (is_vector<T>::value) {
    v.clear();
    for (const auto& x : j) {
      typename T::value_type e{};
      decode(x, e);
      v.push_back(std::move(e));
    }
  } else if constexpr (is_optional<T>::value) {
    if (j.is_null()) {
      v.reset();
    } else {
      typename T::value_type e{};
      decode(j, e);
      v = std::move(e);
    }
  } else {
    from_json(j, v);
  }
}

long double log10_abs(long double v) {
  return v == 0 ? -std::numeric_limits<long double>::infinity() : std::log10(std::fabs(v));
}

// ---------------------------------------------------------------- field lists

template <class IO, class F>
void visit(IO& io, F& v) requires std::is_same_v<std::remove_const_t<F>, Flag> {
  io("value", v.value);
  io("margin", v.margin);
  io.extra("margin_log10", static_cast<double>(log10_abs(v.margin)));
  io("margin_ratio", v.margin_ratio);
  io("basis", v.basis);
}

template <class IO, class V>
void visit(IO& io, V& v) requires std::is_same_v<std::remove_const_t<V>, ValueSet> {
  io("lo", v.lo);
  io("hi", v.hi);
  io("uncertainty", v.uncertainty);
}

template <class IO, class C>
void visit(IO& io, C& v) requires std::is_same_v<std::remove_const_t<C>, Critical1D> {
  io("x", v.x);
  io("value", v.value);
  io("value_error", v.value_error);
  io("second_derivative", v.second_derivative);
  io("residual", v.residual);
  io("morse_index", v.morse_index);
}

template <class IO, class C>
void visit(IO& io, C& v) requires std::is_same_v<std::remove_const_t<C>, CriticalLocus1D> {
  io("window", v.window);
  io("density", v.density);
  io("points", v.points);
  io("degenerate", v.degenerate);
  io("derivative_identically_zero", v.derivative_identically_zero);
  io("complete_in_window", v.complete_in_window);
  io("incomplete_reason", v.incomplete_reason);
  io("rescan_count", v.rescan_count);
}

template <class IO, class W>
void visit(IO& io, W& v) requires std::is_same_v<std::remove_const_t<W>, EndWindow> {
  io("lo", v.lo);
  io("hi", v.hi);
  io("min", v.min);
  io("max", v.max);
}

template <class IO, class S>
void visit(IO& io, S& v) requires std::is_same_v<std::remove_const_t<S>, EndSide> {
  io("direction", v.direction);
  io("kind", v.kind);
  io("liminf", v.liminf);
  io("limsup", v.limsup);
  io("limit", v.limit);
  io("limit_uncertainty", v.limit_uncertainty);
  io("windows", v.windows);
}

template <class IO, class S>
void visit(IO& io, S& v) requires std::is_same_v<std::remove_const_t<S>, EndSigma> {
  io("state", v.state);
  io("clusters", v.clusters);
  io("margin", v.margin);
  io("basis", v.basis);
}

template <class IO, class S>
void visit(IO& io, S& v) requires std::is_same_v<std::remove_const_t<S>, StabilityReport> {
  io("is_morse", v.is_morse);
  io("locally_stable", v.locally_stable);
  io("infinitesimally_stable", v.infinitesimally_stable);
  io("quasi_proper", v.quasi_proper);
  io("dimca_stable", v.dimca_stable);
  io("strongly_stable", v.strongly_stable);
  io("locus", v.locus);
  io("end_plus", v.ends.plus);
  io("end_minus", v.ends.minus);
  io("z_f", v.z_f);
  io("z_f_known", v.z_f_known);
  io("z_sigma_plus", v.z_sigma_plus);
  io("z_sigma_minus", v.z_sigma_minus);
  io("l_f", v.l_f);
  io("delta", v.delta);
}

template <class IO, class C>
void visit(IO& io, C& v) requires std::is_same_v<std::remove_const_t<C>, CriticalPoint> {
  io("location", v.location);
  io("value", v.value);
  io("morse_index", v.morse_index);
  io("grad_residual", v.grad_residual);
  io("hessian_eigenvalues", v.hessian_eigenvalues);
  io("cert_radius", v.cert_radius);
  io("iterates", v.iterates);
}

template <class IO, class C>
void visit(IO& io, C& v) requires std::is_same_v<std::remove_const_t<C>, CkNorm> {
  io("k", v.k);
  io("over_set", v.over_set);
  io("grid_lower_bound", v.grid_lower_bound);
  io("total", v.total);
  io("parts", v.parts);
  io("argmax", v.argmax);
  io("samples", v.samples);
}

template <class IO, class G>
void visit(IO& io, G& v) requires std::is_same_v<std::remove_const_t<G>, GateResult> {
  io("passed", v.passed);
  io("norm", v.norm);
  io("bound", v.bound);
  io("margin", v.margin);
  io("detail", v.detail);
}

template <class IO, class U>
void visit(IO& io, U& v) requires std::is_same_v<std::remove_const_t<U>, UniquenessCertificate> {
  io("unique", v.unique);
  io("point", v.point);
  io("gate_norm", v.gate_norm);
  io("gate_bound", v.gate_bound);
  io.extra("gate_margin", v.gate_bound - v.gate_norm);
  io("cells_scanned", v.cells_scanned);
  io("suspicious_cells", v.suspicious_cells);
  io("failing_cells", v.failing_cells);
  io("exclusion_radius", v.exclusion_radius);
  io("witness", v.witness);
}

template <class IO, class P>
void visit(IO& io, P& v) requires std::is_same_v<std::remove_const_t<P>, PerturbationBounds> {
  io("g_point", v.g_point);
  io("h_point", v.h_point);
  io("dist_x", v.dist_x);
  io("bound_x", v.bound_x);
  io.extra("margin_x", v.bound_x - v.dist_x);
  io("dist_y", v.dist_y);
  io("bound_y", v.bound_y);
  io.extra("margin_y", v.bound_y - v.dist_y);
  io("norm_g_minus_h", v.norm_g_minus_h);
  io("norm_g", v.norm_g);
  io("holds_x", v.holds_x);
  io("holds_y", v.holds_y);
  io("both_hold", v.both_hold);
}

template <class IO, class N>
void visit(IO& io, N& v) requires std::is_same_v<std::remove_const_t<N>, NormalizationResiduals> {
  io.extra("passed", v.passed());
  io("sigma_composite", v.sigma_composite);
  io("delta_composite", v.delta_composite);
  io("count_matches", v.count_matches);
  io("sigma_error", v.sigma_error);
  io.extra("sigma_ok", v.sigma_ok());
  io("delta_error", v.delta_error);
  io.extra("delta_ok", v.delta_ok());
  io("c0_residual", v.c0_residual);
  io("c0_perturbation", v.c0_perturbation);
  io.extra("c0_bound", 5.0 * v.c0_perturbation);
  io.extra("c0_ok", v.c0_ok());
  io("psi_min_derivative", v.psi_min_derivative);
  io("psi2_min_det", v.psi2_min_det);
  io("psi1_min_derivative", v.psi1_min_derivative);
  io.extra("diffeo_ok", v.diffeo_ok());
  io("identity_checks", v.identity_checks);
  io("identity_violations", v.identity_violations);
  io("grid_points", v.grid_points);
  io("tolerance", v.tolerance);
}

template <class IO, class G>
void visit(IO& io, G& v) requires std::is_same_v<std::remove_const_t<G>, GradientProfile> {
  io("verdict", v.verdict);
  io("epsilon_hat", v.epsilon_hat);
  io("tol_eps", v.tol_eps);
  io.extra("margin", v.epsilon_hat - v.tol_eps);
  io("r_star", v.r_star);
  io("radii", v.radii);
  io("min_grad", v.min_grad);
  io("tail_min", v.tail_min);
  io("argmin", v.argmin);
}

template <class IO, class G>
void visit(IO& io, G& v) requires std::is_same_v<std::remove_const_t<G>, GkRecord> {
  io("n", v.n);
  io("k", v.k);
  io("morse", v.morse);
  io("morse_index", v.morse_index);
  io("proper", v.proper);
  double worst = std::numeric_limits<double>::infinity();
  for (double r : v.min_abs_ratio) worst = std::min(worst, r);
  io.extra("proper_margin", worst - 0.5);
  io("quasi_proper", v.quasi_proper);
  io("strongly_stable", v.strongly_stable);
  io("stable", v.stable);
  io("stable_basis", v.stable_basis);
  io("min_abs_ratio", v.min_abs_ratio);
  io("null_cone_values", v.null_cone_values);
  io("zero_is_improper", v.zero_is_improper);
  io("profile", v.profile);
}

template <class IO, class O>
void visit(IO& io, O& v) requires std::is_same_v<std::remove_const_t<O>, TrivializationOrbit> {
  io("start", v.start);
  io("max_value_residual", v.max_value_residual);
  io("max_radius_drift", v.max_radius_drift);
  io("times", v.times);
  io("points", v.points);
  io("value_residual", v.value_residual);
  io("radius_drift", v.radius_drift);
}

template <class IO, class T>
void visit(IO& io, T& v) requires std::is_same_v<std::remove_const_t<T>, Trivialization> {
  io("q", v.q);
  io("R", v.R);
  io("passed", v.passed);
  io("max_value_residual", v.max_value_residual);
  io("max_radius_drift", v.max_radius_drift);
  io("tol_flow", v.tol_flow);
  io("orbits", v.orbits);
}

template <class IO, class T>
void visit(IO& io, T& v) requires std::is_same_v<std::remove_const_t<T>, ScanTrial> {
  io("a", v.a);
  io("passed", v.passed);
  io("critical_points", v.critical_points);
  io("min_abs_eigenvalue", v.min_abs_eigenvalue);
  io("min_value_gap", v.min_value_gap);
  io("locally_stable", v.locally_stable);
  io("failure", v.failure);
  io("epsilon_hat", v.epsilon_hat);
  io("origin_excluded", v.origin_excluded);
}

template <class IO, class S>
void visit(IO& io, S& v) requires std::is_same_v<std::remove_const_t<S>, ScanStatistics> {
  io("trials", v.trials);
  io("passes", v.passes);
  io("pass_fraction", v.pass_fraction);
  io("seed", v.seed);
  io("window", v.window);
  io("failing", v.failing);
  io("results", v.results);
}

template <class T>
void write(Json& j, const T& v) {
  j = Json::object();
  Writer w{j};
  visit(w, v);
}

template <class T>
void read(const Json& j, T& v) {
  Reader r{j};
  visit(r, v);
}

}  // namespace

std::string tool_version() {
#ifdef MSL_VERSION
  return MSL_VERSION;
#else
  return "unknown";
#endif
}

Json encode_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode_number(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error("not a number: '" + s + "'");
  }
  return j.get<double>();
}

Json encode_long(long double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return std::string(buf);
}

long double decode_long(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<long double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<long double>::infinity();
  if (s == "-inf") return -std::numeric_limits<long double>::infinity();
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error("not a number: '" + s + "'");
  return v;
}

#define MSL_JSON_IO(T)                                    \
  void to_json(Json& j, const T& v) { write(j, v); }      \
  void from_json(const Json& j, T& v) { read(j, v); }

MSL_JSON_IO(Flag)
MSL_JSON_IO(ValueSet)
MSL_JSON_IO(Critical1D)
MSL_JSON_IO(CriticalLocus1D)
MSL_JSON_IO(EndSide)
MSL_JSON_IO(EndSigma)
MSL_JSON_IO(StabilityReport)
MSL_JSON_IO(CriticalPoint)
MSL_JSON_IO(CkNorm)
MSL_JSON_IO(GateResult)
MSL_JSON_IO(UniquenessCertificate)
MSL_JSON_IO(PerturbationBounds)
MSL_JSON_IO(NormalizationResiduals)
MSL_JSON_IO(GradientProfile)
MSL_JSON_IO(GkRecord)
MSL_JSON_IO(TrivializationOrbit)
MSL_JSON_IO(Trivialization)
MSL_JSON_IO(ScanTrial)
MSL_JSON_IO(ScanStatistics)

#undef MSL_JSON_IO

void to_json(Json& j, const EndWindow& v) { write(j, v); }
void from_json(const Json& j, EndWindow& v) { read(j, v); }

// ---------------------------------------------------------------- Report

const char* to_string(Status s) {
  switch (s) {
    case Status::determined: return "determined";
    case Status::inconclusive: return "inconclusive";
    case Status::hypothesis_not_met: return "hypothesis not met";
  }
  return "?";
}

int exit_code(Status s) { return s == Status::determined ? 0 : 2; }

Report::Report(std::string command, std::vector<std::string> argv, bool timing) : timing_(timing) {
  root_["schema"] = kReportSchema;
  root_["tool"] = {{"name", "msl"}, {"version", tool_version()}};
  root_["command"] = {{"name", std::move(command)}, {"argv", std::move(argv)}};
  root_["input"] = Json::object();
  root_["status"] = to_string(status_);
  root_["messages"] = Json::array();
  root_["sections"] = Json::object();
}

void Report::set_input(const std::string& expression, int arity) {
  root_["input"]["expression"] = expression;
  root_["input"]["arity"] = arity;
}

void Report::add_section(const std::string& name, Json data, std::chrono::steady_clock::time_point started) {
  Json s = Json::object();
  if (timing_)
    s["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  s["result"] = std::move(data);
  root_["sections"][name] = std::move(s);
}

void Report::set_status(Status s, const std::string& message) {
  if (static_cast<int>(s) > static_cast<int>(status_)) status_ = s;
  if (!message.empty()) messages_.push_back(message);
}

const Json& Report::json() const {
  root_["status"] = to_string(status_);
  root_["exit_code"] = exit_code(status_);
  root_["messages"] = messages_;
  return root_;
}

std::string Report::dump() const { return json().dump(2) + "\n"; }

// ---------------------------------------------------------------- CSV

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  row(header);
}

std::string CsvWriter::quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string q = "\"";
  for (char c : field) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string CsvWriter::number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw Error("csv row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  s.reserve(values.size());
  for (double v : values) s.push_back(number(v));
  row(s);
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, in_field = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      in_field = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      in_field = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      in_field = false;
    } else {
      field += c;
      in_field = true;
    }
  }
  if (quoted) throw Error("unterminated quoted csv field");
  if (in_field || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_psi_table(std::ostream& out, const TargetShift& psi, double lo, double hi, std::size_t samples) {
  CsvWriter w(out, {"y", "psi", "psi_derivative", "psi_inverse"});
  const std::size_t m = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
    w.row(std::vector<double>{y, psi(y), psi.derivative(y), psi.inverse(y)});
  }
}

void write_map_table(std::ostream& out, const NormalizationData& data, double W, std::size_t samples) {
  CsvWriter w(out, {"x", "psi2", "psi2_det", "psi1", "psi1_derivative", "composite", "f", "g"});
  const std::size_t m = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = -W + 2 * W * static_cast<double>(i) / static_cast<double>(m - 1);
    const double xs[1] = {x};
    const auto img = data.psi2.dim() ? data.psi2.map(xs) : FlowPsi2::Image{{x}, {1.0}, 1.0, true, false};
    const double p2 = img.point[0];
    w.row(std::vector<double>{x, p2, img.det, data.psi1(p2), data.psi1.derivative(p2), data.composite(x).value,
                              data.f(x), data.g(x)});
  }
}

void write_orbit_table(std::ostream& out, const Trivialization& tr) {
  const std::size_t n = tr.orbits.empty() ? 0 : tr.orbits.front().start.size();
  std::vector<std::string> header = {"orbit", "t"};
  for (std::size_t i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("value_residual");
  header.push_back("radius_drift");
  CsvWriter w(out, header);
  for (std::size_t o = 0; o < tr.orbits.size(); ++o) {
    const auto& orb = tr.orbits[o];
    for (std::size_t i = 0; i < orb.times.size(); ++i) {
      std::vector<double> r = {static_cast<double>(o), orb.times[i]};
      r.insert(r.end(), orb.points[i].begin(), orb.points[i].end());
      r.push_back(orb.value_residual[i]);
      r.push_back(orb.radius_drift[i]);
      w.row(r);
    }
  }
}

}  // namespace msl
