#pragma once

// JSON reports and CSV tables for the command-line tool.
//
// Reports carry "schema": "msl/1". Long doubles are written as decimal text
// with 21 significant digits (exact for the 64-bit mantissa), non-finite
// doubles as the strings "inf", "-inf" and "nan". Every result type below
// reads back through from_json to an equal value.

#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "msl/critical.hpp"
#include "msl/endgeom.hpp"
#include "msl/jets.hpp"
#include "msl/normalize.hpp"
#include "msl/oned.hpp"

namespace msl {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "msl/1";

std::string tool_version();

Json encode_number(double v);
double decode_number(const Json& j);
Json encode_long(long double v);
long double decode_long(const Json& j);

void to_json(Json& j, const Flag& v);
void from_json(const Json& j, Flag& v);
void to_json(Json& j, const ValueSet& v);
void from_json(const Json& j, ValueSet& v);
void to_json(Json& j, const Critical1D& v);
void from_json(const Json& j, Critical1D& v);
void to_json(Json& j, const CriticalLocus1D& v);
void from_json(const Json& j, CriticalLocus1D& v);
void to_json(Json& j, const EndSide& v);
void from_json(const Json& j, EndSide& v);
void to_json(Json& j, const EndSigma& v);
void from_json(const Json& j, EndSigma& v);
void to_json(Json& j, const StabilityReport& v);
void from_json(const Json& j, StabilityReport& v);

void to_json(Json& j, const CriticalPoint& v);
void from_json(const Json& j, CriticalPoint& v);
void to_json(Json& j, const CkNorm& v);
void from_json(const Json& j, CkNorm& v);
void to_json(Json& j, const GateResult& v);
void from_json(const Json& j, GateResult& v);
void to_json(Json& j, const UniquenessCertificate& v);
void from_json(const Json& j, UniquenessCertificate& v);
void to_json(Json& j, const PerturbationBounds& v);
void from_json(const Json& j, PerturbationBounds& v);

void to_json(Json& j, const NormalizationResiduals& v);
void from_json(const Json& j, NormalizationResiduals& v);

void to_json(Json& j, const GradientProfile& v);
void from_json(const Json& j, GradientProfile& v);
void to_json(Json& j, const GkRecord& v);
void from_json(const Json& j, GkRecord& v);
void to_json(Json& j, const TrivializationOrbit& v);
void from_json(const Json& j, TrivializationOrbit& v);
void to_json(Json& j, const Trivialization& v);
void from_json(const Json& j, Trivialization& v);
void to_json(Json& j, const ScanTrial& v);
void from_json(const Json& j, ScanTrial& v);
void to_json(Json& j, const ScanStatistics& v);
void from_json(const Json& j, ScanStatistics& v);

/// Outcome recorded in a report; the tool's exit code follows from it.
enum class Status { determined, inconclusive, hypothesis_not_met };

const char* to_string(Status s);
int exit_code(Status s);

/// A report document: header, input, named sections in insertion order.
class Report {
 public:
  Report(std::string command, std::vector<std::string> argv, bool timing = true);

  void set_input(const std::string& expression, int arity);
  Json& input() { return root_["input"]; }

  /// Stores `data` under sections.<name>, with the wall-clock time since
  /// `started` unless timing is off.
  void add_section(const std::string& name, Json data, std::chrono::steady_clock::time_point started);

  /// Runs body() and stores its result as a section.
  template <class Body>
  void section(const std::string& name, Body&& body) {
    const auto started = std::chrono::steady_clock::now();
    add_section(name, Json(body()), started);
  }

  /// Keeps the worst status seen so far.
  void set_status(Status s, const std::string& message = "");
  Status status() const { return status_; }

  const Json& json() const;
  /// Two-space indented JSON followed by a newline.
  std::string dump() const;

 private:
  mutable Json root_;
  bool timing_;
  Status status_ = Status::determined;
  std::vector<std::string> messages_;
};

/// RFC-4180 CSV: CRLF line ends, fields quoted when they hold a comma, quote,
/// CR or LF.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& values);

  static std::string quote(const std::string& field);
  /// Shortest decimal that reads back to the same double.
  static std::string number(double v);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// Parses RFC-4180 text back into rows (for tests and tooling).
std::vector<std::vector<std::string>> read_csv(const std::string& text);

/// Columns y, psi, psi_derivative, psi_inverse for `samples` values of y in [lo, hi].
void write_psi_table(std::ostream& out, const TargetShift& psi, double lo, double hi, std::size_t samples);

/// Columns x, psi2, psi2_det, psi1, psi1_derivative, composite, f, g over [-W, W].
void write_map_table(std::ostream& out, const NormalizationData& data, double W, std::size_t samples);

/// Columns orbit, t, x1..xn, value_residual, radius_drift.
void write_orbit_table(std::ostream& out, const Trivialization& tr);

}  // namespace msl
