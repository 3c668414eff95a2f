#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opk/core/types.hpp"

namespace opk {

//! FNV-1a hash of a string, rendered as fixed-width hex. Used to fingerprint
//! check inputs so reruns can be matched record-by-record.
inline std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : text) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << h;
  return out.str();
}

//! One measured check. `value` is the measured residual (or deviation),
//! `tol` the threshold it was compared against. Non-gating records capture
//! known discrepancies of the quoted source formulas: they are reported and
//! flagged but do not fail the run.
struct CheckRecord {
  std::string name;           //!< unique within a report; reports are sorted by it
  std::string tag;            //!< behavior family, e.g. "hermitian-symmetry"
  std::string inputs_digest;  //!< fingerprint of the inputs description
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  bool gating = true;
  std::string note;
};

//! Conventions every report carries: the sign/factor calibration the library
//! commits to, so downstream consumers can interpret matrices and spectra.
inline nlohmann::ordered_json conventions_json() {
  nlohmann::ordered_json j;
  j["inner_product"] = "antilinear in the first argument";
  j["hamiltonian_contraction"] = "X contracted with the curvature equals the covariant differential of F (factor +1)";
  j["bracket_curvature_factor"] = -1.0;
  j["vertical_component"] = "phi = -(F + theta(X))";
  j["generator_route"] = "-i * (directional slot-2 derivative + K * phi), sesquilinear form matrix";
  j["reconstruction_route"] = "-i * K(p,p)^{-1} * (diagonal generator block)";
  j["propagator_exponent"] = "+i t H on the whitened hermitian generator";
  j["fd_first_step"] = kFirstStep;
  j["fd_nested_step"] = kNestedStep;
  j["fd_richardson_levels"] = 1;
  return j;
}

struct Report {
  std::string command;
  std::string model;
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  std::vector<CheckRecord> checks;
  std::vector<std::string> flags;
  nlohmann::ordered_json extra;  //!< matrices, spectra, and other payloads

  //! Adds a record; names must be unique so that sorting is a total order.
  void add(CheckRecord record) {
    for (const CheckRecord& existing : checks) {
      if (existing.name == record.name) {
        throw std::logic_error("Report::add: duplicate check name '" + record.name + "'");
      }
    }
    checks.push_back(std::move(record));
  }

  //! Convenience: residual-style check, pass means value <= tol.
  void add_residual(const std::string& name, const std::string& tag, const std::string& inputs,
                    double value, double tol, bool gating = true, const std::string& note = "") {
    CheckRecord r;
    r.name = name;
    r.tag = tag;
    r.inputs_digest = fnv1a_digest(inputs);
    r.value = value;
    r.tol = tol;
    r.pass = value <= tol;
    r.gating = gating;
    r.note = note;
    if (!r.pass && !gating) flags.push_back(name + ": " + (note.empty() ? "known discrepancy" : note));
    add(std::move(r));
  }

  bool overall_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckRecord& r) { return r.pass || !r.gating; });
  }

  int gating_failures() const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckRecord& r) {
      return r.gating && !r.pass;
    }));
  }

  //! Serializes the report. Checks are ordered by name; the timestamp is the
  //! only field that varies between identical runs and can be suppressed.
  nlohmann::ordered_json to_json(bool with_timestamp = true) const {
    std::vector<CheckRecord> sorted = checks;
    std::sort(sorted.begin(), sorted.end(),
              [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
    nlohmann::ordered_json j;
    j["command"] = command;
    j["model"] = model;
    if (with_timestamp) {
      const auto now = std::chrono::system_clock::now();
      const std::time_t tt = std::chrono::system_clock::to_time_t(now);
      std::tm tm_utc{};
      gmtime_r(&tt, &tm_utc);
      std::ostringstream ts;
      ts << std::put_time(&tm_utc, "%Y-%m-%dT%H:%M:%SZ");
      j["generated_at"] = ts.str();
    }
    j["environment"] = {{"seed", seed}, {"tol_scale", tol_scale}};
    j["conventions"] = conventions_json();
    j["summary"] = {{"checks", sorted.size()},
                    {"gating_failures", gating_failures()},
                    {"overall_pass", overall_pass()}};
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CheckRecord& r : sorted) {
      nlohmann::ordered_json rec;
      rec["name"] = r.name;
      rec["tag"] = r.tag;
      rec["inputs_digest"] = r.inputs_digest;
      rec["value"] = r.value;
      rec["tol"] = r.tol;
      rec["pass"] = r.pass;
      rec["gating"] = r.gating;
      if (!r.note.empty()) rec["note"] = r.note;
      arr.push_back(std::move(rec));
    }
    j["checks"] = std::move(arr);
    j["flags"] = flags;
    if (!extra.empty()) j["data"] = extra;
    return j;
  }

  //! Flat CSV of the residual table (same sort order as the JSON).
  std::string to_csv() const {
    std::vector<CheckRecord> sorted = checks;
    std::sort(sorted.begin(), sorted.end(),
              [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
    std::ostringstream out;
    out << "name,tag,value,tol,pass,gating\n";
    out << std::setprecision(17);
    for (const CheckRecord& r : sorted) {
      out << r.name << ',' << r.tag << ',' << r.value << ',' << r.tol << ','
          << (r.pass ? 1 : 0) << ',' << (r.gating ? 1 : 0) << '\n';
    }
    return out.str();
  }
};

//! Complex matrix as nested [re, im] pairs, row-major.
inline nlohmann::ordered_json cmat_to_json(const CMat& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

//! Writes the JSON report to `path`; when `path` ends in .json a CSV sidecar
//! with the residual table is written next to it, and when `path` ends in
//! .csv only the CSV table is written.
inline void write_report(const Report& report, const std::string& path, bool with_timestamp = true) {
  const auto ends_with = [&path](const std::string& suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".csv")) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report: cannot open " + path);
    out << report.to_csv();
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report: cannot open " + path);
  out << report.to_json(with_timestamp).dump(2) << '\n';
  if (ends_with(".json")) {
    const std::string csv_path = path.substr(0, path.size() - 5) + ".csv";
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("write_report: cannot open " + csv_path);
    csv << report.to_csv();
  }
}

}  // namespace opk
