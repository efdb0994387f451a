#pragma once

// Check records and reports. Records are kept sorted by name so that the
// JSON output does not depend on evaluation order.

#include "tgact/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace tgact {

enum class Bound {
  at_most,  // pass iff residual <= tolerance
  above,    // pass iff residual > tolerance (negative controls)
};

struct CheckRecord {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::at_most;
  std::string detail;

  bool passed() const {
    if (std::isnan(residual)) return false;
    return bound == Bound::at_most ? residual <= tolerance : residual > tolerance;
  }
};

template <class S>
nlohmann::json matrix_to_json(const Mat<S>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if constexpr (is_complex_v<S>) row.push_back({m(i, j).real(), m(i, j).imag()});
      else row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Report {
  std::string command;
  std::string field = "real";
  std::uint64_t seed = 0;
  int samples = 0;
  double tolerance = 0.0;
  std::vector<CheckRecord> checks;
  nlohmann::json artifacts = nlohmann::json::object();
  std::vector<std::string> notes;  // human-readable findings for the text summary
  std::string error;  // set when the run stopped on a configuration or refusal error
  double wall_time_ms = 0.0;

  void add(std::string name, double residual, double tol, Bound bound = Bound::at_most,
           std::string detail = {}) {
    checks.push_back({std::move(name), residual, tol, bound, std::move(detail)});
  }

  void flag(std::string name, bool ok, std::string detail = {}) {
    add(std::move(name), ok ? 0.0 : 1.0, 0.0, Bound::at_most, std::move(detail));
  }

  /// Appends another report's checks and artifacts under a prefix.
  void merge(const std::string& prefix, const Report& other) {
    for (auto c : other.checks) {
      c.name = prefix + "/" + c.name;
      checks.push_back(std::move(c));
    }
    if (!other.artifacts.empty()) artifacts[prefix] = other.artifacts;
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  }

  void sort_checks() {
    std::stable_sort(checks.begin(), checks.end(),
                     [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  }

  bool passed() const {
    if (!error.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.passed(); });
  }

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CheckRecord& c) { return !c.passed(); }));
  }

  nlohmann::json to_json(bool include_time = true) const {
    nlohmann::json j;
    j["command"] = command;
    j["field"] = field;
    j["seed"] = seed;
    j["samples"] = samples;
    j["tolerance"] = tolerance;
    j["status"] = !error.empty() ? "error" : (passed() ? "pass" : "fail");
    if (!error.empty()) j["error"] = error;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json r;
      r["name"] = c.name;
      r["status"] = c.passed() ? "pass" : "fail";
      r["residual"] = std::isfinite(c.residual) ? nlohmann::json(c.residual) : nlohmann::json("inf");
      r["tolerance"] = c.tolerance;
      r["bound"] = c.bound == Bound::at_most ? "at_most" : "above";
      if (!c.detail.empty()) r["detail"] = c.detail;
      arr.push_back(std::move(r));
    }
    j["checks"] = std::move(arr);
    j["artifacts"] = artifacts;
    j["notes"] = notes;
    if (include_time) j["wall_time_ms"] = wall_time_ms;
    return j;
  }

  /// Plain-text table; with quiet only failures and the summary line.
  std::string summary(bool quiet = false) const {
    std::ostringstream os;
    char buf[64];
    for (const auto& c : checks) {
      if (quiet && c.passed()) continue;
      std::snprintf(buf, sizeof buf, "%.3e %s %.1e", c.residual,
                    c.bound == Bound::at_most ? "<=" : ">", c.tolerance);
      os << (c.passed() ? "PASS  " : "FAIL  ") << c.name << "  " << buf;
      if (!c.detail.empty()) os << "  (" << c.detail << ")";
      os << "\n";
    }
    if (!quiet)
      for (const auto& n : notes) os << "NOTE  " << n << "\n";
    if (!error.empty()) os << "ERROR " << error << "\n";
    const char* status = !error.empty() ? "ERROR" : (passed() ? "PASS" : "FAIL");
    os << command << " [" << field << "]: " << status << " (" << checks.size()
       << " checks, " << failures() << " failed)\n";
    return os.str();
  }
};

}  // namespace tgact
