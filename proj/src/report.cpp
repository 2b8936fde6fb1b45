#include "mcf/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mcf/errors.hpp"
#include "mcf/trace.hpp"

namespace mcf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path.string());
  json j;
  in >> j;
  return j;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void check_monotone_energy(const FlowTrace& trace, const std::string& run,
                           std::vector<CheckRow>& out) {
  if (trace.gauge != Gauge::Rescaled) return;
  const double tol = 1e-4 * trace.rows.front().e_tilde;
  double worst = 0.0;
  for (size_t i = 1; i < trace.rows.size(); ++i) {
    worst = std::max(worst, trace.rows[i].e_tilde - trace.rows[i - 1].e_tilde);
  }
  out.push_back({run, "E_tilde non-increasing (max jump)", worst, 0.0, tol, worst <= tol, ""});
}

void check_dissipation_balance(const FlowTrace& trace, const std::string& run,
                               std::vector<CheckRow>& out) {
  if (trace.gauge != Gauge::Rescaled || trace.rows.size() < 2) return;
  double worst = 0.0;
  int counted = 0;
  for (size_t i = 1; i < trace.rows.size(); ++i) {
    const auto& a = trace.rows[i - 1];
    const auto& b = trace.rows[i];
    const double mean_dissipation = 0.5 * (a.dissipation + b.dissipation);
    if (mean_dissipation <= 1e-4) continue;
    const double rate = -(b.e_tilde - a.e_tilde) / (b.time - a.time);
    worst = std::max(worst, std::abs(rate - mean_dissipation) / mean_dissipation);
    ++counted;
  }
  if (counted > 0) {
    out.push_back({run, "dE_tilde/ds matches dissipation (rel)", worst, 0.0, 0.10,
                   worst <= 0.10, std::to_string(counted) + " intervals"});
  }
}

}  // namespace

bool SuiteReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string SuiteReport::to_markdown() const {
  std::ostringstream out;
  out << "# Suite report\n\n";
  out << "| run | check | measured | expected | tolerance | result |\n";
  out << "|-----|-------|----------|----------|-----------|--------|\n";
  for (const auto& c : checks) {
    out << "| " << c.run << " | " << c.check << " | " << fmt(c.measured) << " | "
        << fmt(c.expected) << " | " << fmt(c.tolerance) << " | "
        << (c.pass ? "pass" : "FAIL") << " |\n";
  }
  if (!missing.empty()) {
    out << "\nMissing artifacts:\n";
    for (const auto& m : missing) out << "- " << m << "\n";
  }
  out << "\n" << (all_pass() ? "All checks passed.\n" : "Some checks FAILED.\n");
  return out.str();
}

std::string SuiteReport::to_json() const {
  json j;
  j["checks"] = json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"run", c.run},
                           {"check", c.check},
                           {"measured", c.measured},
                           {"expected", c.expected},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"note", c.note}});
  }
  j["missing"] = missing;
  j["all_pass"] = all_pass();
  return j.dump(2);
}

SuiteReport generate_report(const std::vector<std::string>& run_dirs) {
  require(!run_dirs.empty(), ErrorCode::InvalidArgument, "report needs at least one run");
  SuiteReport report;
  for (const auto& dir_name : run_dirs) {
    const fs::path dir(dir_name);
    std::string run = dir.filename().string();
    if (run.empty()) run = dir_name;
    try {
      const json manifest = read_json(dir / "manifest.json");
      run = manifest.value("name", run);
      const std::string status = manifest.value("status", "?");
      report.checks.push_back(
          {run, "run status completed", status == "completed" ? 1.0 : 0.0, 1.0, 0.0,
           status == "completed", status});

      const FlowTrace trace = read_trace_csv((dir / "trace.csv").string());
      if (trace.empty()) {
        report.missing.push_back(dir_name + ": empty trace");
        continue;
      }
      check_monotone_energy(trace, run, report.checks);
      check_dissipation_balance(trace, run, report.checks);

      const fs::path reports = dir / "reports";
      if (fs::exists(reports / "gauge_identities.json")) {
        const json g = read_json(reports / "gauge_identities.json");
        const double es = g.value("max_rel_E_relation_residual", 0.0);
        const double lam = g.value("max_rel_lambda_identity_residual", 0.0);
        report.checks.push_back({run, "E_tilde = 2 pi E (rel residual)", es, 0.0, 1e-6,
                                 es <= 1e-6, ""});
        report.checks.push_back({run, "exp(s) = sqrt(2) lambda (rel residual)", lam, 0.0, 1e-6,
                                 lam <= 1e-6, ""});
      }
      if (fs::exists(reports / "trapping.json")) {
        const json t = read_json(reports / "trapping.json");
        const bool violated = t.value("violated", true);
        report.checks.push_back({run, "sup|F| <= 2 Lambda", t.value("max_sup_F", 0.0),
                                 2.0 * t.value("Lambda", 0.0), 0.0, !violated, ""});
      }
      if (fs::exists(reports / "ball_check.json")) {
        const json b = read_json(reports / "ball_check.json");
        const bool all_inside = b.value("all_inside", false);
        report.checks.push_back({run, "origin ball nonempty on every snapshot",
                                 double(b.value("failures", 0)), 0.0, 0.0, all_inside, ""});
      }
      if (fs::exists(reports / "classification.json")) {
        const json c = read_json(reports / "classification.json");
        const std::string kind = c.value("kind", "unknown");
        const double radius = c.value("radius", 0.0);
        const double expected =
            kind == "sphere" ? std::sqrt(2.0) : (kind == "cylinder" ? 1.0 : 0.0);
        const double tol = kind == "cylinder" ? 2e-2 : 1e-2;
        const bool pass = kind != "unknown" && std::abs(radius - expected) <= tol;
        report.checks.push_back(
            {run, "classification radius (" + kind + ")", radius, expected, tol, pass, ""});
      }
      if (fs::exists(reports / "type_one.json")) {
        const json t = read_json(reports / "type_one.json");
        const double c0 = t.value("C0", 0.0);
        report.checks.push_back(
            {run, "type-I constant C0 finite", c0, 0.0, 0.0, std::isfinite(c0) && c0 > 0.0, ""});
      }
    } catch (const Error& e) {
      report.missing.push_back(dir_name + ": " + e.what());
    } catch (const json::exception& e) {
      report.missing.push_back(dir_name + ": " + e.what());
    }
  }
  return report;
}

}  // namespace mcf
