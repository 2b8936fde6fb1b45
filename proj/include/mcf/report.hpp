#pragma once

#include <string>
#include <vector>

namespace mcf {

struct CheckRow {
  std::string run;
  std::string check;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct SuiteReport {
  std::vector<CheckRow> checks;
  std::vector<std::string> missing;  // run dirs without usable traces
  bool all_pass() const;
  std::string to_markdown() const;
  std::string to_json() const;
};

// Evaluates the per-run corroboration checks (monotonicity, dissipation
// balance, gauge identities, trapping, ball containment, classification)
// from persisted run directories. Missing artifacts are listed and the
// remaining runs still reported.
SuiteReport generate_report(const std::vector<std::string>& run_dirs);

}  // namespace mcf
