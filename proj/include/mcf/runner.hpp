#pragma once

#include <optional>
#include <string>

#include "mcf/classify.hpp"
#include "mcf/flow.hpp"
#include "mcf/scenario.hpp"
#include "mcf/trace.hpp"

namespace mcf {

// Builds the initial surface described by the scenario (perturbed with the
// scenario seed when requested).
Mesh build_scenario_surface(const ScenarioConfig& config);

struct RunResult {
  std::string directory;
  std::string status;  // completed | failed: ...
  FlowTrace trace;
  std::optional<SingularEvent> event;
  std::optional<ClassificationResult> classification;
  double calibrated_extinction = 0.0;  // when calibrate_extinction ran
  bool ok() const { return status == "completed"; }
};

// Executes a scenario and persists trace.csv, snapshots/, reports/*.json and
// manifest.json under the output directory. Deterministic for a fixed
// config + seed. Engine errors are captured in the manifest with
// status = failed and partial outputs retained.
RunResult run_scenario(const ScenarioConfig& config, const std::string& output_override = "");

}  // namespace mcf
