#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mcf/mesh.hpp"

namespace mcf {

// One recorded diagnostics row. `time` is t on physical traces and s on
// rescaled ones. The CSV schema is the fixed 10-column set; the remaining
// fields are in-memory extras used by the detectors and identity checks.
struct TraceRow {
  double time = 0.0;
  Gauge gauge = Gauge::Physical;
  double e_tilde = 0.0;
  double dissipation = 0.0;
  double max_A = 0.0;
  double sup_F = 0.0;  // sup |F| of the rescaled image
  double min_edge = 0.0;
  std::string cls;  // classification snapshot, empty when not recorded
  double cls_radius = std::numeric_limits<double>::quiet_NaN();
  double cls_residual = std::numeric_limits<double>::quiet_NaN();

  // not serialized to CSV
  double e_physical = std::numeric_limits<double>::quiet_NaN();
  double max_grad_A = std::numeric_limits<double>::quiet_NaN();  // axisym runs
  Vec3 peak_A_position = Vec3::Zero();
};

struct FlowTrace {
  Gauge gauge = Gauge::Physical;
  std::vector<TraceRow> rows;

  // enforces the trace invariants: constant gauge, strictly increasing time
  void append(const TraceRow& row);
  bool empty() const { return rows.empty(); }
  const TraceRow& back() const { return rows.back(); }
};

enum class SingularTrigger { CurvatureBlowup, NeckPinch, MinEdgeCollapse };

const char* singular_trigger_name(SingularTrigger trigger);

struct SingularEvent {
  Vec3 location = Vec3::Zero();
  double time = 0.0;   // extrapolated blow-up time
  double peak_A = 0.0;
  SingularTrigger trigger = SingularTrigger::CurvatureBlowup;

  std::string to_json() const;
};

// Fixed column order: time,gauge,E_tilde,dissipation,maxA,supF,minEdge,
// class,class_radius,class_residual.
void write_trace_csv(const FlowTrace& trace, const std::string& path);
FlowTrace read_trace_csv(const std::string& path);

}  // namespace mcf
