#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "mcf/axisym.hpp"
#include "mcf/gauge.hpp"
#include "mcf/mesh.hpp"
#include "mcf/trace.hpp"

namespace mcf {

struct StepOptions {
  bool fix_boundary = true;        // Dirichlet boundary rings on open meshes
  double divergence_radius = 100;  // rescaled guard on sup |F|
  double cg_tolerance = 1e-12;
};

// dt = safety * (min edge)^2, the explicit-term accuracy scale.
double cfl_timestep(const Mesh& mesh, double safety = 0.25);

// One semi-implicit step of d/dt x = -H nu: (M + dt K) x' = M x with the
// cotangent stiffness K frozen at the current metric. Throws StepRejected
// on inverted or collapsed faces.
Mesh mcf_step(const Mesh& mesh, double dt, const StepOptions& options = {});

// One semi-implicit step of the rescaled flow d/ds xi = xi - H nu:
// (M + ds K) xi' = (1 + ds) M xi. Throws Divergence when sup |F| exceeds
// the guard radius.
Mesh rescaled_step(const Mesh& mesh, double ds, const StepOptions& options = {});

struct FlowRunConfig {
  Gauge gauge = Gauge::Physical;
  double time_begin = -1.0;  // t (physical) or s (rescaled)
  double time_end = -0.1;
  double safety = 0.25;
  int record_every = 10;
  long max_steps = 2000000;
  double blowup_threshold = std::numeric_limits<double>::infinity();  // on max |A|
  double min_edge_collapse_ratio = 1e-6;
  StepOptions step;
  GaugeMap gauge_map;

  // optional per-record hook (harness installs classification snapshots)
  std::function<void(const Mesh&, TraceRow&)> row_hook;
  // optional early-stop predicate, checked after every step
  std::function<bool(const Mesh&, double)> stop_when;
};

struct FlowResult {
  FlowTrace trace;
  Mesh final_mesh;
  std::optional<SingularEvent> event;
  std::string status;  // reached_end | singular_event | step_budget | stopped |
                       // step_rejected: ... | divergence: ...
  bool ok() const { return status == "reached_end" || status == "singular_event" || status == "stopped"; }
};

// Steps from time_begin until time_end, a singular event, an early stop, or
// the step budget; records diagnostics every record_every steps (first and
// last rows always). Step errors are folded into the status with the trace
// collected so far.
FlowResult run_flow(const Mesh& initial, const FlowRunConfig& config);

struct AxisymRunConfig {
  double time_end = 0.0;
  double safety = 0.25;
  int record_every = 50;
  long max_steps = 20000000;
  double neck_floor_ratio = 1e-3;  // floor = ratio * initial min u
  GaugeMap gauge_map;
  std::function<void(const AxisymProfile&, TraceRow&)> row_hook;
};

struct AxisymFlowResult {
  FlowTrace trace;
  AxisymProfile final_profile;  // last state above the neck floor
  std::optional<SingularEvent> event;
  std::string status;
  bool ok() const { return status == "reached_end" || status == "singular_event"; }
};

// Physical-gauge time integration of the profile PDE with trace recording
// and neck-pinch capture.
AxisymFlowResult run_axisym_flow(const AxisymProfile& initial, const AxisymRunConfig& config);

// Blow-up extrapolation from a physical trace via the type-I ansatz
// max|A| ~ C0 (-2(t-T))^{-1/2}; none when max |A| never reaches threshold.
std::optional<SingularEvent> detect_singularity(const FlowTrace& trace, double threshold);

// Plain mean of |x - x0| over vertices.
double mean_radius(const Mesh& mesh, const Vec3& center = Vec3::Zero());

// Scale factor sigma such that the rescaled flow started from sigma * mesh
// has vanishing radial drift after a settling span: the discrete shrinker
// is an unstable fixed point, so stationarity tests must start on it.
// radius_of defaults to mean_radius.
double shrinker_balance_scale(const Mesh& rescaled_mesh, const StepOptions& options,
                              double settle_span = 1.0, double probe_span = 0.25,
                              std::function<double(const Mesh&)> radius_of = {});

struct ExtinctionCalibration {
  double time_to_extinction = 0.0;  // from the given mesh
  int iterations = 0;
  Mesh final_mesh;   // terminal rescaled state of the converged run
  FlowTrace trace;   // trace of the converged run
};

// Bisection on the believed time-to-extinction of a closed physical-gauge
// mesh so that the rescaled flow centered at the extinction time neither
// escapes outward nor collapses over an s-span. The converged gauge makes
// the rescaled trajectory approach its stationary limit.
ExtinctionCalibration calibrate_extinction(const Mesh& physical_mesh, const FlowRunConfig& base,
                                           double s_span, double tau_lo, double tau_hi,
                                           double tol_rel = 1e-7);

}  // namespace mcf
