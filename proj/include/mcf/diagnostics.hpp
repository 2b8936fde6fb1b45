#pragma once

#include <string>
#include <vector>

#include "mcf/axisym.hpp"
#include "mcf/gauge.hpp"
#include "mcf/mesh.hpp"
#include "mcf/model_surface.hpp"
#include "mcf/trace.hpp"

namespace mcf {

// ---- type-I ratio ----------------------------------------------------------

struct TypeOneReport {
  std::vector<double> times;
  std::vector<double> ratios;     // max|A| / lambda(t)
  double c0 = 0.0;                // supremum of the samples
  bool monotone_envelope = false; // ratio series non-decreasing
  std::string to_json() const;
};

TypeOneReport type_one_ratio(const FlowTrace& trace, const GaugeMap& gauge = {});

// ---- non-collapsing --------------------------------------------------------

struct NonCollapseOptions {
  double alpha_cap = 4.0;  // per-vertex cap (outer balls of convex bodies are unconstrained)
  int collar_rings = 1;    // skip boundary collars as ball centers on open meshes
  bool brute_force = false;
  double slack = 0.0;      // extra pruning margin, set from the bbox diagonal
};

struct NonCollapseReport {
  std::vector<double> per_vertex_alpha;  // capped min of inner/outer alpha; -1 for skipped collar
  double alpha = 0.0;                    // global minimum
  std::vector<int> violating(double alpha_query) const;
  std::string to_json() const;
};

// Largest alpha per vertex such that the tangent inner and outer balls of
// radius alpha/H contain no other mesh vertex, via a uniform spatial hash
// with exact pruning (identical results to the brute-force scan).
// Throws Error(NonMeanConvex) listing vertices with H <= 0.
NonCollapseReport noncollapsing_alpha(const Mesh& mesh, const NonCollapseOptions& options = {});

// ---- local graph distance --------------------------------------------------

struct GraphOptions {
  double merge_fraction = 1e-3;  // projected-point merge distance, fraction of ball radius
  double gap_fraction = 2e-2;    // height gap flagged as sheeting, fraction of ball radius
  double ambiguity_margin = 1e-9;
};

struct GraphDistanceReport {
  double ball_radius = 0.0;
  double c0 = 0.0;  // max |g|
  double c1 = 0.0;  // max(c0, sup |grad g|), order 1 only
  double coverage = 0.0;
  int projected_count = 0;
  std::string to_json() const;
};

// Signed height g = (y - pi(y)) . nu over the model patch covered by the
// mesh inside the centered ball. order selects C^0 or C^1 reporting.
GraphDistanceReport graph_distance(const Mesh& mesh, const ModelSurface& model,
                                   double ball_radius, int order,
                                   const GraphOptions& options = {});

// ---- trapping and origin ball ----------------------------------------------

struct TrappingReport {
  double bound = 0.0;      // Lambda = max(C0, first-slice sup|F|)
  double max_sup_F = 0.0;
  bool violated = false;   // sup|F| > 2 Lambda somewhere
  std::string to_json() const;
};

TrappingReport trapping_bound(const FlowTrace& trace, double c0);

// True iff some vertex lies in the closed ball of radius sqrt(2)(1 + tol)
// about the origin. Rescaled gauge, N = 2.
bool ball_check(const Mesh& mesh, double tol = 2e-2);

// ---- curvature-derivative scaling -------------------------------------------

struct RegularityReport {
  std::vector<double> times;
  std::vector<double> grad_A;      // max |grad A| per sample
  std::vector<double> normalized;  // grad_A * (-2t) = rescaled |grad A| at m = 1
  double max_normalized = 0.0;
  std::string to_json() const;
};

// Normalized first-derivative table from an axisymmetric physical trace.
RegularityReport regularity_scaling(const FlowTrace& trace, const GaugeMap& gauge = {});

// Max residual of the exact gauge relation |grad~ A~| = |grad A| / lambda^2
// at m = 1, evaluated by rescaling the profile and recomputing.
double rescaled_grad_identity_residual(const AxisymProfile& profile, const GaugeMap& gauge = {});

// ---- volume growth -----------------------------------------------------------

struct VolumeGrowthReport {
  std::vector<double> radii;
  std::vector<double> areas;  // area of the mesh inside the centered ball
  double degree = 0.0;        // log-log least-squares slope
  double coefficient = 0.0;   // area ~ coefficient * R^degree
  std::string to_json() const;
};

VolumeGrowthReport volume_growth(const Mesh& mesh, const std::vector<double>& radii);

}  // namespace mcf
