#pragma once

#include <string>

#include "mcf/mesh.hpp"
#include "mcf/model_surface.hpp"

namespace mcf {

struct ShrinkerResidual {
  double sup = 0.0;
  double rms = 0.0;  // rho-weighted
};

// Pointwise self-shrinker defect |H - F.nu| on a rescaled mesh, aggregated
// over interior vertices within the truncation ball. Zero exactly on the
// stationary sphere/cylinder/plane.
ShrinkerResidual shrinker_residual(const Mesh& mesh, int collar_rings = 1);

struct ClassifyOptions {
  double truncation_radius = 8.0;
  double fit_tolerance = 5e-2;       // RMS distance gate, length units
  double residual_tolerance = 1e-1;  // shrinker residual gate, 1/length
  int min_vertices = 16;
  int collar_rings = 1;
};

struct ClassificationResult {
  bool known = false;
  ModelKind kind = ModelKind::Plane;  // valid when known
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double radius = 0.0;
  double rms_residual = 0.0;
  double shrinker_sup = 0.0;
  double energy_gap = 0.0;  // |Etilde_mesh - Etilde_model(kind)|
  double rms_plane = 0.0, rms_sphere = 0.0, rms_cylinder = 0.0;

  const char* kind_name() const { return known ? model_kind_name(kind) : "unknown"; }
  std::string to_json() const;
};

// Fits all three shrinker models with rho-weighted least squares and picks
// the lowest RMS; unknown when the best RMS or the shrinker residual
// exceeds its gate. Ties within 1e-9 resolve to the lower-energy model.
ClassificationResult classify_shrinker(const Mesh& mesh, const ClassifyOptions& options = {});

}  // namespace mcf
