#pragma once

#include <string>

#include "mcf/mesh.hpp"

namespace mcf {

enum class ModelKind { Plane, Cylinder, Sphere };

const char* model_kind_name(ModelKind kind);

// Exact plane / cylinder / sphere. `axis` is the plane normal or cylinder
// axis (unit); unused for spheres. `radius` is absent (zero) for planes.
// Mean curvature follows the outward-normal convention: plane 0,
// cylinder 1/r, sphere 2/r.
struct ModelSurface {
  ModelKind kind = ModelKind::Plane;
  Vec3 point = Vec3::Zero();  // plane base point / cylinder center / sphere center
  Vec3 axis = Vec3::UnitZ();
  double radius = 0.0;

  double mean_curvature() const;
  double second_form_norm() const;  // |A|: plane 0, cylinder 1/r, sphere sqrt(2)/r
};

ModelSurface make_plane(const Vec3& point, const Vec3& normal);
ModelSurface make_cylinder(const Vec3& center, const Vec3& axis, double radius);
ModelSurface make_sphere(const Vec3& center, double radius);

struct ModelQuery {
  double signed_distance = 0.0;  // positive outside
  Vec3 nearest = Vec3::Zero();
  Vec3 normal = Vec3::Zero();    // outward at the nearest point
  double mean_curvature = 0.0;
};

// Closed-form nearest-point query. Throws Error(AmbiguousQuery) for points
// on a cylinder axis or at a sphere center.
ModelQuery model_query(const ModelSurface& model, const Vec3& query);

std::string model_to_json(const ModelSurface& model);
ModelSurface model_from_json(const std::string& text);

}  // namespace mcf
