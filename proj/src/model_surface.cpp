#include "mcf/model_surface.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "mcf/errors.hpp"

namespace mcf {

using nlohmann::json;

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Plane: return "plane";
    case ModelKind::Cylinder: return "cylinder";
    case ModelKind::Sphere: return "sphere";
  }
  return "?";
}

double ModelSurface::mean_curvature() const {
  switch (kind) {
    case ModelKind::Plane: return 0.0;
    case ModelKind::Cylinder: return 1.0 / radius;
    case ModelKind::Sphere: return 2.0 / radius;
  }
  return 0.0;
}

double ModelSurface::second_form_norm() const {
  switch (kind) {
    case ModelKind::Plane: return 0.0;
    case ModelKind::Cylinder: return 1.0 / radius;
    case ModelKind::Sphere: return std::sqrt(2.0) / radius;
  }
  return 0.0;
}

namespace {
Vec3 unit_or_fail(const Vec3& v, const char* what) {
  require(v.norm() > 1e-12, ErrorCode::InvalidArgument, std::string("degenerate ") + what);
  return v.normalized();
}
}  // namespace

ModelSurface make_plane(const Vec3& point, const Vec3& normal) {
  return {ModelKind::Plane, point, unit_or_fail(normal, "plane normal"), 0.0};
}

ModelSurface make_cylinder(const Vec3& center, const Vec3& axis, double radius) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "cylinder radius must be positive");
  return {ModelKind::Cylinder, center, unit_or_fail(axis, "cylinder axis"), radius};
}

ModelSurface make_sphere(const Vec3& center, double radius) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "sphere radius must be positive");
  return {ModelKind::Sphere, center, Vec3::UnitZ(), radius};
}

ModelQuery model_query(const ModelSurface& model, const Vec3& query) {
  ModelQuery out;
  out.mean_curvature = model.mean_curvature();
  switch (model.kind) {
    case ModelKind::Plane: {
      const double d = (query - model.point).dot(model.axis);
      out.signed_distance = d;
      out.normal = model.axis;
      out.nearest = query - d * model.axis;
      return out;
    }
    case ModelKind::Cylinder: {
      const Vec3 rel = query - model.point;
      const Vec3 radial = rel - rel.dot(model.axis) * model.axis;
      const double rho = radial.norm();
      require(rho > 1e-12 * std::max(1.0, model.radius), ErrorCode::AmbiguousQuery,
              "nearest point undefined on the cylinder axis");
      out.normal = radial / rho;
      out.signed_distance = rho - model.radius;
      out.nearest = query - out.signed_distance * out.normal;
      return out;
    }
    case ModelKind::Sphere: {
      const Vec3 rel = query - model.point;
      const double r = rel.norm();
      require(r > 1e-12 * std::max(1.0, model.radius), ErrorCode::AmbiguousQuery,
              "nearest point undefined at the sphere center");
      out.normal = rel / r;
      out.signed_distance = r - model.radius;
      out.nearest = model.point + model.radius * out.normal;
      return out;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown model kind");
}

std::string model_to_json(const ModelSurface& model) {
  json j;
  j["kind"] = model_kind_name(model.kind);
  j["center"] = {model.point.x(), model.point.y(), model.point.z()};
  j["axis"] = {model.axis.x(), model.axis.y(), model.axis.z()};
  if (model.kind != ModelKind::Plane) j["radius"] = model.radius;
  return j.dump(2);
}

ModelSurface model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("model json: ") + e.what());
  }
  ModelSurface model;
  const std::string kind = j.at("kind").get<std::string>();
  const auto c = j.at("center");
  model.point = Vec3(c.at(0), c.at(1), c.at(2));
  const auto a = j.at("axis");
  model.axis = Vec3(a.at(0), a.at(1), a.at(2));
  if (kind == "plane") {
    return make_plane(model.point, model.axis);
  } else if (kind == "cylinder") {
    return make_cylinder(model.point, model.axis, j.at("radius").get<double>());
  } else if (kind == "sphere") {
    return make_sphere(model.point, j.at("radius").get<double>());
  }
  fail(ErrorCode::Parse, "unknown model kind: " + kind);
}

}  // namespace mcf
