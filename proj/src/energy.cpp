#include "mcf/energy.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "mcf/errors.hpp"

namespace mcf {

namespace {
constexpr double kTruncationRadius = 8.0;  // exp(-32) < 2e-14

// 3-point (edge midpoint) rule: exact for quadratics, O(h^4) per triangle.
template <typename Density>
double triangle_quadrature(const Mesh& mesh, Density&& rho) {
  double total = 0.0;
  for (const auto& tri : mesh.faces) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    total += area / 3.0 * (rho(0.5 * (a + b)) + rho(0.5 * (b + c)) + rho(0.5 * (c + a)));
  }
  return total;
}
}  // namespace

double gaussian_density(const Vec3& x, const Vec3& x0, double t0, double t) {
  require(t < t0, ErrorCode::InvalidArgument, "gaussian density needs t < t0");
  const double tau = t0 - t;
  return std::exp(-(x - x0).squaredNorm() / (4.0 * tau)) / (4.0 * M_PI * tau);
}

double energy_E(const Mesh& mesh, double t, const GaugeMap& gauge) {
  require(mesh.gauge == Gauge::Physical, ErrorCode::GaugeMismatch,
          "energy_E expects a physical-gauge mesh");
  require(t < gauge.base_time, ErrorCode::InvalidArgument, "energy_E needs t < t0");
  const double tau = gauge.base_time - t;
  // same dropped tail as the rescaled truncation: |x-x0|^2/(4 tau) > R^2/2
  const double cutoff2 = 2.0 * tau * kTruncationRadius * kTruncationRadius;
  return triangle_quadrature(mesh, [&](const Vec3& p) {
    const double d2 = (p - gauge.base_point).squaredNorm();
    if (d2 > cutoff2) return 0.0;
    return std::exp(-d2 / (4.0 * tau)) / (4.0 * M_PI * tau);
  });
}

double energy_Etilde(const Mesh& mesh) {
  require(mesh.gauge == Gauge::Rescaled, ErrorCode::GaugeMismatch,
          "energy_Etilde expects a rescaled-gauge mesh");
  const double cutoff2 = kTruncationRadius * kTruncationRadius;
  return triangle_quadrature(mesh, [&](const Vec3& p) {
    const double d2 = p.squaredNorm();
    if (d2 > cutoff2) return 0.0;
    return std::exp(-0.5 * d2);
  });
}

double model_energy(const ModelSurface& model) {
  const double tol = 1e-9;
  switch (model.kind) {
    case ModelKind::Plane:
      require(std::abs((model.point).dot(model.axis)) <= tol, ErrorCode::InvalidArgument,
              "model_energy: plane must pass through the origin");
      return 2.0 * M_PI;
    case ModelKind::Sphere:
      require(model.point.norm() <= tol, ErrorCode::InvalidArgument,
              "model_energy: sphere must be centered at the origin");
      require(std::abs(model.radius - std::sqrt(2.0)) <= tol, ErrorCode::InvalidArgument,
              "model_energy: shrinker sphere has radius sqrt(2)");
      return 8.0 * M_PI / std::exp(1.0);
    case ModelKind::Cylinder: {
      const Vec3 offset = model.point - model.point.dot(model.axis) * model.axis;
      require(offset.norm() <= tol, ErrorCode::InvalidArgument,
              "model_energy: cylinder axis must pass through the origin");
      require(std::abs(model.radius - 1.0) <= tol, ErrorCode::InvalidArgument,
              "model_energy: shrinker cylinder has radius 1");
      return 2.0 * M_PI * std::sqrt(2.0 * M_PI / std::exp(1.0));
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown model kind");
}

double dissipation(const Mesh& mesh) {
  require(mesh.gauge == Gauge::Rescaled, ErrorCode::GaugeMismatch,
          "dissipation expects a rescaled-gauge mesh");
  require(mesh.has_geometry(), ErrorCode::InvalidMesh, "dissipation needs computed geometry");
  double total = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const double d2 = mesh.vertices[i].squaredNorm();
    if (d2 > kTruncationRadius * kTruncationRadius) continue;
    const double residual = mesh.vertices[i].dot(mesh.normals[i]) - mesh.mean_curvature[i];
    total += mesh.area_weights[i] * residual * residual * std::exp(-0.5 * d2);
  }
  return total;
}

Mesh rescale_surface(const Mesh& mesh, double t, const GaugeMap& gauge) {
  require(mesh.gauge == Gauge::Physical, ErrorCode::GaugeMismatch,
          "rescale_surface expects a physical-gauge mesh");
  const double lam = gauge.lambda(t);
  Mesh out = mesh;
  for (auto& v : out.vertices) v = lam * (v - gauge.base_point);
  for (auto& h : out.mean_curvature) h /= lam;
  for (auto& a : out.second_form_norm) a /= lam;
  for (auto& w : out.area_weights) w *= lam * lam;
  out.gauge = Gauge::Rescaled;
  return out;
}

Mesh unrescale_surface(const Mesh& mesh, double s, const GaugeMap& gauge) {
  require(mesh.gauge == Gauge::Rescaled, ErrorCode::GaugeMismatch,
          "unrescale_surface expects a rescaled-gauge mesh");
  const double lam = gauge.lambda(gauge.t_of_s(s));
  Mesh out = mesh;
  for (auto& v : out.vertices) v = gauge.base_point + v / lam;
  for (auto& h : out.mean_curvature) h *= lam;
  for (auto& a : out.second_form_norm) a *= lam;
  for (auto& w : out.area_weights) w /= lam * lam;
  out.gauge = Gauge::Physical;
  return out;
}

double check_E_relation(const Mesh& physical_mesh, double t, const GaugeMap& gauge) {
  const double e_phys = energy_E(physical_mesh, t, gauge);
  const Mesh rescaled = rescale_surface(physical_mesh, t, gauge);
  const double e_tilde = energy_Etilde(rescaled);
  return std::abs(e_tilde - 2.0 * M_PI * e_phys);
}

std::string EnergyReport::to_json() const {
  nlohmann::json j;
  j["E_tilde"] = e_tilde;
  j["E"] = e_physical;
  j["dissipation"] = dissipation;
  j["relation_residual"] = relation_residual;
  return j.dump(2);
}

EnergyReport energy_report(const Mesh& physical_mesh, double t, const GaugeMap& gauge) {
  EnergyReport report;
  report.e_physical = energy_E(physical_mesh, t, gauge);
  const Mesh rescaled = rescale_surface(physical_mesh, t, gauge);
  report.e_tilde = energy_Etilde(rescaled);
  report.dissipation = mcf::dissipation(rescaled);
  report.relation_residual = std::abs(report.e_tilde - 2.0 * M_PI * report.e_physical);
  return report;
}

}  // namespace mcf
