#include "mcf/classify.hpp"

#include <Eigen/Dense>
#include <cmath>

#include <nlohmann/json.hpp>

#include "mcf/energy.hpp"
#include "mcf/errors.hpp"

namespace mcf {

ShrinkerResidual shrinker_residual(const Mesh& mesh, int collar_rings) {
  require(mesh.gauge == Gauge::Rescaled, ErrorCode::GaugeMismatch,
          "shrinker_residual expects a rescaled mesh");
  require(mesh.has_geometry(), ErrorCode::InvalidMesh, "shrinker_residual needs geometry");
  const auto collar =
      mesh.has_boundary() ? mesh.boundary_collar(collar_rings) : std::vector<std::uint8_t>();
  ShrinkerResidual out;
  double weighted = 0.0, weight = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (!collar.empty() && collar[i]) continue;
    const double d2 = mesh.vertices[i].squaredNorm();
    if (d2 > 64.0) continue;
    const double r = std::abs(mesh.mean_curvature[i] - mesh.vertices[i].dot(mesh.normals[i]));
    out.sup = std::max(out.sup, r);
    const double w = mesh.area_weights[i] * std::exp(-0.5 * d2);
    weighted += w * r * r;
    weight += w;
  }
  out.rms = weight > 0 ? std::sqrt(weighted / weight) : 0.0;
  return out;
}

namespace {

struct WeightedPoints {
  std::vector<Vec3> p;
  std::vector<double> w;
  Vec3 mean = Vec3::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
};

WeightedPoints gather(const Mesh& mesh, const ClassifyOptions& options) {
  const auto collar = mesh.has_boundary() ? mesh.boundary_collar(options.collar_rings)
                                          : std::vector<std::uint8_t>();
  WeightedPoints pts;
  const double r2 = options.truncation_radius * options.truncation_radius;
  double total = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (!collar.empty() && collar[i]) continue;
    const double d2 = mesh.vertices[i].squaredNorm();
    if (d2 > r2) continue;
    const double w = mesh.area_weights[i] * std::exp(-0.5 * d2);
    pts.p.push_back(mesh.vertices[i]);
    pts.w.push_back(w);
    pts.mean += w * mesh.vertices[i];
    total += w;
  }
  require(static_cast<int>(pts.p.size()) >= options.min_vertices, ErrorCode::TooFewVertices,
          "classify_shrinker: too few vertices inside the truncation ball");
  pts.mean /= total;
  for (size_t i = 0; i < pts.p.size(); ++i) {
    const Vec3 d = pts.p[i] - pts.mean;
    pts.covariance += pts.w[i] * d * d.transpose();
  }
  pts.covariance /= total;
  return pts;
}

double weighted_rms(const std::vector<double>& residuals, const std::vector<double>& w) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < residuals.size(); ++i) {
    num += w[i] * residuals[i] * residuals[i];
    den += w[i];
  }
  return std::sqrt(num / den);
}

struct PlaneFit {
  Vec3 point, normal;
  double rms;
};

PlaneFit fit_plane(const WeightedPoints& pts) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(pts.covariance);
  PlaneFit fit;
  fit.point = pts.mean;
  fit.normal = eig.eigenvectors().col(0);  // smallest eigenvalue
  std::vector<double> res(pts.p.size());
  for (size_t i = 0; i < pts.p.size(); ++i) res[i] = (pts.p[i] - fit.point).dot(fit.normal);
  fit.rms = weighted_rms(res, pts.w);
  return fit;
}

struct SphereFit {
  Vec3 center;
  double radius;
  double rms;
};

SphereFit fit_sphere(const WeightedPoints& pts) {
  // |x|^2 = 2 c.x + (r^2 - |c|^2): weighted linear least squares
  Eigen::Matrix4d ata = Eigen::Matrix4d::Zero();
  Eigen::Vector4d atb = Eigen::Vector4d::Zero();
  for (size_t i = 0; i < pts.p.size(); ++i) {
    Eigen::Vector4d row(2.0 * pts.p[i].x(), 2.0 * pts.p[i].y(), 2.0 * pts.p[i].z(), 1.0);
    ata += pts.w[i] * row * row.transpose();
    atb += pts.w[i] * row * pts.p[i].squaredNorm();
  }
  const Eigen::Vector4d sol = ata.ldlt().solve(atb);
  SphereFit fit;
  fit.center = sol.head<3>();
  const double r2 = sol(3) + fit.center.squaredNorm();
  fit.radius = r2 > 0 ? std::sqrt(r2) : 0.0;
  std::vector<double> res(pts.p.size());
  for (size_t i = 0; i < pts.p.size(); ++i) {
    res[i] = (pts.p[i] - fit.center).norm() - fit.radius;
  }
  fit.rms = weighted_rms(res, pts.w);
  return fit;
}

struct CylinderFit {
  Vec3 point, axis;
  double radius;
  double rms;
};

CylinderFit fit_cylinder(const WeightedPoints& pts) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(pts.covariance);
  CylinderFit fit;
  fit.axis = eig.eigenvectors().col(2);  // largest spread
  Vec3 e1 = fit.axis.cross(Vec3::UnitX());
  if (e1.norm() < 1e-6) e1 = fit.axis.cross(Vec3::UnitY());
  e1.normalize();
  const Vec3 e2 = fit.axis.cross(e1);

  // 2D circle fit in the transverse plane
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < pts.p.size(); ++i) {
    const Vec3 d = pts.p[i] - pts.mean;
    const double u = d.dot(e1), v = d.dot(e2);
    Eigen::Vector3d row(2.0 * u, 2.0 * v, 1.0);
    ata += pts.w[i] * row * row.transpose();
    atb += pts.w[i] * row * (u * u + v * v);
  }
  const Eigen::Vector3d sol = ata.ldlt().solve(atb);
  const double cu = sol(0), cv = sol(1);
  const double r2 = sol(2) + cu * cu + cv * cv;
  fit.radius = r2 > 0 ? std::sqrt(r2) : 0.0;
  const Vec3 center3 = pts.mean + cu * e1 + cv * e2;
  fit.point = center3 - center3.dot(fit.axis) * fit.axis;  // axis foot point
  std::vector<double> res(pts.p.size());
  for (size_t i = 0; i < pts.p.size(); ++i) {
    const Vec3 d = pts.p[i] - center3;
    res[i] = std::hypot(d.dot(e1), d.dot(e2)) - fit.radius;
  }
  fit.rms = weighted_rms(res, pts.w);
  return fit;
}

}  // namespace

std::string ClassificationResult::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name();
  j["center"] = {center.x(), center.y(), center.z()};
  j["axis"] = {axis.x(), axis.y(), axis.z()};
  j["radius"] = radius;
  j["rms_residual"] = rms_residual;
  j["shrinker_residual"] = shrinker_sup;
  j["energy_gap"] = energy_gap;
  j["rms"] = {{"plane", rms_plane}, {"sphere", rms_sphere}, {"cylinder", rms_cylinder}};
  return j.dump(2);
}

ClassificationResult classify_shrinker(const Mesh& mesh, const ClassifyOptions& options) {
  require(mesh.gauge == Gauge::Rescaled, ErrorCode::GaugeMismatch,
          "classify_shrinker expects a rescaled mesh");
  require(mesh.has_geometry(), ErrorCode::InvalidMesh, "classify_shrinker needs geometry");

  const WeightedPoints pts = gather(mesh, options);
  const PlaneFit plane = fit_plane(pts);
  const SphereFit sphere = fit_sphere(pts);
  const CylinderFit cylinder = fit_cylinder(pts);

  ClassificationResult result;
  result.rms_plane = plane.rms;
  result.rms_sphere = sphere.rms;
  result.rms_cylinder = cylinder.rms;
  result.shrinker_sup = shrinker_residual(mesh, options.collar_rings).sup;

  // lowest RMS wins; ties resolve to the lower-energy model, and the model
  // energies order plane < sphere < cylinder
  struct Candidate {
    ModelKind kind;
    double rms;
  };
  const Candidate candidates[3] = {{ModelKind::Plane, plane.rms},
                                   {ModelKind::Sphere, sphere.rms},
                                   {ModelKind::Cylinder, cylinder.rms}};
  Candidate best = candidates[0];
  for (const auto& c : candidates) {
    if (c.rms < best.rms - 1e-9) best = c;
  }

  result.kind = best.kind;
  result.rms_residual = best.rms;
  switch (best.kind) {
    case ModelKind::Plane:
      result.center = plane.point;
      result.axis = plane.normal;
      result.radius = 0.0;
      break;
    case ModelKind::Sphere:
      result.center = sphere.center;
      result.radius = sphere.radius;
      break;
    case ModelKind::Cylinder:
      result.center = cylinder.point;
      result.axis = cylinder.axis;
      result.radius = cylinder.radius;
      break;
  }

  result.known = best.rms <= options.fit_tolerance &&
                 result.shrinker_sup <= options.residual_tolerance;
  if (result.known) {
    ModelSurface canonical;
    switch (best.kind) {
      case ModelKind::Plane: canonical = make_plane(Vec3::Zero(), result.axis); break;
      case ModelKind::Sphere: canonical = make_sphere(Vec3::Zero(), std::sqrt(2.0)); break;
      case ModelKind::Cylinder: canonical = make_cylinder(Vec3::Zero(), result.axis, 1.0); break;
    }
    result.energy_gap = std::abs(energy_Etilde(mesh) - model_energy(canonical));
  } else {
    result.energy_gap = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace mcf
