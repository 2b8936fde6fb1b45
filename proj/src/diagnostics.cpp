#include "mcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "mcf/errors.hpp"

namespace mcf {

using nlohmann::json;

// ---- type-I ratio ----------------------------------------------------------

std::string TypeOneReport::to_json() const {
  json j;
  j["times"] = times;
  j["ratios"] = ratios;
  j["C0"] = c0;
  j["monotone_envelope"] = monotone_envelope;
  return j.dump(2);
}

TypeOneReport type_one_ratio(const FlowTrace& trace, const GaugeMap& gauge) {
  require(!trace.empty(), ErrorCode::EmptyTrace, "type_one_ratio needs a non-empty trace");
  require(trace.gauge == Gauge::Physical, ErrorCode::GaugeMismatch,
          "type_one_ratio expects a physical-gauge trace");
  TypeOneReport report;
  report.monotone_envelope = true;
  for (const auto& row : trace.rows) {
    const double ratio = row.max_A / gauge.lambda(row.time);
    if (!report.ratios.empty() && ratio < report.ratios.back() - 1e-12) {
      report.monotone_envelope = false;
    }
    report.times.push_back(row.time);
    report.ratios.push_back(ratio);
    report.c0 = std::max(report.c0, ratio);
  }
  return report;
}

// ---- non-collapsing ----------------------------------------------------------

std::vector<int> NonCollapseReport::violating(double alpha_query) const {
  std::vector<int> out;
  for (size_t i = 0; i < per_vertex_alpha.size(); ++i) {
    if (per_vertex_alpha[i] >= 0.0 && per_vertex_alpha[i] < alpha_query) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

std::string NonCollapseReport::to_json() const {
  json j;
  j["alpha"] = alpha;
  int tested = 0;
  for (double a : per_vertex_alpha) tested += (a >= 0.0);
  j["vertices_tested"] = tested;
  return j.dump(2);
}

namespace {

struct SpatialHash {
  double cell = 1.0;
  std::unordered_map<long long, std::vector<int>> cells;

  static long long key(int i, int j, int k) {
    return ((long long)(i + (1 << 20)) << 42) | ((long long)(j + (1 << 20)) << 21) |
           (long long)(k + (1 << 20));
  }

  void build(const std::vector<Vec3>& points, double cell_size) {
    cell = cell_size;
    cells.clear();
    for (size_t idx = 0; idx < points.size(); ++idx) {
      const Vec3& p = points[idx];
      cells[key(int(std::floor(p.x() / cell)), int(std::floor(p.y() / cell)),
                int(std::floor(p.z() / cell)))]
          .push_back(static_cast<int>(idx));
    }
  }

  template <typename Visit>
  void shell(const Vec3& center, int ring, Visit&& visit) const {
    const int ci = int(std::floor(center.x() / cell));
    const int cj = int(std::floor(center.y() / cell));
    const int ck = int(std::floor(center.z() / cell));
    for (int di = -ring; di <= ring; ++di) {
      for (int dj = -ring; dj <= ring; ++dj) {
        for (int dk = -ring; dk <= ring; ++dk) {
          if (std::max({std::abs(di), std::abs(dj), std::abs(dk)}) != ring) continue;
          const auto it = cells.find(key(ci + di, cj + dj, ck + dk));
          if (it == cells.end()) continue;
          for (int idx : it->second) visit(idx);
        }
      }
    }
  }
};

// largest tangent-ball radius at x before hitting another vertex:
// beta = min over candidates of |d|^2 / (2 |d·nu|), taken on the matching side
inline void update_beta(const Vec3& d, const Vec3& nu, double& beta_in, double& beta_out) {
  const double dn = d.dot(nu);
  const double d2 = d.squaredNorm();
  if (d2 == 0.0) return;
  if (dn < 0.0) {
    beta_in = std::min(beta_in, d2 / (-2.0 * dn));
  } else if (dn > 0.0) {
    beta_out = std::min(beta_out, d2 / (2.0 * dn));
  }
}

}  // namespace

NonCollapseReport noncollapsing_alpha(const Mesh& mesh, const NonCollapseOptions& options) {
  require(mesh.has_geometry(), ErrorCode::InvalidMesh, "noncollapsing_alpha needs geometry");
  const auto collar = mesh.has_boundary() ? mesh.boundary_collar(options.collar_rings)
                                          : std::vector<std::uint8_t>();
  {
    std::string bad;
    int count = 0;
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      if (!collar.empty() && collar[i]) continue;
      if (mesh.mean_curvature[i] <= 0.0) {
        if (count < 8) bad += (count ? ", " : "") + std::to_string(i);
        ++count;
      }
    }
    require(count == 0, ErrorCode::NonMeanConvex,
            "mean convexity fails at " + std::to_string(count) + " vertices: " + bad);
  }

  const int nv = mesh.num_vertices();
  NonCollapseReport report;
  report.per_vertex_alpha.assign(nv, -1.0);
  report.alpha = std::numeric_limits<double>::infinity();

  if (options.brute_force) {
    for (int i = 0; i < nv; ++i) {
      if (!collar.empty() && collar[i]) continue;
      const double cap_beta = options.alpha_cap / mesh.mean_curvature[i];
      double beta_in = cap_beta, beta_out = cap_beta;
      for (int j = 0; j < nv; ++j) {
        if (j == i) continue;
        update_beta(mesh.vertices[j] - mesh.vertices[i], mesh.normals[i], beta_in, beta_out);
      }
      report.per_vertex_alpha[i] = mesh.mean_curvature[i] * std::min(beta_in, beta_out);
      report.alpha = std::min(report.alpha, report.per_vertex_alpha[i]);
    }
    return report;
  }

  // hashed scan with the exact bound |d|^2 / (2|d.nu|) >= |d| / 2
  double mean_edge = 0.0;
  long count = 0;
  for (const auto& tri : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      mean_edge += (mesh.vertices[tri[k]] - mesh.vertices[tri[(k + 1) % 3]]).norm();
      ++count;
    }
  }
  mean_edge /= count;
  SpatialHash hash;
  hash.build(mesh.vertices, 2.5 * mean_edge);

  for (int i = 0; i < nv; ++i) {
    if (!collar.empty() && collar[i]) continue;
    const double cap_beta = options.alpha_cap / mesh.mean_curvature[i];
    double beta_in = cap_beta, beta_out = cap_beta;
    for (int ring = 0;; ++ring) {
      const double best = std::min(beta_in, beta_out);
      // Chebyshev ring `ring` only holds points at distance >= (ring-1)*cell
      if (ring > 1 && (ring - 1) * hash.cell / 2.0 > best + options.slack) break;
      bool any = false;
      hash.shell(mesh.vertices[i], ring, [&](int j) {
        any = true;
        if (j == i) return;
        update_beta(mesh.vertices[j] - mesh.vertices[i], mesh.normals[i], beta_in, beta_out);
      });
      (void)any;
      if (ring > 2 * nv) break;  // unreachable guard
    }
    report.per_vertex_alpha[i] = mesh.mean_curvature[i] * std::min(beta_in, beta_out);
    report.alpha = std::min(report.alpha, report.per_vertex_alpha[i]);
  }
  return report;
}

// ---- local graph distance -----------------------------------------------------

std::string GraphDistanceReport::to_json() const {
  json j;
  j["ball_radius"] = ball_radius;
  j["C0"] = c0;
  j["C1"] = c1;
  j["coverage"] = coverage;
  j["projected_count"] = projected_count;
  return j.dump(2);
}

namespace {

double model_area_in_ball(const ModelSurface& model, double ball_radius) {
  switch (model.kind) {
    case ModelKind::Plane: {
      const double d0 = std::abs(model.point.dot(model.axis));
      if (d0 >= ball_radius) return 0.0;
      return M_PI * (ball_radius * ball_radius - d0 * d0);
    }
    case ModelKind::Sphere: {
      const double dc = model.point.norm();
      const double R = model.radius;
      if (dc < 1e-12) return R <= ball_radius ? 4.0 * M_PI * R * R : 0.0;
      const double cos_cap = (ball_radius * ball_radius - dc * dc - R * R) / (2.0 * R * dc);
      return 2.0 * M_PI * R * R * (1.0 + std::clamp(cos_cap, -1.0, 1.0));
    }
    case ModelKind::Cylinder: {
      // exact for an axis through the origin; quadrature otherwise
      const Vec3 foot = model.point - model.point.dot(model.axis) * model.axis;
      const double r = model.radius;
      if (foot.norm() < 1e-12) {
        if (r >= ball_radius) return 0.0;
        return 4.0 * M_PI * r * std::sqrt(ball_radius * ball_radius - r * r);
      }
      Vec3 e1 = model.axis.cross(Vec3::UnitX());
      if (e1.norm() < 1e-6) e1 = model.axis.cross(Vec3::UnitY());
      e1.normalize();
      const Vec3 e2 = model.axis.cross(e1);
      const int nz = 512, nt = 256;
      double area = 0.0;
      const double zmax = ball_radius + foot.norm();
      for (int iz = 0; iz < nz; ++iz) {
        const double z = -zmax + 2.0 * zmax * (iz + 0.5) / nz;
        for (int it = 0; it < nt; ++it) {
          const double th = 2.0 * M_PI * (it + 0.5) / nt;
          const Vec3 p = foot + z * model.axis + r * (std::cos(th) * e1 + std::sin(th) * e2);
          if (p.norm() <= ball_radius) area += (2.0 * zmax / nz) * (2.0 * M_PI * r / nt);
        }
      }
      return area;
    }
  }
  return 0.0;
}

}  // namespace

GraphDistanceReport graph_distance(const Mesh& mesh, const ModelSurface& model,
                                   double ball_radius, int order, const GraphOptions& options) {
  require(ball_radius > 0.0, ErrorCode::InvalidArgument, "graph_distance needs a positive ball");
  require(order == 0 || order == 1, ErrorCode::InvalidArgument,
          "graph_distance supports orders 0 and 1");

  GraphDistanceReport report;
  report.ball_radius = ball_radius;

  const int nv = mesh.num_vertices();
  std::vector<char> inside(nv, 0);
  std::vector<double> height(nv, 0.0);
  std::vector<Vec3> projected(nv, Vec3::Zero());
  for (int i = 0; i < nv; ++i) {
    if (mesh.vertices[i].norm() > ball_radius) continue;
    ModelQuery q;
    try {
      q = model_query(model, mesh.vertices[i]);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::AmbiguousQuery) {
        fail(ErrorCode::ProjectionAmbiguous,
             "vertex " + std::to_string(i) + " projects ambiguously: " + e.what());
      }
      throw;
    }
    inside[i] = 1;
    height[i] = q.signed_distance;  // (y - pi(y)) . nu at the nearest point
    projected[i] = q.nearest;
    report.c0 = std::max(report.c0, std::abs(q.signed_distance));
    ++report.projected_count;
  }
  require(report.projected_count > 0, ErrorCode::InvalidArgument,
          "no mesh vertices inside the ball");

  // sheeting check: distinct heights over coincident model points
  {
    const double merge = options.merge_fraction * ball_radius;
    const double gap = options.gap_fraction * ball_radius;
    SpatialHash hash;
    std::vector<Vec3> pts;
    std::vector<int> ids;
    for (int i = 0; i < nv; ++i) {
      if (inside[i]) {
        pts.push_back(projected[i]);
        ids.push_back(i);
      }
    }
    hash.build(pts, std::max(merge, 1e-12));
    for (size_t a = 0; a < pts.size(); ++a) {
      for (int ring = 0; ring <= 1; ++ring) {
        hash.shell(pts[a], ring, [&](int b) {
          if (static_cast<size_t>(b) <= a) return;
          if ((pts[a] - pts[b]).norm() <= merge &&
              std::abs(height[ids[a]] - height[ids[b]]) > gap) {
            fail(ErrorCode::NotAGraph, "sheeting: vertices " + std::to_string(ids[a]) + " and " +
                                           std::to_string(ids[b]) +
                                           " project to the same model point");
          }
        });
      }
    }
  }

  // per-face gradient of g over the projected patch, and the patch area
  double patch_area = 0.0;
  double max_grad = 0.0;
  for (const auto& tri : mesh.faces) {
    if (!inside[tri[0]] || !inside[tri[1]] || !inside[tri[2]]) continue;
    const Vec3 e1 = projected[tri[1]] - projected[tri[0]];
    const Vec3 e2 = projected[tri[2]] - projected[tri[0]];
    const double area2 = e1.cross(e2).norm();
    patch_area += 0.5 * area2;
    if (order == 1 && area2 > 1e-14 * ball_radius * ball_radius) {
      const double g11 = e1.dot(e1), g12 = e1.dot(e2), g22 = e2.dot(e2);
      const double det = g11 * g22 - g12 * g12;
      if (det > 0) {
        const double d1 = height[tri[1]] - height[tri[0]];
        const double d2 = height[tri[2]] - height[tri[0]];
        const double a = (g22 * d1 - g12 * d2) / det;
        const double b = (g11 * d2 - g12 * d1) / det;
        max_grad = std::max(max_grad, (a * e1 + b * e2).norm());
      }
    }
  }
  report.c1 = order == 1 ? std::max(report.c0, max_grad)
                         : std::numeric_limits<double>::quiet_NaN();
  const double model_area = model_area_in_ball(model, ball_radius);
  report.coverage = model_area > 0 ? std::clamp(patch_area / model_area, 0.0, 1.0) : 0.0;
  return report;
}

// ---- trapping and origin ball ---------------------------------------------------

std::string TrappingReport::to_json() const {
  json j;
  j["Lambda"] = bound;
  j["max_sup_F"] = max_sup_F;
  j["violated"] = violated;
  return j.dump(2);
}

TrappingReport trapping_bound(const FlowTrace& trace, double c0) {
  require(!trace.empty(), ErrorCode::EmptyTrace, "trapping_bound needs a non-empty trace");
  TrappingReport report;
  report.bound = std::max(c0, trace.rows.front().sup_F);
  for (const auto& row : trace.rows) {
    report.max_sup_F = std::max(report.max_sup_F, row.sup_F);
  }
  report.violated = report.max_sup_F > 2.0 * report.bound * (1.0 + 1e-12);
  return report;
}

bool ball_check(const Mesh& mesh, double tol) {
  require(mesh.gauge == Gauge::Rescaled, ErrorCode::GaugeMismatch,
          "ball_check expects a rescaled mesh");
  const double bound = std::sqrt(2.0) * (1.0 + tol);
  for (const auto& v : mesh.vertices) {
    if (v.norm() <= bound) return true;
  }
  return false;
}

// ---- curvature-derivative scaling ------------------------------------------------

std::string RegularityReport::to_json() const {
  json j;
  j["times"] = times;
  j["grad_A"] = grad_A;
  j["normalized"] = normalized;
  j["max_normalized"] = max_normalized;
  return j.dump(2);
}

RegularityReport regularity_scaling(const FlowTrace& trace, const GaugeMap& gauge) {
  require(!trace.empty(), ErrorCode::EmptyTrace, "regularity_scaling needs a non-empty trace");
  require(trace.gauge == Gauge::Physical, ErrorCode::GaugeMismatch,
          "regularity_scaling expects a physical trace");
  RegularityReport report;
  for (const auto& row : trace.rows) {
    require(std::isfinite(row.max_grad_A), ErrorCode::InvalidArgument,
            "regularity_scaling needs an axisymmetric trace with |grad A| recorded");
    const double lam = gauge.lambda(row.time);
    report.times.push_back(row.time);
    report.grad_A.push_back(row.max_grad_A);
    report.normalized.push_back(row.max_grad_A / (lam * lam));
    report.max_normalized = std::max(report.max_normalized, report.normalized.back());
  }
  return report;
}

double rescaled_grad_identity_residual(const AxisymProfile& profile, const GaugeMap& gauge) {
  const double lam = gauge.lambda(profile.time);
  AxisymProfile rescaled = profile;
  for (auto& v : rescaled.x) v = lam * (v - gauge.base_point.x());
  for (auto& v : rescaled.u) v *= lam;
  const AxisymCurvatures phys = axisym_curvatures(profile);
  const AxisymCurvatures resc = axisym_curvatures(rescaled);
  double residual = 0.0;
  for (size_t i = 0; i < profile.x.size(); ++i) {
    residual = std::max(residual, std::abs(resc.grad_A[i] - phys.grad_A[i] / (lam * lam)));
  }
  return residual;
}

// ---- volume growth -----------------------------------------------------------------

std::string VolumeGrowthReport::to_json() const {
  json j;
  j["radii"] = radii;
  j["areas"] = areas;
  j["degree"] = degree;
  j["coefficient"] = coefficient;
  return j.dump(2);
}

VolumeGrowthReport volume_growth(const Mesh& mesh, const std::vector<double>& radii) {
  require(!radii.empty(), ErrorCode::InvalidArgument, "volume_growth needs sample radii");
  VolumeGrowthReport report;
  report.radii = radii;
  std::sort(report.radii.begin(), report.radii.end());
  for (const double R : report.radii) {
    double area = 0.0;
    for (const auto& tri : mesh.faces) {
      const Vec3& a = mesh.vertices[tri[0]];
      const Vec3& b = mesh.vertices[tri[1]];
      const Vec3& c = mesh.vertices[tri[2]];
      int in = 0;
      in += (0.5 * (a + b)).norm() <= R;
      in += (0.5 * (b + c)).norm() <= R;
      in += (0.5 * (c + a)).norm() <= R;
      if (in > 0) area += 0.5 * (b - a).cross(c - a).norm() * in / 3.0;
    }
    report.areas.push_back(area);
  }
  // log-log least squares over positive samples
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < report.radii.size(); ++i) {
    if (report.areas[i] <= 0) continue;
    const double x = std::log(report.radii[i]);
    const double y = std::log(report.areas[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n >= 2) {
    const double denom = n * sxx - sx * sx;
    report.degree = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
    report.coefficient = std::exp((sy - report.degree * sx) / n);
  }
  return report;
}

}  // namespace mcf
