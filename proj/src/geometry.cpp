#include "mcf/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "mcf/errors.hpp"

namespace mcf {

namespace {

struct FaceFrame {
  Vec3 normal;
  double area;
};

std::vector<FaceFrame> face_frames(const Mesh& mesh) {
  std::vector<FaceFrame> frames(mesh.num_faces());
  double max_area = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& tri = mesh.faces[f];
    const Vec3 n = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                       .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    frames[f].area = 0.5 * n.norm();
    frames[f].normal = frames[f].area > 0 ? Vec3(n / (2.0 * frames[f].area)) : Vec3::Zero();
    max_area = std::max(max_area, frames[f].area);
  }
  std::string degenerate;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (frames[f].area <= 1e-14 * max_area) {
      degenerate += (degenerate.empty() ? "" : ", ") + std::to_string(f);
    }
  }
  require(degenerate.empty(), ErrorCode::DegenerateFace, "degenerate faces: " + degenerate);
  return frames;
}

void mark_boundary(Mesh& mesh) {
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}] += 1;
    }
  }
  mesh.boundary.assign(mesh.vertices.size(), 0);
  for (const auto& [edge, count] : edge_count) {
    if (count == 1) {
      mesh.boundary[edge.first] = 1;
      mesh.boundary[edge.second] = 1;
    }
  }
}

std::vector<std::vector<int>> one_rings(const Mesh& mesh) {
  std::vector<std::set<int>> ring(mesh.vertices.size());
  for (const auto& tri : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      ring[tri[k]].insert(tri[(k + 1) % 3]);
      ring[tri[k]].insert(tri[(k + 2) % 3]);
    }
  }
  std::vector<std::vector<int>> out(ring.size());
  for (size_t i = 0; i < ring.size(); ++i) out[i].assign(ring[i].begin(), ring[i].end());
  return out;
}

}  // namespace

void cotan_stiffness(const Mesh& mesh, Eigen::SparseMatrix<double>& stiffness,
                     Eigen::VectorXd& lumped_mass) {
  const int nv = mesh.num_vertices();
  lumped_mass = Eigen::VectorXd::Zero(nv);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.faces.size() * 12);
  for (const auto& tri : mesh.faces) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    const double area = 0.5 * (b - a).cross(c - a).norm();

    double cot[3];
    double edge2[3];  // squared length of the edge opposite corner k
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = mesh.vertices[tri[k]];
      const Vec3& q = mesh.vertices[tri[(k + 1) % 3]];
      const Vec3& r = mesh.vertices[tri[(k + 2) % 3]];
      cot[k] = (q - p).dot(r - p) / (2.0 * area);
      edge2[k] = (r - q).squaredNorm();
    }

    // mixed Voronoi cell areas (Meyer et al.): circumcentric for non-obtuse
    // triangles, half/quarter split otherwise. Partitions the triangle
    // exactly, and keeps the cotangent operator consistent on right-angled
    // grids where barycentric lumping is not.
    int obtuse = -1;
    for (int k = 0; k < 3; ++k) {
      if (cot[k] < 0.0) obtuse = k;
    }
    for (int k = 0; k < 3; ++k) {
      double cell;
      if (obtuse < 0) {
        cell = 0.125 * (edge2[(k + 1) % 3] * cot[(k + 1) % 3] +
                        edge2[(k + 2) % 3] * cot[(k + 2) % 3]);
      } else {
        cell = (k == obtuse) ? 0.5 * area : 0.25 * area;
      }
      lumped_mass[tri[k]] += cell;
    }

    for (int k = 0; k < 3; ++k) {
      const int i = tri[(k + 1) % 3];
      const int j = tri[(k + 2) % 3];
      const double w = 0.5 * cot[k];
      triplets.emplace_back(i, j, -w);
      triplets.emplace_back(j, i, -w);
      triplets.emplace_back(i, i, w);
      triplets.emplace_back(j, j, w);
    }
  }
  stiffness.resize(nv, nv);
  stiffness.setFromTriplets(triplets.begin(), triplets.end());
}

std::vector<std::pair<double, double>> principal_curvatures(const Mesh& mesh) {
  require(mesh.normals.size() == mesh.vertices.size(), ErrorCode::InvalidMesh,
          "principal_curvatures needs vertex normals");
  const int nv = mesh.num_vertices();
  const auto rings = one_rings(mesh);

  std::vector<std::pair<double, double>> curvatures(nv, {0.0, 0.0});
  std::vector<int> two_ring;
  for (int i = 0; i < nv; ++i) {
    two_ring.clear();
    std::set<int> seen{i};
    for (int j : rings[i]) {
      if (seen.insert(j).second) two_ring.push_back(j);
      for (int k : rings[j]) {
        if (seen.insert(k).second) two_ring.push_back(k);
      }
    }
    if (two_ring.size() < 5) continue;

    const Vec3& nu = mesh.normals[i];
    Vec3 t1 = nu.cross(Vec3::UnitX());
    if (t1.norm() < 1e-6) t1 = nu.cross(Vec3::UnitY());
    t1.normalize();
    const Vec3 t2 = nu.cross(t1);

    // height fit w = a u^2/2 + b uv + c v^2/2 + d u + e v over the 2-ring
    Eigen::MatrixXd A(two_ring.size(), 5);
    Eigen::VectorXd rhs(two_ring.size());
    for (size_t r = 0; r < two_ring.size(); ++r) {
      const Vec3 d = mesh.vertices[two_ring[r]] - mesh.vertices[i];
      const double u = d.dot(t1);
      const double v = d.dot(t2);
      A(r, 0) = 0.5 * u * u;
      A(r, 1) = u * v;
      A(r, 2) = 0.5 * v * v;
      A(r, 3) = u;
      A(r, 4) = v;
      rhs(r) = d.dot(nu);
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
    const double du = sol(3), dv = sol(4);
    Eigen::Matrix2d hess;
    hess << sol(0), sol(1), sol(1), sol(2);
    Eigen::Matrix2d metric;
    metric << 1 + du * du, du * dv, du * dv, 1 + dv * dv;
    const double slope = std::sqrt(1.0 + du * du + dv * dv);
    // shape operator; heights were measured along the outward normal, so
    // negate to make convex curvature positive
    const Eigen::Matrix2d shape = -(metric.inverse() * hess) / slope;
    const Eigen::Vector2cd eig = shape.eigenvalues();
    double k1 = eig(0).real();
    double k2 = eig(1).real();
    if (k1 > k2) std::swap(k1, k2);
    curvatures[i] = {k1, k2};
  }
  return curvatures;
}

void compute_geometry(Mesh& mesh) {
  mesh.validate_topology();
  const auto frames = face_frames(mesh);
  mark_boundary(mesh);

  const int nv = mesh.num_vertices();
  mesh.normals.assign(nv, Vec3::Zero());
  mesh.area_weights.assign(nv, 0.0);
  mesh.mean_curvature.assign(nv, 0.0);
  mesh.second_form_norm.assign(nv, 0.0);

  // angle-weighted vertex normals
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& tri = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = mesh.vertices[tri[k]];
      const Vec3 e1 = (mesh.vertices[tri[(k + 1) % 3]] - p).normalized();
      const Vec3 e2 = (mesh.vertices[tri[(k + 2) % 3]] - p).normalized();
      const double angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
      mesh.normals[tri[k]] += angle * frames[f].normal;
    }
  }
  for (auto& n : mesh.normals) {
    require(n.norm() > 1e-14, ErrorCode::InvalidMesh, "zero vertex normal");
    n.normalize();
  }

  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
  cotan_stiffness(mesh, stiffness, mass);
  for (int i = 0; i < nv; ++i) mesh.area_weights[i] = mass[i];

  // mean curvature vector: Delta x = -H nu, discretized as -K x / mass
  Eigen::MatrixXd positions(nv, 3);
  for (int i = 0; i < nv; ++i) positions.row(i) = mesh.vertices[i];
  const Eigen::MatrixXd laplace = stiffness * positions;
  for (int i = 0; i < nv; ++i) {
    const Vec3 delta = -Vec3(laplace.row(i)) / mass[i];
    mesh.mean_curvature[i] = -delta.dot(mesh.normals[i]);
  }

  const auto kappas = principal_curvatures(mesh);
  for (int i = 0; i < nv; ++i) {
    mesh.second_form_norm[i] = std::hypot(kappas[i].first, kappas[i].second);
  }
}

}  // namespace mcf
