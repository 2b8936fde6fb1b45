#include "mcf/primitives.hpp"

#include <cmath>
#include <map>
#include <random>

#include "mcf/errors.hpp"
#include "mcf/geometry.hpp"

namespace mcf {

namespace {

// Unit icosahedron; faces wound outward after the orientation pass below.
void icosahedron(std::vector<Vec3>& verts, std::vector<std::array<int, 3>>& faces) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& v : verts) v.normalize();
  faces = {
      {0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
}

void orient_outward(std::vector<Vec3>& verts, std::vector<std::array<int, 3>>& faces,
                    const Vec3& center) {
  for (auto& tri : faces) {
    const Vec3 a = verts[tri[0]] - center;
    const Vec3 n = (verts[tri[1]] - verts[tri[0]]).cross(verts[tri[2]] - verts[tri[0]]);
    if (n.dot(a) < 0) std::swap(tri[1], tri[2]);
  }
}

int midpoint(int a, int b, std::map<std::pair<int, int>, int>& cache, std::vector<Vec3>& verts) {
  const auto key = std::minmax(a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int idx = static_cast<int>(verts.size());
  verts.push_back(((verts[a] + verts[b]) * 0.5).normalized());
  cache.emplace(key, idx);
  return idx;
}

}  // namespace

Mesh build_icosphere(double radius, const Vec3& center, int subdivisions) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "icosphere radius must be positive");
  require(subdivisions >= 0 && subdivisions <= 7, ErrorCode::InvalidArgument,
          "icosphere subdivisions must be in [0, 7]");

  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
  icosahedron(verts, faces);

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> cache;
    std::vector<std::array<int, 3>> refined;
    refined.reserve(faces.size() * 4);
    for (const auto& tri : faces) {
      const int ab = midpoint(tri[0], tri[1], cache, verts);
      const int bc = midpoint(tri[1], tri[2], cache, verts);
      const int ca = midpoint(tri[2], tri[0], cache, verts);
      refined.push_back({tri[0], ab, ca});
      refined.push_back({tri[1], bc, ab});
      refined.push_back({tri[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    faces.swap(refined);
  }

  orient_outward(verts, faces, Vec3::Zero());

  Mesh mesh;
  mesh.faces = std::move(faces);
  mesh.vertices.reserve(verts.size());
  for (const auto& v : verts) mesh.vertices.push_back(center + radius * v);
  compute_geometry(mesh);
  return mesh;
}

Mesh build_cylinder_mesh(double radius, const Vec3& axis, double half_length,
                         int segments_axial, int segments_around, const Vec3& center) {
  require(radius > 0.0 && half_length > 0.0, ErrorCode::InvalidArgument,
          "cylinder radius and half_length must be positive");
  require(axis.norm() > 1e-12, ErrorCode::InvalidArgument, "degenerate cylinder axis");
  require(segments_axial >= 1 && segments_around >= 3, ErrorCode::InvalidArgument,
          "cylinder resolution too coarse");

  const Vec3 w = axis.normalized();
  Vec3 u = w.cross(Vec3::UnitX());
  if (u.norm() < 1e-6) u = w.cross(Vec3::UnitY());
  u.normalize();
  const Vec3 v = w.cross(u);

  Mesh mesh;
  const int na = segments_axial;
  const int nt = segments_around;
  mesh.vertices.reserve(static_cast<size_t>(na + 1) * nt);
  for (int i = 0; i <= na; ++i) {
    const double z = -half_length + 2.0 * half_length * i / na;
    for (int j = 0; j < nt; ++j) {
      const double theta = 2.0 * M_PI * j / nt;
      mesh.vertices.push_back(center + z * w +
                              radius * (std::cos(theta) * u + std::sin(theta) * v));
    }
  }
  auto id = [nt](int i, int j) { return i * nt + ((j % nt) + nt) % nt; };
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nt; ++j) {
      // alternate the quad diagonal so vertex valences stay balanced
      if ((i + j) % 2 == 0) {
        mesh.faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
        mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
      } else {
        mesh.faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j)});
        mesh.faces.push_back({id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)});
      }
    }
  }
  // wind outward: radial direction at the face centroid
  for (auto& tri : mesh.faces) {
    const Vec3 c = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    const Vec3 rel = c - center;
    const Vec3 radial = rel - rel.dot(w) * w;
    const Vec3 n =
        (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]).cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    if (n.dot(radial) < 0) std::swap(tri[1], tri[2]);
  }
  compute_geometry(mesh);
  return mesh;
}

Mesh build_plane_disk(double radius, const Vec3& center, const Vec3& normal, int rings) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "disk radius must be positive");
  require(normal.norm() > 1e-12, ErrorCode::InvalidArgument, "degenerate disk normal");
  require(rings >= 1, ErrorCode::InvalidArgument, "disk needs at least one ring");

  const Vec3 w = normal.normalized();
  Vec3 u = w.cross(Vec3::UnitX());
  if (u.norm() < 1e-6) u = w.cross(Vec3::UnitY());
  u.normalize();
  const Vec3 v = w.cross(u);

  Mesh mesh;
  mesh.vertices.push_back(center);
  std::vector<int> ring_start{0};
  std::vector<int> ring_count{1};
  for (int r = 1; r <= rings; ++r) {
    const int n = 6 * r;
    ring_start.push_back(static_cast<int>(mesh.vertices.size()));
    ring_count.push_back(n);
    const double rho = radius * r / rings;
    for (int j = 0; j < n; ++j) {
      const double theta = 2.0 * M_PI * j / n;
      mesh.vertices.push_back(center + rho * (std::cos(theta) * u + std::sin(theta) * v));
    }
  }
  // stitch ring r-1 to ring r walking both rings by angle
  for (int r = 1; r <= rings; ++r) {
    const int n_in = ring_count[r - 1];
    const int n_out = ring_count[r];
    const int s_in = ring_start[r - 1];
    const int s_out = ring_start[r];
    if (r == 1) {
      for (int j = 0; j < n_out; ++j) {
        mesh.faces.push_back({s_in, s_out + j, s_out + (j + 1) % n_out});
      }
      continue;
    }
    int i = 0, j = 0;
    for (int step = 0; step < n_in + n_out; ++step) {
      const int vi = s_in + (i % n_in);
      const int vj = s_out + (j % n_out);
      const bool advance_out =
          j < n_out && (i == n_in || (j + 1.0) / n_out <= (i + 1.0) / n_in);
      if (advance_out) {
        mesh.faces.push_back({vi, vj, s_out + ((j + 1) % n_out)});
        ++j;
      } else {
        mesh.faces.push_back({vi, vj, s_in + ((i + 1) % n_in)});
        ++i;
      }
    }
  }
  for (auto& tri : mesh.faces) {
    const Vec3 n =
        (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]).cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    if (n.dot(w) < 0) std::swap(tri[1], tri[2]);
  }
  compute_geometry(mesh);
  return mesh;
}

Mesh build_ellipsoid(double a, double b, double c, const Vec3& center, int subdivisions) {
  require(a > 0 && b > 0 && c > 0, ErrorCode::InvalidArgument, "ellipsoid semi-axes must be positive");
  Mesh mesh = build_icosphere(1.0, Vec3::Zero(), subdivisions);
  for (auto& v : mesh.vertices) {
    v = center + Vec3(a * v.x(), b * v.y(), c * v.z());
  }
  compute_geometry(mesh);
  return mesh;
}

Mesh perturb_along_normals(const Mesh& mesh, double amplitude, std::uint64_t seed) {
  Mesh out = mesh;
  if (!out.has_geometry()) compute_geometry(out);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < out.num_vertices(); ++i) {
    out.vertices[i] += amplitude * dist(rng) * out.normals[i];
  }
  compute_geometry(out);
  return out;
}

}  // namespace mcf
