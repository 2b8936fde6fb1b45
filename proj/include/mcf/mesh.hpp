#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mcf {

using Vec3 = Eigen::Vector3d;

// Which coordinate system the vertex positions live in. Physical meshes
// evolve under d/dt F = -H nu; rescaled meshes under d/ds F = F - H nu.
enum class Gauge { Physical, Rescaled };

const char* gauge_name(Gauge g);
Gauge gauge_from_name(const std::string& name);

// Triangulated surface in ambient 3-space. Per-vertex differential
// quantities are filled by compute_geometry(); until then the field
// vectors are empty and has_geometry() is false.
//
// Conventions: outward unit normals, H > 0 for convex surfaces (sphere of
// radius r has H = 2/r), lumped area weights sum to the total face area.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  // filled by compute_geometry()
  std::vector<Vec3> normals;
  std::vector<double> mean_curvature;    // H, 1/length
  std::vector<double> second_form_norm;  // |A|, 1/length
  std::vector<double> area_weights;      // lumped vertex areas, length^2
  std::vector<std::uint8_t> boundary;    // 1 for vertices on a boundary edge

  Gauge gauge = Gauge::Physical;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  bool has_geometry() const {
    return !vertices.empty() && mean_curvature.size() == vertices.size();
  }
  bool has_boundary() const;

  double face_area(int f) const;
  double total_area() const;
  double min_edge_length() const;
  double max_vertex_norm() const;  // sup |F| over vertices
  Vec3 centroid() const;           // area-weighted when geometry is present

  // Structural validation: index ranges, every vertex referenced,
  // edge-manifoldness, consistent winding. Throws Error(InvalidMesh).
  void validate_topology() const;

  // Full invariant check (topology + unit normals + weight sum).
  // Requires geometry. Throws on violation.
  void validate() const;

  // Vertices within `rings` edge hops of a boundary vertex. Used to
  // exclude boundary collars from diagnostics on open meshes.
  std::vector<std::uint8_t> boundary_collar(int rings) const;
};

// ASCII OBJ import/export (v/f records only).
Mesh read_obj(const std::string& path);
void write_obj(const Mesh& mesh, const std::string& path);

}  // namespace mcf
