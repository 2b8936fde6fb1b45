#pragma once

#include <cstdint>

#include "mcf/mesh.hpp"

namespace mcf {

// Icosahedron subdivided `subdivisions` times with vertices projected onto
// the sphere. subdivisions in [0, 7]; geometry is computed on return.
Mesh build_icosphere(double radius, const Vec3& center, int subdivisions);

// Open tube (no caps) of the given radius about the line through `center`
// along `axis`, spanning [-half_length, half_length]. segments_axial rings
// of segments_around vertices; outward normals.
Mesh build_cylinder_mesh(double radius, const Vec3& axis, double half_length,
                         int segments_axial, int segments_around, const Vec3& center = Vec3::Zero());

// Flat disk of the given radius centered at `center` with unit normal
// `normal`: a vertex fan of `rings` concentric rings. Used for planar
// patches in tests and plane-limit experiments.
Mesh build_plane_disk(double radius, const Vec3& center, const Vec3& normal, int rings);

// Icosphere stretched to semi-axes (a, b, c) about the center.
Mesh build_ellipsoid(double a, double b, double c, const Vec3& center, int subdivisions);

// Deterministic vertex jitter along normals, amplitude in absolute length
// units. Geometry is recomputed.
Mesh perturb_along_normals(const Mesh& mesh, double amplitude, std::uint64_t seed);

}  // namespace mcf
