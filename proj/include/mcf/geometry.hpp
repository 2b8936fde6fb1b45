#pragma once

#include <Eigen/SparseCore>

#include "mcf/mesh.hpp"

namespace mcf {

// Fills normals, mean curvature, |A|, lumped area weights and boundary
// flags. H comes from the cotangent area-gradient formula (H > 0 convex,
// outward normals); |A| from per-vertex principal curvatures obtained by a
// quadratic height fit over the 2-ring in the vertex tangent frame.
// Degenerate (zero-area) faces are reported by index.
void compute_geometry(Mesh& mesh);

// Cotangent stiffness matrix K (positive semi-definite, K = -integrated
// Laplace-Beltrami) and the lumped mass vector. Shared by the curvature
// estimator and the semi-implicit flow steps.
void cotan_stiffness(const Mesh& mesh, Eigen::SparseMatrix<double>& stiffness,
                     Eigen::VectorXd& lumped_mass);

// Per-vertex principal curvatures (convex-positive w.r.t. outward normals).
// Requires normals; returns pairs (kappa1, kappa2) with kappa1 <= kappa2.
std::vector<std::pair<double, double>> principal_curvatures(const Mesh& mesh);

}  // namespace mcf
