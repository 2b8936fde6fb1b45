#pragma once

#include <string>

#include "mcf/gauge.hpp"
#include "mcf/mesh.hpp"
#include "mcf/model_surface.hpp"

namespace mcf {

// Backward heat kernel density rho_{(x0,t0)}(x,t) for surfaces (N = 2):
// (4 pi (t0-t))^{-1} exp(-|x-x0|^2 / (4(t0-t))). Requires t < t0.
double gaussian_density(const Vec3& x, const Vec3& x0, double t0, double t);

// Gaussian area E(t) = integral of rho over the mesh, 3-point per-triangle
// quadrature with a tail cutoff. Physical gauge only.
double energy_E(const Mesh& mesh, double t, const GaugeMap& gauge = {});

// Rescaled Gaussian area: integral of exp(-|xi|^2/2); contributions from
// |xi| > 8 are dropped (tail below 1e-13). Rescaled gauge only.
double energy_Etilde(const Mesh& mesh);

// Closed-form rescaled Gaussian areas of the three origin-centered
// shrinkers: plane 2*pi, cylinder(1) 2*pi*sqrt(2*pi/e), sphere(sqrt 2)
// 8*pi/e. Rejects models that are off-center or at a non-shrinker radius.
double model_energy(const ModelSurface& model);

// Rescaled-flow dissipation integrand: |(F.nu) - H|^2 rho, lumped vertex
// quadrature. Vanishes on stationary shrinkers.
double dissipation(const Mesh& mesh);

// Huisken change of variables applied to a mesh snapshot: xi = lambda(t)
// (x - x0), H and |A| divided by lambda, areas multiplied by lambda^2.
Mesh rescale_surface(const Mesh& mesh, double t, const GaugeMap& gauge = {});
// Inverse map from a rescaled snapshot at rescaled time s.
Mesh unrescale_surface(const Mesh& mesh, double s, const GaugeMap& gauge = {});

// Residual |Etilde - 2 pi E| of the E-to-Etilde relation, both sides
// evaluated by quadrature on the physical mesh and its rescaled image.
double check_E_relation(const Mesh& physical_mesh, double t, const GaugeMap& gauge = {});

struct EnergyReport {
  double e_tilde = 0.0;
  double e_physical = 0.0;
  double dissipation = 0.0;
  double relation_residual = 0.0;

  std::string to_json() const;
};

EnergyReport energy_report(const Mesh& physical_mesh, double t, const GaugeMap& gauge = {});

}  // namespace mcf
