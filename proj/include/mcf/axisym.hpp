#pragma once

#include <string>
#include <vector>

#include "mcf/gauge.hpp"
#include "mcf/mesh.hpp"

namespace mcf {

// Surface of revolution about the x-axis: radius profile u(x) > 0 on a
// uniform grid over [-L, L]. The profile PDE is the surface-of-revolution
// reduction of mean curvature flow,
//   u_t = u_xx / (1 + u_x^2) - 1/u,
// with Neumann ends (u_x = 0).
struct AxisymProfile {
  std::vector<double> x;
  std::vector<double> u;
  double time = 0.0;

  double h() const;
  double min_u() const;
  int min_u_index() const;
  void validate() const;  // uniform grid, u > 0
};

AxisymProfile make_constant_profile(double radius, double half_length, int n, double time);
// sqrt(r^2 - x^2) sampled on [-half_length, half_length]; needs half_length < r.
AxisymProfile make_sphere_profile(double radius, double half_length, int n, double time);
// neck + (bulb - neck) * (1 - cos(pi x / L)) / 2: neck at 0, bulbs at the ends.
AxisymProfile make_dumbbell_profile(double neck_radius, double bulb_radius, double half_length,
                                    int n, double time);

// Pointwise curvature data from the profile formulas. kappa1 is the
// meridian curvature -u_xx/(1+u_x^2)^{3/2}, kappa2 = 1/(u sqrt(1+u_x^2));
// H = kappa1 + kappa2 with outward normals. grad_A is the arc-length
// derivative estimate sqrt(kappa1'^2 + kappa2'^2).
struct AxisymCurvatures {
  std::vector<double> kappa1, kappa2, H, abs_A, grad_A;
  double max_abs_A() const;
  double max_grad_A() const;
};

// Derivatives by central differences with Neumann-mirrored ends, or from
// caller-supplied analytic arrays.
AxisymCurvatures axisym_curvatures(const AxisymProfile& profile);
AxisymCurvatures axisym_curvatures(const AxisymProfile& profile, const std::vector<double>& u_x,
                                   const std::vector<double>& u_xx);

// One semi-implicit step: the linearized u_xx term is implicit (tridiagonal
// solve), the 1/u reaction term explicit. Throws Error(NeckPinch) when the
// post-step min u falls below neck_floor.
AxisymProfile axisym_step(const AxisymProfile& profile, double dt, double neck_floor = 0.0);

// Accuracy-motivated step bound: safety * min(h^2, min_u^2).
double axisym_stable_timestep(const AxisymProfile& profile, double safety);

// Revolved triangle mesh with curvature fields filled from the profile
// formulas (not the discrete estimator).
Mesh axisym_to_mesh(const AxisymProfile& profile, int segments_around);
Mesh axisym_to_mesh(const AxisymProfile& profile, int segments_around,
                    const std::vector<double>& u_x, const std::vector<double>& u_xx);

// Restriction to grid points with |x - x_center| <= window.
AxisymProfile profile_window(const AxisymProfile& profile, double x_center, double window);

// 1D quadratures of the Gaussian-area integrands over the revolved surface.
double axisym_energy_E(const AxisymProfile& profile, const GaugeMap& gauge = {});
double axisym_energy_Etilde(const AxisymProfile& profile, const GaugeMap& gauge = {});
double axisym_dissipation(const AxisymProfile& profile, const GaugeMap& gauge = {});

// CSV round trip, columns x,u; the time is carried in a comment header.
void write_profile_csv(const AxisymProfile& profile, const std::string& path);
AxisymProfile read_profile_csv(const std::string& path);

}  // namespace mcf
