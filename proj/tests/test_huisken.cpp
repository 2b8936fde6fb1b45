#include <doctest.h>

#include <cmath>
#include <random>

#include "mcf/energy.hpp"
#include "mcf/errors.hpp"
#include "mcf/exact_flows.hpp"
#include "mcf/gauge.hpp"
#include "mcf/geometry.hpp"
#include "mcf/primitives.hpp"

using namespace mcf;

namespace {
const double kEtildePlane = 2.0 * M_PI;
const double kEtildeSphere = 8.0 * M_PI / std::exp(1.0);
const double kEtildeCylinder = 2.0 * M_PI * std::sqrt(2.0 * M_PI / std::exp(1.0));

Mesh sphere_flow_mesh(double t, int subdivisions) {
  return build_icosphere(std::sqrt(-4.0 * t), Vec3::Zero(), subdivisions);
}
}  // namespace

TEST_CASE("gauge map plug-in values") {
  const GaugeMap gauge;
  CHECK(gauge.lambda(-0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gauge.s_of_t(-0.5) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(gauge.s_of_t(-1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(gauge.lambda(-1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(gauge.t_of_s(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(gauge.lambda(0.0), Error);
  CHECK_THROWS_AS(gauge.s_of_t(0.5), Error);
}

TEST_CASE("exp(s) = sqrt(2) lambda to machine precision") {
  const GaugeMap gauge;
  for (double t = -64.0; t < -1e-9; t *= 0.37) {
    const double lhs = std::exp(gauge.s_of_t(t));
    const double rhs = std::sqrt(2.0) * gauge.lambda(t);
    CHECK(std::abs(lhs - rhs) <= 1e-14 * lhs);
  }
}

TEST_CASE("gauge round trip is exact to 1e-14 relative") {
  const GaugeMap gauge;
  for (double t = -100.0; t < -1e-10; t *= 0.51) {
    CHECK(std::abs(gauge.t_of_s(gauge.s_of_t(t)) - t) <= 1e-14 * std::abs(t));
  }
}

TEST_CASE("gaussian density plug-in values") {
  const Vec3 origin = Vec3::Zero();
  // exponent 0 at the base point with 4 pi tau = 1
  CHECK(gaussian_density(origin, origin, 0.0, -1.0 / (4.0 * M_PI)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // |x - x0|^2 = 4 tau: one e-fold down
  const double tau = 0.7;
  const Vec3 x(2.0 * std::sqrt(tau), 0, 0);
  CHECK(gaussian_density(x, origin, 0.0, -tau) ==
        doctest::Approx(std::exp(-1.0) / (4.0 * M_PI * tau)).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_density(x, origin, 0.0, 0.0), Error);
}

TEST_CASE("plane Gaussian area integrates to 1") {
  // 2D Gaussian integral oracle: the backward kernel restricted to a plane
  // through the base point has unit mass for every t < t0
  for (double t : {-0.05, -0.3, -1.0}) {
    const double extent = 12.0 * std::sqrt(-t);
    Mesh disk = build_plane_disk(extent, Vec3::Zero(), Vec3::UnitZ(), 120);
    CHECK(energy_E(disk, t) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("physical Gaussian area of the exact flows") {
  // E_sphere = 4/e, E_cylinder = sqrt(2 pi / e) via E_tilde = 2 pi E
  for (double t : {-1.0, -0.4}) {
    const Mesh sphere = sphere_flow_mesh(t, 5);
    CHECK(energy_E(sphere, t) == doctest::Approx(4.0 / std::exp(1.0)).epsilon(1e-3));
  }
  const double t = -0.5;
  const double r = exact_cylinder(t).radius;  // = 1
  const double span = 8.0 / GaugeMap{}.lambda(t);
  const Mesh tube = build_cylinder_mesh(r, Vec3::UnitZ(), span, 360, 96);
  CHECK(energy_E(tube, t) == doctest::Approx(std::sqrt(2.0 * M_PI / std::exp(1.0))).epsilon(1e-3));
}

TEST_CASE("rescaled Gaussian areas of the three shrinkers") {
  Mesh plane = build_plane_disk(8.0, Vec3::Zero(), Vec3::UnitZ(), 80);
  plane.gauge = Gauge::Rescaled;
  CHECK(energy_Etilde(plane) == doctest::Approx(kEtildePlane).epsilon(1e-3));

  Mesh sphere = build_icosphere(std::sqrt(2.0), Vec3::Zero(), 5);
  sphere.gauge = Gauge::Rescaled;
  CHECK(energy_Etilde(sphere) == doctest::Approx(kEtildeSphere).epsilon(1e-3));

  Mesh cylinder = build_cylinder_mesh(1.0, Vec3::UnitZ(), 8.0, 256, 96);
  cylinder.gauge = Gauge::Rescaled;
  CHECK(energy_Etilde(cylinder) == doctest::Approx(kEtildeCylinder).epsilon(1e-3));

  CHECK_THROWS_AS(energy_Etilde(build_icosphere(1.0, Vec3::Zero(), 1)), Error);
}

TEST_CASE("closed-form model energies and their strict ordering") {
  CHECK(model_energy(make_plane(Vec3::Zero(), Vec3(1, 1, 0))) ==
        doctest::Approx(kEtildePlane).epsilon(1e-15));
  CHECK(model_energy(make_sphere(Vec3::Zero(), std::sqrt(2.0))) ==
        doctest::Approx(kEtildeSphere).epsilon(1e-15));
  CHECK(model_energy(make_cylinder(Vec3::Zero(), Vec3::UnitX(), 1.0)) ==
        doctest::Approx(kEtildeCylinder).epsilon(1e-15));
  CHECK(kEtildePlane < kEtildeSphere);
  CHECK(kEtildeSphere < kEtildeCylinder);

  CHECK_THROWS_AS(model_energy(make_sphere(Vec3(1, 0, 0), std::sqrt(2.0))), Error);
  CHECK_THROWS_AS(model_energy(make_sphere(Vec3::Zero(), 1.0)), Error);
  CHECK_THROWS_AS(model_energy(make_cylinder(Vec3(0.5, 0.5, 0), Vec3::UnitZ(), 1.0)), Error);
  CHECK_THROWS_AS(model_energy(make_plane(Vec3(0, 0, 1), Vec3::UnitZ())), Error);
}

TEST_CASE("dissipation vanishes on stationary shrinkers") {
  Mesh sphere = build_icosphere(std::sqrt(2.0), Vec3::Zero(), 4);
  sphere.gauge = Gauge::Rescaled;
  CHECK(dissipation(sphere) <= 1e-5);

  Mesh cylinder = build_cylinder_mesh(1.0, Vec3::UnitZ(), 8.0, 256, 96);
  cylinder.gauge = Gauge::Rescaled;
  CHECK(dissipation(cylinder) <= 1e-5);
}

TEST_CASE("dissipation of the radius-2 rescaled sphere") {
  // closed form: (F.nu - H)^2 rho integrated = (2 - 1)^2 e^{-2} * 16 pi
  const double expected = 16.0 * M_PI * std::exp(-2.0);
  Mesh sphere = build_icosphere(2.0, Vec3::Zero(), 5);
  sphere.gauge = Gauge::Rescaled;
  CHECK(dissipation(sphere) == doctest::Approx(expected).epsilon(1e-2));
}

TEST_CASE("rescale_surface matches the exact flows") {
  const GaugeMap gauge;
  const double t = -1.0;
  Mesh sphere = sphere_flow_mesh(t, 3);  // r = 2
  const Mesh rescaled = rescale_surface(sphere, t);
  for (const auto& v : rescaled.vertices) {
    CHECK(v.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  const double lam = gauge.lambda(t);
  for (int i = 0; i < sphere.num_vertices(); ++i) {
    CHECK(rescaled.mean_curvature[i] == doctest::Approx(sphere.mean_curvature[i] / lam));
    CHECK(rescaled.second_form_norm[i] == doctest::Approx(sphere.second_form_norm[i] / lam));
    CHECK(rescaled.area_weights[i] == doctest::Approx(sphere.area_weights[i] * lam * lam));
  }
  CHECK_THROWS_AS(rescale_surface(rescaled, t), Error);

  for (double tc : {-2.0, -0.5, -0.05}) {
    const ModelSurface cyl = exact_cylinder(tc);
    CHECK(gauge.lambda(tc) * cyl.radius == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("gauge round trip reproduces vertices to 1e-13") {
  const GaugeMap gauge;
  const double t = -0.37;
  const Mesh mesh = build_ellipsoid(2.0, 1.0, 1.0, Vec3::Zero(), 3);
  const Mesh rescaled = rescale_surface(mesh, t);
  const Mesh back = unrescale_surface(rescaled, gauge.s_of_t(t));
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    CHECK((back.vertices[i] - mesh.vertices[i]).norm() <=
          1e-13 * std::max(1.0, mesh.vertices[i].norm()));
  }
}

TEST_CASE("E_tilde is invariant under rigid rotations about the origin") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Mesh mesh = build_ellipsoid(1.8, 1.1, 0.9, Vec3::Zero(), 3);
  mesh.gauge = Gauge::Rescaled;
  const double base = energy_Etilde(mesh);
  for (int trial = 0; trial < 5; ++trial) {
    Vec3 axis(unit(rng), unit(rng), unit(rng));
    const Eigen::AngleAxisd rot(unit(rng) * M_PI, axis.normalized());
    Mesh rotated = mesh;
    for (auto& v : rotated.vertices) v = rot * v;
    for (auto& n : rotated.normals) n = rot * n;
    CHECK(std::abs(energy_Etilde(rotated) - base) <= 1e-12 * base);
  }
}

TEST_CASE("E-to-E_tilde relation residual") {
  // both sides evaluated by the same quadrature: residual at rounding level
  const double t = -1.0;
  const Mesh sphere = sphere_flow_mesh(t, 4);
  const double e_tilde = energy_Etilde(rescale_surface(sphere, t));
  CHECK(check_E_relation(sphere, t) <= 1e-6 * e_tilde);

  Mesh disk = build_plane_disk(12.0 * std::sqrt(0.5), Vec3::Zero(), Vec3::UnitZ(), 100);
  CHECK(energy_E(disk, -0.5) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(check_E_relation(disk, -0.5) <= 1e-6 * 2.0 * M_PI);

  const Mesh ellipsoid = build_ellipsoid(1.5, 1.0, 0.75, Vec3::Zero(), 4);
  const double et = energy_Etilde(rescale_surface(ellipsoid, t));
  CHECK(check_E_relation(ellipsoid, t) <= 1e-5 * et);

  CHECK_THROWS_AS(check_E_relation(rescale_surface(sphere, t), t), Error);
}

TEST_CASE("energy report fields are finite and consistent") {
  const Mesh sphere = sphere_flow_mesh(-0.5, 4);  // the shrinker slice
  const EnergyReport report = energy_report(sphere, -0.5);
  CHECK(std::isfinite(report.e_tilde));
  CHECK(report.e_tilde > 0.0);
  CHECK(report.e_physical > 0.0);
  CHECK(report.dissipation >= 0.0);
  CHECK(report.dissipation <= 1e-5);  // stationary slice
  CHECK(report.relation_residual <= 1e-6 * report.e_tilde);
  CHECK(report.to_json().find("E_tilde") != std::string::npos);
}
