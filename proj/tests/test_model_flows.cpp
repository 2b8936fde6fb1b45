#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "mcf/axisym.hpp"
#include "mcf/errors.hpp"
#include "mcf/exact_flows.hpp"
#include "mcf/gauge.hpp"

using namespace mcf;

namespace {

// independent oracle: RK4 on the radial ODE dr/dt = -k/r
double radial_ode(double r0, double t0, double t1, double k, int steps) {
  double r = r0;
  const double dt = (t1 - t0) / steps;
  auto f = [k](double radius) { return -k / radius; };
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(r);
    const double k2 = f(r + 0.5 * dt * k1);
    const double k3 = f(r + 0.5 * dt * k2);
    const double k4 = f(r + dt * k3);
    r += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

std::vector<double> log_spaced_times(double t_late, double t_early, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    out.push_back(-std::exp(std::log(-t_early) + f * (std::log(-t_late) - std::log(-t_early))));
  }
  return out;
}

}  // namespace

TEST_CASE("exact sphere radius solves dr/dt = -2/r") {
  CHECK(exact_sphere(-1.0).radius == doctest::Approx(2.0).epsilon(1e-14));
  // oracle: integrate the ODE from t = -1 to t = -0.25
  const double oracle = radial_ode(2.0, -1.0, -0.25, 2.0, 20000);
  CHECK(exact_sphere(-0.25).radius == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(exact_sphere(-1e-8).radius < 1e-3);  // vanishes at t -> 0
  CHECK_THROWS_AS(exact_sphere(0.0), Error);
  CHECK_THROWS_AS(exact_sphere(1.0), Error);
}

TEST_CASE("exact sphere hits the paper's rescaled radius sqrt(2)") {
  const GaugeMap gauge;
  const double t = -0.5;
  const ModelSurface sphere = exact_sphere(t);
  CHECK(sphere.radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(gauge.lambda(t) * sphere.radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("exact cylinder radius solves dr/dt = -1/r") {
  CHECK(exact_cylinder(-0.5).radius == doctest::Approx(1.0).epsilon(1e-14));
  const double oracle = radial_ode(1.0, -0.5, -0.125, 1.0, 20000);
  CHECK(exact_cylinder(-0.125).radius == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(exact_cylinder(-2.0).radius == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(exact_cylinder(0.0), Error);
}

TEST_CASE("rescaled radii are constant along both exact flows") {
  const GaugeMap gauge;
  for (double t : log_spaced_times(-1e-6, -100.0, 20)) {
    CHECK(gauge.lambda(t) * exact_sphere(t).radius ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(gauge.lambda(t) * exact_cylinder(t).radius == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("type-I ratio is exactly 1 on both exact flows") {
  const GaugeMap gauge;
  for (double t : log_spaced_times(-1e-4, -10.0, 20)) {
    const double sphere_ratio = exact_sphere(t).second_form_norm() / gauge.lambda(t);
    const double cylinder_ratio = exact_cylinder(t).second_form_norm() / gauge.lambda(t);
    CHECK(sphere_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cylinder_ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("axisym solver tracks the exact cylinder") {
  // u === r0 solves u(t) = sqrt(r0^2 - 2(t - t0)) exactly; the solver should
  // match pointwise to 1e-6 with a fine step
  AxisymProfile profile = make_constant_profile(std::sqrt(2.0), 1.0, 129, -1.0);
  const double dt = 5e-6;
  while (profile.time < -0.5 - 1e-12) {
    profile = axisym_step(profile, std::min(dt, -0.5 - profile.time));
  }
  const double exact = std::sqrt(2.0 - 2.0 * (profile.time + 1.0));
  for (double u : profile.u) {
    CHECK(std::abs(u - exact) <= 1e-6);
  }
}

TEST_CASE("axisym solver reproduces the cylinder flow at grid 512 to 1e-4") {
  AxisymProfile profile = make_constant_profile(std::sqrt(2.0), 1.0, 512, -1.0);
  double worst = 0.0;
  while (profile.time < -0.1 - 1e-12) {
    const double dt = std::min(axisym_stable_timestep(profile, 1.0), -0.1 - profile.time);
    profile = axisym_step(profile, dt);
    const double exact = std::sqrt(-2.0 * profile.time);
    for (double u : profile.u) {
      worst = std::max(worst, std::abs(u - exact) / exact);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("axisym solver keeps a sphere cap spherical on the deep interior") {
  // Neumann ends contaminate a collar; the graph-valid deep interior tracks
  // r(t)^2 = r0^2 - 4(t - t0) to 1e-4
  AxisymProfile profile = make_sphere_profile(2.0, 1.0, 512, -1.0);
  const double t_end = -0.98;
  while (profile.time < t_end - 1e-12) {
    const double dt = std::min(axisym_stable_timestep(profile, 0.25), t_end - profile.time);
    profile = axisym_step(profile, dt);
  }
  const double r2 = 4.0 - 4.0 * (profile.time + 1.0);
  double worst = 0.0;
  for (size_t i = 0; i < profile.x.size(); ++i) {
    if (std::abs(profile.x[i]) > 0.2) continue;
    const double exact = std::sqrt(r2 - profile.x[i] * profile.x[i]);
    worst = std::max(worst, std::abs(profile.u[i] - exact) / exact);
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("dumbbell necks down monotonically and pinches") {
  AxisymProfile profile = make_dumbbell_profile(0.2, 0.5, 1.0, 257, -1.0);
  const double floor = 1e-3 * profile.min_u();
  double last_min = profile.min_u();
  bool pinched = false;
  for (long step = 0; step < 4000000; ++step) {
    try {
      profile = axisym_step(profile, axisym_stable_timestep(profile, 0.5), floor);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NeckPinch);
      pinched = true;
      break;
    }
    const double m = profile.min_u();
    CHECK(m <= last_min + 1e-12);
    last_min = m;
  }
  CHECK(pinched);
}

TEST_CASE("axisym_step rejects bad steps and profiles") {
  AxisymProfile profile = make_constant_profile(1.0, 1.0, 65, -1.0);
  CHECK_THROWS_AS(axisym_step(profile, -0.1), Error);
  AxisymProfile bad = profile;
  bad.u[3] = -0.5;
  CHECK_THROWS_AS(axisym_step(bad, 1e-4), Error);
  AxisymProfile nonuniform = profile;
  nonuniform.x[1] += 1e-3;
  CHECK_THROWS_AS(nonuniform.validate(), Error);
}

TEST_CASE("revolved constant profile is an exact unit cylinder") {
  const AxisymProfile profile = make_constant_profile(1.0, 2.0, 65, -1.0);
  const Mesh mesh = axisym_to_mesh(profile, 48);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    CHECK(mesh.mean_curvature[i] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mesh.second_form_norm[i] == doctest::Approx(1.0).epsilon(1e-14));
  }
  mesh.validate();
}

TEST_CASE("revolved hemisphere with analytic derivatives has exact H") {
  const double r = 2.0;
  AxisymProfile profile = make_sphere_profile(r, 1.2, 257, -1.0);
  std::vector<double> ux(profile.x.size()), uxx(profile.x.size());
  for (size_t i = 0; i < profile.x.size(); ++i) {
    const double u = profile.u[i];
    ux[i] = -profile.x[i] / u;
    uxx[i] = -r * r / (u * u * u);
  }
  const Mesh mesh = axisym_to_mesh(profile, 32, ux, uxx);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    CHECK(mesh.mean_curvature[i] == doctest::Approx(2.0 / r).epsilon(1e-12));
  }
}

TEST_CASE("dumbbell curvature peaks at the neck") {
  const AxisymProfile profile = make_dumbbell_profile(0.15, 0.6, 1.0, 513, -1.0);
  const AxisymCurvatures curv = axisym_curvatures(profile);
  const auto peak = std::max_element(curv.abs_A.begin(), curv.abs_A.end());
  const int k = static_cast<int>(peak - curv.abs_A.begin());
  CHECK(std::abs(profile.x[k]) <= 0.05);  // neck plane is x = 0
  const Mesh mesh = axisym_to_mesh(profile, 24);
  int mesh_peak = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.second_form_norm[i] > mesh.second_form_norm[mesh_peak]) mesh_peak = i;
  }
  CHECK(std::abs(mesh.vertices[mesh_peak].x()) <= 0.05);
}

TEST_CASE("profile CSV round trip") {
  const AxisymProfile profile = make_dumbbell_profile(0.3, 0.9, 2.0, 65, -0.75);
  const auto path = std::filesystem::temp_directory_path() / "mcf_profile_roundtrip.csv";
  write_profile_csv(profile, path.string());
  const AxisymProfile back = read_profile_csv(path.string());
  REQUIRE(back.u.size() == profile.u.size());
  CHECK(back.time == doctest::Approx(profile.time).epsilon(1e-15));
  for (size_t i = 0; i < profile.u.size(); ++i) {
    CHECK(back.x[i] == doctest::Approx(profile.x[i]).epsilon(1e-15));
    CHECK(back.u[i] == doctest::Approx(profile.u[i]).epsilon(1e-15));
  }
  std::filesystem::remove(path);
}
