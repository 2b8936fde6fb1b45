#include <doctest.h>

#include <cmath>

#include "mcf/energy.hpp"
#include "mcf/errors.hpp"
#include "mcf/flow.hpp"
#include "mcf/geometry.hpp"
#include "mcf/primitives.hpp"

using namespace mcf;

namespace {

// radial ODE oracle for the rescaled sphere: dr/ds = r - 2/r
double rescaled_radius_oracle(double r0, double span, int steps) {
  double r = r0;
  const double ds = span / steps;
  auto f = [](double radius) { return radius - 2.0 / radius; };
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(r);
    const double k2 = f(r + 0.5 * ds * k1);
    const double k3 = f(r + 0.5 * ds * k2);
    const double k4 = f(r + ds * k3);
    r += ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

}  // namespace

TEST_CASE("cfl timestep formula") {
  Mesh mesh = build_icosphere(1.0, Vec3::Zero(), 2);
  const double e = mesh.min_edge_length();
  CHECK(cfl_timestep(mesh, 0.25) == doctest::Approx(0.25 * e * e).epsilon(1e-15));
  // refining halves the edge and quarters the step
  Mesh fine = build_icosphere(1.0, Vec3::Zero(), 3);
  CHECK(cfl_timestep(fine, 0.25) ==
        doctest::Approx(0.25 * cfl_timestep(mesh, 0.25)).epsilon(0.05));
  CHECK_THROWS_AS(cfl_timestep(mesh, 0.0), Error);
  // the stated example: min edge 0.1, safety 0.25
  Mesh scaled = mesh;
  const double factor = 0.1 / e;
  for (auto& v : scaled.vertices) v *= factor;
  compute_geometry(scaled);
  CHECK(cfl_timestep(scaled, 0.25) == doctest::Approx(2.5e-3).epsilon(1e-10));
}

TEST_CASE("physical sphere flow tracks r(t) = sqrt(-4t) within 1%") {
  Mesh mesh = build_icosphere(2.0, Vec3::Zero(), 4);
  double t = -1.0;
  const double t_end = -0.1;
  double worst = 0.0;
  long steps = 0;
  while (t_end - t > 1e-13) {
    const double dt = std::min(cfl_timestep(mesh, 0.25), t_end - t);
    mesh = mcf_step(mesh, dt);
    t += dt;
    ++steps;
    if (steps % 25 == 0 || t_end - t <= 1e-13) {
      const double exact = std::sqrt(-4.0 * t);
      worst = std::max(worst, std::abs(mean_radius(mesh) - exact) / exact);
    }
  }
  CHECK(worst <= 1e-2);
}

TEST_CASE("fixed-boundary plane patch does not move") {
  Mesh mesh = build_plane_disk(1.0, Vec3::Zero(), Vec3::UnitZ(), 10);
  const Mesh before = mesh;
  StepOptions options;
  options.fix_boundary = true;
  const Mesh after = mcf_step(mesh, 1e-3, options);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    CHECK((after.vertices[i] - before.vertices[i]).norm() <= 1e-10);
  }
}

TEST_CASE("ellipsoid curvature grows monotonically toward extinction") {
  Mesh mesh = build_ellipsoid(1.0, 0.5, 0.5, Vec3::Zero(), 3);
  FlowRunConfig config;
  config.gauge = Gauge::Physical;
  config.time_begin = -0.125;  // inscribed-sphere extinction bound r^2/4
  config.time_end = -1e-4;
  config.record_every = 20;
  config.blowup_threshold = 50.0 / 2.0;
  const FlowResult result = run_flow(mesh, config);
  CHECK(result.status == "singular_event");
  REQUIRE(result.trace.rows.size() >= 4);
  for (size_t i = 1; i < result.trace.rows.size(); ++i) {
    CHECK(result.trace.rows[i].max_A >= result.trace.rows[i - 1].max_A * (1.0 - 1e-6));
  }
}

TEST_CASE("rescaled sphere at sqrt(2) is stationary to 1e-3 per unit s") {
  Mesh mesh = build_icosphere(std::sqrt(2.0), Vec3::Zero(), 4);
  mesh.gauge = Gauge::Rescaled;
  const double r0 = mean_radius(mesh);
  double s = 0.0;
  while (s < 1.0) {
    const double ds = std::min(cfl_timestep(mesh, 0.25), 1.0 - s);
    mesh = rescaled_step(mesh, ds);
    s += ds;
  }
  CHECK(std::abs(mean_radius(mesh) - r0) <= 1e-3);
  // shrinker residual stays small as well
  double sup = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    sup = std::max(sup,
                   std::abs(mesh.mean_curvature[i] - mesh.vertices[i].dot(mesh.normals[i])));
  }
  CHECK(sup <= 5e-3);
}

TEST_CASE("rescaled cylinder at radius 1 is stationary on the interior") {
  Mesh mesh = build_cylinder_mesh(1.0, Vec3::UnitZ(), 8.0, 128, 48);
  mesh.gauge = Gauge::Rescaled;
  const auto collar = mesh.boundary_collar(1);
  auto interior_radius = [&](const Mesh& m) {
    double sum = 0.0;
    int n = 0;
    for (int i = 0; i < m.num_vertices(); ++i) {
      if (collar[i] || std::abs(m.vertices[i].z()) > 4.0) continue;
      sum += std::hypot(m.vertices[i].x(), m.vertices[i].y());
      ++n;
    }
    return sum / n;
  };
  const double r0 = interior_radius(mesh);
  CHECK(r0 == doctest::Approx(1.0).epsilon(1e-12));
  double s = 0.0;
  while (s < 1.0) {
    const double ds = std::min(cfl_timestep(mesh, 0.25), 1.0 - s);
    mesh = rescaled_step(mesh, ds);
    s += ds;
  }
  CHECK(std::abs(interior_radius(mesh) - r0) <= 1e-3);
}

TEST_CASE("oversized rescaled sphere moves away from sqrt(2)") {
  // radial ODE oracle dr/ds = r - 2/r: starting at r = 2 the radius grows
  const double span = 0.2;
  const double oracle = rescaled_radius_oracle(2.0, span, 4000);
  CHECK(oracle > 2.0);  // the sqrt(2) fixed point repels outward

  Mesh mesh = build_icosphere(2.0, Vec3::Zero(), 3);
  mesh.gauge = Gauge::Rescaled;
  double s = 0.0;
  while (s < span) {
    const double ds = std::min(1e-3, span - s);
    mesh = rescaled_step(mesh, ds);
    s += ds;
  }
  CHECK(mean_radius(mesh) == doctest::Approx(oracle).epsilon(2e-3));
}

TEST_CASE("undersized rescaled sphere shrinks away from sqrt(2)") {
  Mesh mesh = build_icosphere(1.0, Vec3::Zero(), 3);
  mesh.gauge = Gauge::Rescaled;
  double s = 0.0;
  while (s < 0.1) {
    const double ds = std::min(1e-3, 0.1 - s);
    mesh = rescaled_step(mesh, ds);
    s += ds;
  }
  CHECK(mean_radius(mesh) < 1.0);
}

TEST_CASE("gauge consistency: physical evolution rescales onto the fixed point") {
  // evolve the exact sphere physically, rescale snapshots: radius sqrt(2)
  Mesh mesh = build_icosphere(2.0, Vec3::Zero(), 4);
  double t = -1.0;
  const double t_end = -0.4;
  double worst = 0.0;
  while (t_end - t > 1e-13) {
    const double dt = std::min(cfl_timestep(mesh, 0.1), t_end - t);
    mesh = mcf_step(mesh, dt);
    t += dt;
    const Mesh rescaled = rescale_surface(mesh, t);
    worst = std::max(worst, std::abs(mean_radius(rescaled) - std::sqrt(2.0)));
  }
  CHECK(worst <= 1e-3 * std::sqrt(2.0));
}

TEST_CASE("divergence guard rejects runaway rescaled meshes") {
  Mesh mesh = build_icosphere(50.0, Vec3::Zero(), 2);
  mesh.gauge = Gauge::Rescaled;
  StepOptions options;
  options.divergence_radius = 60.0;
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 200; ++i) mesh = rescaled_step(mesh, 5e-3, options);
      }(),
      Error);
}

TEST_CASE("collapsing step is rejected") {
  Mesh mesh = build_icosphere(1.0, Vec3::Zero(), 1);
  try {
    mcf_step(mesh, 1e6);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepRejected);
  }
}

TEST_CASE("run_flow records strictly increasing times and stops on events") {
  Mesh mesh = build_icosphere(1.0, Vec3::Zero(), 3);
  FlowRunConfig config;
  config.gauge = Gauge::Physical;
  config.time_begin = -0.25;
  config.time_end = -1e-5;
  config.record_every = 10;
  config.blowup_threshold = 50.0 / 2.0;
  const FlowResult result = run_flow(mesh, config);
  CHECK(result.status == "singular_event");
  REQUIRE(result.event.has_value());
  CHECK(result.event->trigger == SingularTrigger::CurvatureBlowup);
  // blow-up of the unit sphere released at t=-0.25 happens at t=0
  CHECK(std::abs(result.event->time) <= 0.02 * 0.25);
  CHECK(result.event->location.norm() <= 0.05);
  for (size_t i = 1; i < result.trace.rows.size(); ++i) {
    CHECK(result.trace.rows[i].time > result.trace.rows[i - 1].time);
  }
}

TEST_CASE("detect_singularity on synthetic type-I data") {
  FlowTrace trace;
  for (int i = 0; i <= 40; ++i) {
    const double t = -1.0 + 0.9 * i / 40.0;  // approaches -0.1
    TraceRow row;
    row.time = t;
    row.gauge = Gauge::Physical;
    row.max_A = 1.0 / std::sqrt(-2.0 * t);  // C0 = 1, blow-up at T = 0
    row.peak_A_position = Vec3(0.01, 0, 0);
    trace.append(row);
  }
  const auto event = detect_singularity(trace, 1.0);
  REQUIRE(event.has_value());
  CHECK(std::abs(event->time) <= 1e-10);
  CHECK(event->location.x() == doctest::Approx(0.01));

  // a quiet trace yields none
  FlowTrace flat;
  for (int i = 0; i < 5; ++i) {
    TraceRow row;
    row.time = i;
    row.gauge = Gauge::Physical;
    row.max_A = 1e-9;
    flat.append(row);
  }
  CHECK(!detect_singularity(flat, 1.0).has_value());
}

TEST_CASE("axisym run reports a neck pinch event at the neck plane") {
  AxisymProfile profile = make_dumbbell_profile(0.2, 0.5, 1.0, 257, -0.5);
  AxisymRunConfig config;
  config.time_end = -1e-9;
  config.record_every = 200;
  config.safety = 0.4;
  const AxisymFlowResult result = run_axisym_flow(profile, config);
  CHECK(result.status == "singular_event");
  REQUIRE(result.event.has_value());
  CHECK(result.event->trigger == SingularTrigger::NeckPinch);
  CHECK(std::abs(result.event->location.x()) <= 0.05);
  // pinch-time extrapolation agrees with the last pre-pinch time
  CHECK(result.event->time >= result.final_profile.time);
  CHECK(result.event->time - result.final_profile.time <= 0.05);
  // min-edge column carries the collapsing neck scale
  CHECK(result.trace.rows.back().min_edge < 0.01);
}

TEST_CASE("shrinker balance scale pins the discrete sphere fixed point") {
  Mesh mesh = build_icosphere(std::sqrt(2.0), Vec3::Zero(), 3);
  mesh.gauge = Gauge::Rescaled;
  StepOptions options;
  const double sigma = shrinker_balance_scale(mesh, options, 0.75, 0.25);
  CHECK(std::abs(sigma - 1.0) <= 1e-3);  // discrete bias is tiny
  Mesh balanced = mesh;
  for (auto& v : balanced.vertices) v *= sigma;
  compute_geometry(balanced);
  const double r0 = mean_radius(balanced);
  FlowRunConfig config;
  config.gauge = Gauge::Rescaled;
  config.time_begin = 0.0;
  config.time_end = 3.0;
  config.record_every = 50;
  const FlowResult result = run_flow(balanced, config);
  CHECK(result.status == "reached_end");
  CHECK(std::abs(mean_radius(result.final_mesh) - r0) <= 5e-4);
}
