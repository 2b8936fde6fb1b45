#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mcf/errors.hpp"
#include "mcf/geometry.hpp"
#include "mcf/mesh.hpp"
#include "mcf/model_surface.hpp"
#include "mcf/primitives.hpp"

using namespace mcf;

namespace {

double max_H_error(const Mesh& mesh, double exact, bool interior_only = true) {
  const auto collar = mesh.has_boundary() ? mesh.boundary_collar(1) : std::vector<std::uint8_t>();
  double worst = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (interior_only && !collar.empty() && collar[i]) continue;
    worst = std::max(worst, std::abs(mesh.mean_curvature[i] - exact));
  }
  return worst;
}

double max_absA_error(const Mesh& mesh, double exact) {
  const auto collar = mesh.has_boundary() ? mesh.boundary_collar(1) : std::vector<std::uint8_t>();
  double worst = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (!collar.empty() && collar[i]) continue;
    worst = std::max(worst, std::abs(mesh.second_form_norm[i] - exact));
  }
  return worst;
}

}  // namespace

TEST_CASE("icosphere base case is the projected icosahedron") {
  const Mesh mesh = build_icosphere(1.0, Vec3::Zero(), 0);
  CHECK(mesh.num_vertices() == 12);
  CHECK(mesh.num_faces() == 20);
  for (const auto& v : mesh.vertices) {
    CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
  }
  mesh.validate();
}

TEST_CASE("icosphere vertices sit on the requested sphere") {
  const Vec3 center(1, 0, 0);
  const Mesh mesh = build_icosphere(2.0, center, 3);
  for (const auto& v : mesh.vertices) {
    CHECK(std::abs((v - center).norm() - 2.0) <= 2.0 * 1e-12);
  }
}

TEST_CASE("icosphere rejects bad arguments") {
  CHECK_THROWS_AS(build_icosphere(-1.0, Vec3::Zero(), 1), Error);
  CHECK_THROWS_AS(build_icosphere(1.0, Vec3::Zero(), 8), Error);
  CHECK_THROWS_AS(build_icosphere(1.0, Vec3::Zero(), -1), Error);
}

TEST_CASE("icosphere discrete H matches 2/r") {
  // r = sqrt(2): exact H = sqrt(2)
  const Mesh mesh = build_icosphere(std::sqrt(2.0), Vec3::Zero(), 4);
  double mean_H = 0.0, area = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    mean_H += mesh.mean_curvature[i] * mesh.area_weights[i];
    area += mesh.area_weights[i];
  }
  mean_H /= area;
  CHECK(std::abs(mean_H - std::sqrt(2.0)) <= 1e-3);
}

TEST_CASE("icosphere H converges with order >= 1.5") {
  // exact sphere curvature oracle: H = 2/r = 1 at r = 2
  const double r = 2.0;
  double errors[3];
  for (int k = 0; k < 3; ++k) {
    const Mesh mesh = build_icosphere(r, Vec3::Zero(), 3 + k);
    errors[k] = max_H_error(mesh, 2.0 / r);
  }
  CHECK(errors[2] < 1e-2);  // 5 subdivisions
  const double order1 = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  CHECK(0.5 * (order1 + order2) >= 1.5);
}

TEST_CASE("outward orientation on convex meshes") {
  const Mesh mesh = build_icosphere(1.5, Vec3(0.5, -0.25, 1.0), 2);
  const Vec3 c = mesh.centroid();
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    CHECK(mesh.normals[i].dot(mesh.vertices[i] - c) > 0.0);
  }
}

TEST_CASE("lumped weights sum to the total face area") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> radius(0.5, 3.0);
  for (int trial = 0; trial < 4; ++trial) {
    const Mesh mesh = build_icosphere(radius(rng), Vec3::Zero(), 2 + trial % 2);
    double sum = 0.0;
    for (double w : mesh.area_weights) sum += w;
    const double area = mesh.total_area();
    CHECK(std::abs(sum - area) <= 1e-12 * area);
  }
}

TEST_CASE("cylinder mesh construction constraints") {
  const Mesh mesh = build_cylinder_mesh(2.0, Vec3::UnitX(), 1.0, 8, 16);
  for (const auto& v : mesh.vertices) {
    const double rho = std::hypot(v.y(), v.z());
    CHECK(std::abs(rho - 2.0) <= 2.0 * 1e-12);
  }
  CHECK(mesh.has_boundary());
  CHECK_THROWS_AS(build_cylinder_mesh(1.0, Vec3::Zero(), 1.0, 8, 16), Error);
}

TEST_CASE("cylinder discrete curvatures match 1/r away from the ends") {
  // exact cylinder oracle: H = 1/r, |A| = 1/r (principal curvatures 1/r and 0)
  const Mesh mesh = build_cylinder_mesh(1.0, Vec3::UnitZ(), 5.0, 160, 96);
  CHECK(max_H_error(mesh, 1.0) <= 1e-2);
  CHECK(max_absA_error(mesh, 1.0) <= 1e-2);
}

TEST_CASE("flat patch has vanishing curvature on the interior") {
  const Mesh mesh = build_plane_disk(2.0, Vec3::Zero(), Vec3::UnitZ(), 12);
  const auto collar = mesh.boundary_collar(1);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (collar[i]) continue;
    CHECK(std::abs(mesh.mean_curvature[i]) <= 1e-10);
    CHECK(std::abs(mesh.second_form_norm[i]) <= 1e-10);
  }
}

TEST_CASE("icosphere |A| matches sqrt(2)/r") {
  const Mesh mesh = build_icosphere(2.0, Vec3::Zero(), 4);
  CHECK(max_absA_error(mesh, std::sqrt(2.0) / 2.0) <= 1e-2);
}

TEST_CASE("degenerate faces are reported with indices") {
  Mesh mesh = build_icosphere(1.0, Vec3::Zero(), 1);
  // collapse one face to a segment
  mesh.vertices[mesh.faces[5][1]] = mesh.vertices[mesh.faces[5][0]];
  try {
    compute_geometry(mesh);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateFace);
    CHECK(std::string(e.what()).find("5") != std::string::npos);
  }
}

TEST_CASE("model_query closed forms") {
  // sphere(r = sqrt 2) queried at (2,0,0): distance 2 - sqrt 2, H = sqrt 2
  const ModelSurface sphere = make_sphere(Vec3::Zero(), std::sqrt(2.0));
  const ModelQuery qs = model_query(sphere, Vec3(2, 0, 0));
  CHECK(qs.signed_distance == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(qs.mean_curvature == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  const ModelSurface plane = make_plane(Vec3::Zero(), Vec3::UnitZ());
  const ModelQuery qp = model_query(plane, Vec3(0, 0, 3));
  CHECK(qp.signed_distance == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(qp.mean_curvature == 0.0);

  const ModelSurface cylinder = make_cylinder(Vec3::Zero(), Vec3::UnitZ(), 1.0);
  CHECK_THROWS_AS(model_query(cylinder, Vec3(0, 0, 7)), Error);
  try {
    model_query(make_sphere(Vec3::Zero(), 1.0), Vec3::Zero());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AmbiguousQuery);
  }
}

TEST_CASE("model_query reconstruction identity") {
  // |query - (nearest + distance * normal)| <= 1e-12 off axis
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  const ModelSurface models[3] = {
      make_plane(Vec3(0.1, -0.2, 0.3), Vec3(1, 2, -1)),
      make_cylinder(Vec3(0.5, 0, 0), Vec3(0, 1, 1), 1.25),
      make_sphere(Vec3(-0.3, 0.4, 0.0), 0.8),
  };
  for (const auto& model : models) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec3 q(coord(rng), coord(rng), coord(rng));
      ModelQuery result;
      try {
        result = model_query(model, q);
      } catch (const Error&) {
        continue;  // ambiguous samples are skipped
      }
      const Vec3 rebuilt = result.nearest + result.signed_distance * result.normal;
      CHECK((q - rebuilt).norm() <= 1e-12 * std::max(1.0, q.norm()));
    }
  }
}

TEST_CASE("model JSON round trip") {
  const ModelSurface model = make_cylinder(Vec3(0, 0, 0), Vec3(0, 0, 1), 1.0);
  const ModelSurface back = model_from_json(model_to_json(model));
  CHECK(back.kind == ModelKind::Cylinder);
  CHECK(back.radius == doctest::Approx(1.0));
  CHECK((back.axis - model.axis).norm() <= 1e-15);
}

TEST_CASE("obj round trip preserves the mesh") {
  const Mesh mesh = build_icosphere(1.3, Vec3(0.2, 0, 0), 2);
  const auto path = std::filesystem::temp_directory_path() / "mcf_test_roundtrip.obj";
  write_obj(mesh, path.string());
  Mesh back = read_obj(path.string());
  REQUIRE(back.num_vertices() == mesh.num_vertices());
  REQUIRE(back.num_faces() == mesh.num_faces());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    CHECK((back.vertices[i] - mesh.vertices[i]).norm() == 0.0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("edge-manifold validation rejects broken meshes") {
  Mesh mesh = build_icosphere(1.0, Vec3::Zero(), 1);
  Mesh extra = mesh;
  extra.faces.push_back(mesh.faces[0]);  // duplicated face breaks winding parity
  CHECK_THROWS_AS(extra.validate_topology(), Error);

  Mesh oob = mesh;
  oob.faces[0][0] = mesh.num_vertices() + 5;
  CHECK_THROWS_AS(oob.validate_topology(), Error);
}
