#include "mcf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mcf/errors.hpp"

namespace mcf {

const char* gauge_name(Gauge g) { return g == Gauge::Physical ? "physical" : "rescaled"; }

Gauge gauge_from_name(const std::string& name) {
  if (name == "physical") return Gauge::Physical;
  if (name == "rescaled") return Gauge::Rescaled;
  fail(ErrorCode::Parse, "unknown gauge: " + name);
}

bool Mesh::has_boundary() const {
  return std::any_of(boundary.begin(), boundary.end(), [](std::uint8_t b) { return b != 0; });
}

double Mesh::face_area(int f) const {
  const auto& tri = faces[f];
  const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
  const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * e1.cross(e2).norm();
}

double Mesh::total_area() const {
  double area = 0.0;
  for (int f = 0; f < num_faces(); ++f) area += face_area(f);
  return area;
}

double Mesh::min_edge_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& tri : faces) {
    for (int k = 0; k < 3; ++k) {
      m = std::min(m, (vertices[tri[k]] - vertices[tri[(k + 1) % 3]]).norm());
    }
  }
  return m;
}

double Mesh::max_vertex_norm() const {
  double m = 0.0;
  for (const auto& v : vertices) m = std::max(m, v.norm());
  return m;
}

Vec3 Mesh::centroid() const {
  Vec3 c = Vec3::Zero();
  if (area_weights.size() == vertices.size() && !vertices.empty()) {
    double total = 0.0;
    for (int i = 0; i < num_vertices(); ++i) {
      c += area_weights[i] * vertices[i];
      total += area_weights[i];
    }
    return c / total;
  }
  for (const auto& v : vertices) c += v;
  return vertices.empty() ? c : Vec3(c / static_cast<double>(num_vertices()));
}

void Mesh::validate_topology() const {
  const int nv = num_vertices();
  require(nv >= 3 && num_faces() >= 1, ErrorCode::InvalidMesh, "mesh too small");

  std::vector<std::uint8_t> referenced(nv, 0);
  // key: undirected edge; value: {count, net winding}
  std::map<std::pair<int, int>, std::pair<int, int>> edges;
  for (int f = 0; f < num_faces(); ++f) {
    const auto& tri = faces[f];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      require(a >= 0 && a < nv && b >= 0 && b < nv, ErrorCode::InvalidMesh,
              "face " + std::to_string(f) + " has out-of-range vertex index");
      require(a != b, ErrorCode::InvalidMesh, "face " + std::to_string(f) + " repeats a vertex");
      referenced[a] = 1;
      auto& e = edges[{std::min(a, b), std::max(a, b)}];
      e.first += 1;
      e.second += (a < b) ? 1 : -1;
    }
  }
  for (int i = 0; i < nv; ++i) {
    require(referenced[i] != 0, ErrorCode::InvalidMesh,
            "vertex " + std::to_string(i) + " belongs to no face");
  }
  for (const auto& [key, e] : edges) {
    require(e.first <= 2, ErrorCode::InvalidMesh,
            "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                ") shared by more than two faces");
    if (e.first == 2) {
      require(e.second == 0, ErrorCode::InvalidMesh,
              "inconsistent winding across edge (" + std::to_string(key.first) + "," +
                  std::to_string(key.second) + ")");
    }
  }
}

void Mesh::validate() const {
  validate_topology();
  require(has_geometry(), ErrorCode::InvalidMesh, "geometry not computed");
  for (int i = 0; i < num_vertices(); ++i) {
    require(std::abs(normals[i].norm() - 1.0) <= 1e-12, ErrorCode::InvalidMesh,
            "normal at vertex " + std::to_string(i) + " is not unit length");
    require(area_weights[i] > 0.0, ErrorCode::InvalidMesh,
            "non-positive area weight at vertex " + std::to_string(i));
  }
  double weight_sum = 0.0;
  for (double w : area_weights) weight_sum += w;
  const double area = total_area();
  require(std::abs(weight_sum - area) <= 1e-12 * area, ErrorCode::InvalidMesh,
          "lumped weights do not sum to the total face area");
}

std::vector<std::uint8_t> Mesh::boundary_collar(int rings) const {
  std::vector<std::uint8_t> collar = boundary;
  if (collar.empty()) collar.assign(vertices.size(), 0);
  for (int r = 0; r < rings; ++r) {
    std::vector<std::uint8_t> next = collar;
    for (const auto& tri : faces) {
      const bool touched = collar[tri[0]] || collar[tri[1]] || collar[tri[2]];
      if (touched) {
        next[tri[0]] = next[tri[1]] = next[tri[2]] = 1;
      }
    }
    collar.swap(next);
  }
  return collar;
}

Mesh read_obj(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  Mesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x, y, z;
      ss >> x >> y >> z;
      require(!ss.fail(), ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": bad vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::array<int, 3> tri{};
      for (int k = 0; k < 3; ++k) {
        std::string token;
        ss >> token;
        require(!ss.fail(), ErrorCode::Parse,
                path + ":" + std::to_string(line_no) + ": bad face record");
        // accept v, v/vt, v/vt/vn forms; only the position index is used
        tri[k] = std::stoi(token.substr(0, token.find('/'))) - 1;
      }
      mesh.faces.push_back(tri);
    }
  }
  mesh.validate_topology();
  return mesh;
}

void write_obj(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot open " + path + " for writing");
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

}  // namespace mcf
