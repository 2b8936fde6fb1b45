#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mcf/mesh.hpp"

namespace mcf {

// Minimal TOML subset: single-level [section] tables, key = value with
// strings, booleans, numbers and flat numeric arrays, # comments.
struct TomlValue {
  enum class Kind { String, Boolean, Number, NumberList };
  Kind kind = Kind::String;
  std::string str;
  bool boolean = false;
  double number = 0.0;
  std::vector<double> list;
  int line = 0;
};

struct TomlTable {
  std::map<std::string, TomlValue> values;  // keys are "section.key"
  std::string raw_text;
};

TomlTable parse_toml(const std::string& text, const std::string& origin);
TomlTable parse_toml_file(const std::string& path);

enum class SurfaceKind { Icosphere, Cylinder, Ellipsoid, PlaneDisk, Obj, Dumbbell };
enum class RunGauge { Physical, Rescaled, Axisym };

struct ScenarioConfig {
  std::string name;

  // surface
  SurfaceKind surface = SurfaceKind::Icosphere;
  double radius = 1.0;
  int subdivisions = 3;
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double half_length = 4.0;
  int segments_axial = 64;
  int segments_around = 64;
  std::array<double, 3> semi_axes{1.0, 1.0, 1.0};
  int rings = 32;
  std::string mesh_path;
  double neck_radius = 0.24;
  double bulb_radius = 0.8;
  int grid = 512;
  double perturb = 0.0;

  // flow
  RunGauge gauge = RunGauge::Rescaled;
  double time_begin = 0.0;
  double time_end = 5.0;
  double safety = 0.25;
  int record_every = 25;
  long max_steps = 2000000;
  double blowup_threshold = 0.0;  // 0 => 50 / initial diameter
  bool balance_shrinker = false;
  bool calibrate_extinction = false;
  std::array<double, 2> extinction_bracket{0.25, 2.0};
  double neck_floor_ratio = 1e-3;
  bool fix_boundary = true;

  // diagnostics
  bool energy = true;
  bool dissipation = true;
  bool classification = false;
  bool type_one = false;
  bool non_collapsing = false;
  bool graph_distance = false;
  std::string graph_model = "sphere";
  bool ball = true;
  bool trapping = true;
  double c0 = 2.0;

  // output
  std::string output_directory;
  bool snapshots = false;
  std::uint64_t seed = 0;

  std::string raw_text;  // the scenario file as read, for hashing
};

// Parses and validates a scenario file. Unknown keys are rejected; option
// combinations incompatible with the gauge are validation errors.
ScenarioConfig parse_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace mcf
