#include "mcf/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "mcf/errors.hpp"

namespace mcf {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& msg) {
  fail(ErrorCode::Parse, origin + ":" + std::to_string(line) + ": " + msg);
}

TomlValue parse_value(const std::string& text, const std::string& origin, int line) {
  TomlValue v;
  v.line = line;
  const std::string t = trim(text);
  if (t.empty()) parse_fail(origin, line, "missing value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') parse_fail(origin, line, "unterminated string");
    v.kind = TomlValue::Kind::String;
    v.str = t.substr(1, t.size() - 2);
    return v;
  }
  if (t == "true" || t == "false") {
    v.kind = TomlValue::Kind::Boolean;
    v.boolean = (t == "true");
    return v;
  }
  if (t.front() == '[') {
    if (t.back() != ']') parse_fail(origin, line, "unterminated array");
    v.kind = TomlValue::Kind::NumberList;
    std::stringstream ss(t.substr(1, t.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string it = trim(item);
      if (it.empty()) continue;
      try {
        size_t used = 0;
        v.list.push_back(std::stod(it, &used));
        if (used != it.size()) throw std::invalid_argument(it);
      } catch (const std::exception&) {
        parse_fail(origin, line, "bad array element '" + it + "'");
      }
    }
    return v;
  }
  try {
    size_t used = 0;
    v.number = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    v.kind = TomlValue::Kind::Number;
    return v;
  } catch (const std::exception&) {
    parse_fail(origin, line, "cannot parse value '" + t + "'");
  }
}

}  // namespace

TomlTable parse_toml(const std::string& text, const std::string& origin) {
  TomlTable table;
  table.raw_text = text;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') parse_fail(origin, line_no, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) parse_fail(origin, line_no, "empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) parse_fail(origin, line_no, "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) parse_fail(origin, line_no, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (table.values.count(full)) parse_fail(origin, line_no, "duplicate key '" + full + "'");
    table.values[full] = parse_value(t.substr(eq + 1), origin, line_no);
  }
  return table;
}

TomlTable parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_toml(buffer.str(), path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

namespace {

class ConfigReader {
 public:
  ConfigReader(const TomlTable& table, const std::string& origin)
      : table_(table), origin_(origin) {}

  bool has(const std::string& key) {
    consumed_.insert(key);
    return table_.values.count(key) > 0;
  }

  const TomlValue& get(const std::string& key) {
    consumed_.insert(key);
    const auto it = table_.values.find(key);
    require(it != table_.values.end(), ErrorCode::Validation,
            origin_ + ": missing required field '" + key + "'");
    return it->second;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return expect(key, TomlValue::Kind::String).str;
  }
  double num(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return expect(key, TomlValue::Kind::Number).number;
  }
  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const double v = expect(key, TomlValue::Kind::Number).number;
    validate(v == static_cast<long>(v), key, "must be an integer");
    return static_cast<long>(v);
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    return expect(key, TomlValue::Kind::Boolean).boolean;
  }
  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) return fallback;
    const auto& v = expect(key, TomlValue::Kind::NumberList);
    validate(v.list.size() == 3, key, "must have 3 components");
    return Vec3(v.list[0], v.list[1], v.list[2]);
  }
  std::array<double, 2> pair(const std::string& key, std::array<double, 2> fallback) {
    if (!has(key)) return fallback;
    const auto& v = expect(key, TomlValue::Kind::NumberList);
    validate(v.list.size() == 2, key, "must have 2 components");
    return {v.list[0], v.list[1]};
  }
  std::array<double, 3> triple(const std::string& key, std::array<double, 3> fallback) {
    if (!has(key)) return fallback;
    const auto& v = expect(key, TomlValue::Kind::NumberList);
    validate(v.list.size() == 3, key, "must have 3 components");
    return {v.list[0], v.list[1], v.list[2]};
  }

  void validate(bool ok, const std::string& key, const std::string& msg) {
    require(ok, ErrorCode::Validation, origin_ + ": field '" + key + "' " + msg);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : table_.values) {
      require(consumed_.count(key) > 0, ErrorCode::Validation,
              origin_ + ":" + std::to_string(value.line) + ": unknown key '" + key + "'");
    }
  }

 private:
  const TomlValue& expect(const std::string& key, TomlValue::Kind kind) {
    const auto& v = table_.values.at(key);
    const char* names[] = {"string", "boolean", "number", "number list"};
    require(v.kind == kind, ErrorCode::Validation,
            origin_ + ":" + std::to_string(v.line) + ": field '" + key + "' must be a " +
                names[static_cast<int>(kind)]);
    return v;
  }

  const TomlTable& table_;
  std::string origin_;
  std::set<std::string> consumed_;
};

SurfaceKind surface_kind_from(const std::string& name, ConfigReader& reader) {
  if (name == "icosphere") return SurfaceKind::Icosphere;
  if (name == "cylinder") return SurfaceKind::Cylinder;
  if (name == "ellipsoid") return SurfaceKind::Ellipsoid;
  if (name == "plane_disk") return SurfaceKind::PlaneDisk;
  if (name == "obj") return SurfaceKind::Obj;
  if (name == "dumbbell") return SurfaceKind::Dumbbell;
  reader.validate(false, "surface.kind", "unknown surface kind '" + name + "'");
  return SurfaceKind::Icosphere;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin) {
  const TomlTable table = parse_toml(text, origin);
  ConfigReader reader(table, origin);
  ScenarioConfig config;
  config.raw_text = table.raw_text;

  config.name = reader.str("name", "unnamed");

  config.surface = surface_kind_from(reader.str("surface.kind", "icosphere"), reader);
  config.radius = reader.num("surface.radius", config.radius);
  config.subdivisions = static_cast<int>(reader.integer("surface.subdivisions", config.subdivisions));
  config.center = reader.vec3("surface.center", config.center);
  config.axis = reader.vec3("surface.axis", config.axis);
  config.half_length = reader.num("surface.half_length", config.half_length);
  config.segments_axial = static_cast<int>(reader.integer("surface.segments_axial", config.segments_axial));
  config.segments_around = static_cast<int>(reader.integer("surface.segments_around", config.segments_around));
  config.semi_axes = reader.triple("surface.semi_axes", config.semi_axes);
  config.rings = static_cast<int>(reader.integer("surface.rings", config.rings));
  config.mesh_path = reader.str("surface.path", "");
  config.neck_radius = reader.num("surface.neck_radius", config.neck_radius);
  config.bulb_radius = reader.num("surface.bulb_radius", config.bulb_radius);
  config.grid = static_cast<int>(reader.integer("surface.grid", config.grid));
  config.perturb = reader.num("surface.perturb", 0.0);

  const std::string gauge = reader.str("flow.gauge", "rescaled");
  if (gauge == "physical") {
    config.gauge = RunGauge::Physical;
  } else if (gauge == "rescaled") {
    config.gauge = RunGauge::Rescaled;
  } else if (gauge == "axisym") {
    config.gauge = RunGauge::Axisym;
  } else {
    reader.validate(false, "flow.gauge", "must be physical, rescaled or axisym");
  }
  config.time_begin = reader.num("flow.time_begin", config.gauge == RunGauge::Rescaled ? 0.0 : -1.0);
  config.time_end = reader.num("flow.time_end", config.gauge == RunGauge::Rescaled ? 5.0 : -0.1);
  config.safety = reader.num("flow.safety", config.safety);
  config.record_every = static_cast<int>(reader.integer("flow.record_every", config.record_every));
  config.max_steps = reader.integer("flow.max_steps", config.max_steps);
  config.blowup_threshold = reader.num("flow.blowup_threshold", 0.0);
  config.balance_shrinker = reader.boolean("flow.balance_shrinker", false);
  config.calibrate_extinction = reader.boolean("flow.calibrate_extinction", false);
  config.extinction_bracket = reader.pair("flow.extinction_bracket", config.extinction_bracket);
  config.neck_floor_ratio = reader.num("flow.neck_floor_ratio", config.neck_floor_ratio);
  config.fix_boundary = reader.boolean("flow.fix_boundary", true);

  config.energy = reader.boolean("diagnostics.energy", true);
  config.dissipation = reader.boolean("diagnostics.dissipation", true);
  config.classification = reader.boolean("diagnostics.classification", false);
  config.type_one = reader.boolean("diagnostics.type_one", false);
  config.non_collapsing = reader.boolean("diagnostics.non_collapsing", false);
  config.graph_distance = reader.boolean("diagnostics.graph_distance", false);
  config.graph_model = reader.str("diagnostics.graph_model", "sphere");
  config.ball = reader.boolean("diagnostics.ball_check", true);
  config.trapping = reader.boolean("diagnostics.trapping", true);
  config.c0 = reader.num("diagnostics.c0", 2.0);

  config.output_directory = reader.str("output.directory", "");
  config.snapshots = reader.boolean("output.snapshots", false);
  config.seed = static_cast<std::uint64_t>(reader.integer("output.seed", 0));

  reader.reject_unknown();

  // cross-field validation
  reader.validate(config.time_end > config.time_begin, "flow.time_end",
                  "must exceed flow.time_begin");
  if (config.gauge == RunGauge::Physical) {
    reader.validate(config.time_end <= 0.0, "flow.time_end",
                    "must be <= 0 for ancient physical scenarios");
    reader.validate(!config.balance_shrinker, "flow.balance_shrinker",
                    "is rescaled-gauge only");
    reader.validate(!config.calibrate_extinction, "flow.calibrate_extinction",
                    "is rescaled-gauge only");
  }
  if (config.gauge == RunGauge::Rescaled) {
    reader.validate(!config.type_one, "diagnostics.type_one",
                    "needs a physical-gauge trace");
    reader.validate(config.blowup_threshold == 0.0, "flow.blowup_threshold",
                    "is physical-gauge only");
  }
  if (config.gauge == RunGauge::Axisym) {
    reader.validate(config.surface == SurfaceKind::Dumbbell, "surface.kind",
                    "axisym runs take a dumbbell profile");
    reader.validate(config.time_end <= 0.0, "flow.time_end",
                    "must be <= 0 for ancient physical scenarios");
  } else {
    reader.validate(config.surface != SurfaceKind::Dumbbell, "surface.kind",
                    "dumbbell profiles need flow.gauge = \"axisym\"");
  }
  if (config.surface == SurfaceKind::Obj) {
    reader.validate(!config.mesh_path.empty(), "surface.path", "is required for obj surfaces");
  }
  reader.validate(config.safety > 0.0, "flow.safety", "must be positive");
  reader.validate(config.record_every >= 1, "flow.record_every", "must be >= 1");
  reader.validate(config.graph_model == "sphere" || config.graph_model == "cylinder",
                  "diagnostics.graph_model", "must be sphere or cylinder");
  return config;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

}  // namespace mcf
