#include "mcf/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mcf/diagnostics.hpp"
#include "mcf/energy.hpp"
#include "mcf/errors.hpp"
#include "mcf/geometry.hpp"
#include "mcf/primitives.hpp"

namespace mcf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  require(out.good(), ErrorCode::Io, "write failed: " + path.string());
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double mesh_diameter(const Mesh& mesh) {
  const Vec3 c = mesh.centroid();
  double r = 0.0;
  for (const auto& v : mesh.vertices) r = std::max(r, (v - c).norm());
  return 2.0 * r;
}

ModelSurface graph_model_for(const ScenarioConfig& config) {
  if (config.graph_model == "cylinder") {
    return make_cylinder(Vec3::Zero(), config.axis, 1.0);
  }
  return make_sphere(Vec3::Zero(), std::sqrt(2.0));
}

// diagnostics accumulated over recorded rows
struct RowDiagnostics {
  bool ball_all = true;
  int ball_failures = 0;
  json graph_series = json::array();
  int snapshot_index = 0;
};

}  // namespace

Mesh build_scenario_surface(const ScenarioConfig& config) {
  Mesh mesh;
  switch (config.surface) {
    case SurfaceKind::Icosphere:
      mesh = build_icosphere(config.radius, config.center, config.subdivisions);
      break;
    case SurfaceKind::Cylinder:
      mesh = build_cylinder_mesh(config.radius, config.axis, config.half_length,
                                 config.segments_axial, config.segments_around, config.center);
      break;
    case SurfaceKind::Ellipsoid:
      mesh = build_ellipsoid(config.semi_axes[0], config.semi_axes[1], config.semi_axes[2],
                             config.center, config.subdivisions);
      break;
    case SurfaceKind::PlaneDisk:
      mesh = build_plane_disk(config.radius, config.center, config.axis, config.rings);
      break;
    case SurfaceKind::Obj:
      mesh = read_obj(config.mesh_path);
      compute_geometry(mesh);
      break;
    case SurfaceKind::Dumbbell:
      fail(ErrorCode::InvalidArgument, "dumbbell scenarios run through the axisym solver");
  }
  if (config.perturb > 0.0) {
    mesh = perturb_along_normals(mesh, config.perturb, config.seed);
  }
  return mesh;
}

namespace {

void record_common(const Mesh& mesh, TraceRow& row, const ScenarioConfig& config,
                   const fs::path& dir, RowDiagnostics& acc, const GaugeMap& gauge) {
  Mesh rescaled_view;
  const Mesh* rescaled = nullptr;
  if (mesh.gauge == Gauge::Rescaled) {
    rescaled = &mesh;
  } else if (row.time < gauge.base_time) {
    rescaled_view = rescale_surface(mesh, row.time, gauge);
    rescaled = &rescaled_view;
  }

  if (config.ball && rescaled) {
    const bool inside = ball_check(*rescaled);
    acc.ball_all = acc.ball_all && inside;
    acc.ball_failures += !inside;
  }
  if (config.classification && rescaled) {
    try {
      const ClassificationResult cls = classify_shrinker(*rescaled);
      row.cls = cls.kind_name();
      row.cls_radius = cls.radius;
      row.cls_residual = cls.rms_residual;
    } catch (const Error&) {
      row.cls = "unknown";
    }
  }
  if (config.graph_distance && rescaled) {
    try {
      const GraphDistanceReport gd = graph_distance(*rescaled, graph_model_for(config), 4.0, 1);
      acc.graph_series.push_back(
          {{"time", row.time}, {"C0", gd.c0}, {"C1", gd.c1}, {"coverage", gd.coverage}});
    } catch (const Error&) {
      acc.graph_series.push_back({{"time", row.time}, {"error", "not a graph"}});
    }
  }
  if (config.snapshots) {
    char name[40];
    std::snprintf(name, sizeof(name), "row_%05d.obj", acc.snapshot_index);
    write_obj(mesh, (dir / "snapshots" / name).string());
  }
  ++acc.snapshot_index;
}

void write_gauge_identities(const FlowTrace& trace, const GaugeMap& gauge, const fs::path& dir) {
  double max_rel_es = 0.0;
  double max_rel_lambda = 0.0;
  for (const auto& row : trace.rows) {
    if (!std::isfinite(row.e_tilde) || !std::isfinite(row.e_physical) || row.e_tilde == 0.0)
      continue;
    max_rel_es = std::max(
        max_rel_es, std::abs(row.e_tilde - 2.0 * M_PI * row.e_physical) / std::abs(row.e_tilde));
    const double t = trace.gauge == Gauge::Physical ? row.time : gauge.t_of_s(row.time);
    if (t < gauge.base_time) {
      const double s = gauge.s_of_t(t);
      const double es = std::exp(s);
      max_rel_lambda =
          std::max(max_rel_lambda, std::abs(es - std::sqrt(2.0) * gauge.lambda(t)) / es);
    }
  }
  json j;
  j["max_rel_E_relation_residual"] = max_rel_es;
  j["max_rel_lambda_identity_residual"] = max_rel_lambda;
  write_text(dir / "reports" / "gauge_identities.json", j.dump(2));
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const std::string& output_override) {
  RunResult result;
  const std::string out_dir =
      output_override.empty() ? config.output_directory : output_override;
  require(!out_dir.empty(), ErrorCode::Validation,
          "scenario '" + config.name + "' has no output directory");
  const fs::path dir(out_dir);
  fs::create_directories(dir / "reports");
  if (config.snapshots) fs::create_directories(dir / "snapshots");
  result.directory = dir.string();

  write_text(dir / "scenario.toml", config.raw_text);

  const auto t_start = std::chrono::steady_clock::now();
  result.status = "completed";
  RowDiagnostics acc;
  GaugeMap gauge;  // base (0, 0) throughout
  json extra;

  try {
    if (config.gauge == RunGauge::Axisym) {
      AxisymProfile profile = make_dumbbell_profile(config.neck_radius, config.bulb_radius,
                                                    config.half_length, config.grid,
                                                    config.time_begin);
      AxisymRunConfig run_config;
      run_config.time_end = config.time_end;
      run_config.safety = config.safety;
      run_config.record_every = config.record_every;
      run_config.max_steps = config.max_steps;
      run_config.neck_floor_ratio = config.neck_floor_ratio;
      run_config.gauge_map = gauge;
      run_config.row_hook = [&](const AxisymProfile& p, TraceRow& row) {
        if (config.snapshots) {
          char name[48];
          std::snprintf(name, sizeof(name), "profile_%05d.csv", acc.snapshot_index);
          write_profile_csv(p, (dir / "snapshots" / name).string());
        }
        ++acc.snapshot_index;
        (void)row;
      };
      AxisymFlowResult run = run_axisym_flow(profile, run_config);
      result.trace = std::move(run.trace);
      result.event = run.event;
      if (!run.ok()) result.status = "failed: " + run.status;
      write_profile_csv(run.final_profile, (dir / "final_profile.csv").string());

      if (config.classification && result.event &&
          result.event->trigger == SingularTrigger::NeckPinch) {
        // tangent-flow snapshot: rescale a window around the neck at the
        // last pre-pinch state, using the extrapolated pinch point/time
        GaugeMap pinch_gauge;
        pinch_gauge.base_point = result.event->location;
        pinch_gauge.base_time = result.event->time;
        const double t_star = run.final_profile.time;
        if (t_star < pinch_gauge.base_time) {
          const double lam = pinch_gauge.lambda(t_star);
          const AxisymProfile window =
              profile_window(run.final_profile, result.event->location.x(), 8.0 / lam);
          Mesh window_mesh = axisym_to_mesh(window, config.segments_around);
          const Mesh rescaled = rescale_surface(window_mesh, t_star, pinch_gauge);
          write_obj(rescaled, (dir / "reports" / "tangent_window.obj").string());
          result.classification = classify_shrinker(rescaled);
          write_text(dir / "reports" / "classification.json", result.classification->to_json());
        }
      }
      if (config.type_one) {
        write_text(dir / "reports" / "type_one.json", type_one_ratio(result.trace, gauge).to_json());
      }
      write_text(dir / "reports" / "regularity.json",
                 regularity_scaling(result.trace, gauge).to_json());
    } else if (config.gauge == RunGauge::Physical) {
      Mesh mesh = build_scenario_surface(config);
      FlowRunConfig run_config;
      run_config.gauge = Gauge::Physical;
      run_config.time_begin = config.time_begin;
      run_config.time_end = config.time_end;
      run_config.safety = config.safety;
      run_config.record_every = config.record_every;
      run_config.max_steps = config.max_steps;
      run_config.step.fix_boundary = config.fix_boundary;
      run_config.gauge_map = gauge;
      run_config.blowup_threshold = config.blowup_threshold > 0.0
                                        ? config.blowup_threshold
                                        : 50.0 / mesh_diameter(mesh);
      run_config.row_hook = [&](const Mesh& m, TraceRow& row) {
        record_common(m, row, config, dir, acc, gauge);
      };
      FlowResult run = run_flow(mesh, run_config);
      result.trace = std::move(run.trace);
      result.event = run.event;
      if (!run.ok()) result.status = "failed: " + run.status;
      if (config.type_one) {
        write_text(dir / "reports" / "type_one.json",
                   type_one_ratio(result.trace, gauge).to_json());
      }
      if (config.energy && run.final_mesh.num_vertices() > 0 &&
          result.trace.back().time < gauge.base_time) {
        write_text(dir / "reports" / "energy.json",
                   energy_report(run.final_mesh, result.trace.back().time, gauge).to_json());
      }
      if (config.non_collapsing) {
        write_text(dir / "reports" / "non_collapsing.json",
                   noncollapsing_alpha(run.final_mesh).to_json());
      }
    } else {
      Mesh mesh = build_scenario_surface(config);
      FlowRunConfig run_config;
      run_config.gauge = Gauge::Rescaled;
      run_config.safety = config.safety;
      run_config.record_every = config.record_every;
      run_config.max_steps = config.max_steps;
      run_config.step.fix_boundary = config.fix_boundary;
      run_config.gauge_map = gauge;
      run_config.row_hook = [&](const Mesh& m, TraceRow& row) {
        record_common(m, row, config, dir, acc, gauge);
      };

      if (config.calibrate_extinction) {
        const double span = config.time_end - config.time_begin;
        const ExtinctionCalibration calibration =
            calibrate_extinction(mesh, run_config, span, config.extinction_bracket[0],
                                 config.extinction_bracket[1]);
        result.calibrated_extinction = calibration.time_to_extinction;
        extra["calibrated_extinction"] = calibration.time_to_extinction;
        extra["calibration_iterations"] = calibration.iterations;
        // re-run the converged gauge with full recording
        Mesh rescaled = rescale_surface(mesh, -calibration.time_to_extinction, gauge);
        compute_geometry(rescaled);
        run_config.time_begin = gauge.s_of_t(-calibration.time_to_extinction);
        run_config.time_end = run_config.time_begin + span;
        FlowResult run = run_flow(rescaled, run_config);
        result.trace = std::move(run.trace);
        result.event = run.event;
        if (!run.ok()) result.status = "failed: " + run.status;
        mesh = std::move(run.final_mesh);
      } else {
        mesh.gauge = Gauge::Rescaled;
        if (config.balance_shrinker) {
          const double sigma = shrinker_balance_scale(mesh, run_config.step);
          for (auto& v : mesh.vertices) v *= sigma;
          compute_geometry(mesh);
          extra["balance_scale"] = sigma;
        }
        run_config.time_begin = config.time_begin;
        run_config.time_end = config.time_end;
        FlowResult run = run_flow(mesh, run_config);
        result.trace = std::move(run.trace);
        result.event = run.event;
        if (!run.ok()) result.status = "failed: " + run.status;
        mesh = std::move(run.final_mesh);
      }

      if (config.classification) {
        result.classification = classify_shrinker(mesh);
        write_text(dir / "reports" / "classification.json", result.classification->to_json());
      }
      if (config.energy) {
        EnergyReport report;
        report.e_tilde = energy_Etilde(mesh);
        report.dissipation = dissipation(mesh);
        const double s_final = result.trace.back().time;
        report.e_physical = energy_E(unrescale_surface(mesh, s_final, gauge),
                                     gauge.t_of_s(s_final), gauge);
        report.relation_residual = std::abs(report.e_tilde - 2.0 * M_PI * report.e_physical);
        write_text(dir / "reports" / "energy.json", report.to_json());
      }
      if (config.non_collapsing) {
        write_text(dir / "reports" / "non_collapsing.json",
                   noncollapsing_alpha(mesh).to_json());
      }
    }

    if (!result.trace.empty()) {
      write_trace_csv(result.trace, (dir / "trace.csv").string());
      write_gauge_identities(result.trace, gauge, dir);
      if (config.trapping) {
        write_text(dir / "reports" / "trapping.json",
                   trapping_bound(result.trace, config.c0).to_json());
      }
      if (config.ball) {
        json j;
        j["all_inside"] = acc.ball_all;
        j["failures"] = acc.ball_failures;
        write_text(dir / "reports" / "ball_check.json", j.dump(2));
      }
      if (config.graph_distance) {
        write_text(dir / "reports" / "graph_distance.json", acc.graph_series.dump(2));
      }
    }
    if (result.event) {
      write_text(dir / "reports" / "singular_event.json", result.event->to_json());
    }
  } catch (const Error& e) {
    result.status = std::string("failed: ") + e.what();
    if (!result.trace.empty()) {
      write_trace_csv(result.trace, (dir / "trace.csv").string());
    }
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
  json manifest;
  manifest["name"] = config.name;
  manifest["status"] = result.status;
  manifest["config_hash"] = hex64(fnv1a64(config.raw_text));
  manifest["wall_time_ms"] = elapsed;
  manifest["versions"] = {{"mcf-lab", kVersion},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
  manifest["rows"] = result.trace.rows.size();
  manifest["seed"] = config.seed;
  if (result.event) manifest["event"] = singular_trigger_name(result.event->trigger);
  for (auto& [key, value] : extra.items()) manifest[key] = value;
  write_text(dir / "manifest.json", manifest.dump(2));
  return result;
}

}  // namespace mcf
