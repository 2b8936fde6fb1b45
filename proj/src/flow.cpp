#include "mcf/flow.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>

#include "mcf/energy.hpp"
#include "mcf/errors.hpp"
#include "mcf/geometry.hpp"

namespace mcf {

double cfl_timestep(const Mesh& mesh, double safety) {
  require(safety > 0.0, ErrorCode::InvalidArgument, "cfl safety factor must be positive");
  const double e = mesh.min_edge_length();
  return safety * e * e;
}

namespace {

// Shared semi-implicit update: (M + dt K) x' = (1 + reaction dt) M x with
// optional Dirichlet rows on the boundary.
Mesh implicit_step(const Mesh& mesh, double dt, double reaction, const StepOptions& options) {
  require(mesh.has_geometry(), ErrorCode::InvalidMesh, "step needs computed geometry");
  require(dt > 0.0, ErrorCode::InvalidArgument, "step size must be positive");

  const int nv = mesh.num_vertices();
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
  cotan_stiffness(mesh, stiffness, mass);

  std::vector<std::uint8_t> fixed(nv, 0);
  if (options.fix_boundary && !mesh.boundary.empty()) fixed = mesh.boundary;

  std::vector<int> free_index(nv, -1);
  int n_free = 0;
  for (int i = 0; i < nv; ++i) {
    if (!fixed[i]) free_index[i] = n_free++;
  }

  Eigen::MatrixXd positions(nv, 3);
  for (int i = 0; i < nv; ++i) positions.row(i) = mesh.vertices[i];

  Eigen::MatrixXd solution = positions;
  if (n_free > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(stiffness.nonZeros());
    Eigen::MatrixXd rhs(n_free, 3);
    for (int i = 0; i < nv; ++i) {
      if (fixed[i]) continue;
      rhs.row(free_index[i]) = (1.0 + reaction * dt) * mass[i] * positions.row(i);
    }
    for (int col = 0; col < stiffness.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness, col); it; ++it) {
        const int i = static_cast<int>(it.row());
        const int j = static_cast<int>(it.col());
        if (fixed[i]) continue;
        if (fixed[j]) {
          rhs.row(free_index[i]) -= dt * it.value() * positions.row(j);
        } else {
          triplets.emplace_back(free_index[i], free_index[j], dt * it.value());
        }
      }
    }
    for (int i = 0; i < nv; ++i) {
      if (!fixed[i]) triplets.emplace_back(free_index[i], free_index[i], mass[i]);
    }
    Eigen::SparseMatrix<double> system(n_free, n_free);
    system.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(options.cg_tolerance);
    cg.compute(system);
    Eigen::MatrixXd guess(n_free, 3);
    for (int i = 0; i < nv; ++i) {
      if (!fixed[i]) guess.row(free_index[i]) = positions.row(i);
    }
    const Eigen::MatrixXd x = cg.solveWithGuess(rhs, guess);
    require(cg.info() == Eigen::Success, ErrorCode::StepRejected,
            "implicit solve did not converge");
    for (int i = 0; i < nv; ++i) {
      if (!fixed[i]) solution.row(i) = x.row(free_index[i]);
    }
  }

  Mesh next = mesh;
  for (int i = 0; i < nv; ++i) next.vertices[i] = solution.row(i);

  // reject inverted or collapsed faces
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& tri = mesh.faces[f];
    const Vec3 n_old = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                           .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    const Vec3 n_new = (next.vertices[tri[1]] - next.vertices[tri[0]])
                           .cross(next.vertices[tri[2]] - next.vertices[tri[0]]);
    if (n_new.dot(n_old) <= 0.0 || n_new.norm() <= 1e-12 * n_old.norm()) {
      fail(ErrorCode::StepRejected, "face " + std::to_string(f) + " inverted or degenerated");
    }
  }
  compute_geometry(next);
  return next;
}

}  // namespace

Mesh mcf_step(const Mesh& mesh, double dt, const StepOptions& options) {
  require(mesh.gauge == Gauge::Physical, ErrorCode::GaugeMismatch,
          "mcf_step expects the physical gauge");
  return implicit_step(mesh, dt, 0.0, options);
}

Mesh rescaled_step(const Mesh& mesh, double ds, const StepOptions& options) {
  require(mesh.gauge == Gauge::Rescaled, ErrorCode::GaugeMismatch,
          "rescaled_step expects the rescaled gauge");
  Mesh next = implicit_step(mesh, ds, 1.0, options);
  const double sup = next.max_vertex_norm();
  require(sup <= options.divergence_radius, ErrorCode::Divergence,
          "sup |F| = " + std::to_string(sup) + " exceeds the guard radius");
  return next;
}

namespace {

double max_abs_A(const Mesh& mesh, int* argmax = nullptr) {
  double best = 0.0;
  int best_i = 0;
  const auto collar = mesh.has_boundary() ? mesh.boundary_collar(1) : std::vector<std::uint8_t>();
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (!collar.empty() && collar[i]) continue;
    if (mesh.second_form_norm[i] > best) {
      best = mesh.second_form_norm[i];
      best_i = i;
    }
  }
  if (argmax) *argmax = best_i;
  return best;
}

TraceRow make_row(const Mesh& mesh, double time, const FlowRunConfig& config) {
  TraceRow row;
  row.time = time;
  row.gauge = config.gauge;
  int peak = 0;
  row.max_A = max_abs_A(mesh, &peak);
  row.peak_A_position = mesh.vertices[peak];
  row.min_edge = mesh.min_edge_length();
  if (config.gauge == Gauge::Physical) {
    if (time < config.gauge_map.base_time) {
      const Mesh rescaled = rescale_surface(mesh, time, config.gauge_map);
      row.e_tilde = energy_Etilde(rescaled);
      row.dissipation = dissipation(rescaled);
      row.sup_F = rescaled.max_vertex_norm();
      row.e_physical = energy_E(mesh, time, config.gauge_map);
    } else {
      row.e_tilde = row.dissipation = row.sup_F = row.e_physical =
          std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    row.e_tilde = energy_Etilde(mesh);
    row.dissipation = dissipation(mesh);
    row.sup_F = mesh.max_vertex_norm();
    const Mesh physical = unrescale_surface(mesh, time, config.gauge_map);
    row.e_physical = energy_E(physical, config.gauge_map.t_of_s(time), config.gauge_map);
  }
  if (config.row_hook) config.row_hook(mesh, row);
  return row;
}

}  // namespace

FlowResult run_flow(const Mesh& initial, const FlowRunConfig& config) {
  require(initial.gauge == config.gauge, ErrorCode::GaugeMismatch,
          "initial mesh gauge does not match the run gauge");
  require(config.time_end > config.time_begin, ErrorCode::InvalidArgument,
          "degenerate time span");

  FlowResult result;
  result.final_mesh = initial;
  if (!result.final_mesh.has_geometry()) compute_geometry(result.final_mesh);

  double time = config.time_begin;
  const double initial_min_edge = result.final_mesh.min_edge_length();
  result.trace.append(make_row(result.final_mesh, time, config));
  result.status = "reached_end";

  long steps = 0;
  long since_record = 0;
  const double time_tol = 1e-13 * std::max(1.0, std::abs(config.time_end));
  while (config.time_end - time > time_tol) {
    if (steps >= config.max_steps) {
      result.status = "step_budget";
      break;
    }
    const double dt = std::min(cfl_timestep(result.final_mesh, config.safety),
                               config.time_end - time);
    Mesh next;
    try {
      next = (config.gauge == Gauge::Physical) ? mcf_step(result.final_mesh, dt, config.step)
                                               : rescaled_step(result.final_mesh, dt, config.step);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::StepRejected || e.code() == ErrorCode::Divergence) {
        const bool rejected = e.code() == ErrorCode::StepRejected;
        // a rejected step at high curvature is the discrete blow-up
        if (rejected && config.gauge == Gauge::Physical &&
            result.trace.back().max_A > 0.5 * config.blowup_threshold) {
          result.event = detect_singularity(result.trace, 0.5 * config.blowup_threshold);
          result.status = "singular_event";
        } else {
          result.status = (rejected ? std::string("step_rejected: ") : std::string("divergence: ")) +
                          e.what();
        }
        return result;
      }
      throw;
    }
    ++steps;
    ++since_record;
    time += dt;
    result.final_mesh = std::move(next);

    const bool record =
        since_record >= config.record_every || config.time_end - time <= time_tol;
    if (record) {
      result.trace.append(make_row(result.final_mesh, time, config));
      since_record = 0;
    }

    const double a_max = record ? result.trace.back().max_A : max_abs_A(result.final_mesh);
    if (config.gauge == Gauge::Physical && a_max > config.blowup_threshold) {
      if (!record) result.trace.append(make_row(result.final_mesh, time, config));
      result.event = detect_singularity(result.trace, config.blowup_threshold / 2.0);
      if (result.event) result.event->peak_A = a_max;
      result.status = "singular_event";
      return result;
    }
    if (result.final_mesh.min_edge_length() < config.min_edge_collapse_ratio * initial_min_edge) {
      if (!record) result.trace.append(make_row(result.final_mesh, time, config));
      SingularEvent event;
      int peak = 0;
      event.peak_A = max_abs_A(result.final_mesh, &peak);
      event.location = result.final_mesh.vertices[peak];
      event.time = time;
      event.trigger = SingularTrigger::MinEdgeCollapse;
      result.event = event;
      result.status = "singular_event";
      return result;
    }
    if (config.stop_when && config.stop_when(result.final_mesh, time)) {
      if (!record) result.trace.append(make_row(result.final_mesh, time, config));
      result.status = "stopped";
      return result;
    }
  }
  if (since_record != 0) result.trace.append(make_row(result.final_mesh, time, config));
  return result;
}

AxisymFlowResult run_axisym_flow(const AxisymProfile& initial, const AxisymRunConfig& config) {
  AxisymFlowResult result;
  result.final_profile = initial;
  result.final_profile.validate();
  result.status = "reached_end";

  const double floor = config.neck_floor_ratio * initial.min_u();

  auto make_axisym_row = [&](const AxisymProfile& p) {
    TraceRow row;
    row.time = p.time;
    row.gauge = Gauge::Physical;
    const AxisymCurvatures curv = axisym_curvatures(p);
    const auto peak = std::max_element(curv.abs_A.begin(), curv.abs_A.end());
    const int peak_i = static_cast<int>(peak - curv.abs_A.begin());
    row.max_A = *peak;
    row.peak_A_position = Vec3(p.x[peak_i], 0, 0);
    row.max_grad_A = curv.max_grad_A();
    row.min_edge = p.min_u();  // the collapsing scale of a neck
    if (p.time < config.gauge_map.base_time) {
      row.e_tilde = axisym_energy_Etilde(p, config.gauge_map);
      row.dissipation = axisym_dissipation(p, config.gauge_map);
      row.e_physical = axisym_energy_E(p, config.gauge_map);
      const double lam = config.gauge_map.lambda(p.time);
      double sup = 0.0;
      for (size_t i = 0; i < p.x.size(); ++i) {
        const double dx = p.x[i] - config.gauge_map.base_point.x();
        sup = std::max(sup, std::sqrt(dx * dx + p.u[i] * p.u[i]));
      }
      row.sup_F = lam * sup;
    } else {
      row.e_tilde = row.dissipation = row.e_physical = row.sup_F =
          std::numeric_limits<double>::quiet_NaN();
    }
    if (config.row_hook) config.row_hook(p, row);
    return row;
  };

  result.trace.append(make_axisym_row(result.final_profile));
  long steps = 0;
  long since_record = 0;
  const double time_tol = 1e-13 * std::max(1.0, std::abs(config.time_end));
  while (config.time_end - result.final_profile.time > time_tol) {
    if (steps >= config.max_steps) {
      result.status = "step_budget";
      break;
    }
    const double dt = std::min(axisym_stable_timestep(result.final_profile, config.safety),
                               config.time_end - result.final_profile.time);
    AxisymProfile next;
    try {
      next = axisym_step(result.final_profile, dt, floor);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NeckPinch) throw;
      if (since_record != 0) result.trace.append(make_axisym_row(result.final_profile));
      SingularEvent event;
      event.trigger = SingularTrigger::NeckPinch;
      event.location = Vec3(result.final_profile.x[result.final_profile.min_u_index()], 0, 0);
      event.peak_A = result.trace.back().max_A;
      // pinch time from the cylinder ansatz u_min^2 ~ 2 (T - t)
      {
        const auto& rows = result.trace.rows;
        const size_t n = rows.size();
        const size_t k = std::min<size_t>(8, n);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = n - k; i < n; ++i) {
          const double xv = rows[i].time;
          const double yv = rows[i].min_edge * rows[i].min_edge;
          sx += xv; sy += yv; sxx += xv * xv; sxy += xv * yv;
        }
        const double denom = k * sxx - sx * sx;
        const double slope = denom != 0 ? (k * sxy - sx * sy) / denom : 0.0;
        const double intercept = (sy - slope * sx) / k;
        event.time = slope < 0 ? -intercept / slope
                               : result.final_profile.time;
      }
      result.event = event;
      result.status = "singular_event";
      return result;
    }
    ++steps;
    ++since_record;
    result.final_profile = std::move(next);
    if (since_record >= config.record_every ||
        config.time_end - result.final_profile.time <= time_tol) {
      result.trace.append(make_axisym_row(result.final_profile));
      since_record = 0;
    }
  }
  if (since_record != 0) result.trace.append(make_axisym_row(result.final_profile));
  return result;
}

std::optional<SingularEvent> detect_singularity(const FlowTrace& trace, double threshold) {
  require(!trace.empty(), ErrorCode::EmptyTrace, "detect_singularity needs a non-empty trace");
  require(trace.gauge == Gauge::Physical, ErrorCode::GaugeMismatch,
          "detect_singularity expects a physical-gauge trace");
  const auto& rows = trace.rows;
  double peak = 0.0;
  for (const auto& r : rows) peak = std::max(peak, r.max_A);
  if (peak <= threshold) return std::nullopt;

  // least-squares fit of 1/maxA^2 = a + b t over the late rows
  size_t first = 0;
  while (first < rows.size() && rows[first].max_A < threshold) ++first;
  if (rows.size() - first < 4) first = rows.size() >= 4 ? rows.size() - 4 : 0;
  const size_t k = rows.size() - first;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = first; i < rows.size(); ++i) {
    const double x = rows[i].time;
    const double y = 1.0 / (rows[i].max_A * rows[i].max_A);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  SingularEvent event;
  event.trigger = SingularTrigger::CurvatureBlowup;
  event.location = rows.back().peak_A_position;
  event.peak_A = rows.back().max_A;
  if (k >= 2 && denom != 0) {
    const double slope = (k * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / k;
    event.time = slope < 0 ? -intercept / slope : rows.back().time;
  } else {
    event.time = rows.back().time;
  }
  return event;
}

double mean_radius(const Mesh& mesh, const Vec3& center) {
  double total = 0.0;
  for (const auto& v : mesh.vertices) total += (v - center).norm();
  return total / mesh.num_vertices();
}

double shrinker_balance_scale(const Mesh& rescaled_mesh, const StepOptions& options,
                              double settle_span, double probe_span,
                              std::function<double(const Mesh&)> radius_of) {
  require(rescaled_mesh.gauge == Gauge::Rescaled, ErrorCode::GaugeMismatch,
          "shrinker_balance_scale expects a rescaled mesh");
  if (!radius_of) radius_of = [](const Mesh& m) { return mean_radius(m); };

  // drift rate of the radius functional after the shape transient settles
  auto drift_rate = [&](double sigma) {
    Mesh scaled = rescaled_mesh;
    for (auto& v : scaled.vertices) v *= sigma;
    compute_geometry(scaled);
    FlowRunConfig config;
    config.gauge = Gauge::Rescaled;
    config.time_begin = 0.0;
    config.time_end = settle_span + probe_span;
    config.record_every = 1000000;  // only the probe matters
    config.step = options;
    double r_settle = 0.0;
    config.stop_when = [&](const Mesh& m, double s) {
      if (r_settle == 0.0 && s >= settle_span) r_settle = radius_of(m);
      return false;
    };
    const FlowResult run = run_flow(scaled, config);
    require(run.ok(), ErrorCode::Divergence, "balance probe failed: " + run.status);
    return (radius_of(run.final_mesh) - r_settle) / probe_span;
  };

  double s0 = 1.0;
  double g0 = drift_rate(s0);
  // drift of a near-shrinker radius r: dr/ds = r - c^2/r, slope ~ 2
  double s1 = s0 - 0.5 * g0;
  for (int iter = 0; iter < 16; ++iter) {
    const double g1 = drift_rate(s1);
    if (std::abs(g1) < 1e-10 || g1 == g0) {
      return s1;
    }
    const double s2 = s1 - g1 * (s1 - s0) / (g1 - g0);
    s0 = s1;
    g0 = g1;
    s1 = s2;
  }
  return s1;
}

ExtinctionCalibration calibrate_extinction(const Mesh& physical_mesh, const FlowRunConfig& base,
                                           double s_span, double tau_lo, double tau_hi,
                                           double tol_rel) {
  require(physical_mesh.gauge == Gauge::Physical, ErrorCode::GaugeMismatch,
          "calibrate_extinction expects a physical mesh");
  require(tau_lo > 0 && tau_hi > tau_lo, ErrorCode::InvalidArgument, "bad extinction bracket");

  const double target = std::sqrt(2.0);
  // terminal mean radius of the candidate run; +inf on outward escape,
  // 0 on collapse. Monotone decreasing in the believed time-to-extinction.
  auto terminal_radius = [&](double tau, ExtinctionCalibration* out) {
    GaugeMap gauge;  // base (0, 0); the candidate sets the believed clock
    Mesh rescaled = rescale_surface(physical_mesh, -tau, gauge);
    compute_geometry(rescaled);
    const double s0 = gauge.s_of_t(-tau);
    FlowRunConfig config = base;
    config.gauge = Gauge::Rescaled;
    config.time_begin = s0;
    config.time_end = s0 + s_span;
    config.stop_when = [&](const Mesh& m, double) {
      const double r = mean_radius(m);
      return r > 2.5 || r < 0.7;
    };
    FlowResult run = run_flow(rescaled, config);
    const double r = mean_radius(run.final_mesh);
    if (run.status == "stopped" || !run.ok()) {
      return r > target ? std::numeric_limits<double>::infinity() : 0.0;
    }
    if (out) {
      out->final_mesh = std::move(run.final_mesh);
      out->trace = std::move(run.trace);
    }
    return r;
  };

  ExtinctionCalibration result;
  double lo = tau_lo, hi = tau_hi;
  require(terminal_radius(lo, nullptr) > target, ErrorCode::InvalidArgument,
          "extinction bracket: lower bound does not escape outward");
  require(terminal_radius(hi, nullptr) < target, ErrorCode::InvalidArgument,
          "extinction bracket: upper bound does not collapse");
  int iterations = 0;
  double tau = 0.5 * (lo + hi);
  while ((hi - lo) > tol_rel * hi && iterations < 60) {
    tau = 0.5 * (lo + hi);
    ++iterations;
    const double r = terminal_radius(tau, nullptr);
    if (r > target) {
      lo = tau;
    } else {
      hi = tau;
    }
  }
  tau = 0.5 * (lo + hi);
  const double r_final = terminal_radius(tau, &result);
  require(std::isfinite(r_final) && r_final > 0, ErrorCode::Divergence,
          "extinction calibration did not converge to a trapped run");
  result.time_to_extinction = tau;
  result.iterations = iterations;
  return result;
}

}  // namespace mcf
