#include "mcf/axisym.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcf/errors.hpp"
#include "mcf/geometry.hpp"

namespace mcf {

double AxisymProfile::h() const { return (x.back() - x.front()) / (x.size() - 1); }

double AxisymProfile::min_u() const { return *std::min_element(u.begin(), u.end()); }

int AxisymProfile::min_u_index() const {
  return static_cast<int>(std::min_element(u.begin(), u.end()) - u.begin());
}

void AxisymProfile::validate() const {
  require(x.size() >= 3 && x.size() == u.size(), ErrorCode::InvalidArgument,
          "profile needs >= 3 matched samples");
  const double step = h();
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    require(std::abs(x[i + 1] - x[i] - step) <= 1e-12 * std::max(1.0, std::abs(step)),
            ErrorCode::InvalidArgument, "profile grid is not uniform");
  }
  for (double v : u) {
    require(v > 0.0, ErrorCode::InvalidArgument, "profile radius must stay positive");
  }
}

AxisymProfile make_constant_profile(double radius, double half_length, int n, double time) {
  require(radius > 0 && half_length > 0 && n >= 3, ErrorCode::InvalidArgument,
          "bad constant profile parameters");
  AxisymProfile p;
  p.time = time;
  p.x.resize(n);
  p.u.assign(n, radius);
  for (int i = 0; i < n; ++i) p.x[i] = -half_length + 2.0 * half_length * i / (n - 1);
  return p;
}

AxisymProfile make_sphere_profile(double radius, double half_length, int n, double time) {
  require(half_length < radius, ErrorCode::InvalidArgument,
          "sphere profile needs half_length < radius");
  AxisymProfile p = make_constant_profile(radius, half_length, n, time);
  for (int i = 0; i < n; ++i) p.u[i] = std::sqrt(radius * radius - p.x[i] * p.x[i]);
  return p;
}

AxisymProfile make_dumbbell_profile(double neck_radius, double bulb_radius, double half_length,
                                    int n, double time) {
  require(0 < neck_radius && neck_radius < bulb_radius, ErrorCode::InvalidArgument,
          "dumbbell needs 0 < neck < bulb");
  AxisymProfile p = make_constant_profile(neck_radius, half_length, n, time);
  for (int i = 0; i < n; ++i) {
    p.u[i] = neck_radius +
             (bulb_radius - neck_radius) * 0.5 * (1.0 - std::cos(M_PI * p.x[i] / half_length));
  }
  return p;
}

namespace {

// central differences with Neumann mirror ghosts (u_x = 0 at both ends)
void profile_derivatives(const AxisymProfile& p, std::vector<double>& ux,
                         std::vector<double>& uxx) {
  const int n = static_cast<int>(p.u.size());
  const double h = p.h();
  ux.resize(n);
  uxx.resize(n);
  auto at = [&](int i) {
    if (i < 0) return p.u[-i];
    if (i >= n) return p.u[2 * n - 2 - i];
    return p.u[i];
  };
  for (int i = 0; i < n; ++i) {
    ux[i] = (at(i + 1) - at(i - 1)) / (2.0 * h);
    uxx[i] = (at(i + 1) - 2.0 * p.u[i] + at(i - 1)) / (h * h);
  }
}

}  // namespace

double AxisymCurvatures::max_abs_A() const { return *std::max_element(abs_A.begin(), abs_A.end()); }

double AxisymCurvatures::max_grad_A() const {
  return *std::max_element(grad_A.begin(), grad_A.end());
}

AxisymCurvatures axisym_curvatures(const AxisymProfile& profile, const std::vector<double>& u_x,
                                   const std::vector<double>& u_xx) {
  profile.validate();
  const int n = static_cast<int>(profile.u.size());
  require(static_cast<int>(u_x.size()) == n && static_cast<int>(u_xx.size()) == n,
          ErrorCode::InvalidArgument, "derivative arrays must match the grid");
  AxisymCurvatures c;
  c.kappa1.resize(n);
  c.kappa2.resize(n);
  c.H.resize(n);
  c.abs_A.resize(n);
  c.grad_A.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double slope2 = 1.0 + u_x[i] * u_x[i];
    c.kappa1[i] = -u_xx[i] / (slope2 * std::sqrt(slope2));
    c.kappa2[i] = 1.0 / (profile.u[i] * std::sqrt(slope2));
    c.H[i] = c.kappa1[i] + c.kappa2[i];
    c.abs_A[i] = std::hypot(c.kappa1[i], c.kappa2[i]);
  }
  const double h = profile.h();
  for (int i = 1; i + 1 < n; ++i) {
    const double dl = h * std::sqrt(1.0 + u_x[i] * u_x[i]);
    const double dk1 = (c.kappa1[i + 1] - c.kappa1[i - 1]) / (2.0 * dl);
    const double dk2 = (c.kappa2[i + 1] - c.kappa2[i - 1]) / (2.0 * dl);
    c.grad_A[i] = std::hypot(dk1, dk2);
  }
  return c;
}

AxisymCurvatures axisym_curvatures(const AxisymProfile& profile) {
  std::vector<double> ux, uxx;
  profile.validate();
  profile_derivatives(profile, ux, uxx);
  return axisym_curvatures(profile, ux, uxx);
}

AxisymProfile axisym_step(const AxisymProfile& profile, double dt, double neck_floor) {
  profile.validate();
  require(dt > 0.0, ErrorCode::InvalidArgument, "step size must be positive");

  const int n = static_cast<int>(profile.u.size());
  const double h = profile.h();
  std::vector<double> ux, uxx;
  profile_derivatives(profile, ux, uxx);

  // (I - dt D2 / (1+u_x^2)) u_new = u - dt / u, Neumann ends
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n);
  for (int i = 0; i < n; ++i) {
    const double coeff = dt / (h * h * (1.0 + ux[i] * ux[i]));
    if (i == 0) {
      diag[i] = 1.0 + 2.0 * coeff;
      upper[i] = -2.0 * coeff;  // mirror ghost u[-1] = u[1]
    } else if (i == n - 1) {
      diag[i] = 1.0 + 2.0 * coeff;
      lower[i] = -2.0 * coeff;
    } else {
      lower[i] = -coeff;
      diag[i] = 1.0 + 2.0 * coeff;
      upper[i] = -coeff;
    }
    rhs[i] = profile.u[i] - dt / profile.u[i];
  }

  // Thomas algorithm
  for (int i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  AxisymProfile next = profile;
  next.time = profile.time + dt;
  next.u[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    next.u[i] = (rhs[i] - upper[i] * next.u[i + 1]) / diag[i];
  }

  const double floor = std::max(neck_floor, 0.0);
  if (next.min_u() <= floor) {
    const int k = next.min_u_index();
    fail(ErrorCode::NeckPinch, "neck pinch at x = " + std::to_string(next.x[k]) +
                                   ", t = " + std::to_string(next.time));
  }
  return next;
}

double axisym_stable_timestep(const AxisymProfile& profile, double safety) {
  require(safety > 0.0, ErrorCode::InvalidArgument, "safety factor must be positive");
  const double u_min = profile.min_u();
  return safety * std::min(profile.h() * profile.h(), u_min * u_min);
}

Mesh axisym_to_mesh(const AxisymProfile& profile, int segments_around,
                    const std::vector<double>& u_x, const std::vector<double>& u_xx) {
  profile.validate();
  require(segments_around >= 3, ErrorCode::InvalidArgument, "need >= 3 angular segments");
  const AxisymCurvatures curv = axisym_curvatures(profile, u_x, u_xx);

  Mesh mesh;
  const int n = static_cast<int>(profile.u.size());
  const int nt = segments_around;
  mesh.vertices.reserve(static_cast<size_t>(n) * nt);
  mesh.normals.reserve(mesh.vertices.capacity());
  for (int i = 0; i < n; ++i) {
    const double slope = std::sqrt(1.0 + u_x[i] * u_x[i]);
    for (int j = 0; j < nt; ++j) {
      const double theta = 2.0 * M_PI * j / nt;
      const double c = std::cos(theta), s = std::sin(theta);
      mesh.vertices.emplace_back(profile.x[i], profile.u[i] * c, profile.u[i] * s);
      mesh.normals.emplace_back(-u_x[i] / slope, c / slope, s / slope);
    }
  }
  auto id = [nt](int i, int j) { return i * nt + ((j % nt) + nt) % nt; };
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j < nt; ++j) {
      if ((i + j) % 2 == 0) {
        mesh.faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
        mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
      } else {
        mesh.faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j)});
        mesh.faces.push_back({id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)});
      }
    }
  }

  // lumped areas and boundary flags from the mesh itself; curvature fields
  // come from the profile formulas
  std::vector<Vec3> analytic_normals = std::move(mesh.normals);
  compute_geometry(mesh);
  mesh.normals = std::move(analytic_normals);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nt; ++j) {
      mesh.mean_curvature[id(i, j)] = curv.H[i];
      mesh.second_form_norm[id(i, j)] = curv.abs_A[i];
    }
  }
  return mesh;
}

Mesh axisym_to_mesh(const AxisymProfile& profile, int segments_around) {
  std::vector<double> ux, uxx;
  profile.validate();
  profile_derivatives(profile, ux, uxx);
  return axisym_to_mesh(profile, segments_around, ux, uxx);
}

AxisymProfile profile_window(const AxisymProfile& profile, double x_center, double window) {
  profile.validate();
  AxisymProfile out;
  out.time = profile.time;
  for (size_t i = 0; i < profile.x.size(); ++i) {
    if (std::abs(profile.x[i] - x_center) <= window) {
      out.x.push_back(profile.x[i]);
      out.u.push_back(profile.u[i]);
    }
  }
  require(out.x.size() >= 3, ErrorCode::InvalidArgument, "profile window too narrow");
  return out;
}

namespace {

// trapezoid rule for integrands of the form f(x) * 2 pi u sqrt(1+u_x^2)
template <typename F>
double profile_integral(const AxisymProfile& p, F&& f) {
  std::vector<double> ux, uxx;
  profile_derivatives(p, ux, uxx);
  const double h = p.h();
  double total = 0.0;
  for (size_t i = 0; i < p.x.size(); ++i) {
    const double measure = 2.0 * M_PI * p.u[i] * std::sqrt(1.0 + ux[i] * ux[i]);
    const double w = (i == 0 || i + 1 == p.x.size()) ? 0.5 * h : h;
    total += w * f(p.x[i], p.u[i], ux[i]) * measure;
  }
  return total;
}

}  // namespace

namespace {
void require_on_axis(const GaugeMap& gauge) {
  require(std::abs(gauge.base_point.y()) < 1e-14 && std::abs(gauge.base_point.z()) < 1e-14,
          ErrorCode::InvalidArgument, "axisym gauge base point must lie on the x-axis");
}
}  // namespace

double axisym_energy_E(const AxisymProfile& profile, const GaugeMap& gauge) {
  profile.validate();
  require_on_axis(gauge);
  const double tau = gauge.base_time - profile.time;
  require(tau > 0.0, ErrorCode::InvalidArgument, "axisym energy needs t < t0");
  return profile_integral(profile, [&](double x, double u, double) {
    const double dx = x - gauge.base_point.x();
    return std::exp(-(dx * dx + u * u) / (4.0 * tau)) / (4.0 * M_PI * tau);
  });
}

double axisym_energy_Etilde(const AxisymProfile& profile, const GaugeMap& gauge) {
  profile.validate();
  require_on_axis(gauge);
  const double lam = gauge.lambda(profile.time);
  return profile_integral(profile, [&](double x, double u, double) {
    const double dx = x - gauge.base_point.x();
    return lam * lam * std::exp(-0.5 * lam * lam * (dx * dx + u * u));
  });
}

double axisym_dissipation(const AxisymProfile& profile, const GaugeMap& gauge) {
  profile.validate();
  require_on_axis(gauge);
  const double lam = gauge.lambda(profile.time);
  const AxisymCurvatures curv = axisym_curvatures(profile);
  size_t idx = 0;
  return profile_integral(profile, [&](double x, double u, double ux) {
    const double dx = x - gauge.base_point.x();
    const double slope = std::sqrt(1.0 + ux * ux);
    // F.nu in rescaled coordinates: lambda (u - dx u_x)/slope
    const double f_dot_nu = lam * (u - dx * ux) / slope;
    const double h_tilde = curv.H[idx++] / lam;
    const double residual = h_tilde - f_dot_nu;
    return lam * lam * residual * residual * std::exp(-0.5 * lam * lam * (dx * dx + u * u));
  });
}

void write_profile_csv(const AxisymProfile& profile, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot open " + path + " for writing");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# t = %.17g\n", profile.time);
  out << buf << "x,u\n";
  for (size_t i = 0; i < profile.x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", profile.x[i], profile.u[i]);
    out << buf;
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

AxisymProfile read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  AxisymProfile p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) p.time = std::stod(line.substr(eq + 1));
      continue;
    }
    if (line.rfind("x,", 0) == 0) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorCode::Parse, "bad profile row: " + line);
    p.x.push_back(std::stod(line.substr(0, comma)));
    p.u.push_back(std::stod(line.substr(comma + 1)));
  }
  p.validate();
  return p;
}

}  // namespace mcf
