#pragma once

#include "mcf/mesh.hpp"

namespace mcf {

// Change of variables between physical (x, t) and rescaled (xi, s)
// coordinates about a base point (x0, t0):
//   lambda(t) = (2(t0 - t))^{-1/2},  xi = lambda (x - x0),  s = -log(t0 - t)/2.
// The identity exp(s) = sqrt(2) lambda(t) holds to machine precision.
struct GaugeMap {
  Vec3 base_point = Vec3::Zero();
  double base_time = 0.0;

  double lambda(double t) const;
  double s_of_t(double t) const;
  double t_of_s(double s) const;
  Vec3 to_rescaled(const Vec3& x, double t) const;
  Vec3 to_physical(const Vec3& xi, double s) const;
};

}  // namespace mcf
