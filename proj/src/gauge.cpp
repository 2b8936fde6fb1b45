#include "mcf/gauge.hpp"

#include <cmath>

#include "mcf/errors.hpp"

namespace mcf {

double GaugeMap::lambda(double t) const {
  require(t < base_time, ErrorCode::InvalidArgument, "gauge map needs t < t0");
  return 1.0 / std::sqrt(2.0 * (base_time - t));
}

double GaugeMap::s_of_t(double t) const {
  require(t < base_time, ErrorCode::InvalidArgument, "gauge map needs t < t0");
  return -0.5 * std::log(base_time - t);
}

double GaugeMap::t_of_s(double s) const { return base_time - std::exp(-2.0 * s); }

Vec3 GaugeMap::to_rescaled(const Vec3& x, double t) const { return lambda(t) * (x - base_point); }

Vec3 GaugeMap::to_physical(const Vec3& xi, double s) const {
  return base_point + xi / lambda(t_of_s(s));
}

}  // namespace mcf
