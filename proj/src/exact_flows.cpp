#include "mcf/exact_flows.hpp"

#include <cmath>

#include "mcf/errors.hpp"

namespace mcf {

ModelSurface exact_sphere(double t) {
  require(t < 0.0, ErrorCode::InvalidArgument, "exact sphere flow needs t < 0");
  return make_sphere(Vec3::Zero(), std::sqrt(-4.0 * t));
}

ModelSurface exact_cylinder(double t, const Vec3& axis) {
  require(t < 0.0, ErrorCode::InvalidArgument, "exact cylinder flow needs t < 0");
  return make_cylinder(Vec3::Zero(), axis, std::sqrt(-2.0 * t));
}

}  // namespace mcf
