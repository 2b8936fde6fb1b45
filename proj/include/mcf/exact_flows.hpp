#pragma once

#include "mcf/model_surface.hpp"

namespace mcf {

// Homothetically shrinking round solutions with extinction at t = 0.
// Sphere: r(t) = sqrt(-4t) (solves dr/dt = -2/r); cylinder about `axis`
// through the origin: r(t) = sqrt(-2t). Both require t < 0.
ModelSurface exact_sphere(double t);
ModelSurface exact_cylinder(double t, const Vec3& axis = Vec3::UnitZ());

}  // namespace mcf
