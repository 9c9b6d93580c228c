#include "fiberphase/phase_core.hpp"

#include <cmath>
#include <string>

#include "fiberphase/errors.hpp"

namespace fiberphase {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError(std::string(name) + " must be positive and finite");
}

}  // namespace

void PhysicalConstants::validate() const {
  require_positive(c, "c");
  require_positive(g, "g");
  require_positive(planck, "planck");
  require_positive(earth_radius, "earth_radius");
  require_positive(earth_angular_speed, "earth_angular_speed");
}

void InterferometerGeometry::validate() const {
  if (!(arm_length >= 0.0) || !std::isfinite(arm_length))
    throw DomainError("arm_length must be non-negative");
  if (!(arm_separation >= 0.0) || !std::isfinite(arm_separation))
    throw DomainError("arm_separation must be non-negative");
  if (!(inclination >= 0.0 && inclination <= std::numbers::pi / 2))
    throw DomainError("inclination must lie in [0, pi/2]");
}

void FiberOptical::validate() const {
  if (!(group_index >= 1.0) || !std::isfinite(group_index))
    throw DomainError("group_index must be >= 1");
  require_positive(wavelength, "wavelength");
  if (!(attenuation_db_per_km >= 0.0)) throw DomainError("attenuation must be >= 0");
}

double gravitational_phase(const InterferometerGeometry& geom, const FiberOptical& fiber,
                           const PhysicalConstants& consts) {
  geom.validate();
  fiber.validate();
  consts.validate();
  const double vertical = 2.0 * std::numbers::pi * geom.area() * fiber.group_index * consts.g /
                          (fiber.wavelength * consts.c * consts.c);
  return vertical * std::sin(geom.inclination);
}

DetectionProbabilities detection_probabilities(double grav_phase, double noise_phase,
                                               double base) {
  if (!(base > 0.0 && base <= 0.5)) throw DomainError("base probability must lie in (0, 1/2]");
  const double fringe = base * std::cos(grav_phase + noise_phase);
  return {base + fringe, base - fringe};
}

double effective_photon_mass(double wavelength, const PhysicalConstants& consts) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  return consts.planck / (consts.c * wavelength);
}

}  // namespace fiberphase
