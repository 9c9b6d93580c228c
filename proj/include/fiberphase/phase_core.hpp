#pragma once

// Gravitational phase of a vertical (or tilted) fiber Mach-Zehnder interferometer
// and the ideal two-port detection probabilities.

#include <numbers>

namespace fiberphase {

struct PhysicalConstants {
  double c = 2.99792458e8;               // m/s
  double g = 9.81;                       // m/s^2
  double planck = 6.62607015e-34;        // J s
  double earth_radius = 6.371e6;         // m
  double earth_angular_speed = 7.2921e-5;  // rad/s

  /// Throws DomainError unless every constant is strictly positive and finite.
  void validate() const;
};

struct InterferometerGeometry {
  double arm_length = 0.0;      // l, m
  double arm_separation = 0.0;  // h, m
  double inclination = 0.0;     // theta, rad; 0 = area parallel to the ground

  double area() const noexcept { return arm_length * arm_separation; }
  void validate() const;
};

struct FiberOptical {
  double group_index = 1.468;
  double wavelength = 1550e-9;     // m
  double attenuation_db_per_km = 0.17;

  void validate() const;
};

struct DetectionProbabilities {
  double plus = 0.0;
  double minus = 0.0;
};

/// 2 pi A N g / (lambda c^2) * sin(theta).
double gravitational_phase(const InterferometerGeometry& geom, const FiberOptical& fiber,
                           const PhysicalConstants& consts = {});

/// P+- = base (1 +- cos(grav_phase + noise_phase)). base is 1/2 for a two-arm
/// interferometer and 1/4 for one pair of the three-arm variant.
DetectionProbabilities detection_probabilities(double grav_phase, double noise_phase,
                                               double base = 0.5);

/// h / (c lambda), the mass equivalent of the photon energy.
double effective_photon_mass(double wavelength, const PhysicalConstants& consts = {});

}  // namespace fiberphase
