#pragma once

// Quantities with explicit unit suffixes ("100 km", "1550 nm", "48.21 deg").
// Everything is converted to SI (radians for angles) on the way in.

#include <string>
#include <string_view>

namespace fiberphase {

enum class Dimension {
  dimensionless,
  length,          // m
  angle,           // rad
  time,            // s
  frequency,       // Hz
  angular_rate,    // rad/s
  speed,           // m/s
  acceleration,    // m/s^2
  count_rate,      // 1/s
  decibel,         // dB
  attenuation,     // dB/km (kept in dB/km, the customary unit)
  dispersion,      // ps/(km nm) (kept, customary)
};

const char* to_string(Dimension d);

/// Parses "<number> [unit]". A bare number is taken as already in the SI (or
/// customary, see Dimension) unit. Throws DomainError on unknown units or
/// malformed numbers.
double parse_quantity(std::string_view text, Dimension dim);

}  // namespace fiberphase
