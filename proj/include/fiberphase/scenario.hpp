#pragma once

// Full experiment description, loaded from a YAML file whose values carry
// explicit units ("100 km", "1550 nm"). Missing optional fields take the
// defaults below; unknown keys are rejected so that typos do not silently fall
// back to a default.

#include <array>
#include <string>
#include <vector>

#include "fiberphase/counting.hpp"
#include "fiberphase/dispersion.hpp"
#include "fiberphase/earth_rotation.hpp"
#include "fiberphase/noise_budget.hpp"
#include "fiberphase/phase_core.hpp"

namespace fiberphase {

struct ExperimentScenario {
  std::string name = "unnamed";
  PhysicalConstants constants;
  /// arm_separation is the height of arm 3 above arm 1; arm 2 sits at arm2_separation.
  InterferometerGeometry geometry{1e5, 1.0, 0.0};
  double arm2_separation = 0.0;
  FiberOptical fiber;

  /// Spools of arms 1 and 3. Their inclination follows the swept theta.
  std::array<SpoolGeometry, 2> spools{};
  /// Photon motion on spools 1 and 3; fiber lengths default to the arm length.
  std::array<PhotonKinematics, 2> kinematics{};

  PulseModel pulse;
  /// Dispersion of the two interfering fibers (the second may be a different fiber type).
  std::array<FiberDispersion, 2> dispersion{};
  double polarization_visibility = 1.0;

  FiberThermalParams thermal;
  PsdShape psd_shape;
  std::string psd_table;             // optional CSV replacing the parametric model
  double detection_bandwidth = 1.0;  // Hz, width of the band around f_mod
  double noise_threshold = 10.0;

  SourceParams source;
  DetectorParams detector;
  AttenuationModel attenuation;
  SwitchSchedule switch_schedule;
  double residual_noise_rms = 0.0;   // rad, stabilised phi(t) left over per bin

  std::vector<double> theta_schedule{0.0, std::numbers::pi / 2};

  /// Defaults for a 100 km, 1 m interferometer at 1550 nm.
  static ExperimentScenario defaults();
  /// Throws ConfigError naming the first field that breaks an invariant.
  void validate() const;

  /// Wavelength spread (FWHM) matching the source bandwidth, m.
  double source_linewidth() const;
};

/// Scenario directory: $FIBERPHASE_SCENARIO_DIR if set, else the bundled one.
std::string scenario_directory();

/// `name_or_path` if it names an existing file, else <dir>/<name> or <dir>/<name>.yaml.
std::string resolve_scenario_path(const std::string& name_or_path);

ExperimentScenario load_scenario(const std::string& path);
ExperimentScenario parse_scenario(const std::string& yaml_text, const std::string& origin = "");

/// Counting parameters at inclination `theta`.
CountingSetup counting_setup(const ExperimentScenario& s, double theta);

/// Parametric model for the scenario fiber, or the tabulated one when configured.
NoisePsdModel scenario_psd(const ExperimentScenario& s);

}  // namespace fiberphase
