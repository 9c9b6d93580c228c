#pragma once

// One row of derived quantities per inclination angle of a scenario.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "fiberphase/scenario.hpp"

namespace fiberphase {

struct SweepRow {
  double theta = 0.0;                 // rad
  double gravitational_phase = 0.0;   // arms 1-3 at theta, rad
  double rotation_linear = 0.0;       // rad
  double rotation_oscillating = 0.0;  // rad
  double rotation_total = 0.0;        // rad
  double rotation_east_west = 0.0;    // short form for xi = n pi; NaN when it does not apply
  double pulse_width_1 = 0.0;         // tau, s
  double pulse_width_3 = 0.0;         // tau', s
  double visibility = 1.0;            // dispersion times polarization
  double p_plus = 0.0;                // two-port probabilities with the dispersive visibility
  double p_minus = 0.0;
  std::array<double, 3> p_arm2_open{};
  std::array<double, 3> p_arm3_open{};
  double integration_time_max = 0.0;      // s, infinite without signal
  double integration_time_quarter = 0.0;  // s, D1 with arm 3 open
  double noise_rms = 0.0;             // rad in the detection band
  double noise_margin = 0.0;
  bool noise_pass = false;
};

struct SweepResult {
  std::string scenario;
  double modulation_frequency = 0.0;
  double detection_bandwidth = 0.0;
  std::vector<SweepRow> rows;
};

/// Error from a module raised while evaluating one inclination.
class SweepError : public std::runtime_error {
public:
  SweepError(double theta, const std::string& what)
      : std::runtime_error("theta = " + std::to_string(theta) + " rad: " + what), theta_(theta) {}
  double theta() const noexcept { return theta_; }

private:
  double theta_;
};

SweepRow sweep_row(const ExperimentScenario& s, const NoisePsdModel& psd, double theta);

/// Rows are evaluated concurrently and returned in schedule order.
SweepResult run_sweep(const ExperimentScenario& s);

}  // namespace fiberphase
