#include "fiberphase/sweep.hpp"

#include <cmath>
#include <future>
#include <limits>

namespace fiberphase {

namespace {

bool east_west_axis(const SpoolGeometry& g) {
  const double k = g.azimuth / std::numbers::pi;
  return std::abs(k - std::round(k)) < 1e-9 && g.entry_plane == 0.0;
}

}  // namespace

SweepRow sweep_row(const ExperimentScenario& s, const NoisePsdModel& psd, double theta) {
  SweepRow row;
  row.theta = theta;

  InterferometerGeometry geom = s.geometry;
  geom.inclination = theta;
  row.gravitational_phase = gravitational_phase(geom, s.fiber, s.constants);

  SpoolGeometry sp1 = s.spools[0];
  SpoolGeometry sp3 = s.spools[1];
  sp1.inclination = sp3.inclination = theta;
  const RotationPhase rot = rotation_phase(sp1, s.kinematics[0], sp3, s.kinematics[1],
                                           s.fiber.wavelength, s.constants);
  row.rotation_linear = rot.linear;
  row.rotation_oscillating = rot.oscillating;
  row.rotation_total = rot.total();
  if (east_west_axis(sp1) && east_west_axis(sp3)) {
    const double L1 = s.kinematics[0].optical_length();
    const double L3 = s.kinematics[1].optical_length();
    row.rotation_east_west = rotation_phase_oscillating(L1 - L3, L1 + L3, sp1, s.kinematics[0],
                                                        s.fiber.wavelength, s.constants);
  } else {
    row.rotation_east_west = std::numeric_limits<double>::quiet_NaN();
  }

  const double tau0 = s.pulse.initial_temporal_width();
  const double dl = s.source_linewidth();
  row.pulse_width_1 = std::hypot(
      tau0, broadening_from_coefficient(s.dispersion[0].dispersion_coefficient(s.fiber.wavelength, s.constants),
                                        s.dispersion[0].length, dl));
  row.pulse_width_3 = std::hypot(
      tau0, broadening_from_coefficient(s.dispersion[1].dispersion_coefficient(s.fiber.wavelength, s.constants),
                                        s.dispersion[1].length, dl));
  const DispersiveProbabilities disp =
      dispersive_detection_probability(row.pulse_width_1, row.pulse_width_3, row.gravitational_phase,
                                       std::numbers::pi / 2, s.pulse.central_frequency);
  row.visibility = disp.visibility * s.polarization_visibility;
  const double fringe = 0.5 * row.visibility * std::cos(row.gravitational_phase + std::numbers::pi / 2);
  row.p_plus = 0.5 + fringe;
  row.p_minus = 0.5 - fringe;

  CountingSetup counting = counting_setup(s, theta);
  counting.visibility = row.visibility;
  row.p_arm2_open = arm_pair_probabilities(SwitchState::arm2_open, theta, counting.phase12,
                                           counting.phase13, counting.visibility).p;
  row.p_arm3_open = arm_pair_probabilities(SwitchState::arm3_open, theta, counting.phase12,
                                           counting.phase13, counting.visibility).p;
  const IntegrationTimes times = integration_times(counting);
  row.integration_time_max = times.maximum;
  row.integration_time_quarter = times.quarter_baseline;

  const double f = s.switch_schedule.modulation_frequency;
  row.noise_rms = band_rms_phase(psd, f - 0.5 * s.detection_bandwidth, f + 0.5 * s.detection_bandwidth);
  const NoiseMargin margin = noise_margin(row.gravitational_phase, row.noise_rms, s.noise_threshold);
  row.noise_margin = margin.ratio;
  row.noise_pass = margin.pass;
  return row;
}

SweepResult run_sweep(const ExperimentScenario& s) {
  s.validate();
  const NoisePsdModel psd = scenario_psd(s);
  SweepResult result;
  result.scenario = s.name;
  result.modulation_frequency = s.switch_schedule.modulation_frequency;
  result.detection_bandwidth = s.detection_bandwidth;

  std::vector<std::future<SweepRow>> pending;
  pending.reserve(s.theta_schedule.size());
  for (double theta : s.theta_schedule) {
    pending.push_back(std::async(std::launch::async, [&s, &psd, theta] {
      try {
        return sweep_row(s, psd, theta);
      } catch (const std::exception& e) {
        throw SweepError(theta, e.what());
      }
    }));
  }
  result.rows.reserve(pending.size());
  for (auto& f : pending) result.rows.push_back(f.get());
  return result;
}

}  // namespace fiberphase
