#pragma once

// Photon-counting side of the three-arm interferometer: losses, per-detector
// probabilities for the two switch states, the Poisson-limited integration time,
// a seeded count simulator and the demodulating phase estimator.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fiberphase {

struct SourceParams {
  double rate = 1e6;          // photons/s
  double bandwidth = 100e9;   // Hz
  void validate() const;
};

struct DetectorParams {
  double efficiency = 0.9;
  double dark_rate = 1.0;     // counts/s
  void validate() const;
};

struct AttenuationModel {
  double fiber_alpha = 0.17;        // dB/km
  double component_losses = 0.5;    // dB, summed over components
  double arm_length = 1e5;          // m
  void validate() const;
};

enum class SwitchState : std::uint8_t { arm2_open = 0, arm3_open = 1 };
enum class Detector : std::uint8_t { D1 = 0, D2 = 1, D3 = 2 };

const char* to_string(SwitchState s);
const char* to_string(Detector d);
SwitchState parse_switch_state(const std::string& text);
Detector parse_detector(const std::string& text);

struct SwitchSchedule {
  double modulation_frequency = 1e6;  // Hz
  double duty = 0.5;                  // fraction of the period with arm 2 open
  double phase = 0.0;                 // rad

  double period() const noexcept { return 1.0 / modulation_frequency; }
  /// Switch state at time t. Arm 2 is open for the first `duty` of each period.
  SwitchState state_at(double t) const;
  void validate() const;
};

struct CountRecord {
  std::int64_t bin_index = 0;
  Detector detector = Detector::D1;
  SwitchState state = SwitchState::arm2_open;
  std::uint64_t counts = 0;

  bool operator==(const CountRecord&) const = default;
};

struct ArmPairProbabilities {
  std::array<double, 3> p{};  // D1, D2, D3

  double operator[](Detector d) const { return p[static_cast<std::size_t>(d)]; }
  double sum() const { return p[0] + p[1] + p[2]; }
};

/// 10^(-(alpha l / 1000 + sum alpha_i) / 10), l in metres, alpha in dB/km.
double attenuation_factor(const AttenuationModel& model);

/// Calibration baselines (D1, D2, D3): (1/2, 1/4, 1/4) with arm 2 open,
/// (1/4, 3/8, 3/8) with arm 3 open.
ArmPairProbabilities calibration_baseline(SwitchState state);

/// Probabilities at inclination theta with the interferometer locked to quadrature.
/// `phase12`, `phase13` are the vertical gravitational phases of the arm 1-2 and
/// arm 1-3 pairs; the open pair contributes s = sin(sin(theta) phase + noise).
/// D1 = b1 (1 - V s), and D2, D3 each take half of the probability D1 loses, so the
/// total is the same as at calibration.
ArmPairProbabilities arm_pair_probabilities(SwitchState state, double theta, double phase12,
                                            double phase13, double visibility,
                                            double noise_phase = 0.0);

/// t >= (rate a eta P + n_d) / (rate a eta (A - P))^2. NoSignalError when A == P.
double integration_time(double probability, double calibration, const SourceParams& src,
                        const DetectorParams& det, double attenuation);

/// Everything the count simulator and estimator need.
struct CountingSetup {
  SourceParams source;
  DetectorParams detector;
  AttenuationModel attenuation;
  SwitchSchedule schedule;
  double theta = 0.0;            // rad
  double phase12 = 0.0;          // vertical phase of the arm 1-2 pair, rad
  double phase13 = 0.0;          // vertical phase of the arm 1-3 pair, rad
  double visibility = 1.0;
  double residual_noise_rms = 0.0;  // rad, drawn independently per bin
};

struct IntegrationTimes {
  /// [state][detector], infinity where the detector sees no signal.
  std::array<std::array<double, 3>, 2> per_detector{};
  double maximum = 0.0;          // largest finite entry
  double quarter_baseline = 0.0; // D1 with arm 3 open: A = 1/4
};

IntegrationTimes integration_times(const CountingSetup& setup);

/// Poisson counts per bin and detector with mean (rate a eta p + n_d) * bin_width.
/// Each (seed, bin, detector) triple drives its own generator, so the output does
/// not depend on `threads`. threads = 0 uses the hardware concurrency.
std::vector<CountRecord> simulate_counts(const CountingSetup& setup, double duration,
                                         double bin_width, std::uint64_t seed,
                                         unsigned threads = 0);

/// Poisson mean of one bin for detector `d` in switch state `state`.
double expected_count(const CountingSetup& setup, SwitchState state, Detector d,
                      double bin_width, double noise_phase = 0.0);

struct DemodulationSetup {
  double bin_width = 0.0;    // s
  double dark_rate = 0.0;    // counts/s per detector
  double visibility = 1.0;
};

struct PhaseEstimate {
  double phase = 0.0;        // asin(s13) - asin(s12), rad
  double sigma = 0.0;        // Poisson standard error, rad
  double s12 = 0.0;
  double s13 = 0.0;
};

/// Per switch state, the dark-subtracted D1 fraction f = (c1 - d)/(c1 + c23 - 3 d)
/// gives s = (1 - f / b1) / V. Totals are passed in so that analytic means can be
/// used directly.
struct StateTotals {
  double d1 = 0.0;
  double d23 = 0.0;
  double bins = 0.0;
};

PhaseEstimate estimate_phase(const std::array<StateTotals, 2>& totals,
                             const DemodulationSetup& setup);

/// Sums the records by switch state and calls estimate_phase. InsufficientData if
/// the records span fewer than 100 switch periods or a state has no counts.
PhaseEstimate demodulate(const std::vector<CountRecord>& records, const SwitchSchedule& schedule,
                         const DemodulationSetup& setup);

}  // namespace fiberphase
