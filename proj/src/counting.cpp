#include "fiberphase/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "fiberphase/errors.hpp"

namespace fiberphase {

namespace {

constexpr std::size_t index(Detector d) { return static_cast<std::size_t>(d); }
constexpr std::size_t index(SwitchState s) { return static_cast<std::size_t>(s); }

// splitmix64 as a UniformRandomBitGenerator; seeded from a hash of the stream key.
class SplitMix64 {
public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t bin, std::uint64_t lane) {
  SplitMix64 mix(seed);
  std::uint64_t k = mix() ^ (bin * 0xD6E8FEB86659FD93ULL);
  SplitMix64 mix2(k);
  return mix2() ^ (lane * 0xA0761D6478BD642FULL);
}

// Lane 3 of each bin carries the residual phase noise of that bin.
constexpr std::uint64_t kNoiseLane = 3;

double base_d1(SwitchState s) { return s == SwitchState::arm2_open ? 0.5 : 0.25; }

}  // namespace

void SourceParams::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("source rate must be positive");
  if (!(bandwidth >= 0.0)) throw DomainError("source bandwidth must be non-negative");
}

void DetectorParams::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw DomainError("detector efficiency must lie in (0, 1]");
  if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate))
    throw DomainError("dark count rate must be non-negative");
}

void AttenuationModel::validate() const {
  if (!(fiber_alpha >= 0.0) || !(component_losses >= 0.0) || !(arm_length >= 0.0))
    throw DomainError("attenuation parameters must be non-negative");
}

const char* to_string(SwitchState s) {
  return s == SwitchState::arm2_open ? "arm2_open" : "arm3_open";
}

const char* to_string(Detector d) {
  switch (d) {
    case Detector::D1: return "D1";
    case Detector::D2: return "D2";
    case Detector::D3: return "D3";
  }
  return "?";
}

SwitchState parse_switch_state(const std::string& text) {
  if (text == "arm2_open") return SwitchState::arm2_open;
  if (text == "arm3_open") return SwitchState::arm3_open;
  throw DomainError("unknown switch state '" + text + "'");
}

Detector parse_detector(const std::string& text) {
  if (text == "D1") return Detector::D1;
  if (text == "D2") return Detector::D2;
  if (text == "D3") return Detector::D3;
  throw DomainError("unknown detector '" + text + "'");
}

SwitchState SwitchSchedule::state_at(double t) const {
  double cycle = t * modulation_frequency + phase / (2.0 * std::numbers::pi);
  cycle -= std::floor(cycle);
  return cycle < duty ? SwitchState::arm2_open : SwitchState::arm3_open;
}

void SwitchSchedule::validate() const {
  if (!(modulation_frequency > 0.0) || !std::isfinite(modulation_frequency))
    throw DomainError("modulation frequency must be positive");
  if (!(duty > 0.0 && duty < 1.0)) throw DomainError("switch duty must lie in (0, 1)");
  if (!std::isfinite(phase)) throw DomainError("switch phase must be finite");
}

double attenuation_factor(const AttenuationModel& model) {
  model.validate();
  const double total_db = model.fiber_alpha * model.arm_length / 1000.0 + model.component_losses;
  return std::pow(10.0, -total_db / 10.0);
}

ArmPairProbabilities calibration_baseline(SwitchState state) {
  if (state == SwitchState::arm2_open) return {{0.5, 0.25, 0.25}};
  return {{0.25, 0.375, 0.375}};
}

ArmPairProbabilities arm_pair_probabilities(SwitchState state, double theta, double phase12,
                                            double phase13, double visibility,
                                            double noise_phase) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw DomainError("visibility must lie in [0, 1]");
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2))
    throw DomainError("inclination must lie in [0, pi/2]");
  ArmPairProbabilities p = calibration_baseline(state);
  const double phase = state == SwitchState::arm2_open ? phase12 : phase13;
  const double arg = std::sin(theta) * phase + noise_phase;
  if (arg == 0.0) return p;
  const double shift = base_d1(state) * visibility * std::sin(arg);
  p.p[0] -= shift;
  p.p[1] += 0.5 * shift;
  p.p[2] += 0.5 * shift;
  return p;
}

double integration_time(double probability, double calibration, const SourceParams& src,
                        const DetectorParams& det, double attenuation) {
  src.validate();
  det.validate();
  if (!(attenuation >= 0.0 && attenuation <= 1.0))
    throw DomainError("attenuation factor must lie in [0, 1]");
  if (!(probability >= 0.0 && probability <= 1.0) || !(calibration >= 0.0 && calibration <= 1.0))
    throw DomainError("probabilities must lie in [0, 1]");
  const double flux = src.rate * attenuation * det.efficiency;
  const double signal = flux * (calibration - probability);
  if (signal == 0.0) throw NoSignalError("calibration and measured probability coincide");
  return (flux * probability + det.dark_rate) / (signal * signal);
}

IntegrationTimes integration_times(const CountingSetup& setup) {
  const double a = attenuation_factor(setup.attenuation);
  IntegrationTimes out;
  bool any = false;
  for (SwitchState s : {SwitchState::arm2_open, SwitchState::arm3_open}) {
    const ArmPairProbabilities cal = calibration_baseline(s);
    const ArmPairProbabilities p =
        arm_pair_probabilities(s, setup.theta, setup.phase12, setup.phase13, setup.visibility);
    for (Detector d : {Detector::D1, Detector::D2, Detector::D3}) {
      double t = std::numeric_limits<double>::infinity();
      try {
        t = integration_time(p[d], cal[d], setup.source, setup.detector, a);
      } catch (const NoSignalError&) {
      }
      out.per_detector[index(s)][index(d)] = t;
      if (std::isfinite(t)) {
        out.maximum = any ? std::max(out.maximum, t) : t;
        any = true;
      }
    }
  }
  if (!any) out.maximum = std::numeric_limits<double>::infinity();
  out.quarter_baseline = out.per_detector[index(SwitchState::arm3_open)][index(Detector::D1)];
  return out;
}

double expected_count(const CountingSetup& setup, SwitchState state, Detector d, double bin_width,
                      double noise_phase) {
  const double a = attenuation_factor(setup.attenuation);
  const ArmPairProbabilities p = arm_pair_probabilities(
      state, setup.theta, setup.phase12, setup.phase13, setup.visibility, noise_phase);
  return (setup.source.rate * a * setup.detector.efficiency * p[d] + setup.detector.dark_rate) *
         bin_width;
}

std::vector<CountRecord> simulate_counts(const CountingSetup& setup, double duration,
                                         double bin_width, std::uint64_t seed, unsigned threads) {
  if (!(duration > 0.0) || !(bin_width > 0.0))
    throw DomainError("duration and bin width must be positive");
  setup.detector.validate();
  setup.schedule.validate();
  if (!(setup.source.rate >= 0.0)) throw DomainError("source rate must be non-negative");
  if (!(setup.residual_noise_rms >= 0.0)) throw DomainError("residual noise must be non-negative");
  const double bins_real = std::floor(duration / bin_width * (1.0 + 1e-12));
  if (bins_real < 1.0) throw DomainError("duration shorter than one bin");
  if (bins_real > 1e9) throw DomainError("too many bins; widen the bins or shorten the run");
  const auto bins = static_cast<std::int64_t>(bins_real);

  const double a = attenuation_factor(setup.attenuation);
  const double flux = setup.source.rate * a * setup.detector.efficiency;
  const double dark = setup.detector.dark_rate * bin_width;

  std::vector<CountRecord> out(static_cast<std::size_t>(bins) * 3);
  auto fill = [&](std::int64_t first, std::int64_t last) {
    for (std::int64_t b = first; b < last; ++b) {
      const SwitchState state = setup.schedule.state_at((static_cast<double>(b) + 0.5) * bin_width);
      double noise = 0.0;
      if (setup.residual_noise_rms > 0.0) {
        SplitMix64 gen(stream_key(seed, static_cast<std::uint64_t>(b), kNoiseLane));
        noise = std::normal_distribution<double>(0.0, setup.residual_noise_rms)(gen);
      }
      const ArmPairProbabilities p = arm_pair_probabilities(
          state, setup.theta, setup.phase12, setup.phase13, setup.visibility, noise);
      for (Detector d : {Detector::D1, Detector::D2, Detector::D3}) {
        const double mean = flux * p[d] * bin_width + dark;
        std::uint64_t n = 0;
        if (mean > 0.0) {
          SplitMix64 gen(stream_key(seed, static_cast<std::uint64_t>(b), index(d)));
          n = static_cast<std::uint64_t>(std::poisson_distribution<std::int64_t>(mean)(gen));
        }
        out[static_cast<std::size_t>(b) * 3 + index(d)] = {b, d, state, n};
      }
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, std::max<std::int64_t>(1, bins / 4096)));
  if (workers <= 1) {
    fill(0, bins);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const std::int64_t chunk = (bins + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::int64_t first = static_cast<std::int64_t>(w) * chunk;
      const std::int64_t last = std::min(bins, first + chunk);
      if (first < last) pool.emplace_back(fill, first, last);
    }
  }
  return out;
}

PhaseEstimate estimate_phase(const std::array<StateTotals, 2>& totals,
                             const DemodulationSetup& setup) {
  if (!(setup.visibility > 0.0 && setup.visibility <= 1.0))
    throw DomainError("visibility must lie in (0, 1]");
  PhaseEstimate est;
  double variance = 0.0;
  for (SwitchState s : {SwitchState::arm2_open, SwitchState::arm3_open}) {
    const StateTotals& tot = totals[index(s)];
    const double dark = setup.dark_rate * setup.bin_width * tot.bins;
    const double x = tot.d1 - dark;
    const double y = tot.d23 - 2.0 * dark;
    const double m = x + y;
    if (!(m > 0.0) || !(tot.d1 > 0.0))
      throw InsufficientData(std::string("no signal counts with ") + to_string(s));
    const double f = x / m;
    const double var_f = (y * y * tot.d1 + x * x * tot.d23) / (m * m * m * m);
    const double b1 = base_d1(s);
    const double sv = std::clamp((1.0 - f / b1) / setup.visibility, -1.0, 1.0);
    const double var_s = var_f / (b1 * b1 * setup.visibility * setup.visibility);
    const double one_minus = std::max(1.0 - sv * sv, std::numeric_limits<double>::min());
    variance += var_s / one_minus;
    if (s == SwitchState::arm2_open)
      est.s12 = sv;
    else
      est.s13 = sv;
  }
  est.phase = std::asin(est.s13) - std::asin(est.s12);
  est.sigma = std::sqrt(variance);
  return est;
}

PhaseEstimate demodulate(const std::vector<CountRecord>& records, const SwitchSchedule& schedule,
                         const DemodulationSetup& setup) {
  schedule.validate();
  if (!(setup.bin_width > 0.0)) throw DomainError("bin width must be positive");
  if (records.empty()) throw InsufficientData("no count records");
  std::int64_t lo = records.front().bin_index;
  std::int64_t hi = lo;
  std::array<StateTotals, 2> totals{};
  for (const CountRecord& r : records) {
    lo = std::min(lo, r.bin_index);
    hi = std::max(hi, r.bin_index);
    StateTotals& t = totals[index(r.state)];
    if (r.detector == Detector::D1) {
      t.d1 += static_cast<double>(r.counts);
      t.bins += 1.0;
    } else {
      t.d23 += static_cast<double>(r.counts);
    }
  }
  const double span = static_cast<double>(hi - lo + 1) * setup.bin_width;
  if (span < 100.0 * schedule.period())
    throw InsufficientData("records span " + std::to_string(span / schedule.period()) +
                           " switch periods; at least 100 are needed");
  return estimate_phase(totals, setup);
}

}  // namespace fiberphase
