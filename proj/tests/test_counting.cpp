#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fiberphase/counting.hpp"
#include "fiberphase/errors.hpp"
#include "fiberphase/phase_core.hpp"

using namespace fiberphase;

namespace {

constexpr double pi = std::numbers::pi;

const double kPhase13 = gravitational_phase({1e5, 1.0, pi / 2}, FiberOptical{});

CountingSetup baseline_setup(double theta) {
  CountingSetup s;
  s.theta = theta;
  s.phase13 = kPhase13;
  return s;
}

}  // namespace

TEST_CASE("attenuation factor") {
  CHECK(attenuation_factor({0.0, 0.0, 1e5}) == 1.0);
  CHECK(attenuation_factor({0.17, 0.5, 1e5}) == doctest::Approx(std::pow(10.0, -1.75)).epsilon(1e-14));
  CHECK(attenuation_factor({0.17, 0.5, 1e5}) == doctest::Approx(0.0178).epsilon(1e-2));
  CHECK(attenuation_factor({0.0, 10.0, 1e5}) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(attenuation_factor({-1.0, 0.0, 1.0}), DomainError);
}

TEST_CASE("calibration baselines") {
  for (double v : {1.0, 0.5}) {
    const auto a = arm_pair_probabilities(SwitchState::arm2_open, 0.0, 1e-4, 2e-4, v);
    CHECK(a.p == std::array<double, 3>{0.5, 0.25, 0.25});
    const auto b = arm_pair_probabilities(SwitchState::arm3_open, 0.0, 1e-4, 2e-4, v);
    CHECK(b.p == std::array<double, 3>{0.25, 0.375, 0.375});
  }
}

TEST_CASE("vertical probabilities follow the two-port fringe") {
  const double v = 0.9;
  const auto p = arm_pair_probabilities(SwitchState::arm3_open, pi / 2, 0.0, kPhase13, v);
  // D1 of the arm 1-3 pair at quadrature is the P+ port with base 1/4.
  const auto two = detection_probabilities(kPhase13, pi / 2, 0.25);
  CHECK(p[Detector::D1] == doctest::Approx(0.25 + v * (two.plus - 0.25)).epsilon(1e-14));
  CHECK(p[Detector::D2] == doctest::Approx(0.375 + 0.5 * 0.25 * v * std::sin(kPhase13)).epsilon(1e-14));
  CHECK(p[Detector::D2] == p[Detector::D3]);
}

TEST_CASE("probabilities stay normalised") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    for (SwitchState s : {SwitchState::arm2_open, SwitchState::arm3_open}) {
      const auto p = arm_pair_probabilities(s, u(rng) * pi / 2, 10 * u(rng) - 5, 10 * u(rng) - 5, u(rng),
                                            u(rng) * 2 * pi);
      CHECK(std::abs(p.sum() - 1.0) <= 1e-15);
      for (double x : p.p) CHECK(x >= 0.0);
    }
  }
  CHECK_THROWS_AS(arm_pair_probabilities(SwitchState::arm2_open, 2.0, 0, 0, 1), DomainError);
  CHECK_THROWS_AS(arm_pair_probabilities(SwitchState::arm2_open, 1.0, 0, 0, 1.5), DomainError);
}

TEST_CASE("integration time formula and scaling") {
  const SourceParams src{1e6, 100e9};
  const DetectorParams det{0.9, 1.0};
  const double a = 0.0178;
  const double t = integration_time(0.24999, 0.25, src, det, a);
  const double flux = 1e6 * a * 0.9;
  CHECK(t == doctest::Approx((flux * 0.24999 + 1.0) / std::pow(flux * 1e-5, 2)).epsilon(1e-9));
  for (double k : {0.1, 3.0, 1e3}) {
    const double tk = integration_time(0.24999, 0.25, SourceParams{1e6 * k, 100e9},
                                       DetectorParams{0.9, 1.0 * k}, a);
    CHECK(tk == doctest::Approx(t / k).epsilon(1e-12));
  }
  CHECK_THROWS_AS(integration_time(0.25, 0.25, src, DetectorParams{0.9, 0.0}, a), NoSignalError);
  // Approaching calibration the time diverges.
  CHECK(integration_time(0.25 - 1e-12, 0.25, src, DetectorParams{0.9, 0.0}, a) > 1e15);
  CHECK_THROWS_AS(integration_time(0.2, 0.25, src, det, 2.0), DomainError);
}

TEST_CASE("integration times for the baseline setup are day-scale") {
  const IntegrationTimes t = integration_times(baseline_setup(pi / 2));
  const double day = 86400.0;
  CHECK(t.quarter_baseline / day > 0.5);
  CHECK(t.quarter_baseline / day < 2.0);
  CHECK(t.maximum / day > 2.0);
  CHECK(t.maximum / day < 8.0);
  // Arm 2 shares the height of arm 1: no signal with arm 2 open.
  for (double x : t.per_detector[0]) CHECK(std::isinf(x));

  const IntegrationTimes flat = integration_times(baseline_setup(0.0));
  CHECK(std::isinf(flat.maximum));
}

TEST_CASE("switch schedule") {
  SwitchSchedule s{1e6, 0.5, 0.0};
  CHECK(s.state_at(0.0) == SwitchState::arm2_open);
  CHECK(s.state_at(0.49e-6) == SwitchState::arm2_open);
  CHECK(s.state_at(0.51e-6) == SwitchState::arm3_open);
  CHECK(s.state_at(1.01e-6) == SwitchState::arm2_open);
  s.phase = pi;
  CHECK(s.state_at(0.0) == SwitchState::arm3_open);
  CHECK_THROWS_AS((SwitchSchedule{1e6, 1.0, 0.0}.validate()), DomainError);
  CHECK(parse_switch_state(to_string(SwitchState::arm3_open)) == SwitchState::arm3_open);
  CHECK(parse_detector(to_string(Detector::D3)) == Detector::D3);
  CHECK_THROWS_AS(parse_detector("D4"), DomainError);
}

TEST_CASE("simulated counts are reproducible and thread independent") {
  CountingSetup s = baseline_setup(pi / 2);
  s.schedule.modulation_frequency = 0.5;
  s.residual_noise_rms = 1e-3;
  const auto a = simulate_counts(s, 20000.0, 1.0, 42, 1);
  const auto b = simulate_counts(s, 20000.0, 1.0, 42, 4);
  const auto c = simulate_counts(s, 20000.0, 1.0, 43, 4);
  CHECK(a.size() == 60000);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a[3].bin_index == 1);
  CHECK(a[3].detector == Detector::D1);
}

TEST_CASE("simulated counts: zero source and dark-only cases") {
  CountingSetup s = baseline_setup(pi / 2);
  s.source.rate = 0.0;
  s.detector.dark_rate = 0.0;
  for (const auto& r : simulate_counts(s, 100.0, 1.0, 1)) CHECK(r.counts == 0);

  s.detector.dark_rate = 5.0;
  double total[3] = {0, 0, 0};
  const auto recs = simulate_counts(s, 2000.0, 1.0, 9);
  for (const auto& r : recs) total[static_cast<int>(r.detector)] += static_cast<double>(r.counts);
  for (double x : total) CHECK(std::abs(x - 1e4) < 3 * std::sqrt(1e4));
}

TEST_CASE("simulated count means match the analytic means") {
  CountingSetup s = baseline_setup(pi / 2);
  s.phase13 = 0.2;  // large enough to separate the detectors
  s.schedule.modulation_frequency = 0.05;
  const double bin = 1.0;
  const auto recs = simulate_counts(s, 40000.0, bin, 5);
  double sum[2][3] = {};
  double bins[2] = {};
  for (const auto& r : recs) {
    sum[static_cast<int>(r.state)][static_cast<int>(r.detector)] += static_cast<double>(r.counts);
    if (r.detector == Detector::D1) bins[static_cast<int>(r.state)] += 1;
  }
  for (SwitchState st : {SwitchState::arm2_open, SwitchState::arm3_open}) {
    for (Detector d : {Detector::D1, Detector::D2, Detector::D3}) {
      const double mean = expected_count(s, st, d, bin) * bins[static_cast<int>(st)];
      CHECK(std::abs(sum[static_cast<int>(st)][static_cast<int>(d)] - mean) <= 3 * std::sqrt(mean));
    }
  }
}

TEST_CASE("simulation input checks") {
  const CountingSetup s;
  CHECK_THROWS_AS(simulate_counts(s, 0.0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(simulate_counts(s, 0.5, 1.0, 1), DomainError);
  CHECK_THROWS_AS(simulate_counts(s, 1e10, 1.0, 1), DomainError);
}

TEST_CASE("estimator on analytic means recovers the phase") {
  for (double v : {1.0, 0.8}) {
    CountingSetup s = baseline_setup(pi / 2);
    s.visibility = v;
    const double T = 1e6;
    std::array<StateTotals, 2> tot{};
    for (SwitchState st : {SwitchState::arm2_open, SwitchState::arm3_open}) {
      auto& t = tot[static_cast<int>(st)];
      t.bins = T / 2;
      t.d1 = expected_count(s, st, Detector::D1, 1.0) * t.bins;
      t.d23 = (expected_count(s, st, Detector::D2, 1.0) + expected_count(s, st, Detector::D3, 1.0)) * t.bins;
    }
    const PhaseEstimate e = estimate_phase(tot, {1.0, s.detector.dark_rate, v});
    CHECK(std::abs(e.phase - kPhase13) < e.sigma / 10);
    CHECK(std::abs(e.s12) < 1e-12);
  }
}

TEST_CASE("demodulated null scenario is consistent with zero") {
  CountingSetup s = baseline_setup(pi / 2);
  s.phase13 = 0.0;
  s.schedule.modulation_frequency = 0.05;
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto recs = simulate_counts(s, 1e5, 10.0, seed);
    const PhaseEstimate e = demodulate(recs, s.schedule, {10.0, s.detector.dark_rate, 1.0});
    CHECK(e.sigma > 0.0);
    if (std::abs(e.phase) <= 3 * e.sigma) ++inside;
  }
  CHECK(inside >= 9);
}

TEST_CASE("demodulation needs enough data") {
  CountingSetup s = baseline_setup(pi / 2);
  s.schedule.modulation_frequency = 0.05;
  const auto short_run = simulate_counts(s, 1000.0, 10.0, 1);
  CHECK_THROWS_AS(demodulate(short_run, s.schedule, {10.0, 1.0, 1.0}), InsufficientData);
  CHECK_THROWS_AS(demodulate({}, s.schedule, {10.0, 1.0, 1.0}), InsufficientData);

  s.source.rate = 0.0;
  s.detector.dark_rate = 0.0;
  const auto empty = simulate_counts(s, 1e4, 10.0, 1);
  CHECK_THROWS_AS(demodulate(empty, s.schedule, {10.0, 0.0, 1.0}), InsufficientData);
}
