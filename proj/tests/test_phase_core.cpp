#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fiberphase/errors.hpp"
#include "fiberphase/phase_core.hpp"

using namespace fiberphase;

namespace {

InterferometerGeometry vertical(double l, double h) {
  return {l, h, std::numbers::pi / 2};
}

}  // namespace

TEST_CASE("gravitational phase of the 1e5 m^2 interferometer") {
  const FiberOptical fiber{1.468, 1550e-9, 0.17};
  const double phase = gravitational_phase(vertical(1e5, 1.0), fiber);
  // 2 pi * 1e5 * 1.468 * 9.81 / (1550e-9 * 299792458^2), evaluated by hand.
  const double hand = 2.0 * 3.141592653589793 * 1e5 * 1.468 * 9.81 /
                      (1550e-9 * 8.987551787368176e16);
  CHECK(phase == doctest::Approx(hand).epsilon(1e-14));
  CHECK(phase == doctest::Approx(6.49e-5).epsilon(1e-3));
  CHECK(phase > 1e-5);
  CHECK(phase < 1e-4);
}

TEST_CASE("gravitational phase vanishes for zero area or a horizontal interferometer") {
  const FiberOptical fiber;
  CHECK(gravitational_phase(vertical(1e5, 0.0), fiber) == 0.0);
  CHECK(gravitational_phase(vertical(0.0, 3.0), fiber) == 0.0);
  CHECK(gravitational_phase({1e5, 1.0, 0.0}, fiber) == 0.0);
}

TEST_CASE("gravitational phase is linear in area and follows sin(theta)") {
  const FiberOptical fiber;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> len(1.0, 2e5), sep(0.01, 5.0), ang(0.0, std::numbers::pi / 2);
  for (int i = 0; i < 200; ++i) {
    const double l = len(rng), h = sep(rng), th = ang(rng);
    const double base = gravitational_phase(vertical(l, h), fiber);
    CHECK(gravitational_phase(vertical(2 * l, h), fiber) == doctest::Approx(2 * base).epsilon(1e-14));
    CHECK(gravitational_phase({l, h, th}, fiber) ==
          doctest::Approx(base * std::sin(th)).epsilon(1e-13));
  }
  double last = -1.0;
  for (int k = 0; k <= 90; ++k) {
    const double v = gravitational_phase({1e5, 1.0, k * std::numbers::pi / 180.0}, fiber);
    CHECK(v >= last);
    last = v;
  }
}

TEST_CASE("gravitational phase rejects unphysical inputs") {
  const FiberOptical fiber;
  CHECK_THROWS_AS(gravitational_phase(vertical(-1.0, 1.0), fiber), DomainError);
  CHECK_THROWS_AS(gravitational_phase(vertical(1.0, -1.0), fiber), DomainError);
  CHECK_THROWS_AS(gravitational_phase({1.0, 1.0, 2.0}, fiber), DomainError);
  CHECK_THROWS_AS(gravitational_phase(vertical(1.0, 1.0), FiberOptical{0.9, 1550e-9, 0.17}), DomainError);
  CHECK_THROWS_AS(gravitational_phase(vertical(1.0, 1.0), FiberOptical{1.468, 0.0, 0.17}), DomainError);
  CHECK_THROWS_AS(gravitational_phase(vertical(std::numeric_limits<double>::quiet_NaN(), 1.0), fiber),
                  DomainError);
  PhysicalConstants bad;
  bad.g = 0.0;
  CHECK_THROWS_AS(gravitational_phase(vertical(1.0, 1.0), fiber, bad), DomainError);
}

TEST_CASE("detection probabilities at the reference points") {
  auto p = detection_probabilities(0.0, 0.0, 0.5);
  CHECK(p.plus == 1.0);
  CHECK(p.minus == 0.0);

  p = detection_probabilities(0.0, std::numbers::pi / 2, 0.5);
  CHECK(p.plus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.minus == doctest::Approx(0.5).epsilon(1e-15));

  // cos(x + pi/2) = -sin(x)
  p = detection_probabilities(6.49e-5, std::numbers::pi / 2, 0.25);
  CHECK(p.plus == doctest::Approx(0.25 * (1 - std::sin(6.49e-5))).epsilon(1e-14));
  CHECK(p.minus == doctest::Approx(0.25 * (1 + std::sin(6.49e-5))).epsilon(1e-14));
}

TEST_CASE("detection probabilities conserve probability") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ph(-10.0, 10.0), base(0.0, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const double b = base(rng);
    const auto p = detection_probabilities(ph(rng), ph(rng), b);
    CHECK(std::abs(p.plus + p.minus - 2 * b) <= 1e-14);
    CHECK(p.plus >= 0.0);
    CHECK(p.minus >= 0.0);
  }
  CHECK_THROWS_AS(detection_probabilities(0.0, 0.0, -0.1), DomainError);
  CHECK_THROWS_AS(detection_probabilities(0.0, 0.0, 0.6), DomainError);
}

TEST_CASE("effective photon mass") {
  const PhysicalConstants k;
  const double m = effective_photon_mass(1.55e-6);
  CHECK(m == doctest::Approx(6.62607015e-34 / (2.99792458e8 * 1.55e-6)).epsilon(1e-15));
  CHECK(m == doctest::Approx(1.426e-36).epsilon(1e-3));
  CHECK(effective_photon_mass(0.775e-6) == doctest::Approx(2 * m).epsilon(1e-15));
  CHECK(effective_photon_mass(1e300, k) < 1e-300);
  CHECK_THROWS_AS(effective_photon_mass(0.0), DomainError);
}
