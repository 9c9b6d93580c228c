#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fiberphase/dispersion.hpp"
#include "fiberphase/earth_rotation.hpp"
#include "fiberphase/errors.hpp"

using namespace fiberphase;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double pi = std::numbers::pi;

PulseModel baseline_pulse() { return PulseModel::from_bandwidth(1550e-9, 100e9); }

// Fiber whose chirp-free packet has rms width `tau` for the given pulse.
FiberDispersion fiber_for_width(const PulseModel& p, double tau) {
  const double t0 = p.initial_temporal_width();
  FiberDispersion d;
  d.group_velocity = 2.99792458e8 / 1.468;
  d.length = 1.0;
  d.rho = 2.0 * t0 * std::sqrt(tau * tau - t0 * t0);
  return d;
}

}  // namespace

TEST_CASE("spectral amplitude shape") {
  const PulseModel p = baseline_pulse();
  const std::complex<double> peak = spectral_amplitude(p, p.central_frequency);
  CHECK(peak.imag() == 0.0);
  CHECK(peak.real() == doctest::Approx(std::pow(2 * pi * p.spectral_std * p.spectral_std, -0.25)));
  const double s = p.spectral_std;
  for (double sign : {-1.0, 1.0}) {
    const double r = std::norm(spectral_amplitude(p, p.central_frequency + sign * s * std::sqrt(2.0))) /
                     std::norm(peak);
    CHECK(r == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  }
  CHECK(p.initial_temporal_width() * p.spectral_std == 0.5);
}

TEST_CASE("spectral amplitude is normalised") {
  for (double bw : {1e9, 100e9, 5e12}) {
    PulseModel p = PulseModel::from_bandwidth(1550e-9, bw, 3e-12);
    const double s = p.spectral_std;
    auto f = [&](double x) { return std::norm(spectral_amplitude(p, p.central_frequency + x * s)) * s; };
    const double total = gauss_kronrod<double, 61>::integrate(f, -14.0, 14.0, 12, 1e-14);
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("temporal width") {
  const PulseModel p = baseline_pulse();
  FiberDispersion d = FiberDispersion::from_coefficient(17, 1550e-9, 1.468, 0.0);
  CHECK(temporal_width(p, d) == p.initial_temporal_width());
  d.length = 1e5;
  d.rho = 0.0;
  CHECK(temporal_width(p, d) == p.initial_temporal_width());
  d = FiberDispersion::from_coefficient(17, 1550e-9, 1.468, 1e5);
  CHECK(d.dispersion_coefficient(1550e-9) == doctest::Approx(17.0).epsilon(1e-14));
  // Far field: tau ~ D l delta_lambda with the Gaussian rms wavelength width.
  const double dl = gaussian_wavelength_width(p, 1550e-9);
  CHECK(temporal_width(p, d) == doctest::Approx(broadening_from_coefficient(17, 1e5, dl)).epsilon(1e-5));
}

TEST_CASE("broadening of a 100 GHz source over 100 km") {
  const double c = 2.99792458e8;
  const double dlambda = 1550e-9 * 1550e-9 * 100e9 / c;  // 0.801 nm
  CHECK(dlambda == doctest::Approx(0.8014e-9).epsilon(1e-3));
  // 18 ps/(km nm) = 18e-12 s / (1e3 m * 1e-9 m)
  const double expected = 18e-12 / (1e3 * 1e-9) * 1e5 * dlambda;
  CHECK(broadening_from_coefficient(18, 1e5, dlambda) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(broadening_from_coefficient(18, 1e5, dlambda) == doctest::Approx(1.44e-9).epsilon(3e-3));
}

TEST_CASE("chirp phase") {
  const PulseModel p = baseline_pulse();
  FiberDispersion d = FiberDispersion::from_coefficient(17, 1550e-9, 1.468, 1e5);
  const double centre = d.length / d.group_velocity + p.peak_time;
  const double t0 = p.initial_temporal_width();
  CHECK(chirp_phase(d, p, centre) ==
        doctest::Approx(-0.5 * std::atan(d.rho * d.length / (2 * t0 * t0))).epsilon(1e-15));
  d.rho = 0.0;
  for (double t : {0.0, centre, centre + 1e-9}) CHECK(chirp_phase(d, p, t) == 0.0);
}

TEST_CASE("chirp mismatch between equal fibers at the alignment bound is negligible") {
  const PulseModel p = baseline_pulse();
  const FiberOptical optical;
  const AlignmentTolerance tol =
      required_alignment({1e5, 1.0, pi / 2}, optical, SpoolGeometry{}, PhotonKinematics{});
  const FiberDispersion a = FiberDispersion::from_coefficient(17, 1550e-9, 1.468, 1e5);
  FiberDispersion b = a;
  b.length += tol.optical_path_difference / optical.group_index;
  const double tau = temporal_width(p, a);
  const double centre = a.length / a.group_velocity;
  double worst = 0.0;
  for (int k = -300; k <= 300; ++k) {
    const double t = centre + tau * k / 100.0;
    // Compare the packets at the same offset from their own centres.
    const double tb = t + (b.length - a.length) / b.group_velocity;
    worst = std::max(worst, std::abs(chirp_phase(b, p, tb) - chirp_phase(a, p, t)));
  }
  CHECK(worst * 100 < tol.gravitational_phase);
}

TEST_CASE("dispersive probability limits") {
  const double w0 = baseline_pulse().central_frequency;
  auto p = dispersive_detection_probability(1e-9, 1e-9, 0.0, 0.0, w0);
  CHECK(p.visibility == 1.0);
  CHECK(p.plus == 1.0);
  CHECK(p.minus == 0.0);
  p = dispersive_detection_probability(1e-12, 1e-3, 0.0, 0.0, w0);
  CHECK(p.visibility < 1e-4);
  CHECK(p.plus == doctest::Approx(0.5).epsilon(1e-4));
  CHECK_THROWS_AS(dispersive_detection_probability(0.0, 1e-9, 0.0, 0.0, w0), DomainError);
}

TEST_CASE("dispersive probability matches the flux of the overlapping packets") {
  const PulseModel p = baseline_pulse();
  const double w0 = p.central_frequency;
  const double t0 = p.initial_temporal_width();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double tau = t0 * (1 + 20 * u(rng));
    const double tau_p = t0 * (1 + 20 * u(rng));
    const double spread = std::sqrt(tau * tau + tau_p * tau_p);
    const double dphi = (u(rng) * 6 - 3) * w0 * spread;
    const double noise = 2 * pi * u(rng);
    const FiberDispersion fa = fiber_for_width(p, tau);
    const FiberDispersion fb = fiber_for_width(p, tau_p);
    const double delay = dphi / w0;
    const double centre = fa.length / fa.group_velocity;
    const std::complex<double> rel = std::polar(1.0, -(dphi + noise));
    auto flux = [&](double sign) {
      return [&, sign](double x) {
        const double t = centre + x * spread;
        const std::complex<double> f = temporal_amplitude(p, fa, t, false);
        const std::complex<double> g = temporal_amplitude(p, fb, t - delay, false) * rel;
        return 0.25 * std::norm(f + sign * g) * spread;
      };
    };
    const double lo = std::min(0.0, delay / spread) - 15, hi = std::max(0.0, delay / spread) + 15;
    const double plus = gauss_kronrod<double, 61>::integrate(flux(1.0), lo, hi, 15, 1e-13);
    const double minus = gauss_kronrod<double, 61>::integrate(flux(-1.0), lo, hi, 15, 1e-13);
    const auto model = dispersive_detection_probability(tau, tau_p, dphi, noise, w0);
    CHECK(std::abs(plus - model.plus) <= 1e-9);
    CHECK(std::abs(minus - model.minus) <= 1e-9);
    CHECK(model.visibility <= 1.0);
  }
}

TEST_CASE("dispersion penalty for 100 km fibers") {
  const PulseModel p = baseline_pulse();
  const double dlambda = 1550e-9 * 1550e-9 * 100e9 / 2.99792458e8;
  const double tau = std::hypot(p.initial_temporal_width(), broadening_from_coefficient(17, 1e5, dlambda));
  const double tau_p = std::hypot(p.initial_temporal_width(), broadening_from_coefficient(18, 1e5, dlambda));
  const double dphi = gravitational_phase({1e5, 1.0, pi / 2}, FiberOptical{});
  const auto seven = dispersive_detection_probability(tau, tau_p, dphi, pi / 2, p.central_frequency);
  const auto two = detection_probabilities(dphi, pi / 2, 0.5);
  const double shift = std::abs(two.plus - 0.5);
  CHECK(std::abs(seven.plus - two.plus) <= 1e-2 * shift);
  CHECK(seven.visibility > 0.99);
}

TEST_CASE("delay phase and validation") {
  CHECK(delay_phase(1.0, 2e8, 1e15) == doctest::Approx(5e6));
  CHECK_THROWS_AS(delay_phase(1.0, 0.0, 1e15), DomainError);
  BeamSplitterCoeffs bs;
  CHECK_NOTHROW(bs.validate());
  bs.reflection = {0.9, 0.0};
  CHECK_THROWS_AS(bs.validate(), DomainError);
  PulseModel bad;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  FiberDispersion fast;
  fast.group_velocity = 4e8;
  CHECK_THROWS_AS(fast.validate(), DomainError);
}
