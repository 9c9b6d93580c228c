#include "fiberphase/dispersion.hpp"

#include <cmath>
#include <numbers>

#include "fiberphase/errors.hpp"

namespace fiberphase {

namespace {
constexpr double kPi = std::numbers::pi;
// FWHM of a Gaussian intensity in units of its standard deviation.
const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);
}  // namespace

void PulseModel::validate() const {
  if (!(spectral_std > 0.0) || !std::isfinite(spectral_std))
    throw DomainError("spectral width must be positive");
  if (!(central_frequency >= 0.0)) throw DomainError("central frequency must be non-negative");
}

PulseModel PulseModel::from_bandwidth(double wavelength, double bandwidth_hz, double peak_time,
                                      const PhysicalConstants& consts) {
  if (!(wavelength > 0.0) || !(bandwidth_hz > 0.0))
    throw DomainError("wavelength and bandwidth must be positive");
  PulseModel p;
  p.central_frequency = 2.0 * kPi * consts.c / wavelength;
  p.spectral_std = 2.0 * kPi * bandwidth_hz / kFwhmPerSigma;
  p.peak_time = peak_time;
  return p;
}

double FiberDispersion::dispersion_coefficient(double wavelength,
                                               const PhysicalConstants& consts) const {
  return -2.0 * kPi * consts.c * rho / (wavelength * wavelength) * 1e6;
}

void FiberDispersion::validate(const PhysicalConstants& consts) const {
  if (!(group_velocity > 0.0 && group_velocity <= consts.c))
    throw DomainError("group velocity must lie in (0, c]");
  if (!(length >= 0.0)) throw DomainError("fiber length must be non-negative");
  if (!std::isfinite(rho)) throw DomainError("rho must be finite");
  if (!(source_bandwidth >= 0.0)) throw DomainError("source bandwidth must be non-negative");
}

FiberDispersion FiberDispersion::from_coefficient(double dm_ps_per_km_nm, double wavelength,
                                                  double group_index, double length,
                                                  double source_bandwidth,
                                                  const PhysicalConstants& consts) {
  if (!(wavelength > 0.0) || !(group_index >= 1.0))
    throw DomainError("invalid wavelength or group index");
  FiberDispersion d;
  d.rho = -dm_ps_per_km_nm * 1e-6 * wavelength * wavelength / (2.0 * kPi * consts.c);
  d.group_velocity = consts.c / group_index;
  d.k0 = 2.0 * kPi * group_index / wavelength;
  d.length = length;
  d.source_bandwidth = source_bandwidth;
  return d;
}

void BeamSplitterCoeffs::validate() const {
  if (std::abs(std::norm(reflection) + std::norm(transmission) - 1.0) > 1e-12)
    throw DomainError("beam splitter must satisfy |R|^2 + |T|^2 = 1");
}

std::complex<double> spectral_amplitude(const PulseModel& pulse, double omega) {
  const double s = pulse.spectral_std;
  const double x = omega - pulse.central_frequency;
  const double norm = std::pow(2.0 * kPi * s * s, -0.25);
  return norm * std::exp(std::complex<double>(-x * x / (4.0 * s * s), -x * pulse.peak_time));
}

double temporal_width(const PulseModel& pulse, const FiberDispersion& disp) {
  const double t0 = pulse.initial_temporal_width();
  return std::hypot(t0, disp.rho * disp.length / (2.0 * t0));
}

double broadening_from_coefficient(double dm_ps_per_km_nm, double length_m, double bandwidth_m) {
  // ps/(km nm) -> s/m^2
  return dm_ps_per_km_nm * 1e-6 * length_m * bandwidth_m;
}

double gaussian_wavelength_width(const PulseModel& pulse, double wavelength,
                                 const PhysicalConstants& consts) {
  return pulse.spectral_std * wavelength * wavelength / (2.0 * kPi * consts.c);
}

double chirp_phase(const FiberDispersion& disp, const PulseModel& pulse, double t) {
  const double t0 = pulse.initial_temporal_width();
  const double rz = disp.rho * disp.length;
  const double tau = temporal_width(pulse, disp);
  const double s = t - disp.length / disp.group_velocity - pulse.peak_time;
  return -0.5 * std::atan(rz / (2.0 * t0 * t0)) + rz * s * s / (8.0 * t0 * t0 * tau * tau);
}

std::complex<double> temporal_amplitude(const PulseModel& pulse, const FiberDispersion& disp,
                                        double t, bool include_chirp, bool include_carrier) {
  const double tau = temporal_width(pulse, disp);
  const double s = t - disp.length / disp.group_velocity - pulse.peak_time;
  const double envelope =
      std::pow(2.0 * kPi * tau * tau, -0.25) * std::exp(-s * s / (4.0 * tau * tau));
  double phase = include_chirp ? chirp_phase(disp, pulse, t) : 0.0;
  if (include_carrier) phase += pulse.central_frequency * t - disp.k0 * disp.length;
  return std::polar(envelope, phase);
}

DispersiveProbabilities dispersive_detection_probability(double tau, double tau_prime,
                                                         double phase_difference,
                                                         double noise_phase,
                                                         double central_frequency) {
  if (!(tau > 0.0) || !(tau_prime > 0.0)) throw DomainError("pulse widths must be positive");
  if (!(central_frequency > 0.0)) throw DomainError("central frequency must be positive");
  const double sum_sq = tau * tau + tau_prime * tau_prime;
  const double delay = phase_difference / central_frequency;
  DispersiveProbabilities p;
  p.visibility = std::sqrt(2.0 * tau * tau_prime / sum_sq) * std::exp(-delay * delay / (4.0 * sum_sq));
  const double fringe = 0.5 * p.visibility * std::cos(phase_difference + noise_phase);
  p.plus = 0.5 + fringe;
  p.minus = 0.5 - fringe;
  return p;
}

double delay_phase(double path_difference, double group_velocity, double central_frequency) {
  if (!(group_velocity > 0.0)) throw DomainError("group velocity must be positive");
  return central_frequency * path_difference / group_velocity;
}

}  // namespace fiberphase
