#pragma once

// Gaussian single-photon wave packets in a fiber with second-order dispersion,
// and the detection probability of a Mach-Zehnder whose arms broaden the packet
// differently.

#include <complex>

#include "fiberphase/phase_core.hpp"

namespace fiberphase {

struct PulseModel {
  double central_frequency = 0.0;  // omega_0, rad/s
  double spectral_std = 0.0;       // sigma of |f(omega)|^2, rad/s
  double peak_time = 0.0;          // t_0, s

  /// tau_0 = 1 / (2 sigma): rms width of |f(z=0, t)|^2.
  double initial_temporal_width() const noexcept { return 0.5 / spectral_std; }
  void validate() const;

  /// Pulse whose spectral intensity has full width at half maximum `bandwidth_hz`.
  static PulseModel from_bandwidth(double wavelength, double bandwidth_hz, double peak_time = 0.0,
                                   const PhysicalConstants& consts = {});
};

struct FiberDispersion {
  double rho = 0.0;              // d^2k/domega^2 at omega_0, s^2/m
  double group_velocity = 0.0;   // v_g, m/s
  double k0 = 0.0;               // k(omega_0), rad/m
  double length = 0.0;           // z, m
  double source_bandwidth = 0.0; // delta lambda, m

  /// D_m = -(2 pi c rho / lambda^2) * 1e6, in ps/(km nm).
  double dispersion_coefficient(double wavelength, const PhysicalConstants& consts = {}) const;
  void validate(const PhysicalConstants& consts = {}) const;

  /// Fiber with dispersion coefficient `dm_ps_per_km_nm`, group index `group_index`.
  static FiberDispersion from_coefficient(double dm_ps_per_km_nm, double wavelength,
                                          double group_index, double length,
                                          double source_bandwidth = 0.0,
                                          const PhysicalConstants& consts = {});
};

struct BeamSplitterCoeffs {
  std::complex<double> reflection{1.0 / 1.4142135623730951, 0.0};
  std::complex<double> transmission{0.0, 1.0 / 1.4142135623730951};

  /// Throws DomainError unless |R|^2 + |T|^2 = 1 to 1e-12.
  void validate() const;
};

/// Spectral amplitude (2 pi sigma^2)^(-1/4) exp(-i (w - w0) t0 - (w - w0)^2 / (4 sigma^2)),
/// normalised so that the integral of |f|^2 over omega is one.
std::complex<double> spectral_amplitude(const PulseModel& pulse, double omega);

/// tau(z) = sqrt(tau_0^2 + (rho z / (2 tau_0))^2).
double temporal_width(const PulseModel& pulse, const FiberDispersion& disp);

/// Broadening D_m l delta_lambda for an arbitrary spectral shape, in seconds.
double broadening_from_coefficient(double dm_ps_per_km_nm, double length_m, double bandwidth_m);

/// Wavelength rms width matching the spectral std of a Gaussian pulse.
double gaussian_wavelength_width(const PulseModel& pulse, double wavelength,
                                 const PhysicalConstants& consts = {});

/// Phase remainder Xi(z, t) = -1/2 atan(rho z / (2 tau_0^2)) + rho z s^2 / (8 tau_0^2 tau(z)^2),
/// with s = t - z / v_g - t_0.
double chirp_phase(const FiberDispersion& disp, const PulseModel& pulse, double t);

/// Propagated wave packet f(z, t). With `include_carrier` false the factor
/// exp(i (omega_0 t - k_0 z)) is dropped.
std::complex<double> temporal_amplitude(const PulseModel& pulse, const FiberDispersion& disp,
                                        double t, bool include_chirp = true,
                                        bool include_carrier = false);

struct DispersiveProbabilities {
  double plus = 0.0;
  double minus = 0.0;
  double visibility = 1.0;
};

/// P+- = 1/2 (1 +- V cos(dphi + noise)), V = sqrt(2 tau tau' / (tau^2 + tau'^2))
///   exp(-dphi^2 / (4 omega_0^2 (tau^2 + tau'^2))).
/// The exponent treats dphi / omega_0 as the delay between the two packets.
DispersiveProbabilities dispersive_detection_probability(double tau, double tau_prime,
                                                         double phase_difference,
                                                         double noise_phase,
                                                         double central_frequency);

/// Delay phase omega_0 dl / v_g for an optical path difference between the arms.
double delay_phase(double path_difference, double group_velocity, double central_frequency);

}  // namespace fiberphase
