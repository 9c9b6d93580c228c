#pragma once

// Phase-noise spectral density of the long fiber arms, its band-integrated rms,
// and the choice of the switch modulation frequency.
//
// The default model is a reconstruction: three power-law segments (1/f power
// below the low knee, a plateau, a steep roll-off above the high knee) anchored
// at 1e-6 rad/sqrt(Hz) at 100 kHz for 200 km of fiber. Measured or theoretical
// curves can replace it through the tabulated CSV path.

#include <iosfwd>
#include <string>
#include <vector>

namespace fiberphase {

struct FiberThermalParams {
  double thermal_conductivity = 1.37;  // W/(m K)
  double dn_dT = 9.52e-6;              // 1/K
  double refractive_index = 1.468;
  double linear_expansion = 5e-7;      // 1/K
  double thermal_diffusivity = 0.82e-6;  // m^2/s
  double mode_field_radius = 5.2e-6;   // m
  double fiber_outer_radius = 62.5e-6; // m
  double total_length = 200e3;         // 2l, m
  double wavelength = 1550e-9;         // m

  void validate() const;
};

enum class PsdProvenance { parametric, tabulated };

/// Amplitude spectral density a(f) = amplitude_at_ref * (f / ref_freq)^slope on [f_lo, f_hi).
struct PsdSegment {
  double f_lo = 0.0;
  double f_hi = 0.0;
  double amplitude_at_ref = 0.0;  // rad/sqrt(Hz)
  double ref_freq = 0.0;          // Hz
  double slope = 0.0;             // exponent of the amplitude

  double amplitude(double f) const;
};

class NoisePsdModel {
public:
  NoisePsdModel(std::vector<PsdSegment> segments, PsdProvenance provenance);

  /// rad/sqrt(Hz); throws DomainError outside the support.
  double amplitude(double f) const;
  /// rad^2/Hz.
  double power(double f) const { const double a = amplitude(f); return a * a; }

  double support_lo() const { return segments_.front().f_lo; }
  double support_hi() const { return segments_.back().f_hi; }
  const std::vector<PsdSegment>& segments() const { return segments_; }
  PsdProvenance provenance() const { return provenance_; }

private:
  std::vector<PsdSegment> segments_;
  PsdProvenance provenance_;
};

struct PsdShape {
  double low_knee = 1e3;         // Hz, end of the 1/f-power segment
  double high_knee = 1e5;        // Hz, start of the roll-off
  double anchor_amplitude = 1e-6;  // rad/sqrt(Hz) on the plateau for the reference length
  double reference_length = 200e3; // m
  double rolloff_slope = -2.0;   // amplitude exponent above the high knee
  double support_lo = 1e-2;      // Hz
  double support_hi = 1e8;       // Hz
};

/// Parametric three-segment model; the plateau scales as sqrt(total_length / reference_length).
NoisePsdModel default_psd(const FiberThermalParams& params, const PsdShape& shape = {});

/// Two-column CSV `freq_hz,amp_rad_per_sqrthz`, strictly increasing frequency,
/// interpolated linearly in log-log space.
NoisePsdModel read_tabulated_psd(std::istream& in);
NoisePsdModel load_tabulated_psd(const std::string& path);

/// sqrt of the integral of the power spectral density over [f_lo, f_hi].
double band_rms_phase(const NoisePsdModel& psd, double f_lo, double f_hi);

struct NoiseMargin {
  double ratio = 0.0;
  bool pass = false;
};

/// grav_phase / rms, passing at or above `threshold`.
NoiseMargin noise_margin(double grav_phase, double rms, double threshold = 10.0);

/// Grid search over `grid_points` log-spaced centres in [band_lo, band_hi] for the
/// centre whose window of width `bandwidth` has the lowest rms. Ties go to the
/// lowest frequency.
double choose_modulation_frequency(const NoisePsdModel& psd, double band_lo, double band_hi,
                                   double bandwidth, int grid_points = 401);

}  // namespace fiberphase
