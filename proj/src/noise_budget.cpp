#include "fiberphase/noise_budget.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fiberphase/errors.hpp"

namespace fiberphase {

void FiberThermalParams::validate() const {
  for (double v : {thermal_conductivity, dn_dT, refractive_index, linear_expansion,
                   thermal_diffusivity, mode_field_radius, fiber_outer_radius, total_length,
                   wavelength})
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("fiber thermal parameters must be strictly positive");
}

double PsdSegment::amplitude(double f) const {
  return amplitude_at_ref * std::pow(f / ref_freq, slope);
}

NoisePsdModel::NoisePsdModel(std::vector<PsdSegment> segments, PsdProvenance provenance)
    : segments_(std::move(segments)), provenance_(provenance) {
  if (segments_.empty()) throw DomainError("PSD model needs at least one segment");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const PsdSegment& s = segments_[i];
    if (!(s.f_lo > 0.0 && s.f_lo < s.f_hi)) throw DomainError("PSD segments need 0 < f_lo < f_hi");
    if (!(s.amplitude_at_ref >= 0.0) || !(s.ref_freq > 0.0))
      throw DomainError("PSD amplitudes must be non-negative");
    if (i > 0 && s.f_lo != segments_[i - 1].f_hi) throw DomainError("PSD segments must be contiguous");
  }
}

double NoisePsdModel::amplitude(double f) const {
  if (!(f >= support_lo() && f <= support_hi()))
    throw DomainError("frequency " + std::to_string(f) + " Hz outside PSD support");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), f,
                             [](double x, const PsdSegment& s) { return x < s.f_hi; });
  if (it == segments_.end()) --it;
  return it->amplitude(f);
}

NoisePsdModel default_psd(const FiberThermalParams& params, const PsdShape& shape) {
  params.validate();
  if (!(shape.support_lo < shape.low_knee && shape.low_knee < shape.high_knee &&
        shape.high_knee < shape.support_hi))
    throw DomainError("PSD knees must be ordered inside the support");
  const double plateau =
      shape.anchor_amplitude * std::sqrt(params.total_length / shape.reference_length);
  std::vector<PsdSegment> segments{
      {shape.support_lo, shape.low_knee, plateau, shape.low_knee, -0.5},
      {shape.low_knee, shape.high_knee, plateau, shape.high_knee, 0.0},
      {shape.high_knee, shape.support_hi, plateau, shape.high_knee, shape.rolloff_slope},
  };
  return NoisePsdModel(std::move(segments), PsdProvenance::parametric);
}

NoisePsdModel read_tabulated_psd(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ConfigError("", 1, "empty PSD table");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "freq_hz,amp_rad_per_sqrthz")
    throw ConfigError("header", line_no, "expected header 'freq_hz,amp_rad_per_sqrthz'");

  std::vector<double> freq;
  std::vector<double> amp;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f_text, a_text;
    if (!std::getline(row, f_text, ',') || !std::getline(row, a_text))
      throw ConfigError("row", line_no, "expected two comma-separated columns");
    double f = 0.0, a = 0.0;
    try {
      std::size_t used_f = 0, used_a = 0;
      f = std::stod(f_text, &used_f);
      a = std::stod(a_text, &used_a);
      if (used_f != f_text.size() || used_a != a_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("row", line_no, "non-numeric value");
    }
    if (!(f > 0.0) || !(a > 0.0))
      throw ConfigError("row", line_no, "frequency and amplitude must be positive for log-log interpolation");
    if (!freq.empty() && !(f > freq.back()))
      throw ConfigError("freq_hz", line_no, "frequencies must be strictly increasing");
    freq.push_back(f);
    amp.push_back(a);
  }
  if (freq.size() < 2) throw ConfigError("", line_no, "PSD table needs at least two rows");

  std::vector<PsdSegment> segments;
  for (std::size_t i = 0; i + 1 < freq.size(); ++i) {
    const double slope = std::log(amp[i + 1] / amp[i]) / std::log(freq[i + 1] / freq[i]);
    segments.push_back({freq[i], freq[i + 1], amp[i], freq[i], slope});
  }
  return NoisePsdModel(std::move(segments), PsdProvenance::tabulated);
}

NoisePsdModel load_tabulated_psd(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open PSD table " + path);
  return read_tabulated_psd(in);
}

namespace {

// Integral of (A (f/r)^s)^2 over [a, b].
double segment_power(const PsdSegment& s, double a, double b) {
  const double A2 = s.amplitude_at_ref * s.amplitude_at_ref;
  const double p = 2.0 * s.slope;
  if (std::abs(p + 1.0) < 1e-12) return A2 * s.ref_freq * std::log(b / a);
  const double q = p + 1.0;
  return A2 * s.ref_freq / q * (std::pow(b / s.ref_freq, q) - std::pow(a / s.ref_freq, q));
}

}  // namespace

double band_rms_phase(const NoisePsdModel& psd, double f_lo, double f_hi) {
  if (!(f_lo <= f_hi)) throw DomainError("band needs f_lo <= f_hi");
  if (!(f_lo >= psd.support_lo() && f_hi <= psd.support_hi()))
    throw DomainError("band outside PSD support");
  double total = 0.0;
  for (const PsdSegment& s : psd.segments()) {
    const double a = std::max(f_lo, s.f_lo);
    const double b = std::min(f_hi, s.f_hi);
    if (b > a) total += segment_power(s, a, b);
  }
  return std::sqrt(total);
}

NoiseMargin noise_margin(double grav_phase, double rms, double threshold) {
  if (!(rms > 0.0)) throw DomainError("rms phase noise must be positive");
  NoiseMargin m;
  m.ratio = std::abs(grav_phase) / rms;
  m.pass = m.ratio >= threshold;
  return m;
}

double choose_modulation_frequency(const NoisePsdModel& psd, double band_lo, double band_hi,
                                   double bandwidth, int grid_points) {
  if (!(band_lo > 0.0 && band_lo <= band_hi)) throw DomainError("invalid candidate band");
  if (!(bandwidth > 0.0)) throw DomainError("measurement bandwidth must be positive");
  if (grid_points < 2) throw DomainError("need at least two grid points");
  if (band_lo - 0.5 * bandwidth < psd.support_lo() || band_hi + 0.5 * bandwidth > psd.support_hi())
    throw DomainError("candidate windows leave the PSD support");

  double best_f = band_lo;
  double best_rms = band_rms_phase(psd, band_lo - 0.5 * bandwidth, band_lo + 0.5 * bandwidth);
  const double ratio = std::log(band_hi / band_lo);
  for (int i = 1; i < grid_points; ++i) {
    const double f = i + 1 == grid_points
                         ? band_hi
                         : band_lo * std::exp(ratio * static_cast<double>(i) / (grid_points - 1));
    const double rms = band_rms_phase(psd, f - 0.5 * bandwidth, f + 0.5 * bandwidth);
    // Strictly better by more than rounding noise; equal values keep the lower frequency.
    if (rms < best_rms * (1.0 - 1e-12)) {
      best_rms = rms;
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace fiberphase
