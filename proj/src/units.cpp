#include "fiberphase/units.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

#include "fiberphase/errors.hpp"

namespace fiberphase {

namespace {

using Entry = std::pair<std::string_view, double>;

constexpr double kDeg = std::numbers::pi / 180.0;

constexpr Entry kLength[] = {{"m", 1.0},     {"km", 1e3},    {"cm", 1e-2}, {"mm", 1e-3},
                             {"um", 1e-6},   {"nm", 1e-9},   {"pm", 1e-12}};
constexpr Entry kAngle[] = {{"rad", 1.0},   {"mrad", 1e-3},        {"urad", 1e-6},
                            {"deg", kDeg},  {"mdeg", 1e-3 * kDeg}, {"pi", std::numbers::pi}};
constexpr Entry kTime[] = {{"s", 1.0},    {"ms", 1e-3},     {"us", 1e-6},   {"ns", 1e-9},
                           {"ps", 1e-12}, {"fs", 1e-15},    {"min", 60.0},  {"h", 3600.0},
                           {"day", 86400.0}, {"days", 86400.0}};
constexpr Entry kFrequency[] = {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}, {"THz", 1e12}};
constexpr Entry kAngularRate[] = {{"rad/s", 1.0}, {"Grad/s", 1e9}, {"deg/s", kDeg}};
constexpr Entry kSpeed[] = {{"m/s", 1.0}, {"km/s", 1e3}};
constexpr Entry kAcceleration[] = {{"m/s^2", 1.0}, {"m/s2", 1.0}};
constexpr Entry kCountRate[] = {{"1/s", 1.0}, {"/s", 1.0}, {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}};
constexpr Entry kDecibel[] = {{"dB", 1.0}};
constexpr Entry kAttenuation[] = {{"dB/km", 1.0}, {"dB/m", 1e3}};
constexpr Entry kDispersion[] = {{"ps/(km nm)", 1.0}, {"ps/(km*nm)", 1.0}, {"ps/km/nm", 1.0},
                                 {"s/m^2", 1e6}};
constexpr Entry kDimensionless[] = {{"", 1.0}};

template <std::size_t N>
const Entry* find(const Entry (&table)[N], std::string_view unit) {
  for (const Entry& e : table)
    if (e.first == unit) return &e;
  return nullptr;
}

const Entry* lookup(Dimension dim, std::string_view unit) {
  switch (dim) {
    case Dimension::dimensionless: return find(kDimensionless, unit);
    case Dimension::length: return find(kLength, unit);
    case Dimension::angle: return find(kAngle, unit);
    case Dimension::time: return find(kTime, unit);
    case Dimension::frequency: return find(kFrequency, unit);
    case Dimension::angular_rate: return find(kAngularRate, unit);
    case Dimension::speed: return find(kSpeed, unit);
    case Dimension::acceleration: return find(kAcceleration, unit);
    case Dimension::count_rate: return find(kCountRate, unit);
    case Dimension::decibel: return find(kDecibel, unit);
    case Dimension::attenuation: return find(kAttenuation, unit);
    case Dimension::dispersion: return find(kDispersion, unit);
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::angle: return "angle";
    case Dimension::time: return "time";
    case Dimension::frequency: return "frequency";
    case Dimension::angular_rate: return "angular rate";
    case Dimension::speed: return "speed";
    case Dimension::acceleration: return "acceleration";
    case Dimension::count_rate: return "count rate";
    case Dimension::decibel: return "decibel";
    case Dimension::attenuation: return "attenuation";
    case Dimension::dispersion: return "dispersion";
  }
  return "?";
}

double parse_quantity(std::string_view text, Dimension dim) {
  const std::string_view s = trim(text);
  if (s.empty()) throw DomainError("empty quantity");
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr == s.data())
    throw DomainError("malformed number in '" + std::string(s) + "'");
  if (!std::isfinite(value)) throw DomainError("non-finite value in '" + std::string(s) + "'");
  const std::string_view unit = trim(s.substr(static_cast<std::size_t>(ptr - s.data())));
  if (unit.empty()) return value;
  const Entry* e = lookup(dim, unit);
  if (e == nullptr)
    throw DomainError("unit '" + std::string(unit) + "' is not a " + to_string(dim) + " unit");
  return value * e->second;
}

}  // namespace fiberphase
