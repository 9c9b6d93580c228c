#include "fiberphase/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "fiberphase/errors.hpp"
#include "fiberphase/units.hpp"

#ifndef FIBERPHASE_DEFAULT_SCENARIO_DIR
#define FIBERPHASE_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace fiberphase {

namespace {

constexpr double kDefaultDispersion = 17.0;       // ps/(km nm), standard single-mode fiber
constexpr double kDefaultDispersionOther = 18.0;  // second arm, different fiber batch

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

// One mapping of the YAML document with its dotted path and the keys it accepts.
class Section {
public:
  Section(YAML::Node node, std::string path, std::set<std::string> keys, bool present = true)
      : node_(std::move(node)), path_(std::move(path)), keys_(std::move(keys)), present_(present) {
    if (!present_ || node_.IsNull()) {
      present_ = false;
      return;
    }
    if (!node_.IsMap()) throw ConfigError(path_, line_of(node_), "expected a mapping");
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!keys_.count(key))
        throw ConfigError(field(key), line_of(kv.first), "unknown key");
    }
  }

  bool present() const { return present_; }
  bool has(const std::string& key) const { return present_ && node_[key]; }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  std::optional<double> quantity(const std::string& key, Dimension dim) const {
    if (!has(key)) return std::nullopt;
    return convert(node_[key], field(key), dim);
  }

  template <typename T>
  void read(const std::string& key, Dimension dim, T& out) const {
    if (auto v = quantity(key, dim)) out = *v;
  }

  std::optional<std::string> text(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const YAML::Node n = node_[key];
    if (!n.IsScalar()) throw ConfigError(field(key), line_of(n), "expected a string");
    return n.as<std::string>();
  }

  std::optional<std::vector<double>> list(const std::string& key, Dimension dim) const {
    if (!has(key)) return std::nullopt;
    const YAML::Node n = node_[key];
    if (!n.IsSequence()) throw ConfigError(field(key), line_of(n), "expected a list");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i)
      out.push_back(convert(n[i], field(key) + "[" + std::to_string(i) + "]", dim));
    return out;
  }

  Section child(const std::string& key, std::set<std::string> keys) const {
    if (!has(key)) return Section(YAML::Node(), field(key), std::move(keys), false);
    return Section(node_[key], field(key), std::move(keys));
  }

  int line(const std::string& key) const {
    if (has(key)) return line_of(node_[key]);
    return present_ ? line_of(node_) : 0;
  }

  static double convert(const YAML::Node& n, const std::string& name, Dimension dim) {
    if (!n.IsScalar()) throw ConfigError(name, line_of(n), "expected a scalar quantity");
    try {
      return parse_quantity(n.as<std::string>(), dim);
    } catch (const DomainError& e) {
      throw ConfigError(name, line_of(n), e.what());
    }
  }

private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> keys_;
  bool present_;
};

// Re-raises component invariant failures against the field that set them.
template <typename F>
void check(const std::string& field, int line, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(field, line, e.what());
  }
}

// Per-key checks, run before derived quantities are built so that errors name the key.
void check_fields(const ExperimentScenario& s) {
  const auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, 0, what);
  };
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  const auto non_negative = [](double v) { return v >= 0.0 && std::isfinite(v); };
  require(non_negative(s.geometry.arm_length), "interferometer.arm_length", "must be non-negative");
  require(non_negative(s.geometry.arm_separation), "interferometer.arm_separation",
          "must be non-negative");
  require(s.fiber.group_index >= 1.0 && std::isfinite(s.fiber.group_index), "fiber.group_index",
          "must be >= 1");
  require(positive(s.fiber.wavelength), "fiber.wavelength", "must be positive");
  require(non_negative(s.fiber.attenuation_db_per_km), "fiber.attenuation", "must be non-negative");
  require(positive(s.spools[0].radius), "spool.radius", "must be positive");
  require(positive(s.source.rate), "source.rate", "must be positive");
  require(positive(s.source.bandwidth), "source.bandwidth", "must be positive");
  require(s.detector.efficiency > 0.0 && s.detector.efficiency <= 1.0, "detector.efficiency",
          "must lie in (0, 1]");
  require(non_negative(s.detector.dark_rate), "detector.dark_rate", "must be non-negative");
  require(non_negative(s.attenuation.component_losses), "attenuation.component_losses",
          "must be non-negative");
  require(positive(s.switch_schedule.modulation_frequency), "switch.modulation_frequency",
          "must be positive");
  require(s.switch_schedule.duty > 0.0 && s.switch_schedule.duty < 1.0, "switch.duty",
          "must lie in (0, 1)");
}

}  // namespace

ExperimentScenario ExperimentScenario::defaults() {
  ExperimentScenario s;
  const double l = s.geometry.arm_length;
  for (PhotonKinematics& k : s.kinematics) {
    k.fiber_length = l;
    k.group_index = s.fiber.group_index;
  }
  s.pulse = PulseModel::from_bandwidth(s.fiber.wavelength, s.source.bandwidth, 0.0, s.constants);
  const double dl = s.source_linewidth();
  s.dispersion[0] = FiberDispersion::from_coefficient(kDefaultDispersion, s.fiber.wavelength,
                                                      s.fiber.group_index, l, dl, s.constants);
  s.dispersion[1] = FiberDispersion::from_coefficient(kDefaultDispersionOther, s.fiber.wavelength,
                                                      s.fiber.group_index, l, dl, s.constants);
  s.thermal.total_length = 2.0 * l;
  s.thermal.wavelength = s.fiber.wavelength;
  s.thermal.refractive_index = s.fiber.group_index;
  s.attenuation.arm_length = l;
  s.attenuation.fiber_alpha = s.fiber.attenuation_db_per_km;
  return s;
}

double ExperimentScenario::source_linewidth() const {
  return fiber.wavelength * fiber.wavelength * source.bandwidth / constants.c;
}

void ExperimentScenario::validate() const {
  check_fields(*this);
  check("constants", 0, [&] { constants.validate(); });
  check("interferometer", 0, [&] { geometry.validate(); });
  if (!(arm2_separation >= 0.0))
    throw ConfigError("interferometer.arm2_separation", 0, "must be non-negative");
  check("fiber", 0, [&] { fiber.validate(); });
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string arm = i == 0 ? "spool (arm 1)" : "spool (arm 3)";
    check(arm, 0, [&] {
      spools[i].validate();
      kinematics[i].validate(spools[i].radius, constants.c);
    });
    check(i == 0 ? "fiber.dispersion" : "fiber.dispersion_other", 0,
          [&] { dispersion[i].validate(constants); });
  }
  check("source", 0, [&] { pulse.validate(); source.validate(); });
  if (!(polarization_visibility > 0.0 && polarization_visibility <= 1.0))
    throw ConfigError("fiber.polarization_visibility", 0, "must lie in (0, 1]");
  check("thermal", 0, [&] { thermal.validate(); });
  if (!(detection_bandwidth > 0.0))
    throw ConfigError("noise.detection_bandwidth", 0, "must be positive");
  if (!(noise_threshold > 0.0)) throw ConfigError("noise.threshold", 0, "must be positive");
  check("detector", 0, [&] { detector.validate(); });
  check("attenuation", 0, [&] { attenuation.validate(); });
  check("switch", 0, [&] { switch_schedule.validate(); });
  if (!(residual_noise_rms >= 0.0))
    throw ConfigError("noise.residual_rms", 0, "must be non-negative");
  for (std::size_t i = 0; i < theta_schedule.size(); ++i) {
    const double t = theta_schedule[i];
    if (!(t >= 0.0 && t <= std::numbers::pi / 2 + 1e-15))
      throw ConfigError("interferometer.theta_schedule[" + std::to_string(i) + "]", 0,
                        "inclination " + std::to_string(t) + " rad outside [0, pi/2]");
  }
}

ExperimentScenario parse_scenario(const std::string& yaml_text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, std::string("YAML parse error: ") + e.msg);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  const Section top(root, "",
                    {"name", "constants", "interferometer", "fiber", "spool", "source", "detector",
                     "attenuation", "switch", "noise", "thermal"});

  ExperimentScenario s = ExperimentScenario::defaults();
  if (auto n = top.text("name")) s.name = *n;
  else if (!origin.empty()) s.name = std::filesystem::path(origin).stem().string();

  const Section constants = top.child(
      "constants", {"c", "g", "planck", "earth_radius", "earth_angular_speed"});
  constants.read("c", Dimension::speed, s.constants.c);
  constants.read("g", Dimension::acceleration, s.constants.g);
  constants.read("planck", Dimension::dimensionless, s.constants.planck);
  constants.read("earth_radius", Dimension::length, s.constants.earth_radius);
  constants.read("earth_angular_speed", Dimension::angular_rate, s.constants.earth_angular_speed);

  const Section ifm = top.child(
      "interferometer", {"arm_length", "arm_separation", "arm2_separation", "theta_schedule"});
  ifm.read("arm_length", Dimension::length, s.geometry.arm_length);
  ifm.read("arm_separation", Dimension::length, s.geometry.arm_separation);
  ifm.read("arm2_separation", Dimension::length, s.arm2_separation);
  if (auto thetas = ifm.list("theta_schedule", Dimension::angle)) {
    for (std::size_t i = 0; i < thetas->size(); ++i) {
      const double t = (*thetas)[i];
      if (!(t >= 0.0 && t <= std::numbers::pi / 2 + 1e-15))
        throw ConfigError("interferometer.theta_schedule[" + std::to_string(i) + "]",
                          ifm.line("theta_schedule"), "inclination outside [0, pi/2]");
    }
    s.theta_schedule = *thetas;
  }
  const double l = s.geometry.arm_length;

  const Section fiber = top.child("fiber", {"group_index", "wavelength", "attenuation", "dispersion",
                                            "dispersion_other", "polarization_visibility"});
  fiber.read("group_index", Dimension::dimensionless, s.fiber.group_index);
  fiber.read("wavelength", Dimension::length, s.fiber.wavelength);
  fiber.read("attenuation", Dimension::attenuation, s.fiber.attenuation_db_per_km);
  fiber.read("polarization_visibility", Dimension::dimensionless, s.polarization_visibility);
  const double dm1 = fiber.quantity("dispersion", Dimension::dispersion).value_or(kDefaultDispersion);
  const double dm3 =
      fiber.quantity("dispersion_other", Dimension::dispersion).value_or(kDefaultDispersionOther);

  const Section spool = top.child(
      "spool", {"radius", "axial_offset", "azimuth", "latitude", "initial_earth_angle",
                "entry_planes", "angular_speed", "axial_speed", "winding_pitch", "length_mismatch"});
  SpoolGeometry g;
  spool.read("radius", Dimension::length, g.radius);
  spool.read("axial_offset", Dimension::length, g.axial_offset);
  spool.read("azimuth", Dimension::angle, g.azimuth);
  spool.read("latitude", Dimension::angle, g.latitude);
  spool.read("initial_earth_angle", Dimension::angle, g.initial_earth_angle);
  s.spools = {g, g};
  if (auto planes = spool.list("entry_planes", Dimension::angle)) {
    if (planes->size() != 2)
      throw ConfigError("spool.entry_planes", spool.line("entry_planes"),
                        "expected two angles (arms 1 and 3)");
    s.spools[0].entry_plane = (*planes)[0];
    s.spools[1].entry_plane = (*planes)[1];
  }
  const double mismatch = spool.quantity("length_mismatch", Dimension::length).value_or(0.0);
  PhotonKinematics k;
  if (spool.has("winding_pitch")) {
    if (spool.has("angular_speed") || spool.has("axial_speed"))
      throw ConfigError("spool.winding_pitch", spool.line("winding_pitch"),
                        "give either winding_pitch or angular_speed/axial_speed, not both");
    const double pitch = *spool.quantity("winding_pitch", Dimension::length);
    check("spool.winding_pitch", spool.line("winding_pitch"), [&] {
      k = PhotonKinematics::from_winding(g.radius, pitch, l, s.fiber.group_index, s.constants.c);
    });
  } else {
    spool.read("angular_speed", Dimension::angular_rate, k.angular_speed);
    spool.read("axial_speed", Dimension::speed, k.axial_speed);
  }
  k.fiber_length = l;
  k.group_index = s.fiber.group_index;
  s.kinematics = {k, k};
  s.kinematics[1].fiber_length = l + mismatch;
  if (!(s.kinematics[1].fiber_length > 0.0))
    throw ConfigError("spool.length_mismatch", spool.line("length_mismatch"),
                      "arm 3 fiber length must stay positive");

  const Section source = top.child("source", {"rate", "bandwidth"});
  source.read("rate", Dimension::count_rate, s.source.rate);
  source.read("bandwidth", Dimension::frequency, s.source.bandwidth);

  const Section det = top.child("detector", {"efficiency", "dark_rate"});
  det.read("efficiency", Dimension::dimensionless, s.detector.efficiency);
  det.read("dark_rate", Dimension::count_rate, s.detector.dark_rate);

  const Section att = top.child("attenuation", {"component_losses"});
  att.read("component_losses", Dimension::decibel, s.attenuation.component_losses);
  s.attenuation.fiber_alpha = s.fiber.attenuation_db_per_km;
  s.attenuation.arm_length = l;

  const Section sw = top.child("switch", {"modulation_frequency", "duty", "phase"});
  sw.read("modulation_frequency", Dimension::frequency, s.switch_schedule.modulation_frequency);
  sw.read("duty", Dimension::dimensionless, s.switch_schedule.duty);
  sw.read("phase", Dimension::angle, s.switch_schedule.phase);

  const Section noise = top.child("noise", {"low_knee", "high_knee", "anchor_amplitude",
                                            "reference_length", "rolloff_slope", "support_lo",
                                            "support_hi", "table", "detection_bandwidth",
                                            "threshold", "residual_rms"});
  noise.read("low_knee", Dimension::frequency, s.psd_shape.low_knee);
  noise.read("high_knee", Dimension::frequency, s.psd_shape.high_knee);
  noise.read("anchor_amplitude", Dimension::dimensionless, s.psd_shape.anchor_amplitude);
  noise.read("reference_length", Dimension::length, s.psd_shape.reference_length);
  noise.read("rolloff_slope", Dimension::dimensionless, s.psd_shape.rolloff_slope);
  noise.read("support_lo", Dimension::frequency, s.psd_shape.support_lo);
  noise.read("support_hi", Dimension::frequency, s.psd_shape.support_hi);
  noise.read("detection_bandwidth", Dimension::frequency, s.detection_bandwidth);
  noise.read("threshold", Dimension::dimensionless, s.noise_threshold);
  noise.read("residual_rms", Dimension::angle, s.residual_noise_rms);
  if (auto table = noise.text("table")) {
    std::filesystem::path p(*table);
    if (p.is_relative() && !origin.empty()) p = std::filesystem::path(origin).parent_path() / p;
    s.psd_table = p.string();
  }

  const Section thermal = top.child(
      "thermal", {"thermal_conductivity", "dn_dT", "refractive_index", "linear_expansion",
                  "thermal_diffusivity", "mode_field_radius", "fiber_outer_radius", "total_length"});
  s.thermal.total_length = 2.0 * l;
  s.thermal.wavelength = s.fiber.wavelength;
  s.thermal.refractive_index = s.fiber.group_index;
  thermal.read("thermal_conductivity", Dimension::dimensionless, s.thermal.thermal_conductivity);
  thermal.read("dn_dT", Dimension::dimensionless, s.thermal.dn_dT);
  thermal.read("refractive_index", Dimension::dimensionless, s.thermal.refractive_index);
  thermal.read("linear_expansion", Dimension::dimensionless, s.thermal.linear_expansion);
  thermal.read("thermal_diffusivity", Dimension::dimensionless, s.thermal.thermal_diffusivity);
  thermal.read("mode_field_radius", Dimension::length, s.thermal.mode_field_radius);
  thermal.read("fiber_outer_radius", Dimension::length, s.thermal.fiber_outer_radius);
  thermal.read("total_length", Dimension::length, s.thermal.total_length);

  // Quantities derived from the ones above.
  check_fields(s);
  check("source.bandwidth", source.line("bandwidth"), [&] {
    s.pulse = PulseModel::from_bandwidth(s.fiber.wavelength, s.source.bandwidth, 0.0, s.constants);
  });
  const double dl = s.source_linewidth();
  check("fiber.dispersion", fiber.line("dispersion"), [&] {
    s.dispersion[0] = FiberDispersion::from_coefficient(dm1, s.fiber.wavelength, s.fiber.group_index,
                                                        l, dl, s.constants);
    s.dispersion[1] = FiberDispersion::from_coefficient(dm3, s.fiber.wavelength, s.fiber.group_index,
                                                        s.kinematics[1].fiber_length, dl, s.constants);
  });

  s.validate();
  return s;
}

ExperimentScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string scenario_directory() {
  if (const char* env = std::getenv("FIBERPHASE_SCENARIO_DIR"); env != nullptr && *env != '\0')
    return env;
  return FIBERPHASE_DEFAULT_SCENARIO_DIR;
}

std::string resolve_scenario_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return name_or_path;
  const fs::path dir(scenario_directory());
  for (const fs::path& candidate : {dir / name_or_path, dir / (name_or_path + ".yaml")})
    if (fs::is_regular_file(candidate)) return candidate.string();
  throw ConfigError("", 0, "scenario '" + name_or_path + "' not found (searched " + dir.string() + ")");
}

CountingSetup counting_setup(const ExperimentScenario& s, double theta) {
  CountingSetup c;
  c.source = s.source;
  c.detector = s.detector;
  c.attenuation = s.attenuation;
  c.schedule = s.switch_schedule;
  c.theta = theta;
  InterferometerGeometry vertical = s.geometry;
  vertical.inclination = std::numbers::pi / 2;
  c.phase13 = gravitational_phase(vertical, s.fiber, s.constants);
  vertical.arm_separation = s.arm2_separation;
  c.phase12 = gravitational_phase(vertical, s.fiber, s.constants);
  c.visibility = s.polarization_visibility;
  c.residual_noise_rms = s.residual_noise_rms;
  return c;
}

NoisePsdModel scenario_psd(const ExperimentScenario& s) {
  if (!s.psd_table.empty()) return load_tabulated_psd(s.psd_table);
  return default_psd(s.thermal, s.psd_shape);
}

}  // namespace fiberphase
