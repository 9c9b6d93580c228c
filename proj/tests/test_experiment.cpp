#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fiberphase/emit.hpp"
#include "fiberphase/errors.hpp"
#include "fiberphase/scenario.hpp"
#include "fiberphase/sweep.hpp"
#include "fiberphase/units.hpp"

using namespace fiberphase;

namespace {

constexpr double pi = std::numbers::pi;
const std::string kDir = FIBERPHASE_SCENARIO_DIR_FOR_TESTS;

ExperimentScenario baseline() { return load_scenario(kDir + "/paper_baseline.yaml"); }

std::string field_of(const std::string& yaml) {
  try {
    parse_scenario(yaml);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("quantities carry units") {
  CHECK(parse_quantity("100 km", Dimension::length) == 1e5);
  CHECK(parse_quantity("1550 nm", Dimension::length) == doctest::Approx(1550e-9));
  CHECK(parse_quantity("90 deg", Dimension::angle) == doctest::Approx(pi / 2));
  CHECK(parse_quantity("7 mdeg", Dimension::angle) == doctest::Approx(7e-3 * pi / 180));
  CHECK(parse_quantity("1 MHz", Dimension::frequency) == 1e6);
  CHECK(parse_quantity("0.17 dB/km", Dimension::attenuation) == 0.17);
  CHECK(parse_quantity("17 ps/(km nm)", Dimension::dispersion) == 17.0);
  CHECK(parse_quantity("2.5", Dimension::length) == 2.5);
  CHECK_THROWS(parse_quantity("100 kg", Dimension::length));
  CHECK_THROWS(parse_quantity("km", Dimension::length));
  CHECK_THROWS(parse_quantity("1 km extra", Dimension::length));
}

TEST_CASE("minimal scenario takes defaults") {
  const ExperimentScenario s = load_scenario(kDir + "/minimal.yaml");
  CHECK(s.geometry.arm_length == 1e5);
  CHECK(s.geometry.arm_separation == 1.0);
  CHECK(s.fiber.wavelength == doctest::Approx(1550e-9));
  CHECK(s.fiber.group_index == ExperimentScenario::defaults().fiber.group_index);
  CHECK(s.kinematics[0].fiber_length == 1e5);
  CHECK(s.thermal.total_length == 2e5);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("bundled baseline reproduces the reference inputs") {
  const ExperimentScenario s = baseline();
  CHECK(s.name == "paper_baseline");
  CHECK(s.source.rate == 1e6);
  CHECK(s.detector.efficiency == 0.9);
  CHECK(s.detector.dark_rate == 1.0);
  CHECK(s.geometry.arm_length == 1e5);
  CHECK(s.geometry.arm_separation == 1.0);
  CHECK(s.fiber.group_index == 1.468);
  CHECK(s.fiber.wavelength == doctest::Approx(1550e-9));
  CHECK(s.attenuation.fiber_alpha == 0.17);
  CHECK(s.attenuation.component_losses == 0.5);
  CHECK(s.source.bandwidth == 100e9);
  CHECK(s.spools[0].radius == 0.2);
  CHECK(s.spools[0].latitude == doctest::Approx(48.21 * pi / 180));
  CHECK(s.kinematics[0].angular_speed == 1e9);
  CHECK(s.kinematics[0].axial_speed == 400.0);
  CHECK(s.theta_schedule.size() == 5);
  CHECK(s.theta_schedule.back() == doctest::Approx(pi / 2));
}

TEST_CASE("scenario lookup through the directory variable") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fiberphase_scenarios_test";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "tiny.yaml") << "name: tiny\ninterferometer:\n  arm_length: \"2 km\"\n";
  }
  ::setenv("FIBERPHASE_SCENARIO_DIR", dir.c_str(), 1);
  CHECK(scenario_directory() == dir.string());
  CHECK(load_scenario(resolve_scenario_path("tiny")).geometry.arm_length == 2000.0);
  CHECK_THROWS_AS(resolve_scenario_path("paper_baseline"), ConfigError);
  ::unsetenv("FIBERPHASE_SCENARIO_DIR");
  CHECK(resolve_scenario_path("paper_baseline").ends_with("paper_baseline.yaml"));
  fs::remove_all(dir);
}

TEST_CASE("invalid scenarios name the offending field") {
  CHECK(field_of("interferometer:\n  theta_schedule: [\"360 deg\"]\n") ==
        "interferometer.theta_schedule[0]");
  CHECK(field_of("interferometer:\n  arm_lenght: \"1 km\"\n") == "interferometer.arm_lenght");
  CHECK(field_of("fiber:\n  wavelength: \"1550 kg\"\n") == "fiber.wavelength");
  CHECK(field_of("fiber:\n  group_index: 0.5\n") == "fiber.group_index");
  CHECK(field_of("detector:\n  efficiency: 1.5\n") == "detector.efficiency");
  CHECK(field_of("spool:\n  entry_planes: [\"0 rad\"]\n") == "spool.entry_planes");
  CHECK(field_of("switch:\n  duty: 1.0\n") == "switch.duty");
  CHECK(field_of("bogus: 1\n") == "bogus");

  try {
    parse_scenario("interferometer:\n  arm_length: \"1 km\"\n  arm_separation: \"-1 m\"\n");
    FAIL("accepted a negative separation");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "interferometer.arm_separation");
  }
  CHECK_THROWS_AS(parse_scenario("interferometer: [1, 2\n"), ConfigError);
}

TEST_CASE("fuzzed numeric fields are either accepted or rejected with a field name") {
  const char* fields[][2] = {{"interferometer", "arm_length"}, {"interferometer", "arm_separation"},
                             {"fiber", "group_index"},         {"fiber", "wavelength"},
                             {"spool", "radius"},              {"source", "rate"},
                             {"detector", "dark_rate"},        {"switch", "modulation_frequency"}};
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const auto& f = fields[i % 8];
    std::ostringstream yaml;
    yaml << f[0] << ":\n  " << f[1] << ": " << (u(rng) < 0 ? -1 : 1) * std::pow(10.0, 3 * u(rng)) << "\n";
    try {
      parse_scenario(yaml.str()).validate();
    } catch (const ConfigError& e) {
      CHECK(!e.field().empty());
    }
  }
}

TEST_CASE("calibration sweep row") {
  ExperimentScenario s = baseline();
  s.theta_schedule = {0.0};
  const SweepResult r = run_sweep(s);
  REQUIRE(r.rows.size() == 1);
  const SweepRow& row = r.rows[0];
  CHECK(row.gravitational_phase == 0.0);
  CHECK(row.p_arm2_open == std::array<double, 3>{0.5, 0.25, 0.25});
  CHECK(row.p_arm3_open == std::array<double, 3>{0.25, 0.375, 0.375});
  CHECK(std::isinf(row.integration_time_max));
}

TEST_CASE("vertical sweep row matches the worked numbers") {
  ExperimentScenario s = baseline();
  s.theta_schedule = {pi / 2, pi / 2};
  const SweepResult r = run_sweep(s);
  REQUIRE(r.rows.size() == 2);
  const SweepRow& row = r.rows[0];
  CHECK(row.gravitational_phase == doctest::Approx(6.4953e-5).epsilon(1e-4));
  CHECK(row.integration_time_quarter / 86400 == doctest::Approx(0.69).epsilon(0.02));
  CHECK(row.integration_time_max / 86400 == doctest::Approx(4.1).epsilon(0.05));
  CHECK(row.visibility > 0.999);
  CHECK(row.visibility < 1.0);
  CHECK(row.noise_rms == doctest::Approx(1e-8).epsilon(1e-3));
  CHECK(row.noise_pass);
  CHECK(r.modulation_frequency == 1e6);

  // Identical inclinations give identical rows.
  std::ostringstream a, b;
  SweepResult one = r, two = r;
  one.rows = {r.rows[0]};
  two.rows = {r.rows[1]};
  write_sweep(one, OutputFormat::csv, a);
  write_sweep(two, OutputFormat::csv, b);
  CHECK(a.str() == b.str());
}

TEST_CASE("sweep output formats") {
  SweepResult empty;
  empty.scenario = "empty";
  std::ostringstream csv;
  write_sweep(empty, OutputFormat::csv, csv);
  std::string header;
  for (const auto& c : sweep_columns()) header += (header.empty() ? "" : ",") + c;
  CHECK(csv.str() == header + "\n");

  const SweepResult r = run_sweep(baseline());
  std::stringstream json;
  write_sweep(r, OutputFormat::json, json);
  const SweepResult back = read_sweep_json(json);
  CHECK(back.scenario == r.scenario);
  CHECK(back.modulation_frequency == r.modulation_frequency);
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    std::ostringstream x, y;
    SweepResult one = r, two = back;
    one.rows = {r.rows[i]};
    two.rows = {back.rows[i]};
    write_sweep(one, OutputFormat::csv, x);
    write_sweep(two, OutputFormat::csv, y);
    CHECK(x.str() == y.str());
  }
  std::istringstream bad("{\"schema\": \"other/9\"}");
  CHECK_THROWS_AS(read_sweep_json(bad), ConfigError);
}

TEST_CASE("PSD table contains the anchor row") {
  const ExperimentScenario s = baseline();
  const NoisePsdModel psd = scenario_psd(s);
  std::ostringstream out;
  write_psd(psd, log_grid(1.0, 1e6, 10), OutputFormat::csv, out);
  const std::string text = out.str();
  CHECK(text.starts_with("freq_hz,amp_rad_per_sqrthz\n"));
  bool anchor = false;
  std::istringstream rows(text);
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    const auto comma = line.find(',');
    if (parse_double(line.substr(0, comma)) == 1e5)
      anchor = std::abs(parse_double(line.substr(comma + 1)) - 1e-6) <= 1e-18;
  }
  CHECK(anchor);

  // The emitted table loads back through the tabulated path.
  std::istringstream in(text);
  const NoisePsdModel back = read_tabulated_psd(in);
  CHECK(back.amplitude(1e5) == doctest::Approx(1e-6));
  CHECK(back.amplitude(1e3) == doctest::Approx(psd.amplitude(1e3)));
}

TEST_CASE("log grid hits decades") {
  const auto g = log_grid(1.0, 1e6, 10);
  CHECK(g.size() == 61);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 1e6);
  CHECK(g[50] == 1e5);
}

TEST_CASE("numbers round-trip") {
  for (double v : {0.0, -1.5, 6.49533907343841e-05, 1e300, std::numbers::pi})
    CHECK(parse_double(format_double(v)) == v);
  CHECK(std::isinf(parse_double(format_double(HUGE_VAL))));
  CHECK(std::isnan(parse_double(format_double(NAN))));
  CHECK_THROWS_AS(parse_double("1.0x"), DomainError);
  CHECK_THROWS_AS(parse_format("xml"), DomainError);
}

TEST_CASE("count records round-trip through CSV") {
  const ExperimentScenario s = baseline();
  CountingSetup setup = counting_setup(s, pi / 2);
  setup.schedule.modulation_frequency = 0.05;
  const auto recs = simulate_counts(setup, 500.0, 10.0, 3);
  std::stringstream csv;
  write_counts(recs, OutputFormat::csv, csv);
  CHECK(read_counts_csv(csv) == recs);
  std::istringstream bad("bin_index,detector,switch_state,counts\n0,D9,arm2_open,1\n");
  try {
    read_counts_csv(bad);
    FAIL("accepted an unknown detector");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("files are written whole") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "fiberphase_emit_test.csv";
  emit_to(p.string(), [](std::ostream& os) { os << "a,b\n1,2\n"; });
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == "a,b\n1,2\n");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
  fs::remove(p);
  CHECK_THROWS(emit_to("/nonexistent/dir/x.csv", [](std::ostream& os) { os << 1; }));
}
