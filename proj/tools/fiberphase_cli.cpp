// Command-line front end: one subcommand per analysis, all driven by a scenario file.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fiberphase/counting.hpp"
#include "fiberphase/dispersion.hpp"
#include "fiberphase/earth_rotation.hpp"
#include "fiberphase/emit.hpp"
#include "fiberphase/errors.hpp"
#include "fiberphase/noise_budget.hpp"
#include "fiberphase/phase_core.hpp"
#include "fiberphase/scenario.hpp"
#include "fiberphase/sweep.hpp"
#include "fiberphase/units.hpp"

using namespace fiberphase;

namespace {

struct CommonOptions {
  std::string scenario = "paper_baseline";
  std::string out;
  std::string format = "csv";
  std::vector<std::string> theta;
};

struct Context {
  ExperimentScenario scenario;
  OutputFormat format = OutputFormat::csv;
  std::string out;
  std::vector<double> thetas;
};

Context prepare(const CommonOptions& o) {
  Context ctx;
  ctx.scenario = load_scenario(resolve_scenario_path(o.scenario));
  ctx.format = parse_format(o.format);
  ctx.out = o.out;
  ctx.thetas = ctx.scenario.theta_schedule;
  if (!o.theta.empty()) {
    ctx.thetas.clear();
    for (const std::string& t : o.theta) {
      const double v = parse_quantity(t, Dimension::angle);
      if (!(v >= 0.0 && v <= std::numbers::pi / 2 + 1e-15))
        throw ConfigError("--theta", 0, "inclination '" + t + "' outside [0, pi/2]");
      ctx.thetas.push_back(v);
    }
    ctx.scenario.theta_schedule = ctx.thetas;
  }
  return ctx;
}

void emit_table(const Context& ctx, const std::string& kind, const std::vector<std::string>& cols,
                const std::vector<std::vector<double>>& rows) {
  emit_to(ctx.out, [&](std::ostream& os) { write_table(kind, cols, rows, ctx.format, os); });
}

void run_phase(const Context& ctx) {
  const ExperimentScenario& s = ctx.scenario;
  std::vector<std::vector<double>> rows;
  const double mass = effective_photon_mass(s.fiber.wavelength, s.constants);
  for (double theta : ctx.thetas) {
    InterferometerGeometry g = s.geometry;
    g.inclination = theta;
    const double phase = gravitational_phase(g, s.fiber, s.constants);
    const DetectionProbabilities p = detection_probabilities(phase, std::numbers::pi / 2, 0.5);
    rows.push_back({theta, phase, p.plus, p.minus, mass});
  }
  emit_table(ctx, "phase",
             {"theta_rad", "grav_phase_rad", "p_plus", "p_minus", "effective_mass_kg"}, rows);
}

void run_earth_rotation(const Context& ctx, bool numeric) {
  const ExperimentScenario& s = ctx.scenario;
  std::vector<std::vector<double>> rows;
  for (double theta : ctx.thetas) {
    SpoolGeometry sp1 = s.spools[0];
    SpoolGeometry sp3 = s.spools[1];
    sp1.inclination = sp3.inclination = theta;
    const RotationPhase rot =
        rotation_phase(sp1, s.kinematics[0], sp3, s.kinematics[1], s.fiber.wavelength, s.constants);
    const double T1 = s.kinematics[0].transit_time(s.constants.c);
    const double tau_closed = proper_time_closed(sp1, s.kinematics[0], T1, s.constants);
    double tau_numeric = std::numeric_limits<double>::quiet_NaN();
    if (numeric) {
      const long long steps = default_proper_time_steps(s.kinematics[0], T1);
      tau_numeric = proper_time_numeric(sp1, s.kinematics[0], T1, steps, s.constants).tau;
    }
    const FrameQuantities q = frame_quantities(sp1, s.kinematics[0], 0.0, s.constants);
    rows.push_back({theta, rot.linear, rot.oscillating, rot.total(), tau_closed, tau_numeric,
                    q.epsilon, q.gamma0, q.a1, q.a2});
  }
  emit_table(ctx, "earth_rotation",
             {"theta_rad", "linear_rad", "oscillating_rad", "total_rad", "tau1_closed_s",
              "tau1_numeric_s", "epsilon", "gamma0", "a1", "a2"},
             rows);
}

void run_dispersion(const Context& ctx) {
  const ExperimentScenario& s = ctx.scenario;
  std::vector<std::vector<double>> rows;
  for (double theta : ctx.thetas) {
    const NoisePsdModel psd = scenario_psd(s);
    const SweepRow r = sweep_row(s, psd, theta);
    const DetectionProbabilities ideal =
        detection_probabilities(r.gravitational_phase, std::numbers::pi / 2, 0.5);
    const DetectionProbabilities flat = detection_probabilities(0.0, std::numbers::pi / 2, 0.5);
    const double deviation = std::abs(r.p_plus - ideal.plus);
    const double shift = std::abs(ideal.plus - flat.plus);
    rows.push_back({theta, r.pulse_width_1, r.pulse_width_3, r.visibility, r.p_plus, ideal.plus,
                    deviation, shift > 0.0 ? deviation / shift : 0.0});
  }
  emit_table(ctx, "dispersion",
             {"theta_rad", "tau_s", "tau_prime_s", "visibility", "p_plus", "p_plus_ideal",
              "deviation", "deviation_over_shift"},
             rows);
}

void run_noise(const Context& ctx, double f_lo, double f_hi, int per_decade) {
  const NoisePsdModel psd = scenario_psd(ctx.scenario);
  const std::vector<double> grid = log_grid(f_lo, f_hi, per_decade);
  emit_to(ctx.out, [&](std::ostream& os) { write_psd(psd, grid, ctx.format, os); });
}

void run_integration_time(const Context& ctx) {
  std::vector<std::vector<double>> rows;
  for (double theta : ctx.thetas) {
    const IntegrationTimes t = integration_times(counting_setup(ctx.scenario, theta));
    std::vector<double> row{theta};
    for (const auto& state : t.per_detector)
      for (double v : state) row.push_back(v);
    row.push_back(t.maximum);
    row.push_back(t.quarter_baseline);
    row.push_back(t.maximum / 86400.0);
    rows.push_back(row);
  }
  emit_table(ctx, "integration_time",
             {"theta_rad", "d1_arm2_open_s", "d2_arm2_open_s", "d3_arm2_open_s", "d1_arm3_open_s",
              "d2_arm3_open_s", "d3_arm3_open_s", "maximum_s", "quarter_baseline_s",
              "maximum_days"},
             rows);
}

struct MonteCarloOptions {
  std::uint64_t seed = 1;
  std::string duration;
  std::string bin_width;
  std::string modulation_frequency;
  std::string counts_out;
  unsigned threads = 0;
};

void run_montecarlo(Context ctx, const MonteCarloOptions& mc) {
  ExperimentScenario& s = ctx.scenario;
  if (!mc.modulation_frequency.empty())
    s.switch_schedule.modulation_frequency =
        parse_quantity(mc.modulation_frequency, Dimension::frequency);
  s.switch_schedule.validate();
  const double theta = ctx.thetas.empty() ? std::numbers::pi / 2 : ctx.thetas.back();
  const CountingSetup setup = counting_setup(s, theta);
  const double duration = mc.duration.empty() ? integration_times(setup).maximum
                                               : parse_quantity(mc.duration, Dimension::time);
  if (!std::isfinite(duration))
    throw DomainError("no gravitational signal at this inclination; pass --duration");
  const double bin_width = mc.bin_width.empty() ? 0.5 * s.switch_schedule.period()
                                                : parse_quantity(mc.bin_width, Dimension::time);
  const std::vector<CountRecord> records = simulate_counts(setup, duration, bin_width, mc.seed, mc.threads);
  if (!mc.counts_out.empty())
    emit_to(mc.counts_out, [&](std::ostream& os) { write_counts(records, OutputFormat::csv, os); });
  const PhaseEstimate est =
      demodulate(records, s.switch_schedule, {bin_width, s.detector.dark_rate, setup.visibility});
  InterferometerGeometry g = s.geometry;
  g.inclination = theta;
  const double truth = gravitational_phase(g, s.fiber, s.constants) -
                       std::sin(theta) * setup.phase12;
  emit_to(ctx.out, [&](std::ostream& os) {
    write_values("montecarlo",
                 {{"theta_rad", theta},
                  {"duration_s", duration},
                  {"bin_width_s", bin_width},
                  {"seed", static_cast<double>(mc.seed)},
                  {"phase_estimate_rad", est.phase},
                  {"sigma_rad", est.sigma},
                  {"configured_phase_rad", truth},
                  {"significance", est.sigma > 0 ? std::abs(est.phase) / est.sigma : 0.0}},
                 ctx.format, os);
  });
}

void run_sweep_cmd(const Context& ctx) {
  const SweepResult r = run_sweep(ctx.scenario);
  emit_to(ctx.out, [&](std::ostream& os) { write_sweep(r, ctx.format, os); });
}

void run_tolerances(const Context& ctx) {
  const ExperimentScenario& s = ctx.scenario;
  std::vector<std::vector<double>> rows;
  for (double theta : ctx.thetas) {
    InterferometerGeometry g = s.geometry;
    g.inclination = theta;
    SpoolGeometry sp = s.spools[0];
    sp.inclination = theta;
    const AlignmentTolerance t = required_alignment(g, s.fiber, sp, s.kinematics[0], s.constants);
    rows.push_back({theta, t.gravitational_phase, t.optical_path_difference, t.exit_angle,
                    t.exit_angle * 180.0 / std::numbers::pi * 1e3, t.angle_bound,
                    t.angle_bound * 180.0 / std::numbers::pi * 1e3, t.arc_length,
                    t.linear_path_difference, t.exceeds_amplitude ? 1.0 : 0.0,
                    oscillation_period_optical(s.kinematics[0], s.constants),
                    oscillation_period_geometric(s.kinematics[0], s.constants)});
  }
  emit_table(ctx, "tolerances",
             {"theta_rad", "grav_phase_rad", "optical_path_difference_m", "exit_angle_rad",
              "exit_angle_mdeg", "angle_bound_rad", "angle_bound_mdeg", "arc_length_m",
              "linear_path_difference_m", "exceeds_amplitude", "period_optical_m",
              "period_geometric_m"},
             rows);
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario file or name in the scenario directory")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--theta", o.theta, "Inclinations, e.g. 0,45deg,1.5708 (bare numbers are rad)")
      ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gravitational phase, noise and counting analysis for a rotatable fiber interferometer"};
  app.require_subcommand(1);

  CommonOptions common;
  auto* phase = app.add_subcommand("phase", "Gravitational phase and ideal probabilities");
  auto* earth = app.add_subcommand("earth-rotation", "Earth-rotation phase between spools 1 and 3");
  auto* disp = app.add_subcommand("dispersion", "Dispersive visibility and probability penalty");
  auto* noise = app.add_subcommand("noise", "Phase-noise PSD table");
  auto* integ = app.add_subcommand("integration-time", "Poisson-limited integration times");
  auto* mc = app.add_subcommand("montecarlo", "Simulated counts and demodulated phase");
  auto* sweep = app.add_subcommand("sweep", "All derived quantities per inclination");
  auto* tol = app.add_subcommand("tolerances", "Spool alignment tolerance");
  for (CLI::App* c : {phase, earth, disp, noise, integ, mc, sweep, tol}) add_common(c, common);

  bool numeric = false;
  earth->add_flag("--numeric", numeric, "Also integrate the proper time of spool 1 numerically");

  double f_lo = 1.0, f_hi = 1e6;
  int per_decade = 10;
  noise->add_option("--fmin", f_lo, "Lowest frequency, Hz")->capture_default_str();
  noise->add_option("--fmax", f_hi, "Highest frequency, Hz")->capture_default_str();
  noise->add_option("--per-decade", per_decade, "Points per decade")->capture_default_str();

  MonteCarloOptions mco;
  mc->add_option("--seed", mco.seed, "RNG seed")->capture_default_str();
  mc->add_option("--duration", mco.duration, "Run length, e.g. '4 days' (default: integration time)");
  mc->add_option("--bin-width", mco.bin_width, "Bin width (default: half the switch period)");
  mc->add_option("--fmod", mco.modulation_frequency, "Override the switch frequency, e.g. '0.05 Hz'");
  mc->add_option("--counts-out", mco.counts_out, "Also write the count records as CSV");
  mc->add_option("--threads", mco.threads, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    const Context ctx = prepare(common);
    if (phase->parsed()) run_phase(ctx);
    else if (earth->parsed()) run_earth_rotation(ctx, numeric);
    else if (disp->parsed()) run_dispersion(ctx);
    else if (noise->parsed()) run_noise(ctx, f_lo, f_hi, per_decade);
    else if (integ->parsed()) run_integration_time(ctx);
    else if (mc->parsed()) run_montecarlo(ctx, mco);
    else if (sweep->parsed()) run_sweep_cmd(ctx);
    else if (tol->parsed()) run_tolerances(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "fiberphase: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fiberphase: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
