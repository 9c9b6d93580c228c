#include "fiberphase/earth_rotation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fiberphase/errors.hpp"

namespace fiberphase {

namespace {

constexpr double kPi = std::numbers::pi;

// Neumaier-compensated running sum.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double inverse_gamma0(const SpoolGeometry& spool, const PhotonKinematics& kin, double c) {
  return std::sqrt(1.0 - kin.speed_squared(spool.radius) / (c * c));
}

// Bracket in which a relative or absolute difference counts as "shared".
bool same(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Pure sinusoid part of alpha_1 rate / (-(v^2 / (c b)) sin phi').
double harmonic(const SpoolGeometry& spool, double phase) {
  return std::cos(spool.azimuth) * std::cos(phase) -
         std::cos(spool.tilt()) * std::sin(spool.azimuth) * std::sin(phase);
}

double alpha1_prefactor(const SpoolGeometry& spool, const PhotonKinematics& kin, double c) {
  return -kin.speed_squared(spool.radius) / (c * spool.radius) * std::sin(spool.colatitude());
}

}  // namespace

void SpoolGeometry::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("spool radius must be positive");
  for (double a : {axial_offset, inclination, azimuth, latitude, initial_earth_angle, entry_plane})
    if (!std::isfinite(a)) throw DomainError("spool angles and offsets must be finite");
  if (!(inclination >= 0.0 && inclination <= kPi / 2))
    throw DomainError("spool inclination must lie in [0, pi/2]");
}

void PhotonKinematics::validate(double radius, double c) const {
  if (!(angular_speed > 0.0)) throw DomainError("angular speed must be positive");
  if (!(axial_speed >= 0.0)) throw DomainError("axial speed must be non-negative");
  if (!(fiber_length >= 0.0)) throw DomainError("fiber length must be non-negative");
  if (!(group_index >= 1.0)) throw DomainError("group index must be >= 1");
  if (!(speed_squared(radius) < c * c))
    throw DomainError("photon speed around the spool must stay below c");
}

PhotonKinematics PhotonKinematics::from_winding(double radius, double pitch, double fiber_length,
                                                double group_index, double c) {
  if (!(radius > 0.0) || !(pitch >= 0.0) || !(group_index >= 1.0))
    throw DomainError("invalid winding parameters");
  const double speed = c / group_index;
  const double turn = 2.0 * kPi * radius;
  const double helix = std::hypot(turn, pitch);
  PhotonKinematics kin;
  kin.angular_speed = speed * turn / helix / radius;
  kin.axial_speed = speed * pitch / helix;
  kin.fiber_length = fiber_length;
  kin.group_index = group_index;
  return kin;
}

double alpha1_rate(double t, const SpoolGeometry& spool, const PhotonKinematics& kin,
                   const PhysicalConstants& consts, Alpha1Convention convention) {
  const double phase = kin.angular_speed * t + spool.entry_plane;
  double shape = harmonic(spool, phase);
  if (convention == Alpha1Convention::printed)
    shape += std::cos(spool.tilt()) * std::sin(spool.azimuth);
  return alpha1_prefactor(spool, kin, consts.c) * shape;
}

double alpha1(double t, const SpoolGeometry& spool, const PhotonKinematics& kin,
              const PhysicalConstants& consts, Alpha1Convention convention) {
  const double w = kin.angular_speed;
  const double a0 = spool.entry_plane;
  const double xi = spool.azimuth;
  const double swept = std::cos(xi) * (std::sin(w * t + a0) - std::sin(a0)) +
                       std::cos(spool.tilt()) * std::sin(xi) * (std::cos(w * t + a0) - std::cos(a0));
  double value = swept / w;
  if (convention == Alpha1Convention::printed)
    value += std::cos(spool.tilt()) * std::sin(xi) * t;
  return alpha1_prefactor(spool, kin, consts.c) * value;
}

long long default_proper_time_steps(const PhotonKinematics& kin, double duration) {
  const double turns = kin.angular_speed * duration / (2.0 * kPi);
  return std::max<long long>(64, static_cast<long long>(std::ceil(turns * 64.0)));
}

namespace {

// One fixed-step RK4 pass over the augmented state (alpha_1, tau - T / gamma0).
double proper_time_deviation(const SpoolFrame<double>& frame, const SpoolGeometry& spool,
                             const PhotonKinematics& kin, const PhysicalConstants& consts,
                             Alpha1Convention convention, double duration, long long steps) {
  const double c2 = consts.c * consts.c;
  const double eps = consts.earth_radius * consts.earth_angular_speed / consts.c;
  const double inv_gamma_sq = 1.0 - kin.speed_squared(spool.radius) / c2;
  const double inv_gamma = std::sqrt(inv_gamma_sq);
  const double w = kin.angular_speed;
  const double a0 = spool.entry_plane;

  auto derivative = [&](double t, double a1) -> Eigen::Vector2d {
    const double rate1 = alpha1_rate(t, spool, kin, consts, convention);
    const AngleSample<double> sample{a0 + w * t + eps * a1, eps * rate1};
    const double delta = -frame.squared_speed_excess(sample, t) / c2;
    return {rate1, delta / (std::sqrt(inv_gamma_sq + delta) + inv_gamma)};
  };

  const double h = duration / static_cast<double>(steps);
  double a1 = 0.0;
  CompensatedSum deviation;
  for (long long n = 0; n < steps; ++n) {
    const double t = h * static_cast<double>(n);
    const Eigen::Vector2d k1 = derivative(t, a1);
    const Eigen::Vector2d k2 = derivative(t + 0.5 * h, a1 + 0.5 * h * k1(0));
    const Eigen::Vector2d k3 = derivative(t + 0.5 * h, a1 + 0.5 * h * k2(0));
    const Eigen::Vector2d k4 = derivative(t + h, a1 + h * k3(0));
    const Eigen::Vector2d step = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a1 += step(0);
    deviation.add(step(1));
  }
  return deviation.value();
}

}  // namespace

ProperTimeResult proper_time_numeric(const SpoolGeometry& spool, const PhotonKinematics& kin,
                                     double duration, long long steps,
                                     const PhysicalConstants& consts,
                                     const ProperTimeOptions& options) {
  if (steps < 2) throw DomainError("proper_time_numeric needs at least 2 steps");
  if (!(duration >= 0.0)) throw DomainError("duration must be non-negative");
  spool.validate();
  kin.validate(spool.radius, consts.c);

  const SpoolFrame<double> frame(spool, kin, consts);
  const double coarse =
      proper_time_deviation(frame, spool, kin, consts, options.convention, duration, steps);
  const double fine =
      proper_time_deviation(frame, spool, kin, consts, options.convention, duration, 2 * steps);
  const double base = inverse_gamma0(spool, kin, consts.c) * duration;

  ProperTimeResult result;
  result.tau = base + fine + (fine - coarse) / 15.0;
  result.refinement_difference = std::abs(fine - coarse);
  result.steps = 2 * steps;
  if (result.refinement_difference > options.relative_tolerance * std::abs(result.tau))
    throw ConvergenceError("proper time refinement differs by " +
                               std::to_string(result.refinement_difference) + " s",
                           result.refinement_difference);
  return result;
}

double proper_time_closed(const SpoolGeometry& spool, const PhotonKinematics& kin,
                          double duration, const PhysicalConstants& consts) {
  const double c = consts.c;
  const double eps = consts.earth_radius * consts.earth_angular_speed / c;
  const double inv_gamma = inverse_gamma0(spool, kin, c);
  const double gamma_sq = 1.0 / (inv_gamma * inv_gamma);
  const double a1 = kin.axial_speed / c * std::sin(spool.colatitude()) *
                    std::sin(spool.tilt()) * std::sin(spool.azimuth);

  const double a0 = spool.entry_plane;
  const double exit = kin.angular_speed * duration + a0;
  const double swept =
      std::cos(spool.azimuth) * (std::sin(exit) - std::sin(a0)) +
      std::cos(spool.tilt()) * std::sin(spool.azimuth) * (std::cos(exit) - std::cos(a0));
  const double shift = spool.radius * consts.earth_radius * consts.earth_angular_speed / (c * c) *
                       std::sin(spool.colatitude()) * swept;
  return inv_gamma * (duration * (1.0 - gamma_sq * eps * a1) - shift);
}

RotationPhase rotation_phase(const SpoolGeometry& spool1, const PhotonKinematics& kin1,
                             const SpoolGeometry& spool3, const PhotonKinematics& kin3,
                             double wavelength, const PhysicalConstants& consts) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  const auto mismatch = [](const char* name) {
    return GeometryMismatch(std::string("spools must share ") + name);
  };
  if (!same(spool1.radius, spool3.radius)) throw mismatch("radius");
  if (!same(spool1.inclination, spool3.inclination)) throw mismatch("inclination");
  if (!same(spool1.azimuth, spool3.azimuth)) throw mismatch("azimuth");
  if (!same(spool1.latitude, spool3.latitude)) throw mismatch("latitude");
  if (!same(kin1.angular_speed, kin3.angular_speed)) throw mismatch("angular speed");
  if (!same(kin1.axial_speed, kin3.axial_speed)) throw mismatch("axial speed");

  const double c = consts.c;
  const double eps = consts.earth_radius * consts.earth_angular_speed / c;
  const double inv_gamma = inverse_gamma0(spool1, kin1, c);
  const double gamma_sq = 1.0 / (inv_gamma * inv_gamma);
  const double a1 = kin1.axial_speed / c * std::sin(spool1.colatitude()) *
                    std::sin(spool1.tilt()) * std::sin(spool1.azimuth);

  // The trig arguments are ~1e5-1e6 rad for long fibers; carry them in long double so
  // the small differences F, F' keep their digits.
  using Wide = long double;
  const Wide wc = static_cast<Wide>(kin1.angular_speed) / static_cast<Wide>(c);
  const Wide L1 = static_cast<Wide>(kin1.group_index) * static_cast<Wide>(kin1.fiber_length);
  const Wide L3 = static_cast<Wide>(kin3.group_index) * static_cast<Wide>(kin3.fiber_length);
  const Wide a_1 = spool1.entry_plane;
  const Wide a_3 = spool3.entry_plane;
  const Wide F = std::sin(wc * L1 + a_1) - std::sin(wc * L3 + a_3) + std::sin(a_3) - std::sin(a_1);
  const Wide Fp = std::cos(wc * L1 + a_1) - std::cos(wc * L3 + a_3) + std::cos(a_3) - std::cos(a_1);

  const double b = spool1.radius;
  const double xi = spool1.azimuth;
  RotationPhase phase;
  phase.linear = static_cast<double>(inv_gamma * (1.0 - gamma_sq * eps * a1) * 2.0 * kPi *
                                     (L1 - L3) / wavelength);
  const double prefactor = -inv_gamma * 2.0 * kPi * b * consts.earth_radius *
                           consts.earth_angular_speed / (wavelength * c) * std::cos(spool1.latitude);
  phase.oscillating = static_cast<double>(
      prefactor * (std::cos(xi) * F + std::sin(spool1.inclination) * std::sin(xi) * Fp));
  return phase;
}

double oscillation_amplitude(const SpoolGeometry& spool, const PhotonKinematics& kin,
                             double wavelength, const PhysicalConstants& consts) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  return inverse_gamma0(spool, kin, consts.c) * 4.0 * kPi * spool.radius * consts.earth_radius *
         consts.earth_angular_speed / (wavelength * consts.c) * std::abs(std::cos(spool.latitude));
}

double rotation_phase_oscillating(double optical_difference, double optical_sum,
                                  const SpoolGeometry& spool, const PhotonKinematics& kin,
                                  double wavelength, const PhysicalConstants& consts) {
  const double turns = spool.azimuth / kPi;
  if (std::abs(turns - std::round(turns)) > 1e-9)
    throw DomainError("oscillating form needs an azimuth that is a multiple of pi");
  if (std::abs(spool.entry_plane) > 1e-12)
    throw DomainError("oscillating form needs zero entry planes");
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  const double c = consts.c;
  const double w = kin.angular_speed;
  // cos(xi) is exactly +-1 here; it carries the sign flip for odd multiples of pi.
  const double sign = std::cos(spool.azimuth) > 0.0 ? 1.0 : -1.0;
  using Wide = long double;
  const Wide half = static_cast<Wide>(w) / (2.0L * static_cast<Wide>(c));
  const Wide shape = std::sin(half * static_cast<Wide>(optical_difference)) *
                     std::cos(half * static_cast<Wide>(optical_sum));
  return static_cast<double>(-sign * inverse_gamma0(spool, kin, c) * 4.0 * kPi * spool.radius *
                             consts.earth_radius * consts.earth_angular_speed / (wavelength * c) *
                             std::cos(spool.latitude) * shape);
}

double oscillation_period_optical(const PhotonKinematics& kin, const PhysicalConstants& consts) {
  return 4.0 * kPi * consts.c / kin.angular_speed;
}

double oscillation_period_geometric(const PhotonKinematics& kin, const PhysicalConstants& consts) {
  return oscillation_period_optical(kin, consts) / kin.group_index;
}

AlignmentTolerance required_alignment(const InterferometerGeometry& geom,
                                      const FiberOptical& fiber, const SpoolGeometry& spool,
                                      const PhotonKinematics& kin,
                                      const PhysicalConstants& consts) {
  spool.validate();
  kin.validate(spool.radius, consts.c);
  AlignmentTolerance out;
  out.gravitational_phase = std::abs(gravitational_phase(geom, fiber, consts));
  const double amplitude = oscillation_amplitude(spool, kin, fiber.wavelength, consts);
  const double c = consts.c;
  const double w = kin.angular_speed;

  // |amplitude sin(w dl / 2c)| rises on dl in [0, pi c / w].
  const double branch_end = kPi * c / w;
  if (out.gravitational_phase >= amplitude) {
    out.exceeds_amplitude = true;
    out.optical_path_difference = branch_end;
  } else {
    double lo = 0.0;
    double hi = branch_end;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (amplitude * std::sin(w * mid / (2.0 * c)) < out.gravitational_phase)
        lo = mid;
      else
        hi = mid;
    }
    out.optical_path_difference = 0.5 * (lo + hi);
    if (out.gravitational_phase == 0.0) out.optical_path_difference = 0.0;
  }
  out.exit_angle = w * out.optical_path_difference / c;
  out.arc_length = spool.radius * out.exit_angle;
  out.angle_bound = out.optical_path_difference / (kin.group_index * spool.radius);
  out.linear_path_difference = out.gravitational_phase * fiber.wavelength /
                               (2.0 * kPi * inverse_gamma0(spool, kin, c));
  return out;
}

FrameQuantities frame_quantities(const SpoolGeometry& spool, const PhotonKinematics& kin,
                                 double t, const PhysicalConstants& consts) {
  const double c = consts.c;
  const SpoolFrame<double> frame(spool, kin, consts);
  const Matrix3<double> earth = rotation_z(frame.earth_angle(t));
  const Matrix3<double> to_inertial = earth * frame.latitude_rotation() * frame.placement();

  const Vector3<double> n = Vector3<double>::UnitZ();
  const Vector3<double> ell = earth * frame.latitude_rotation() * Vector3<double>::UnitZ();
  const Vector3<double> axis = to_inertial * Vector3<double>::UnitZ();
  const Vector3<double> drift = n.cross(ell);

  const double alpha = spool.entry_plane + kin.angular_speed * t;
  const Vector3<double> k = to_inertial * Vector3<double>(-std::sin(alpha), std::cos(alpha), 0.0);
  const double along_x = drift.dot(to_inertial * Vector3<double>::UnitX());
  const double along_y = drift.dot(to_inertial * Vector3<double>::UnitY());

  FrameQuantities q;
  q.epsilon = consts.earth_radius * consts.earth_angular_speed / c;
  q.beta0 = std::sqrt(kin.speed_squared(spool.radius)) / c;
  q.gamma0 = 1.0 / std::sqrt(1.0 - q.beta0 * q.beta0);
  q.a1 = kin.axial_speed / c * drift.dot(axis);
  q.a2 = spool.radius * kin.angular_speed / c * std::hypot(along_x, along_y);
  q.a2_psi = spool.radius * kin.angular_speed / c * drift.dot(k);
  return q;
}

}  // namespace fiberphase
