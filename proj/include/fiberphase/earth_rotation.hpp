#pragma once

// Photon worldline around an inclined fiber spool on the rotating Earth, its
// proper time (numerical and first order in eps = R Omega / c), the resulting
// phase between two spools, and the alignment tolerances that keep that phase
// below the gravitational signal.
//
// Coordinates: Earth-centred inertial frame, Earth axis along z. In the lab,
// x points South, y East and z up. The spatial chain is
//   x(t) = R_z(psi(t)) R_y(phi') S(R) R_z(xi) R_y(theta') l(t),
//   l(t) = (b cos alpha, b sin alpha, v_z t + h),
// with theta' = pi/2 - theta and phi' = pi/2 - latitude.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "fiberphase/phase_core.hpp"

namespace fiberphase {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
/// (c t, x, y, z) in metres.
template <typename Scalar>
using Event = Eigen::Matrix<Scalar, 4, 1>;

template <typename Scalar>
Matrix3<Scalar> rotation_y(Scalar angle) {
  using std::cos;
  using std::sin;
  Matrix3<Scalar> m;
  m << cos(angle), Scalar(0), sin(angle),
       Scalar(0), Scalar(1), Scalar(0),
      -sin(angle), Scalar(0), cos(angle);
  return m;
}

template <typename Scalar>
Matrix3<Scalar> rotation_z(Scalar angle) {
  using std::cos;
  using std::sin;
  Matrix3<Scalar> m;
  m << cos(angle), -sin(angle), Scalar(0),
       sin(angle), cos(angle), Scalar(0),
       Scalar(0), Scalar(0), Scalar(1);
  return m;
}

struct SpoolGeometry {
  double radius = 0.2;               // b, m
  double axial_offset = 0.0;         // start of the winding along the spool axis, m
  double inclination = std::numbers::pi / 2;  // theta, rad
  double azimuth = 0.0;              // xi; 0 = axis projection points South, pi/2 = East
  double latitude = 48.21 * std::numbers::pi / 180.0;  // rad
  double initial_earth_angle = 0.0;  // psi_0, rad
  double entry_plane = 0.0;          // alpha_0, rad

  double tilt() const noexcept { return std::numbers::pi / 2 - inclination; }      // theta'
  double colatitude() const noexcept { return std::numbers::pi / 2 - latitude; }   // phi'
  void validate() const;
};

struct PhotonKinematics {
  double angular_speed = 1.0e9;   // omega, rad/s
  double axial_speed = 400.0;     // v_z, m/s
  double fiber_length = 1.0e5;    // l_i, m
  double group_index = 1.468;     // N_i

  double optical_length() const noexcept { return group_index * fiber_length; }
  double transit_time(double c) const noexcept { return optical_length() / c; }
  /// (b omega)^2 + v_z^2.
  double speed_squared(double radius) const noexcept {
    return radius * radius * angular_speed * angular_speed + axial_speed * axial_speed;
  }
  void validate(double radius, double c) const;

  /// Helical winding of pitch `pitch` (axial advance per turn) at speed c / N.
  static PhotonKinematics from_winding(double radius, double pitch, double fiber_length,
                                       double group_index, double c);
};

struct FrameQuantities {
  double epsilon = 0.0;  // R Omega / c
  double gamma0 = 1.0;
  double beta0 = 0.0;
  double a1 = 0.0;       // (v_z / c) (n x l) . i
  double a2 = 0.0;       // amplitude of (b omega / c) (n x l) . k(t)
  double a2_psi = 0.0;   // value of (b omega / c) (n x l) . k(t) at the requested time
};

/// Integration constant for the first-order angle perturbation alpha_1.
enum class Alpha1Convention {
  /// alpha_1 has zero mean: omega is the mean angular speed in the inertial frame.
  zero_mean,
  /// Constant chosen so that the second harmonic term carries (1 - sin(omega t + alpha_0)).
  printed,
};

/// Angle of the photon around the spool and the offset of its rate from omega.
template <typename Scalar>
struct AngleSample {
  Scalar angle;
  Scalar rate_offset;  // d alpha/dt - omega
};

/// Time-independent pieces of the worldline matrix chain for one spool.
template <typename Scalar>
class SpoolFrame {
public:
  SpoolFrame(const SpoolGeometry& spool, const PhotonKinematics& kin,
             const PhysicalConstants& consts)
      : placement_(rotation_z<Scalar>(Scalar(spool.azimuth)) *
                   rotation_y<Scalar>(Scalar(spool.tilt()))),
        latitude_(rotation_y<Scalar>(Scalar(spool.colatitude()))),
        earth_radius_(consts.earth_radius),
        earth_rate_(consts.earth_angular_speed),
        psi0_(spool.initial_earth_angle),
        radius_(spool.radius),
        axial_offset_(spool.axial_offset),
        axial_speed_(kin.axial_speed),
        omega_(kin.angular_speed) {}

  /// l(t) in spool coordinates.
  Vector3<Scalar> spool_point(Scalar angle, Scalar t) const {
    using std::cos;
    using std::sin;
    return {radius_ * cos(angle), radius_ * sin(angle), axial_speed_ * t + axial_offset_};
  }

  /// R_y(phi') (R_z(xi) R_y(theta') l + R e_z): the point before Earth rotation.
  Vector3<Scalar> body_point(Scalar angle, Scalar t) const {
    Vector3<Scalar> p = placement_ * spool_point(angle, t);
    p.z() += earth_radius_;
    return latitude_ * p;
  }

  Scalar earth_angle(Scalar t) const { return earth_rate_ * t + psi0_; }

  Vector3<Scalar> position(Scalar angle, Scalar t) const {
    return rotation_z<Scalar>(earth_angle(t)) * body_point(angle, t);
  }

  /// dx/dt of the spatial worldline.
  Vector3<Scalar> velocity(const AngleSample<Scalar>& a, Scalar t) const {
    const Matrix3<Scalar> rz = rotation_z<Scalar>(earth_angle(t));
    return rz * (earth_rate_ * cross_axis(body_point(a.angle, t)) + body_velocity(a));
  }

  /// Velocity of the lab origin (b = v_z = h = 0).
  Vector3<Scalar> lab_velocity(Scalar t) const {
    Vector3<Scalar> q = latitude_ * Vector3<Scalar>(Scalar(0), Scalar(0), earth_radius_);
    return rotation_z<Scalar>(earth_angle(t)) * (earth_rate_ * cross_axis(q));
  }

  /// |dx/dt|^2 - ((b omega)^2 + v_z^2), evaluated term by term so that the
  /// O(eps) and O(eps^2) parts do not drown in the O(1) speed.
  Scalar squared_speed_excess(const AngleSample<Scalar>& a, Scalar t) const {
    const Vector3<Scalar> drift = earth_rate_ * cross_axis(body_point(a.angle, t));
    const Vector3<Scalar> relative = body_velocity(a);
    return drift.squaredNorm() + Scalar(2) * drift.dot(relative) +
           radius_ * radius_ * a.rate_offset * (Scalar(2) * omega_ + a.rate_offset);
  }

  const Matrix3<Scalar>& placement() const { return placement_; }
  const Matrix3<Scalar>& latitude_rotation() const { return latitude_; }

private:
  // dR_z/dpsi = R_z K with K v = e_z x v.
  static Vector3<Scalar> cross_axis(const Vector3<Scalar>& v) {
    return {-v.y(), v.x(), Scalar(0)};
  }

  Vector3<Scalar> body_velocity(const AngleSample<Scalar>& a) const {
    using std::cos;
    using std::sin;
    const Scalar rate = omega_ + a.rate_offset;
    const Vector3<Scalar> dl(-radius_ * rate * sin(a.angle), radius_ * rate * cos(a.angle),
                             axial_speed_);
    return latitude_ * (placement_ * dl);
  }

  Matrix3<Scalar> placement_;
  Matrix3<Scalar> latitude_;
  Scalar earth_radius_;
  Scalar earth_rate_;
  Scalar psi0_;
  Scalar radius_;
  Scalar axial_offset_;
  Scalar axial_speed_;
  Scalar omega_;
};

/// Event x(t) = (c t, D(t) l(t)) for an arbitrary angle track
/// `angle_at(t) -> AngleSample<Scalar>`.
template <typename Scalar, typename AngleFn>
Event<Scalar> worldline(const SpoolGeometry& spool, const PhotonKinematics& kin,
                        AngleFn&& angle_at, Scalar t, const PhysicalConstants& consts = {}) {
  const SpoolFrame<Scalar> frame(spool, kin, consts);
  const AngleSample<Scalar> a = angle_at(t);
  Event<Scalar> x;
  x(0) = Scalar(consts.c) * t;
  x.template tail<3>() = frame.position(a.angle, t);
  return x;
}

/// Tangent dx/dt = (c, dD/dt l + D dl/dt).
template <typename Scalar, typename AngleFn>
Event<Scalar> worldline_tangent(const SpoolGeometry& spool, const PhotonKinematics& kin,
                                AngleFn&& angle_at, Scalar t,
                                const PhysicalConstants& consts = {}) {
  const SpoolFrame<Scalar> frame(spool, kin, consts);
  Event<Scalar> v;
  v(0) = Scalar(consts.c);
  v.template tail<3>() = frame.velocity(angle_at(t), t);
  return v;
}

/// Minkowski product with signature (-, +, +, +).
template <typename Scalar>
Scalar minkowski(const Event<Scalar>& a, const Event<Scalar>& b) {
  return -a(0) * b(0) + a.template tail<3>().dot(b.template tail<3>());
}

/// First-order rate d(alpha_1)/dt that keeps the photon speed constant in the lab.
double alpha1_rate(double t, const SpoolGeometry& spool, const PhotonKinematics& kin,
                   const PhysicalConstants& consts = {},
                   Alpha1Convention convention = Alpha1Convention::zero_mean);

/// alpha_1(t) with alpha_1(0) = 0, integrated in closed form.
double alpha1(double t, const SpoolGeometry& spool, const PhotonKinematics& kin,
              const PhysicalConstants& consts = {},
              Alpha1Convention convention = Alpha1Convention::zero_mean);

struct ProperTimeOptions {
  Alpha1Convention convention = Alpha1Convention::zero_mean;
  double relative_tolerance = 1e-15;
};

struct ProperTimeResult {
  double tau = 0.0;                    // s
  double refinement_difference = 0.0;  // |tau(2n) - tau(n)|, s
  long long steps = 0;                 // steps of the finer pass
};

/// Steps giving 64 integrator steps per turn around the spool over [0, T].
long long default_proper_time_steps(const PhotonKinematics& kin, double duration);

/// Integrates d tau = sqrt(-eta(x', x')) dt / c along the worldline, carrying
/// alpha_1 with fixed-step RK4 alongside. Runs `steps` and `2 steps`, returns the
/// Richardson-extrapolated value, and throws ConvergenceError when the two passes
/// differ by more than `relative_tolerance * tau`.
ProperTimeResult proper_time_numeric(const SpoolGeometry& spool, const PhotonKinematics& kin,
                                     double duration, long long steps,
                                     const PhysicalConstants& consts = {},
                                     const ProperTimeOptions& options = {});

/// First-order closed form
///   tau = gamma0^-1 [ T (1 - gamma0^2 eps a1)
///          - (b R Omega / c^2) sin(phi') ( cos(xi) (sin(omega T + a0) - sin(a0))
///                                        + cos(theta') sin(xi) (cos(omega T + a0) - cos(a0)) ) ].
double proper_time_closed(const SpoolGeometry& spool, const PhotonKinematics& kin,
                          double duration, const PhysicalConstants& consts = {});

struct RotationPhase {
  double linear = 0.0;       // path-length term, rad
  double oscillating = 0.0;  // spool-geometry term, rad
  double total() const noexcept { return linear + oscillating; }
};

/// Earth-rotation phase between spools 1 and 3, (2 pi c / lambda)(tau_1 - tau_3),
/// with T_i = N_i l_i / c. The spools must share radius, inclination, azimuth,
/// latitude, angular speed and axial speed; GeometryMismatch otherwise.
RotationPhase rotation_phase(const SpoolGeometry& spool1, const PhotonKinematics& kin1,
                             const SpoolGeometry& spool3, const PhotonKinematics& kin3,
                             double wavelength, const PhysicalConstants& consts = {});

/// Oscillating term for an East-West tilt axis (xi = n pi) and zero entry planes:
///   -gamma0^-1 (4 pi b R Omega / (lambda c)) cos(latitude) cos(xi)
///     sin(omega dl / 2c) cos(omega l_sum / 2c)
/// with dl = L1 - L3 and l_sum = L1 + L3 optical lengths.
double rotation_phase_oscillating(double optical_difference, double optical_sum,
                                  const SpoolGeometry& spool, const PhotonKinematics& kin,
                                  double wavelength, const PhysicalConstants& consts = {});

/// Amplitude gamma0^-1 (4 pi b R Omega / (lambda c)) |cos(latitude)|.
double oscillation_amplitude(const SpoolGeometry& spool, const PhotonKinematics& kin,
                             double wavelength, const PhysicalConstants& consts = {});

/// Period of the oscillating term in optical path difference, 4 pi c / omega.
double oscillation_period_optical(const PhotonKinematics& kin, const PhysicalConstants& consts = {});
/// The same period as fiber (geometric) length, 4 pi c / (omega N).
double oscillation_period_geometric(const PhotonKinematics& kin,
                                    const PhysicalConstants& consts = {});

struct AlignmentTolerance {
  double optical_path_difference = 0.0;  // largest |L1 - L3| keeping the term below the signal, m
  double exit_angle = 0.0;               // omega dl / c: angular offset of the exit planes, rad
  double arc_length = 0.0;               // b * exit_angle, m
  double angle_bound = 0.0;              // geometric fiber length difference over b, rad
  double linear_path_difference = 0.0;   // bound from the path-length term alone, m
  double gravitational_phase = 0.0;      // the signal compared against, rad
  bool exceeds_amplitude = false;        // signal above the oscillation amplitude
};

/// Inverts the oscillating term against the gravitational phase of `geom`
/// (worst case cos(omega l_sum / 2c) = 1) by bisection on its first rising
/// branch. When the signal exceeds the amplitude the bound saturates at the end
/// of that branch and `exceeds_amplitude` is set.
AlignmentTolerance required_alignment(const InterferometerGeometry& geom,
                                      const FiberOptical& fiber, const SpoolGeometry& spool,
                                      const PhotonKinematics& kin,
                                      const PhysicalConstants& consts = {});

FrameQuantities frame_quantities(const SpoolGeometry& spool, const PhotonKinematics& kin,
                                 double t, const PhysicalConstants& consts = {});

/// -eta(x', x'_L) / c^2 to first order: 1 - eps (a1 + a2_psi).
inline double relative_velocity_factor(const FrameQuantities& q) {
  return 1.0 - q.epsilon * (q.a1 + q.a2_psi);
}

}  // namespace fiberphase
