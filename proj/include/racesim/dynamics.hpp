#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

#include "racesim/rotation.hpp"

namespace racesim {

inline constexpr double kGravity = 9.81;

/// Number of entries in the dynamics parameter vector d.
inline constexpr int kParamCount = 31;

/// Specific-force quadcopter model coefficients. Defaults are the nominal
/// identified values for the 5-inch racing platform.
struct DynamicsParams {
  double k_w = 1.55e-6;
  double k_x = 5.37e-5;
  double k_y = 5.37e-5;
  double k_x2 = 4.10e-3;
  double k_y2 = 1.51e-2;
  double k_angle = 3.145;
  double k_hor = 7.245;
  double k_v2 = 0.0;
  double j_x = -0.89;
  double j_y = 0.96;
  double j_z = -0.34;
  double omega_min = 341.75;
  double omega_max = 3100.0;
  double k = 0.50;
  double tau = 0.03;
  std::array<double, 4> k_p{4.99e-5, 3.78e-5, 4.82e-5, 3.83e-5};
  std::array<double, 4> k_q{2.05e-5, 2.46e-5, 2.02e-5, 2.57e-5};
  std::array<double, 4> k_r{3.38e-3, 3.38e-3, 3.38e-3, 3.38e-3};
  // yaw moment per unit motor acceleration (k_r5..k_r8)
  std::array<double, 4> k_rd{3.24e-4, 3.24e-4, 3.24e-4, 3.24e-4};
  // Rotor radius used in the inflow-angle terms. Not part of d.
  double r_prop = 0.0635;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  std::array<double, kParamCount> to_vector() const;
  static DynamicsParams from_vector(const std::array<double, kParamCount>& d,
                                    double r_prop = 0.0635);

  bool operator==(const DynamicsParams&) const = default;
};

/// Visits every entry of d in vector order with its canonical name.
template <typename Params, typename F>
void for_each_param(Params& p, F&& f) {
  f(std::string_view("k_w"), p.k_w);
  f(std::string_view("k_x"), p.k_x);
  f(std::string_view("k_y"), p.k_y);
  f(std::string_view("k_x2"), p.k_x2);
  f(std::string_view("k_y2"), p.k_y2);
  f(std::string_view("k_angle"), p.k_angle);
  f(std::string_view("k_hor"), p.k_hor);
  f(std::string_view("k_v2"), p.k_v2);
  f(std::string_view("j_x"), p.j_x);
  f(std::string_view("j_y"), p.j_y);
  f(std::string_view("j_z"), p.j_z);
  f(std::string_view("omega_min"), p.omega_min);
  f(std::string_view("omega_max"), p.omega_max);
  f(std::string_view("k"), p.k);
  f(std::string_view("tau"), p.tau);
  static constexpr std::array<std::string_view, 4> kp{"k_p1", "k_p2", "k_p3", "k_p4"};
  static constexpr std::array<std::string_view, 4> kq{"k_q1", "k_q2", "k_q3", "k_q4"};
  static constexpr std::array<std::string_view, 4> kr{"k_r1", "k_r2", "k_r3", "k_r4"};
  static constexpr std::array<std::string_view, 4> krd{"k_r5", "k_r6", "k_r7", "k_r8"};
  for (int i = 0; i < 4; ++i) f(kp[i], p.k_p[i]);
  for (int i = 0; i < 4; ++i) f(kq[i], p.k_q[i]);
  for (int i = 0; i < 4; ++i) f(kr[i], p.k_r[i]);
  for (int i = 0; i < 4; ++i) f(krd[i], p.k_rd[i]);
}

/// Full continuous state. `attitude` rotates body-frame vectors into the
/// world (NED) frame.
struct DroneState {
  Vec3 position = Vec3::Zero();
  Quat attitude = Quat::Identity();
  Vec3 velocity = Vec3::Zero();
  Vec3 body_rates = Vec3::Zero();
  Vec4 motor_speeds = Vec4::Zero();

  static constexpr int kSize = 17;
  using Vector = Eigen::Matrix<double, kSize, 1>;

  /// Layout: position(3), quaternion w,x,y,z(4), velocity(3), rates(3), motors(4).
  Vector to_vector() const;
  static DroneState from_vector(const Vector& x);
};

struct DisturbanceSample {
  Vec3 accel = Vec3::Zero();   // world frame, m/s^2
  Vec3 moment = Vec3::Zero();  // rad/s^2
  Vec4 action = Vec4::Zero();  // added to the normalized command
};

struct Action {
  Vec4 u = Vec4::Zero();

  /// Clamps every command into [0, 1].
  static Action clamped(const Vec4& raw);
  bool is_finite() const { return u.allFinite(); }
};

/// Steady-state motor speed for a normalized command.
double motor_steady_speed(double u, double eps_u, const DynamicsParams& params);

/// Inverse of motor_steady_speed for eps_u = 0; speed is clamped into range.
double motor_command_for_speed(double speed, const DynamicsParams& params);

/// Body-frame specific force (m/s^2) from rotor thrust and drag.
Vec3 specific_force(const Vec3& v_body, const Vec4& motor_speeds,
                    const DynamicsParams& params);

/// Angular acceleration from motor moments and gyroscopic coupling.
Vec3 angular_accel(const Vec4& motor_speeds, const Vec4& motor_accel,
                   const Vec3& body_rates, const DynamicsParams& params);

DroneState::Vector state_derivative(const DroneState& state,
                                    const Vec4& motor_targets,
                                    const DisturbanceSample& dist,
                                    const DynamicsParams& params);

/// One fourth-order Runge-Kutta step with the command held constant.
DroneState rk4_step(const DroneState& state, const Action& action,
                    const DisturbanceSample& dist, const DynamicsParams& params,
                    double dt);

/// k_w * sum(omega_i^2): the rotor-thrust magnitude without inflow corrections.
double rotor_specific_thrust(const Vec4& motor_speeds, const DynamicsParams& params);

/// sqrt(g / (4 k_w)): equal-speed hover for a symmetric airframe.
double hover_speed(const DynamicsParams& params);

struct HoverTrim {
  Vec4 motor_speeds = Vec4::Zero();
  Action action;
};

/// Per-motor speeds that zero every moment while the rotor thrust balances
/// gravity at level attitude, plus the commands that hold them. Throws
/// ConfigError when no trim exists inside the motor range.
HoverTrim solve_hover_trim(const DynamicsParams& params);

}  // namespace racesim
