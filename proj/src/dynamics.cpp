#include "racesim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "racesim/error.hpp"

namespace racesim {

void DynamicsParams::validate() const {
  if (!(omega_min < omega_max)) {
    throw ConfigError("dynamics: omega_min (" + std::to_string(omega_min) +
                      ") must be below omega_max (" + std::to_string(omega_max) + ")");
  }
  if (!(omega_min > 0.0)) throw ConfigError("dynamics: omega_min must be positive");
  if (!(tau > 0.0)) throw ConfigError("dynamics: tau must be positive");
  if (!(k >= 0.0 && k <= 1.0)) throw ConfigError("dynamics: k must lie in [0, 1]");
  if (!(r_prop > 0.0)) throw ConfigError("dynamics: r_prop must be positive");
  if (!(k_w > 0.0)) throw ConfigError("dynamics: k_w must be positive");
}

std::array<double, kParamCount> DynamicsParams::to_vector() const {
  std::array<double, kParamCount> d{};
  int i = 0;
  for_each_param(*this, [&](std::string_view, const double& v) { d[i++] = v; });
  return d;
}

DynamicsParams DynamicsParams::from_vector(const std::array<double, kParamCount>& d,
                                           double r_prop) {
  DynamicsParams p;
  int i = 0;
  for_each_param(p, [&](std::string_view, double& v) { v = d[i++]; });
  p.r_prop = r_prop;
  return p;
}

DroneState::Vector DroneState::to_vector() const {
  Vector x;
  x.segment<3>(0) = position;
  x(3) = attitude.w();
  x(4) = attitude.x();
  x(5) = attitude.y();
  x(6) = attitude.z();
  x.segment<3>(7) = velocity;
  x.segment<3>(10) = body_rates;
  x.segment<4>(13) = motor_speeds;
  return x;
}

DroneState DroneState::from_vector(const Vector& x) {
  DroneState s;
  s.position = x.segment<3>(0);
  s.attitude = Quat(x(3), x(4), x(5), x(6));
  s.velocity = x.segment<3>(7);
  s.body_rates = x.segment<3>(10);
  s.motor_speeds = x.segment<4>(13);
  return s;
}

Action Action::clamped(const Vec4& raw) {
  Action a;
  a.u = raw.cwiseMax(0.0).cwiseMin(1.0);
  return a;
}

double motor_steady_speed(double u, double eps_u, const DynamicsParams& params) {
  const double u_eff = std::clamp(u + eps_u, 0.0, 1.0);
  const double shape = params.k * u_eff * u_eff + (1.0 - params.k) * u_eff;
  return (params.omega_max - params.omega_min) * std::sqrt(shape) + params.omega_min;
}

double motor_command_for_speed(double speed, const DynamicsParams& params) {
  const double span = params.omega_max - params.omega_min;
  const double y = std::clamp((speed - params.omega_min) / span, 0.0, 1.0);
  // Solve k u^2 + (1 - k) u = y^2 for the root in [0, 1].
  const double a = 1.0 - params.k;
  const double denom = a + std::sqrt(a * a + 4.0 * params.k * y * y);
  if (denom <= 0.0) return y;  // k == 1 and y == 0
  return std::clamp(2.0 * y * y / denom, 0.0, 1.0);
}

Vec3 specific_force(const Vec3& v_body, const Vec4& motor_speeds,
                    const DynamicsParams& params) {
  const double sum_w = motor_speeds.sum();
  const double sum_w2 = motor_speeds.squaredNorm();
  const double inflow = params.r_prop * sum_w;
  const double vx = v_body.x(), vy = v_body.y(), vz = v_body.z();
  // atan2 equals atan(num / inflow) for inflow > 0 and stays finite at 0.
  const double alpha = std::atan2(vz, inflow);
  const double mu = std::atan2(vx * vx + vy * vy, inflow);
  return {
    -params.k_x * vx * sum_w - params.k_x2 * vx * std::abs(vx),
    -params.k_y * vy * sum_w - params.k_y2 * vy * std::abs(vy),
    -params.k_w * (1.0 + params.k_angle * alpha + params.k_hor * mu) * sum_w2 -
      params.k_v2 * vz * std::abs(vz),
  };
}

Vec3 angular_accel(const Vec4& w, const Vec4& w_dot, const Vec3& rates,
                   const DynamicsParams& params) {
  const Vec4 w2 = w.cwiseProduct(w);
  const auto& kp = params.k_p;
  const auto& kq = params.k_q;
  const auto& kr = params.k_r;
  const auto& krd = params.k_rd;
  const double p = rates.x(), q = rates.y(), r = rates.z();
  return {
    -kp[0] * w2[0] - kp[1] * w2[1] + kp[2] * w2[2] + kp[3] * w2[3] + params.j_x * q * r,
    -kq[0] * w2[0] + kq[1] * w2[1] - kq[2] * w2[2] + kq[3] * w2[3] + params.j_y * p * r,
    -kr[0] * w[0] + kr[1] * w[1] + kr[2] * w[2] - kr[3] * w[3] -
      krd[0] * w_dot[0] + krd[1] * w_dot[1] + krd[2] * w_dot[2] - krd[3] * w_dot[3] +
      params.j_z * p * q,
  };
}

DroneState::Vector state_derivative(const DroneState& state, const Vec4& motor_targets,
                                    const DisturbanceSample& dist,
                                    const DynamicsParams& params) {
  const Quat q_unit = state.attitude.normalized();
  const Mat3 body_to_world = q_unit.toRotationMatrix();
  const Vec3 v_body = body_to_world.transpose() * state.velocity;

  const Vec4 motor_accel = (motor_targets - state.motor_speeds) / params.tau;
  const Vec3 force = specific_force(v_body, state.motor_speeds, params);
  const Vec3 moment = angular_accel(state.motor_speeds, motor_accel, state.body_rates, params);

  // q_dot = 0.5 * q (x) [0, p, q, r]
  const Quat rate_quat(0.0, state.body_rates.x(), state.body_rates.y(), state.body_rates.z());
  const Quat q_dot = state.attitude * rate_quat;

  DroneState::Vector dx;
  dx.segment<3>(0) = state.velocity;
  dx(3) = 0.5 * q_dot.w();
  dx(4) = 0.5 * q_dot.x();
  dx(5) = 0.5 * q_dot.y();
  dx(6) = 0.5 * q_dot.z();
  dx.segment<3>(7) = kGravity * Vec3::UnitZ() + body_to_world * force + dist.accel;
  dx.segment<3>(10) = moment + dist.moment;
  dx.segment<4>(13) = motor_accel;
  return dx;
}

DroneState rk4_step(const DroneState& state, const Action& action,
                    const DisturbanceSample& dist, const DynamicsParams& params,
                    double dt) {
  Vec4 targets;
  for (int i = 0; i < 4; ++i) {
    targets[i] = motor_steady_speed(action.u[i], dist.action[i], params);
  }
  auto f = [&](const DroneState::Vector& x) {
    return state_derivative(DroneState::from_vector(x), targets, dist, params);
  };

  const DroneState::Vector x0 = state.to_vector();
  const DroneState::Vector k1 = f(x0);
  const DroneState::Vector k2 = f(x0 + 0.5 * dt * k1);
  const DroneState::Vector k3 = f(x0 + 0.5 * dt * k2);
  const DroneState::Vector k4 = f(x0 + dt * k3);
  DroneState next = DroneState::from_vector(x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));

  next.attitude.normalize();
  next.motor_speeds = next.motor_speeds.cwiseMax(0.0);
  return next;
}

double rotor_specific_thrust(const Vec4& motor_speeds, const DynamicsParams& params) {
  return params.k_w * motor_speeds.squaredNorm();
}

double hover_speed(const DynamicsParams& params) {
  return std::sqrt(kGravity / (4.0 * params.k_w));
}

HoverTrim solve_hover_trim(const DynamicsParams& params) {
  const auto& kp = params.k_p;
  const auto& kq = params.k_q;
  const auto& kr = params.k_r;
  // Sign pattern of each motor in the roll, pitch and yaw moment rows.
  const Vec4 sp(-kp[0], -kp[1], kp[2], kp[3]);
  const Vec4 sq(-kq[0], kq[1], -kq[2], kq[3]);
  const Vec4 sr(-kr[0], kr[1], kr[2], -kr[3]);

  Vec4 w = Vec4::Constant(hover_speed(params));
  for (int iter = 0; iter < 50; ++iter) {
    const Vec4 w2 = w.cwiseProduct(w);
    const Vec4 residual(params.k_w * w2.sum() - kGravity, sp.dot(w2), sq.dot(w2), sr.dot(w));
    Eigen::Matrix4d jac;
    jac.row(0) = 2.0 * params.k_w * w.transpose();
    jac.row(1) = 2.0 * sp.cwiseProduct(w).transpose();
    jac.row(2) = 2.0 * sq.cwiseProduct(w).transpose();
    jac.row(3) = sr.transpose();
    const Vec4 step = jac.partialPivLu().solve(residual);
    w -= step;
    if (!w.allFinite()) break;
    if (step.cwiseAbs().maxCoeff() < 1e-11 * w.cwiseAbs().maxCoeff()) break;
  }
  if (!w.allFinite() || w.minCoeff() < params.omega_min || w.maxCoeff() > params.omega_max) {
    throw ConfigError("dynamics: no hover trim inside the motor speed range");
  }

  HoverTrim trim;
  trim.motor_speeds = w;
  for (int i = 0; i < 4; ++i) trim.action.u[i] = motor_command_for_speed(w[i], params);
  // Hold exactly the speeds the commands reproduce.
  for (int i = 0; i < 4; ++i) {
    trim.motor_speeds[i] = motor_steady_speed(trim.action.u[i], 0.0, params);
  }
  return trim;
}

}  // namespace racesim
