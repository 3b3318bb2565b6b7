#include "racesim/reward.hpp"

#include <algorithm>
#include <cmath>

namespace racesim {

const char* to_string(TerminationKind kind) {
  switch (kind) {
    case TerminationKind::none: return "none";
    case TerminationKind::gate_collision: return "gate_collision";
    case TerminationKind::ground_collision: return "ground_collision";
  }
  return "?";
}

double rate_penalty(const Vec3& body_rates, double control_frequency) {
  const double l1 = body_rates.lpNorm<1>();
  return std::expm1(std::min(l1, kRateClamp)) / (2.0 * control_frequency * 1e5);
}

double progress_reward(const Vec3& p_prev, const Vec3& p_curr, bool in_tunnel) {
  if (in_tunnel) return 0.0;
  return p_prev.norm() - p_curr.norm();
}

double gate_reward(const GateCrossing& crossing, double half_extent) {
  return 1.0 - std::max(std::abs(crossing.y), std::abs(crossing.z)) / half_extent;
}

bool crosses_outside_opening(const GateCrossing& crossing) {
  return std::max(std::abs(crossing.y), std::abs(crossing.z)) / crossing.half_extent > 1.0;
}

unsigned ground_collision(const DroneState& state) {
  if (!(state.position.z() > -0.5)) return 0;
  const Vec3 euler = euler_from_quat(state.attitude);
  unsigned fired = 0;
  if (state.velocity.z() > 1.0) fired |= kGroundVerticalSpeed;
  if (std::abs(euler.x()) > kPi / 3.0) fired |= kGroundRoll;
  if (std::abs(euler.y()) > kPi / 3.0) fired |= kGroundPitch;
  return fired;
}

TerminationReason check_termination(const DroneState& state,
                                    std::span<const GateCrossing> crossings) {
  TerminationReason reason;
  for (const auto& c : crossings) {
    if (crosses_outside_opening(c)) {
      reason.kind = TerminationKind::gate_collision;
      reason.gate_index = c.gate_index;
      return reason;
    }
  }
  if (unsigned fired = ground_collision(state)) {
    reason.kind = TerminationKind::ground_collision;
    reason.ground_predicates = fired;
  }
  return reason;
}

TerminationReason check_termination(const DroneState& state,
                                    const std::optional<GateCrossing>& crossing) {
  if (crossing) return check_termination(state, std::span<const GateCrossing>(&*crossing, 1));
  return check_termination(state, std::span<const GateCrossing>());
}

std::pair<RewardBreakdown, TerminationReason> step_reward(const StepRewardInputs& in) {
  TerminationReason reason;
  if (in.state) {
    reason = check_termination(*in.state, in.crossings);
  } else {
    for (const auto& c : in.crossings) {
      if (crosses_outside_opening(c)) {
        reason.kind = TerminationKind::gate_collision;
        reason.gate_index = c.gate_index;
        break;
      }
    }
  }

  RewardBreakdown r;
  if (reason.terminal()) return {r, reason};

  r.progress = progress_reward(in.prev_to_target, in.curr_to_target, in.in_tunnel);
  r.rate = rate_penalty(in.body_rates, in.control_frequency);
  for (const auto& c : in.crossings) r.gate += gate_reward(c);
  r.total = kProgressWeight * r.progress - r.rate + kGateWeight * r.gate;
  return {r, reason};
}

}  // namespace racesim
