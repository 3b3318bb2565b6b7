#pragma once

#include <optional>
#include <span>

#include "racesim/dynamics.hpp"
#include "racesim/track.hpp"

namespace racesim {

inline constexpr double kProgressWeight = 5.0;
inline constexpr double kGateWeight = 30.0;
inline constexpr double kRateClamp = 17.0;

struct RewardBreakdown {
  double progress = 0.0;
  double rate = 0.0;
  double gate = 0.0;
  double total = 0.0;

  bool operator==(const RewardBreakdown&) const = default;
};

enum class TerminationKind : unsigned char { none = 0, gate_collision = 1, ground_collision = 2 };

const char* to_string(TerminationKind kind);

/// Bits of the ground-collision predicate that fired.
enum GroundPredicate : unsigned {
  kGroundVerticalSpeed = 1u << 0,
  kGroundRoll = 1u << 1,
  kGroundPitch = 1u << 2,
};

struct TerminationReason {
  TerminationKind kind = TerminationKind::none;
  int gate_index = -1;             // gate_collision only
  unsigned ground_predicates = 0;  // ground_collision only

  bool terminal() const { return kind != TerminationKind::none; }
  bool operator==(const TerminationReason&) const = default;
};

double rate_penalty(const Vec3& body_rates, double control_frequency);

/// Distance progress toward the current target; zero inside the tunnel.
double progress_reward(const Vec3& p_prev, const Vec3& p_curr, bool in_tunnel);

double gate_reward(const GateCrossing& crossing, double half_extent);
inline double gate_reward(const GateCrossing& crossing) {
  return gate_reward(crossing, crossing.half_extent);
}

bool crosses_outside_opening(const GateCrossing& crossing);

/// Returns the fired predicate bits, 0 when the drone is clear of the ground.
unsigned ground_collision(const DroneState& state);

TerminationReason check_termination(const DroneState& state,
                                    std::span<const GateCrossing> crossings);
TerminationReason check_termination(const DroneState& state,
                                    const std::optional<GateCrossing>& crossing);

struct StepRewardInputs {
  Vec3 prev_to_target = Vec3::Zero();  // drone position relative to the target pre-gate
  Vec3 curr_to_target = Vec3::Zero();
  bool in_tunnel = false;
  Vec3 body_rates = Vec3::Zero();
  double control_frequency = 90.0;
  std::span<const GateCrossing> crossings;
  const DroneState* state = nullptr;  // required for the ground predicate
};

/// Weighted per-step reward. Terminal steps report every component as zero.
std::pair<RewardBreakdown, TerminationReason> step_reward(const StepRewardInputs& in);

}  // namespace racesim
