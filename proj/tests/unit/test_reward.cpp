#include <gtest/gtest.h>

#include <cmath>

#include "racesim/randomize.hpp"
#include "racesim/reward.hpp"

using namespace racesim;

namespace {

GateCrossing crossing(double y, double z, CrossingKind kind = CrossingKind::main, double d_g = 1.0) {
  GateCrossing c;
  c.y = y;
  c.z = z;
  c.kind = kind;
  c.half_extent = d_g;
  return c;
}

DroneState airborne() {
  DroneState s;
  s.position = Vec3(0, 0, -2);
  return s;
}

}  // namespace

TEST(RatePenalty, ZeroAtRest) { EXPECT_EQ(rate_penalty(Vec3::Zero(), 90.0), 0.0); }

TEST(RatePenalty, ValueAtClamp) {
  const double oracle = (std::exp(17.0) - 1.0) / (2.0 * 90.0 * 1e5);
  EXPECT_NEAR(rate_penalty(Vec3(17, 0, 0), 90.0), oracle, 1e-12);
  EXPECT_NEAR(oracle, 1.34194, 1e-4);
}

TEST(RatePenalty, UsesL1NormAndSaturates) {
  EXPECT_DOUBLE_EQ(rate_penalty(Vec3(-5, 6, 6), 90.0), rate_penalty(Vec3(17, 0, 0), 90.0));
  EXPECT_DOUBLE_EQ(rate_penalty(Vec3(40, 0, 0), 90.0), rate_penalty(Vec3(17, 0, 0), 90.0));
  EXPECT_NEAR(rate_penalty(Vec3(1, 1, 0), 90.0), (std::exp(2.0) - 1.0) / 1.8e7, 1e-15);
}

TEST(Progress, TelescopesAndVanishesInTunnel) {
  const Vec3 a(-5, 1, 0), b(-2, 0.5, 0.2);
  EXPECT_NEAR(progress_reward(a, b, false), a.norm() - b.norm(), 1e-15);
  EXPECT_EQ(progress_reward(a, b, true), 0.0);
}

TEST(GateReward, CenterEdgeAndBeyond) {
  EXPECT_EQ(gate_reward(crossing(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(gate_reward(crossing(0.5, -0.2)), 0.5);
  EXPECT_DOUBLE_EQ(gate_reward(crossing(0.1, 0.4, CrossingKind::main, 0.8)), 0.5);
  EXPECT_FALSE(crosses_outside_opening(crossing(1.0, 0)));
  EXPECT_TRUE(crosses_outside_opening(crossing(1.01, 0)));
}

TEST(Termination, GateCollisionOnAnyCheckpoint) {
  const DroneState s = airborne();
  for (CrossingKind k : {CrossingKind::pre, CrossingKind::main, CrossingKind::post}) {
    auto c = crossing(0.0, 1.2, k);
    c.gate_index = 2;
    const auto r = check_termination(s, std::optional<GateCrossing>(c));
    EXPECT_EQ(r.kind, TerminationKind::gate_collision);
    EXPECT_EQ(r.gate_index, 2);
  }
  EXPECT_FALSE(check_termination(s, std::optional<GateCrossing>(crossing(0.3, 0.3))).terminal());
}

TEST(Termination, GroundPredicates) {
  DroneState s;
  s.position = Vec3(0, 0, -0.3);
  EXPECT_EQ(ground_collision(s), 0u);
  s.velocity = Vec3(0, 0, 1.5);
  EXPECT_EQ(ground_collision(s), kGroundVerticalSpeed);
  s.velocity = Vec3::Zero();
  s.attitude = quat_from_euler(1.2, 0.0, 0.0);
  EXPECT_EQ(ground_collision(s), kGroundRoll);
  s.attitude = quat_from_euler(0.0, -1.1, 0.0);
  EXPECT_EQ(ground_collision(s), kGroundPitch);
  s.position.z() = -0.6;
  EXPECT_EQ(ground_collision(s), 0u);
  s.position.z() = -0.3;
  const auto r = check_termination(s, std::optional<GateCrossing>{});
  EXPECT_EQ(r.kind, TerminationKind::ground_collision);
  EXPECT_EQ(r.ground_predicates, kGroundPitch);
}

TEST(StepReward, CenterCrossingTotalsThirty) {
  const DroneState s = airborne();
  const GateCrossing c = crossing(0, 0);
  StepRewardInputs in;
  in.in_tunnel = true;
  in.crossings = std::span<const GateCrossing>(&c, 1);
  in.state = &s;
  const auto [r, t] = step_reward(in);
  EXPECT_EQ(r.gate, 1.0);
  EXPECT_EQ(r.total, 30.0);
  EXPECT_FALSE(t.terminal());
}

TEST(StepReward, WeightsAndSum) {
  const DroneState s = airborne();
  StepRewardInputs in;
  in.prev_to_target = Vec3(-5, 0, 0);
  in.curr_to_target = Vec3(-4.5, 0, 0);
  in.body_rates = Vec3(1, 0, 0);
  in.state = &s;
  const auto [r, t] = step_reward(in);
  EXPECT_NEAR(r.progress, 0.5, 1e-12);
  EXPECT_NEAR(r.rate, (std::exp(1.0) - 1.0) / 1.8e7, 1e-15);
  EXPECT_NEAR(r.total, 5.0 * r.progress - r.rate + 30.0 * r.gate, 1e-15);
}

TEST(StepReward, TerminalStepIsZero) {
  const DroneState s = airborne();
  const GateCrossing c = crossing(1.5, 0.0);
  StepRewardInputs in;
  in.prev_to_target = Vec3(-5, 0, 0);
  in.curr_to_target = Vec3(-4, 0, 0);
  in.body_rates = Vec3(3, 0, 0);
  in.crossings = std::span<const GateCrossing>(&c, 1);
  in.state = &s;
  const auto [r, t] = step_reward(in);
  EXPECT_EQ(t.kind, TerminationKind::gate_collision);
  EXPECT_EQ(r, RewardBreakdown{});
}

TEST(StepReward, RandomizedTotalsAreConsistent) {
  CounterRng rng(2, "reward");
  const DroneState s = airborne();
  for (int i = 0; i < 1000; ++i) {
    StepRewardInputs in;
    in.prev_to_target = Vec3(rng.uniform(-5, 0), rng.uniform(-1, 1), rng.uniform(-1, 1));
    in.curr_to_target = Vec3(rng.uniform(-5, 0), rng.uniform(-1, 1), rng.uniform(-1, 1));
    in.body_rates = Vec3(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
    in.state = &s;
    const auto [r, t] = step_reward(in);
    ASSERT_NEAR(r.total, 5.0 * (in.prev_to_target.norm() - in.curr_to_target.norm()) - r.rate, 1e-12);
  }
}
