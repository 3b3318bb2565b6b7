#include <gtest/gtest.h>

#include <cmath>

#include "racesim/error.hpp"
#include "racesim/track.hpp"
#include "test_util.hpp"

using namespace racesim;

TEST(Track, CyclicIndexing) {
  const Track t = test::straight_track(3);
  EXPECT_EQ(t.wrap(3), 0);
  EXPECT_EQ(t.wrap(-1), 2);
  EXPECT_EQ(t.wrap(7), 1);
  EXPECT_EQ(t.gate(4).position, t.gate(1).position);
}

TEST(Track, NeedsTwoGates) {
  EXPECT_THROW(Track({GateSpec{}}, 0.8), TrackError);
}

TEST(Track, VirtualGatesSitHalfThicknessAlongNormal) {
  GateSpec g{Vec3(1, 2, -3), kPi / 2};
  const auto [pre, post] = virtual_gates(g, 0.8);
  EXPECT_LT((pre.position - Vec3(1, 1.6, -3)).norm(), 1e-12);
  EXPECT_LT((post.position - Vec3(1, 2.4, -3)).norm(), 1e-12);
  EXPECT_FALSE(pre.visible);
  EXPECT_FALSE(post.visible);
  const Track t({g, GateSpec{Vec3(10, 0, -3), 0.0}}, 0.8);
  EXPECT_LT((t.pre_gate(0).position - pre.position).norm(), 1e-12);
  EXPECT_LT((t.post_gate(2).position - post.position).norm(), 1e-12);
}

TEST(Track, GateFrameRoundTrip) {
  GateSpec g{Vec3(3, -1, -2), 0.7};
  const Vec3 p(5, 4, -1);
  EXPECT_LT((gate_to_world(world_to_gate(p, g), g) - p).norm(), 1e-12);
  // Ahead of the gate along its normal means negative x.
  const Vec3 ahead = g.position - Vec3(std::cos(0.7), std::sin(0.7), 0.0);
  EXPECT_NEAR(world_to_gate(ahead, g).x(), -1.0, 1e-12);
  EXPECT_NEAR(gate_frame_velocity(Vec3(std::cos(0.7), std::sin(0.7), 0.5), g).x(), 1.0, 1e-12);
}

TEST(Crossing, FiresOnlyForwardThroughThePlane) {
  GateSpec g;
  auto c = detect_crossing(Vec3(-0.5, 0.2, -0.4), Vec3(0.5, 0.4, -0.2), g, 0, CrossingKind::main);
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->y, 0.3, 1e-12);
  EXPECT_NEAR(c->z, -0.3, 1e-12);
  EXPECT_FALSE(detect_crossing(Vec3(0.5, 0, 0), Vec3(-0.5, 0, 0), g, 0, CrossingKind::main));
  EXPECT_FALSE(detect_crossing(Vec3(-0.5, 0, 0), Vec3(-0.1, 0, 0), g, 0, CrossingKind::main));
  EXPECT_TRUE(detect_crossing(Vec3(-0.5, 0, 0), Vec3(0.0, 0, 0), g, 0, CrossingKind::main));
}

TEST(Parse, ReadsGatesAndDefaults) {
  const Track t = parse_track(R"(
tunnel_thickness: 0.6
gates:
  - position: [0, 0, -1]
    yaw: 0.5
  - position: [4, 0, -1]
    half_extent: 0.7
    visible: false
)", {0.9, 0.8});
  EXPECT_EQ(t.size(), 2);
  EXPECT_DOUBLE_EQ(t.tunnel_thickness(), 0.6);
  EXPECT_DOUBLE_EQ(t.gate(0).yaw, 0.5);
  EXPECT_DOUBLE_EQ(t.gate(0).half_extent, 0.9);
  EXPECT_DOUBLE_EQ(t.gate(1).half_extent, 0.7);
  EXPECT_FALSE(t.gate(1).visible);
}

TEST(Parse, ErrorsCarryLineAndField) {
  try {
    parse_track("gates:\n  - position: [0, 0, -1]\n  - position: [1, 2]\n", {}, "t.yaml");
    FAIL();
  } catch (const TrackError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "gates[1].position");
    EXPECT_EQ(e.code(), ErrorCode::track);
  }
  try {
    parse_track("gates:\n  - position: [0, 0, -1]\n  - position: [1, 0, 0]\n    outer_size: 1.0\n");
    FAIL();
  } catch (const TrackError& e) {
    EXPECT_EQ(e.field(), "gates[1].outer_size");
  }
  EXPECT_THROW(parse_track("gates:\n  - position: [0, 0, -1]\n"), TrackError);
  EXPECT_THROW(parse_track("gates: [[[\n"), TrackError);
  EXPECT_THROW(load_track("/nonexistent/track.yaml"), TrackError);
}

TEST(Parse, BundledTracksLoad) {
  for (const char* name : {"tracks/triangle.yaml", "tracks/oval.yaml", "tracks/line.yaml"}) {
    EXPECT_NO_THROW(load_track(test::source_path(name))) << name;
  }
}
