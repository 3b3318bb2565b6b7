#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "racesim/camera.hpp"
#include "racesim/randomize.hpp"

using namespace racesim;

namespace {

Track single_gate_track(const GateSpec& g) {
  GateSpec far = g;
  far.position = g.position + Vec3(0, 0, 100);
  far.visible = false;
  return Track({g, far}, 0.8);
}

}  // namespace

TEST(Intrinsics, ScaleWithResolution) {
  const auto K = nominal_intrinsics(128, 96);
  EXPECT_DOUBLE_EQ(K.fx, 50.0);
  EXPECT_DOUBLE_EQ(K.fy, 37.5);
  EXPECT_DOUBLE_EQ(K.cx, 64.0);
  EXPECT_DOUBLE_EQ(K.cy, 48.0);
}

TEST(Projection, PinholeAndBehindCamera) {
  const CameraIntrinsics K;
  const auto uv = project(Vec3(1.0, -0.5, 5.0), K);
  ASSERT_TRUE(uv);
  EXPECT_DOUBLE_EQ(uv->x(), 37.0);
  EXPECT_DOUBLE_EQ(uv->y(), 29.5);
  EXPECT_FALSE(project(Vec3(0, 0, 0), K));
  EXPECT_FALSE(project(Vec3(0, 0, -1), K));
}

TEST(Projection, ZeroExtrinsicsLookAlongBodyX) {
  // Body +x is forward, +y right, +z down; optical is right, down, forward.
  const Vec3 p = world_to_optical(Vec3(3, 1, 2), Vec3::Zero(), Quat::Identity(), {});
  EXPECT_LT((p - Vec3(1, 2, 3)).norm(), 1e-12);
}

TEST(Render, OuterCornersMatchProjection) {
  GateSpec g{Vec3(4, 0.3, -1.8), 0.15};
  const Track track = single_gate_track(g);
  const CameraIntrinsics K;
  const Vec3 pos(0, 0, -1.5);
  const Quat att = quat_from_euler(0.2, -0.1, 0.1);
  const MaskImage mask = render_mask(pos, att, {}, K, track);
  ASSERT_GT(mask.count(), 0u);
  const double h = 0.5 * g.outer_size;
  for (double y : {-h, h}) {
    for (double z : {-h, h}) {
      const Vec3 corner = gate_to_world(Vec3(0, y, z), g);
      const auto uv = project(world_to_optical(corner, pos, att, {}), K);
      ASSERT_TRUE(uv);
      ASSERT_GT(uv->x(), 2.0);
      ASSERT_LT(uv->x(), 62.0);
      double best = 1e9;
      for (int v = 0; v < K.height; ++v) {
        for (int u = 0; u < K.width; ++u) {
          if (mask.at(u, v)) best = std::min(best, std::hypot(u + 0.5 - uv->x(), v + 0.5 - uv->y()));
        }
      }
      EXPECT_LE(best, 1.5) << "corner " << y << "," << z;
    }
  }
}

TEST(Render, CenteredGateIsSymmetric) {
  GateSpec g{Vec3(5, 0, 0), 0.0};
  const MaskImage mask = render_mask(Vec3::Zero(), Quat::Identity(), {}, CameraIntrinsics{},
                                     single_gate_track(g));
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 64; ++u) {
      ASSERT_EQ(mask.at(u, v), mask.at(63 - u, v));
      ASSERT_EQ(mask.at(u, v), mask.at(u, 63 - v));
    }
  }
  // Outer half-width 1.35 at 5 m is 6.75 px; inner 0.75 is 3.75 px.
  EXPECT_EQ(mask.at(32 + 5, 32), 1);
  EXPECT_EQ(mask.at(32 + 2, 32), 0);
  EXPECT_EQ(mask.at(32 + 8, 32), 0);
}

TEST(Render, InvisibleAndBehindGatesAreNotDrawn) {
  GateSpec g{Vec3(-5, 0, 0), 0.0};
  EXPECT_EQ(render_mask(Vec3::Zero(), Quat::Identity(), {}, {}, single_gate_track(g)).count(), 0u);
  g.position = Vec3(5, 0, 0);
  g.visible = false;
  EXPECT_EQ(render_mask(Vec3::Zero(), Quat::Identity(), {}, {}, single_gate_track(g)).count(), 0u);
}

TEST(Mask, PackUnpackRoundTrip) {
  CounterRng rng(3, "mask");
  MaskImage m(13, 7);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 13; ++x) m.set(x, y, rng.bernoulli(0.4));
  }
  const auto packed = m.pack();
  EXPECT_EQ(packed.size(), (13u * 7u + 7u) / 8u);
  EXPECT_EQ(MaskImage::unpack(13, 7, packed.data()), m);
  MaskImage first(8, 1);
  first.set(0, 0, 1);
  first.set(7, 0, 1);
  EXPECT_EQ(first.pack()[0], 0x81);
}

TEST(Shutter, ZeroExposureIsIdentity) {
  MaskImage m;
  m.set(10, 20, 1);
  m.set(50, 3, 1);
  EXPECT_EQ(rolling_shutter_warp(m, 0.0, 7.0, -4.0), m);
}

TEST(Shutter, PitchRateScalesRowsAboutCenter) {
  MaskImage m;
  m.set(10, 44, 1);
  // Row y samples 1.2 y - 6.4, so output row 42 reads input row 44.
  const MaskImage w = rolling_shutter_warp(m, 0.02, 10.0, 0.0);
  EXPECT_EQ(w.at(10, 42), 1);
  EXPECT_EQ(w.count(), 1u);
}

TEST(Shutter, YawRateShearsAboutCenterRow) {
  MaskImage m;
  m.set(20, 32, 1);
  m.set(20, 42, 1);
  // x samples x - 0.2 y + 6.4: row 32 is fixed, row 42 shifts by +2.
  const MaskImage w = rolling_shutter_warp(m, 0.02, 0.0, 10.0);
  EXPECT_EQ(w.at(20, 32), 1);
  EXPECT_EQ(w.at(22, 42), 1);
  EXPECT_EQ(w.count(), 2u);
}

TEST(Erosion, ShrinksBlocksAndKeepsFullImage) {
  MaskImage m;
  for (int y = 10; y < 15; ++y) {
    for (int x = 20; x < 25; ++x) m.set(x, y, 1);
  }
  m.set(40, 40, 1);
  const MaskImage e = erode_mask(m);
  EXPECT_EQ(e.count(), 9u);
  for (int y = 11; y < 14; ++y) {
    for (int x = 21; x < 24; ++x) EXPECT_EQ(e.at(x, y), 1);
  }
  MaskImage full;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) full.set(x, y, 1);
  }
  EXPECT_EQ(erode_mask(full), full);
}

TEST(Extrinsics, RatesRotateIntoCamera) {
  EXPECT_LT((body_rates_to_camera(Vec3(1, 2, 3), {}) - Vec3(1, 2, 3)).norm(), 1e-15);
  const double th = 50.0 * kPi / 180.0;
  const Vec3 c = body_rates_to_camera(Vec3(0, 0, 1), {0.0, th, 0.0});
  EXPECT_NEAR(c.x(), -std::sin(th), 1e-12);
  EXPECT_NEAR(c.y(), 0.0, 1e-12);
  EXPECT_NEAR(c.z(), std::cos(th), 1e-12);
}

TEST(Pgm, WritesBinaryP5) {
  MaskImage m(4, 2);
  m.set(1, 0, 1);
  m.set(3, 1, 1);
  const auto path = std::filesystem::temp_directory_path() / "racesim_test_mask.pgm";
  write_pgm(path.string(), m);
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string header = "P5\n4 2\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 8);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  const std::string body = bytes.substr(header.size());
  EXPECT_EQ(static_cast<unsigned char>(body[1]), 255);
  EXPECT_EQ(static_cast<unsigned char>(body[7]), 255);
  EXPECT_EQ(static_cast<unsigned char>(body[0]), 0);
  std::filesystem::remove(path);
  EXPECT_THROW(write_pgm("/nonexistent/dir/x.pgm", m), std::exception);
}
