#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "racesim/rotation.hpp"
#include "racesim/track.hpp"

namespace racesim {

inline constexpr int kMaskSize = 64;

struct CameraIntrinsics {
  int width = kMaskSize;
  int height = kMaskSize;
  double fx = 25.0;
  double fy = 25.0;
  double cx = 32.0;
  double cy = 32.0;
};

/// fx = 25/64 W, fy = 25/64 H, principal point at the image center.
CameraIntrinsics nominal_intrinsics(int width, int height);

/// Body-to-camera Euler angles (yaw, then pitch, then roll). Zero extrinsics
/// put the optical axis along body +x with image rows along body +z.
struct CameraExtrinsics {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  /// Maps camera-frame (forward-right-down) vectors into the body frame.
  Mat3 camera_to_body() const;
  bool operator==(const CameraExtrinsics&) const = default;
};

/// Binary W x H mask stored row-major, one byte per pixel (0 or 1).
class MaskImage {
 public:
  MaskImage() : MaskImage(kMaskSize, kMaskSize) {}
  MaskImage(int width, int height) : width_(width), height_(height), pixels_(width * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }

  std::uint8_t at(int x, int y) const { return pixels_[y * width_ + x]; }
  void set(int x, int y, std::uint8_t v) { pixels_[y * width_ + x] = v ? 1 : 0; }

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::size_t count() const;

  /// Bit-packed rows, MSB first; ceil(W*H/8) bytes.
  std::vector<std::uint8_t> pack() const;
  static MaskImage unpack(int width, int height, const std::uint8_t* bytes);

  bool operator==(const MaskImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Pinhole projection of an optical-frame point (x right, y down, z forward).
/// Returns nullopt for points at or behind the camera.
std::optional<Eigen::Vector2d> project(const Vec3& p_optical, const CameraIntrinsics& K);

/// World point into the optical frame of a camera mounted at the body origin.
Vec3 world_to_optical(const Vec3& p_w, const Vec3& position, const Quat& attitude,
                      const CameraExtrinsics& extrinsics);

/// Rasterizes the frame (outer square minus inner opening) of every visible
/// gate by casting one ray per pixel center.
MaskImage render_mask(const Vec3& position, const Quat& attitude,
                      const CameraExtrinsics& extrinsics, const CameraIntrinsics& K,
                      const Track& track);

/// Nearest-neighbor affine warp; output (x, y) samples input at
/// A * [x, y, 1] with A = [[1, -s r, W/2 s r], [0, 1 + s q, -H/2 s q]].
MaskImage rolling_shutter_warp(const MaskImage& mask, double s, double pitch_rate,
                               double yaw_rate);

/// 3x3 average pool (edge replicated) thresholded at 1.
MaskImage erode_mask(const MaskImage& mask);

/// Body rates expressed in the camera frame: (roll, pitch, yaw) rates.
Vec3 body_rates_to_camera(const Vec3& body_rates, const CameraExtrinsics& extrinsics);

/// Binary PGM (P5), one byte per pixel, 0 or 255.
void write_pgm(const std::string& path, const MaskImage& mask);

}  // namespace racesim
