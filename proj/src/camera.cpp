#include "racesim/camera.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "racesim/error.hpp"

namespace racesim {

CameraIntrinsics nominal_intrinsics(int width, int height) {
  CameraIntrinsics K;
  K.width = width;
  K.height = height;
  K.fx = 25.0 / 64.0 * width;
  K.fy = 25.0 / 64.0 * height;
  K.cx = 0.5 * width;
  K.cy = 0.5 * height;
  return K;
}

Mat3 CameraExtrinsics::camera_to_body() const {
  return rotation_from_euler(roll, pitch, yaw);
}

std::size_t MaskImage::count() const {
  return std::accumulate(pixels_.begin(), pixels_.end(), std::size_t{0});
}

std::vector<std::uint8_t> MaskImage::pack() const {
  std::vector<std::uint8_t> out((pixels_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    if (pixels_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

MaskImage MaskImage::unpack(int width, int height, const std::uint8_t* bytes) {
  MaskImage m(width, height);
  for (std::size_t i = 0; i < m.pixels_.size(); ++i) {
    m.pixels_[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  return m;
}

std::optional<Eigen::Vector2d> project(const Vec3& p, const CameraIntrinsics& K) {
  if (!(p.z() > 0.0)) return std::nullopt;
  return Eigen::Vector2d(K.fx * p.x() / p.z() + K.cx, K.fy * p.y() / p.z() + K.cy);
}

namespace {

// Optical (right, down, forward) to camera forward-right-down.
Mat3 optical_to_camera() {
  Mat3 m;
  m << 0, 0, 1,
       1, 0, 0,
       0, 1, 0;
  return m;
}

}  // namespace

Vec3 world_to_optical(const Vec3& p_w, const Vec3& position, const Quat& attitude,
                      const CameraExtrinsics& extrinsics) {
  const Mat3 optical_to_world =
    attitude.toRotationMatrix() * extrinsics.camera_to_body() * optical_to_camera();
  return optical_to_world.transpose() * (p_w - position);
}

MaskImage render_mask(const Vec3& position, const Quat& attitude,
                      const CameraExtrinsics& extrinsics, const CameraIntrinsics& K,
                      const Track& track) {
  MaskImage mask(K.width, K.height);
  const Mat3 optical_to_world =
    attitude.normalized().toRotationMatrix() * extrinsics.camera_to_body() * optical_to_camera();

  struct GateRays {
    Vec3 origin;  // camera position in the gate frame
    Mat3 dir;     // optical ray direction -> gate frame
    double inner;
    double outer;
  };
  std::vector<GateRays> gates;
  for (const auto& g : track.gates()) {
    if (!g.visible) continue;
    const Mat3 world_to_gate_rot = yaw_rotation(g.yaw).transpose();
    gates.push_back({world_to_gate_rot * (position - g.position),
                     world_to_gate_rot * optical_to_world, 0.5 * g.inner_size,
                     0.5 * g.outer_size});
  }
  if (gates.empty()) return mask;

  for (int v = 0; v < K.height; ++v) {
    for (int u = 0; u < K.width; ++u) {
      const Vec3 ray((u + 0.5 - K.cx) / K.fx, (v + 0.5 - K.cy) / K.fy, 1.0);
      for (const auto& g : gates) {
        const Vec3 d = g.dir * ray;
        if (d.x() == 0.0) continue;
        const double t = -g.origin.x() / d.x();
        if (!(t > 0.0)) continue;
        const double y = g.origin.y() + t * d.y();
        const double z = g.origin.z() + t * d.z();
        const double m = std::max(std::abs(y), std::abs(z));
        if (m < g.outer && m >= g.inner) {
          mask.set(u, v, 1);
          break;
        }
      }
    }
  }
  return mask;
}

MaskImage rolling_shutter_warp(const MaskImage& mask, double s, double pitch_rate,
                               double yaw_rate) {
  const int W = mask.width(), H = mask.height();
  const double a00 = 1.0, a01 = -s * yaw_rate, a02 = 0.5 * W * s * yaw_rate;
  const double a11 = 1.0 + s * pitch_rate, a12 = -0.5 * H * s * pitch_rate;
  MaskImage out(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double xs = a00 * x + a01 * y + a02;
      const double ys = a11 * y + a12;
      const double xi = std::floor(xs + 0.5);
      const double yi = std::floor(ys + 0.5);
      if (xi < 0 || yi < 0 || xi >= W || yi >= H) continue;
      out.set(x, y, mask.at(static_cast<int>(xi), static_cast<int>(yi)));
    }
  }
  return out;
}

MaskImage erode_mask(const MaskImage& mask) {
  const int W = mask.width(), H = mask.height();
  MaskImage out(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      int sum = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          sum += mask.at(std::clamp(x + dx, 0, W - 1), std::clamp(y + dy, 0, H - 1));
        }
      }
      out.set(x, y, sum == 9);
    }
  }
  return out;
}

Vec3 body_rates_to_camera(const Vec3& body_rates, const CameraExtrinsics& extrinsics) {
  return extrinsics.camera_to_body().transpose() * body_rates;
}

void write_pgm(const std::string& path, const MaskImage& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
  std::vector<char> bytes(mask.pixels().size());
  std::transform(mask.pixels().begin(), mask.pixels().end(), bytes.begin(),
                 [](std::uint8_t v) { return static_cast<char>(v ? 255 : 0); });
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path);
}

}  // namespace racesim
