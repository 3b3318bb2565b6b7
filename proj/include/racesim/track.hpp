#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "racesim/rotation.hpp"

namespace racesim {

/// Upright gate. The gate frame is the gate pose rotated by yaw only; +x is
/// the pass direction, so x < 0 means the gate is still ahead.
struct GateSpec {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double half_extent = 1.0;  // d_g
  double inner_size = 1.5;
  double outer_size = 2.7;
  bool visible = true;
};

enum class CrossingKind : unsigned char { pre = 0, main = 1, post = 2 };

const char* to_string(CrossingKind kind);

struct GateCrossing {
  int gate_index = 0;
  double y = 0.0;
  double z = 0.0;
  CrossingKind kind = CrossingKind::main;
  double half_extent = 1.0;  // d_g of the crossed gate

  bool operator==(const GateCrossing&) const = default;
};

/// Ordered list of gates in pass order, indexed cyclically.
class Track {
 public:
  Track(std::vector<GateSpec> gates, double tunnel_thickness);

  int size() const { return static_cast<int>(gates_.size()); }
  /// Cyclic lookup; negative indices wrap as well.
  const GateSpec& gate(long long index) const;
  int wrap(long long index) const;
  const std::vector<GateSpec>& gates() const { return gates_; }
  double tunnel_thickness() const { return tunnel_thickness_; }

  const GateSpec& pre_gate(long long index) const;
  const GateSpec& post_gate(long long index) const;

  /// Same track moved rigidly by `offset`.
  Track translated(const Vec3& offset) const;

 private:
  std::vector<GateSpec> gates_;
  std::vector<GateSpec> pre_;
  std::vector<GateSpec> post_;
  double tunnel_thickness_;
};

Vec3 world_to_gate(const Vec3& p_w, const GateSpec& gate);
Vec3 gate_to_world(const Vec3& p_g, const GateSpec& gate);
Vec3 gate_frame_velocity(const Vec3& v_w, const GateSpec& gate);

/// Reports a crossing iff x_prev < 0 <= x_curr, with (y, z) linearly
/// interpolated onto the gate plane.
std::optional<GateCrossing> detect_crossing(const Vec3& p_prev_g, const Vec3& p_curr_g,
                                            const GateSpec& gate, int gate_index,
                                            CrossingKind kind);

/// Invisible checkpoints at -t_g/2 and +t_g/2 along the gate normal.
std::pair<GateSpec, GateSpec> virtual_gates(const GateSpec& gate, double tunnel_thickness);

/// Track defaults applied to fields a track file leaves out.
struct TrackDefaults {
  double half_extent = 1.0;
  double tunnel_thickness = 0.8;
};

/// Parses a YAML track file. Throws TrackError carrying the line and field.
Track load_track(const std::string& path, const TrackDefaults& defaults = {});
Track parse_track(const std::string& text, const TrackDefaults& defaults = {},
                  const std::string& origin = "<string>");

}  // namespace racesim
