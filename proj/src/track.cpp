#include "racesim/track.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "racesim/error.hpp"

namespace racesim {

const char* to_string(CrossingKind kind) {
  switch (kind) {
    case CrossingKind::pre: return "pre";
    case CrossingKind::main: return "main";
    case CrossingKind::post: return "post";
  }
  return "?";
}

namespace {

void check_gate(const GateSpec& g, const std::string& origin, int line,
                const std::string& prefix = "") {
  if (!(g.half_extent > 0.0)) {
    throw TrackError(origin, line, prefix + "half_extent", "must be positive");
  }
  if (g.visible && !(g.inner_size > 0.0)) {
    throw TrackError(origin, line, prefix + "inner_size", "must be positive for a visible gate");
  }
  if (g.visible && !(g.outer_size > g.inner_size)) {
    throw TrackError(origin, line, prefix + "outer_size", "must exceed inner_size for a visible gate");
  }
  if (!g.position.allFinite() || !std::isfinite(g.yaw)) {
    throw TrackError(origin, line, prefix + "position", "non-finite gate pose");
  }
}

}  // namespace

Track::Track(std::vector<GateSpec> gates, double tunnel_thickness)
  : gates_(std::move(gates)), tunnel_thickness_(tunnel_thickness) {
  if (gates_.size() < 2) {
    throw TrackError("<track>", 0, "gates", "a track needs at least 2 gates");
  }
  if (!(tunnel_thickness_ >= 0.0)) {
    throw TrackError("<track>", 0, "tunnel_thickness", "must be non-negative");
  }
  for (const auto& g : gates_) {
    check_gate(g, "<track>", 0);
    auto [pre, post] = virtual_gates(g, tunnel_thickness_);
    pre_.push_back(pre);
    post_.push_back(post);
  }
}

int Track::wrap(long long index) const {
  const long long n = static_cast<long long>(gates_.size());
  return static_cast<int>(((index % n) + n) % n);
}

const GateSpec& Track::gate(long long index) const { return gates_[wrap(index)]; }
const GateSpec& Track::pre_gate(long long index) const { return pre_[wrap(index)]; }
const GateSpec& Track::post_gate(long long index) const { return post_[wrap(index)]; }

Track Track::translated(const Vec3& offset) const {
  std::vector<GateSpec> moved = gates_;
  for (auto& g : moved) g.position += offset;
  return Track(std::move(moved), tunnel_thickness_);
}

Vec3 world_to_gate(const Vec3& p_w, const GateSpec& gate) {
  return yaw_rotation(gate.yaw).transpose() * (p_w - gate.position);
}

Vec3 gate_to_world(const Vec3& p_g, const GateSpec& gate) {
  return yaw_rotation(gate.yaw) * p_g + gate.position;
}

Vec3 gate_frame_velocity(const Vec3& v_w, const GateSpec& gate) {
  return yaw_rotation(gate.yaw).transpose() * v_w;
}

std::optional<GateCrossing> detect_crossing(const Vec3& p_prev_g, const Vec3& p_curr_g,
                                            const GateSpec& gate, int gate_index,
                                            CrossingKind kind) {
  if (!(p_prev_g.x() < 0.0 && p_curr_g.x() >= 0.0)) return std::nullopt;
  const double t = -p_prev_g.x() / (p_curr_g.x() - p_prev_g.x());
  const Vec3 hit = p_prev_g + t * (p_curr_g - p_prev_g);
  GateCrossing c;
  c.gate_index = gate_index;
  c.y = hit.y();
  c.z = hit.z();
  c.kind = kind;
  c.half_extent = gate.half_extent;
  return c;
}

std::pair<GateSpec, GateSpec> virtual_gates(const GateSpec& gate, double tunnel_thickness) {
  const Vec3 normal(std::cos(gate.yaw), std::sin(gate.yaw), 0.0);
  GateSpec pre = gate;
  GateSpec post = gate;
  pre.position = gate.position - 0.5 * tunnel_thickness * normal;
  post.position = gate.position + 0.5 * tunnel_thickness * normal;
  pre.visible = false;
  post.visible = false;
  return {pre, post};
}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

template <typename T>
T read_scalar(const YAML::Node& node, const std::string& origin, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw TrackError(origin, line_of(node), field, "cannot parse value");
  }
}

}  // namespace

Track parse_track(const std::string& text, const TrackDefaults& defaults,
                  const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw TrackError(origin, e.mark.line + 1, "<syntax>", e.msg);
  }
  if (!root.IsMap()) throw TrackError(origin, 1, "<root>", "expected a mapping");

  double thickness = defaults.tunnel_thickness;
  if (root["tunnel_thickness"]) {
    thickness = read_scalar<double>(root["tunnel_thickness"], origin, "tunnel_thickness");
  }
  double default_half_extent = defaults.half_extent;
  if (root["half_extent"]) {
    default_half_extent = read_scalar<double>(root["half_extent"], origin, "half_extent");
  }

  const YAML::Node gates = root["gates"];
  if (!gates || !gates.IsSequence()) {
    throw TrackError(origin, line_of(root), "gates", "missing gate list");
  }

  std::vector<GateSpec> specs;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const YAML::Node g = gates[i];
    const std::string prefix = "gates[" + std::to_string(i) + "].";
    if (!g.IsMap()) throw TrackError(origin, line_of(g), "gates[" + std::to_string(i) + "]", "expected a mapping");

    GateSpec spec;
    spec.half_extent = default_half_extent;
    const YAML::Node pos = g["position"];
    if (!pos || !pos.IsSequence() || pos.size() != 3) {
      throw TrackError(origin, line_of(g), prefix + "position", "expected [x, y, z]");
    }
    for (int k = 0; k < 3; ++k) {
      spec.position[k] = read_scalar<double>(pos[k], origin, prefix + "position");
    }
    if (g["yaw"]) spec.yaw = read_scalar<double>(g["yaw"], origin, prefix + "yaw");
    if (g["half_extent"]) {
      spec.half_extent = read_scalar<double>(g["half_extent"], origin, prefix + "half_extent");
    }
    if (g["inner_size"]) {
      spec.inner_size = read_scalar<double>(g["inner_size"], origin, prefix + "inner_size");
    }
    if (g["outer_size"]) {
      spec.outer_size = read_scalar<double>(g["outer_size"], origin, prefix + "outer_size");
    }
    if (g["visible"]) spec.visible = read_scalar<bool>(g["visible"], origin, prefix + "visible");

    check_gate(spec, origin, line_of(g), prefix);
    specs.push_back(spec);
  }
  if (specs.size() < 2) throw TrackError(origin, line_of(gates), "gates", "a track needs at least 2 gates");
  if (!(thickness >= 0.0)) {
    throw TrackError(origin, line_of(root["tunnel_thickness"]), "tunnel_thickness", "must be non-negative");
  }
  return Track(std::move(specs), thickness);
}

Track load_track(const std::string& path, const TrackDefaults& defaults) {
  std::ifstream in(path);
  if (!in) throw TrackError(path, 0, "<file>", "cannot open track file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_track(buffer.str(), defaults, path);
}

}  // namespace racesim
