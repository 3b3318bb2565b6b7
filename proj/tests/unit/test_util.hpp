#pragma once

#include <string>

#include "racesim/env.hpp"

namespace racesim::test {

inline std::string source_path(const std::string& rel) {
  return std::string(RACESIM_SOURCE_DIR) + "/" + rel;
}

/// Nominal parameters, no randomization, disturbances or augmentations.
inline EnvConfig quiet_config(Mode mode = Mode::eval) {
  EnvConfig c;
  c.mode = mode;
  c.randomization = RandomizationConfig::defaults(mode);
  c.randomization.randomize_dynamics = false;
  c.randomization.randomize_extrinsics = false;
  c.randomization.disturbances = false;
  c.randomization.augmentations = false;
  c.track_path = source_path("tracks/triangle.yaml");
  return c;
}

inline Track straight_track(int gates = 3, double spacing = 10.0) {
  std::vector<GateSpec> g;
  for (int i = 0; i < gates; ++i) g.push_back(GateSpec{Vec3(spacing * i, 0.0, -2.0), 0.0});
  return Track(g, 0.8);
}

}  // namespace racesim::test
