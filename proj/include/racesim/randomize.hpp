#pragma once

#include <cstdint>
#include <string_view>

#include "racesim/camera.hpp"
#include "racesim/dynamics.hpp"
#include "racesim/track.hpp"

namespace racesim {

/// Counter-based generator: output n of a stream is a pure function of
/// (seed, stream name, n), so streams never perturb each other.
class CounterRng {
 public:
  CounterRng() : CounterRng(0, "default") {}
  CounterRng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class Mode : unsigned char { train = 0, eval = 1 };

const char* to_string(Mode mode);

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double sample(CounterRng& rng) const { return rng.uniform(lo, hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double mid() const { return 0.5 * (lo + hi); }
  bool operator==(const Range&) const = default;
};

struct InitialStateRanges {
  Range x_g{-4.0, -2.0};
  Range y_g{-1.0, 1.0};
  Range z_g{0.0, 1.3};
  Range rates{-0.1, 0.1};
  Range motor_fraction{0.25, 0.5};  // of omega_max
  Range attitude{-kPi / 9.0, kPi / 9.0};  // roll, pitch and gate-relative yaw

  bool operator==(const InitialStateRanges&) const = default;
};

/// Episode randomization and disturbance settings. `defaults(mode)` returns
/// the identified training/evaluation setup.
struct RandomizationConfig {
  Mode mode = Mode::train;

  Range camera_roll_deg{-5.0, 5.0};
  Range camera_pitch_deg{45.0, 55.0};
  Range camera_yaw_deg{-5.0, 5.0};

  double motor_bound_band = 0.20;  // omega_min, omega_max
  double param_band = 0.30;        // every other entry of d

  Range accel_slow{-3.0, 3.0};
  Range moment_slow{-3.0, 3.0};
  Range moment_fast{-125.0, 125.0};
  Range action_fast{-0.2, 0.2};
  double slow_change_probability = 0.01;

  double gate_half_extent = 0.8;
  double tunnel_thickness = 0.8;

  InitialStateRanges train_initial{};
  InitialStateRanges eval_initial{{-4.0, -2.0}, {-1.0, 1.0}, {0.7, 1.3}};
  /// Probability of drawing from the training initial-state column and any gate;
  /// otherwise the evaluation column at the start gate.
  double any_gate_probability = 0.7;

  Range shutter{0.0, 0.02};
  double erosion_probability = 0.5;
  double erosion_change_probability = 0.01;

  bool randomize_dynamics = true;
  bool randomize_extrinsics = true;
  bool disturbances = true;
  bool augmentations = true;

  static RandomizationConfig defaults(Mode mode);
  void validate() const;
  bool operator==(const RandomizationConfig&) const = default;
};

struct EpisodeDraw {
  DynamicsParams params;
  CameraExtrinsics extrinsics;
  DroneState initial;
  int start_gate = 0;
  bool training_column = false;
  bool erosion_active = false;
  double shutter = 0.0;
};

/// Samples one episode realization. Every draw is consumed regardless of the
/// enable flags so toggling one never shifts the others.
EpisodeDraw sample_episode(const RandomizationConfig& config, const DynamicsParams& nominal,
                           const Track& track, std::uint64_t seed);

/// Disturbance processes. Slow components change with probability
/// `slow_change_probability` per control step, fast ones every step.
struct DisturbanceState {
  Vec3 accel_slow = Vec3::Zero();
  Vec3 moment_slow = Vec3::Zero();
  Vec3 moment_fast = Vec3::Zero();
  Vec4 action_fast = Vec4::Zero();

  /// The slow and fast moment components are summed.
  DisturbanceSample sample() const;
};

DisturbanceState initial_disturbances(const RandomizationConfig& config, CounterRng& rng);

struct DisturbanceUpdate {
  DisturbanceState state;
  bool accel_resampled = false;
  bool moment_resampled = false;
};

DisturbanceUpdate update_disturbances(const DisturbanceState& current,
                                      const RandomizationConfig& config, CounterRng& rng);

/// Erosion on/off process, held for 1/erosion_change_probability steps on average.
bool update_erosion(bool active, const RandomizationConfig& config, CounterRng& rng);

}  // namespace racesim
