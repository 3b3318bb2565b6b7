#include "racesim/randomize.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "racesim/error.hpp"

namespace racesim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr double kDegToRad = kPi / 180.0;

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream)
  : key_(splitmix64(splitmix64(seed) ^ fnv1a(stream))) {}

std::uint64_t CounterRng::next_u64() {
  return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

const char* to_string(Mode mode) { return mode == Mode::train ? "train" : "eval"; }

RandomizationConfig RandomizationConfig::defaults(Mode mode) {
  RandomizationConfig c;
  c.mode = mode;
  if (mode == Mode::eval) {
    c.param_band = 0.20;
    c.accel_slow = {-2.0, 2.0};
    c.moment_slow = {-2.0, 2.0};
    c.moment_fast = {-100.0, 100.0};
    c.gate_half_extent = 1.0;
    c.any_gate_probability = 0.0;
  }
  return c;
}

void RandomizationConfig::validate() const {
  auto check_range = [](const Range& r, const char* name) {
    if (!(r.lo <= r.hi)) throw ConfigError(std::string("randomization: range ") + name + " has lo > hi");
  };
  check_range(camera_roll_deg, "camera_roll_deg");
  check_range(camera_pitch_deg, "camera_pitch_deg");
  check_range(camera_yaw_deg, "camera_yaw_deg");
  check_range(accel_slow, "accel_slow");
  check_range(moment_slow, "moment_slow");
  check_range(moment_fast, "moment_fast");
  check_range(action_fast, "action_fast");
  check_range(shutter, "shutter");
  auto check_prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("randomization: ") + name + " must lie in [0, 1]");
  };
  check_prob(slow_change_probability, "slow_change_probability");
  check_prob(any_gate_probability, "any_gate_probability");
  check_prob(erosion_probability, "erosion_probability");
  check_prob(erosion_change_probability, "erosion_change_probability");
  if (!(motor_bound_band >= 0.0 && motor_bound_band < 1.0)) throw ConfigError("randomization: motor_bound_band must lie in [0, 1)");
  if (!(param_band >= 0.0 && param_band < 1.0)) throw ConfigError("randomization: param_band must lie in [0, 1)");
  if (!(gate_half_extent > 0.0)) throw ConfigError("randomization: gate_half_extent must be positive");
  if (!(tunnel_thickness >= 0.0)) throw ConfigError("randomization: tunnel_thickness must be non-negative");
  if (shutter.lo < 0.0) throw ConfigError("randomization: shutter must be non-negative");
}

EpisodeDraw sample_episode(const RandomizationConfig& config, const DynamicsParams& nominal,
                           const Track& track, std::uint64_t seed) {
  CounterRng rng(seed, "episode");
  EpisodeDraw draw;

  const double roll_c = config.camera_roll_deg.sample(rng);
  const double pitch_c = config.camera_pitch_deg.sample(rng);
  const double yaw_c = config.camera_yaw_deg.sample(rng);
  if (config.randomize_extrinsics) {
    draw.extrinsics = {roll_c * kDegToRad, pitch_c * kDegToRad, yaw_c * kDegToRad};
  } else {
    draw.extrinsics = {config.camera_roll_deg.mid() * kDegToRad,
                       config.camera_pitch_deg.mid() * kDegToRad,
                       config.camera_yaw_deg.mid() * kDegToRad};
  }

  draw.params = nominal;
  for_each_param(draw.params, [&](std::string_view name, double& value) {
    const bool motor_bound = name == "omega_min" || name == "omega_max";
    const double band = motor_bound ? config.motor_bound_band : config.param_band;
    const double factor = rng.uniform(1.0 - band, 1.0 + band);
    if (config.randomize_dynamics) value *= factor;
  });

  draw.training_column = rng.bernoulli(config.any_gate_probability);
  const double gate_pick = rng.uniform();
  draw.start_gate = draw.training_column
                      ? std::min(static_cast<int>(gate_pick * track.size()), track.size() - 1)
                      : 0;
  const InitialStateRanges& init = draw.training_column ? config.train_initial : config.eval_initial;

  const Vec3 p_g(init.x_g.sample(rng), init.y_g.sample(rng), init.z_g.sample(rng));
  const double roll = init.attitude.sample(rng);
  const double pitch = init.attitude.sample(rng);
  const double yaw_g = init.attitude.sample(rng);
  Vec3 rates;
  for (int i = 0; i < 3; ++i) rates[i] = init.rates.sample(rng);
  Vec4 motors;
  for (int i = 0; i < 4; ++i) motors[i] = init.motor_fraction.sample(rng) * draw.params.omega_max;

  const GateSpec& gate = track.gate(draw.start_gate);
  draw.initial.position = gate_to_world(p_g, gate);
  draw.initial.attitude = quat_from_euler(roll, pitch, gate.yaw + yaw_g);
  draw.initial.velocity = Vec3::Zero();
  draw.initial.body_rates = rates;
  draw.initial.motor_speeds = motors;

  const bool erosion = rng.bernoulli(config.erosion_probability);
  const double shutter = config.shutter.sample(rng);
  draw.erosion_active = config.augmentations && erosion;
  draw.shutter = config.augmentations ? shutter : 0.0;
  return draw;
}

DisturbanceSample DisturbanceState::sample() const {
  DisturbanceSample s;
  s.accel = accel_slow;
  s.moment = moment_slow + moment_fast;
  s.action = action_fast;
  return s;
}

namespace {

Vec3 sample3(const Range& r, CounterRng& rng) {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = r.sample(rng);
  return v;
}

Vec4 sample4(const Range& r, CounterRng& rng) {
  Vec4 v;
  for (int i = 0; i < 4; ++i) v[i] = r.sample(rng);
  return v;
}

}  // namespace

DisturbanceState initial_disturbances(const RandomizationConfig& config, CounterRng& rng) {
  DisturbanceState d;
  if (!config.disturbances) return d;
  d.accel_slow = sample3(config.accel_slow, rng);
  d.moment_slow = sample3(config.moment_slow, rng);
  d.moment_fast = sample3(config.moment_fast, rng);
  d.action_fast = sample4(config.action_fast, rng);
  return d;
}

DisturbanceUpdate update_disturbances(const DisturbanceState& current,
                                      const RandomizationConfig& config, CounterRng& rng) {
  DisturbanceUpdate up;
  up.state = current;
  if (!config.disturbances) return up;
  if (rng.bernoulli(config.slow_change_probability)) {
    up.state.accel_slow = sample3(config.accel_slow, rng);
    up.accel_resampled = true;
  }
  if (rng.bernoulli(config.slow_change_probability)) {
    up.state.moment_slow = sample3(config.moment_slow, rng);
    up.moment_resampled = true;
  }
  up.state.moment_fast = sample3(config.moment_fast, rng);
  up.state.action_fast = sample4(config.action_fast, rng);
  return up;
}

bool update_erosion(bool active, const RandomizationConfig& config, CounterRng& rng) {
  const bool change = rng.bernoulli(config.erosion_change_probability);
  const bool value = rng.bernoulli(config.erosion_probability);
  if (!config.augmentations) return false;
  return change ? value : active;
}

}  // namespace racesim
