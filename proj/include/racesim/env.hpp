#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "racesim/camera.hpp"
#include "racesim/dynamics.hpp"
#include "racesim/flightplan.hpp"
#include "racesim/observation.hpp"
#include "racesim/randomize.hpp"
#include "racesim/replay.hpp"
#include "racesim/reward.hpp"
#include "racesim/track.hpp"

namespace racesim {

inline constexpr double kSmoothnessWeight = 0.002;

/// Scripted omega_max schedule: holds `start` until `start_step`, ramps
/// linearly to `end` over `ramp_steps`, then holds `end`.
struct BatteryDecay {
  double start = 3200.0;
  double end = 2200.0;
  std::int64_t start_step = 0;
  std::int64_t ramp_steps = 0;

  double omega_max_at(std::int64_t step) const;
  bool operator==(const BatteryDecay&) const = default;
};

/// Additive zero-mean uniform noise amplitudes on the measured signals.
struct SensorNoise {
  double rates = 0.0;
  double motors = 0.0;
  bool operator==(const SensorNoise&) const = default;
};

struct EnvConfig {
  double control_frequency = 90.0;
  int substeps = 5;
  double discount = 0.997;
  int image_delay_steps = 3;
  int action_delay_steps = 1;
  int episode_steps = 2000;
  Mode mode = Mode::train;
  bool informed = true;
  bool render = true;
  /// Unset: train mode uses the randomized tunnel rule, eval the deploy rule.
  std::optional<FlightPlanMode> flight_plan_mode;
  DifferenceIndexing flight_plan_indexing = DifferenceIndexing::formula;
  std::string track_path;
  std::uint64_t seed = 0;
  bool log_replay = false;
  SensorNoise sensor_noise;
  int image_width = kMaskSize;
  int image_height = kMaskSize;
  DynamicsParams dynamics;
  RandomizationConfig randomization = RandomizationConfig::defaults(Mode::train);
  std::optional<BatteryDecay> battery;

  FlightPlanMode effective_flight_plan_mode() const;
  double control_period() const { return 1.0 / control_frequency; }
  void validate() const;
  bool operator==(const EnvConfig&) const = default;
};

struct ResetResult {
  Observation obs;
  std::optional<PrivilegedObservation> priv;
};

struct StepResult {
  Observation obs;
  std::optional<PrivilegedObservation> priv;
  RewardBreakdown reward;
  bool terminated = false;
  bool truncated = false;
  TerminationReason termination;
  StepInfo info;

  bool done() const { return terminated || truncated; }
};

/// One informed-POMDP episode runner. Single owner; not thread-safe.
class Env {
 public:
  /// Loads the track named by config.track_path (TrackError on failure).
  explicit Env(EnvConfig config);
  Env(EnvConfig config, Track track);

  /// Samples a new episode. Without a seed, uses config.seed + episode count.
  ResetResult reset();
  ResetResult reset(std::uint64_t seed);
  /// Starts from an explicit state with the action queue primed by `primed`.
  /// Every other episode quantity is still drawn from `seed`.
  ResetResult reset_to(std::uint64_t seed, const DroneState& initial, const Action& primed,
                       int start_gate);

  StepResult step(const Action& action);

  /// The episode realization reset(seed) would use, with the battery
  /// schedule applied to the parameters. Does not touch the env.
  EpisodeDraw peek_draw(std::uint64_t seed) const;

  bool done() const { return done_; }
  std::int64_t step_count() const { return step_count_; }
  std::uint32_t episode() const { return episode_; }
  const DroneState& state() const { return state_; }
  const DynamicsParams& params() const { return params_; }
  const EpisodeDraw& draw() const { return draw_; }
  const Track& track() const { return *track_; }
  const EnvConfig& config() const { return config_; }
  const FlightPlanState& flight_plan() const { return flight_plan_; }

  /// Replay records accumulated since the last call (only with log_replay).
  std::vector<ReplayRecord> take_replay();

 private:
  ResetResult begin_episode(std::uint64_t seed, const std::optional<DroneState>& initial,
                            const std::optional<Action>& primed, std::optional<int> start_gate);
  Observation observe();
  PrivilegedObservation privileged() const;

  EnvConfig config_;
  std::shared_ptr<const Track> track_;
  CameraIntrinsics intrinsics_;
  double substep_dt_;

  EpisodeDraw draw_;
  DynamicsParams params_;
  DroneState state_;
  DisturbanceState disturbances_;
  bool erosion_active_ = false;
  FlightPlanState flight_plan_;

  CounterRng disturbance_rng_;
  CounterRng augment_rng_;
  CounterRng flight_plan_rng_;
  CounterRng sensor_rng_;

  std::deque<Action> action_queue_;
  std::deque<DroneState> frame_history_;

  std::int64_t target_gate_ = 0;
  bool pre_crossed_ = false;
  bool main_crossed_ = false;
  std::uint32_t laps_ = 0;
  std::int64_t step_count_ = 0;
  std::uint32_t episode_ = 0;
  std::uint32_t episodes_started_ = 0;
  bool done_ = true;

  std::vector<ReplayRecord> log_;
};

/// Owns a set of environments and steps them on a worker pool. Results are
/// identical to stepping each environment sequentially.
class BatchedEnv {
 public:
  BatchedEnv(std::vector<Env> envs, int workers = 0);
  ~BatchedEnv();
  BatchedEnv(BatchedEnv&&) noexcept;
  BatchedEnv& operator=(BatchedEnv&&) noexcept;

  std::size_t size() const { return envs_.size(); }
  Env& env(std::size_t i) { return envs_[i]; }
  const Env& env(std::size_t i) const { return envs_[i]; }

  std::vector<ResetResult> reset(std::span<const std::uint64_t> seeds);
  /// Throws UsageError on a size mismatch or when any env is done.
  std::vector<StepResult> step(std::span<const Action> actions);

 private:
  struct Pool;
  std::vector<Env> envs_;
  std::unique_ptr<Pool> pool_;
};

/// weight * mean over t of |mu_t - mu_{t-1}|^2. Requires at least 2 entries.
double smoothness_metric(std::span<const Vec4> trace, double weight = kSmoothnessWeight);

}  // namespace racesim
