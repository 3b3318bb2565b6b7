#include "racesim/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "racesim/error.hpp"

namespace racesim {

double BatteryDecay::omega_max_at(std::int64_t step) const {
  if (step < start_step) return start;
  if (ramp_steps <= 0 || step >= start_step + ramp_steps) return end;
  const double t = static_cast<double>(step - start_step) / static_cast<double>(ramp_steps);
  return start + t * (end - start);
}

FlightPlanMode EnvConfig::effective_flight_plan_mode() const {
  if (flight_plan_mode) return *flight_plan_mode;
  return mode == Mode::train ? FlightPlanMode::train : FlightPlanMode::deploy;
}

void EnvConfig::validate() const {
  if (!(control_frequency > 0.0)) throw ConfigError("env: control_frequency must be positive");
  if (substeps < 1) throw ConfigError("env: substeps must be at least 1");
  if (image_delay_steps < 0) throw ConfigError("env: image_delay_steps must be non-negative");
  if (action_delay_steps < 0) throw ConfigError("env: action_delay_steps must be non-negative");
  if (episode_steps < 1) throw ConfigError("env: episode_steps must be at least 1");
  if (image_width < 1 || image_height < 1) throw ConfigError("env: image size must be positive");
  if (sensor_noise.rates < 0.0 || sensor_noise.motors < 0.0) {
    throw ConfigError("env: sensor noise amplitudes must be non-negative");
  }
  if (randomization.mode != mode) throw ConfigError("env: randomization mode differs from env mode");
  dynamics.validate();
  randomization.validate();
  if (battery) {
    if (!(battery->start > dynamics.omega_min && battery->end > dynamics.omega_min)) {
      throw ConfigError("battery: omega_max schedule must stay above omega_min");
    }
    if (battery->ramp_steps < 0 || battery->start_step < 0) {
      throw ConfigError("battery: steps must be non-negative");
    }
  }
}

namespace {

Track load_env_track(const EnvConfig& config) {
  if (config.track_path.empty()) throw TrackError("<none>", 0, "track", "no track path configured");
  return load_track(config.track_path, {config.randomization.gate_half_extent,
                                        config.randomization.tunnel_thickness});
}

}  // namespace

Env::Env(EnvConfig config) : Env(config, load_env_track(config)) {}

Env::Env(EnvConfig config, Track track)
  : config_(std::move(config)),
    track_(std::make_shared<const Track>(std::move(track))),
    intrinsics_(nominal_intrinsics(config_.image_width, config_.image_height)),
    substep_dt_(config_.control_period() / config_.substeps) {
  config_.validate();
}

ResetResult Env::reset() { return reset(config_.seed + episodes_started_); }

ResetResult Env::reset(std::uint64_t seed) {
  return begin_episode(seed, std::nullopt, std::nullopt, std::nullopt);
}

ResetResult Env::reset_to(std::uint64_t seed, const DroneState& initial, const Action& primed,
                          int start_gate) {
  if (!primed.is_finite()) throw UsageError("reset_to: non-finite primed action");
  return begin_episode(seed, initial, Action::clamped(primed.u), start_gate);
}

EpisodeDraw Env::peek_draw(std::uint64_t seed) const {
  EpisodeDraw draw = sample_episode(config_.randomization, config_.dynamics, *track_, seed);
  if (config_.battery) draw.params.omega_max = config_.battery->omega_max_at(0);
  return draw;
}

ResetResult Env::begin_episode(std::uint64_t seed, const std::optional<DroneState>& initial,
                               const std::optional<Action>& primed,
                               std::optional<int> start_gate) {
  draw_ = sample_episode(config_.randomization, config_.dynamics, *track_, seed);
  if (initial) draw_.initial = *initial;
  if (start_gate) draw_.start_gate = track_->wrap(*start_gate);

  params_ = draw_.params;
  if (config_.battery) params_.omega_max = config_.battery->omega_max_at(0);
  state_ = draw_.initial;
  state_.attitude.normalize();

  disturbance_rng_ = CounterRng(seed, "disturbance");
  augment_rng_ = CounterRng(seed, "augment");
  flight_plan_rng_ = CounterRng(seed, "flight_plan");
  sensor_rng_ = CounterRng(seed, "sensor");
  disturbances_ = initial_disturbances(config_.randomization, disturbance_rng_);
  erosion_active_ = draw_.erosion_active;

  Action hold;
  if (primed) {
    hold = *primed;
  } else {
    for (int i = 0; i < 4; ++i) hold.u[i] = motor_command_for_speed(state_.motor_speeds[i], params_);
  }
  action_queue_.assign(config_.action_delay_steps, hold);
  frame_history_.assign(config_.image_delay_steps + 1, state_);

  target_gate_ = draw_.start_gate;
  pre_crossed_ = false;
  main_crossed_ = false;
  laps_ = 0;
  step_count_ = 0;
  episode_ = episodes_started_++;
  done_ = false;
  flight_plan_ = make_flight_plan(*track_, draw_.start_gate, config_.flight_plan_indexing);

  ResetResult out;
  out.obs = observe();
  if (config_.informed) out.priv = privileged();

  if (config_.log_replay) {
    ReplayRecord rec;
    rec.kind = RecordKind::reset;
    rec.episode = episode_;
    rec.obs = out.obs;
    rec.priv = out.priv;
    rec.info.flight_plan_index = flight_plan_.index;
    rec.info.target_gate = target_gate_;
    rec.info.specific_force = specific_force(state_.attitude.conjugate() * state_.velocity,
                                             state_.motor_speeds, params_).norm();
    rec.info.specific_thrust = rotor_specific_thrust(state_.motor_speeds, params_);
    rec.info.speed = state_.velocity.norm();
    log_.push_back(std::move(rec));
  }
  return out;
}

StepResult Env::step(const Action& action) {
  if (done_) throw UsageError("step() on a finished episode; call reset() first");
  if (!action.is_finite()) throw UsageError("step(): action contains non-finite values");

  const Action command = Action::clamped(action.u);
  Action applied = command;
  if (config_.action_delay_steps > 0) {
    action_queue_.push_back(command);
    applied = action_queue_.front();
    action_queue_.pop_front();
  }
  if (config_.battery) params_.omega_max = config_.battery->omega_max_at(step_count_);

  const Vec3 prev_position = state_.position;
  const DisturbanceSample dist = disturbances_.sample();
  for (int k = 0; k < config_.substeps; ++k) {
    state_ = rk4_step(state_, applied, dist, params_, substep_dt_);
  }
  const Vec3 position = state_.position;

  StepResult result;
  StepInfo& info = result.info;
  info.step = step_count_;

  // Gate sequence for the current target: pre -> main -> post.
  const bool in_tunnel = pre_crossed_;
  const GateSpec& target_pre = track_->pre_gate(target_gate_);
  const Vec3 prev_to_target = prev_position - target_pre.position;
  const Vec3 curr_to_target = position - target_pre.position;
  const std::int64_t crossing_gate = target_gate_;
  const int gate_idx = track_->wrap(crossing_gate);
  auto check = [&](const GateSpec& g, CrossingKind kind) {
    auto c = detect_crossing(world_to_gate(prev_position, g), world_to_gate(position, g), g,
                             gate_idx, kind);
    if (c) info.crossings.push_back(*c);
    return c.has_value();
  };
  if (!pre_crossed_) pre_crossed_ = check(track_->pre_gate(crossing_gate), CrossingKind::pre);
  if (pre_crossed_ && !main_crossed_) main_crossed_ = check(track_->gate(crossing_gate), CrossingKind::main);
  if (main_crossed_ && check(track_->post_gate(crossing_gate), CrossingKind::post)) {
    ++target_gate_;
    pre_crossed_ = false;
    main_crossed_ = false;
    if (track_->wrap(target_gate_) == 0) ++laps_;
  }

  StepRewardInputs reward_in;
  reward_in.prev_to_target = prev_to_target;
  reward_in.curr_to_target = curr_to_target;
  reward_in.in_tunnel = in_tunnel;
  reward_in.body_rates = state_.body_rates;
  reward_in.control_frequency = config_.control_frequency;
  reward_in.crossings = info.crossings;
  reward_in.state = &state_;
  std::tie(result.reward, result.termination) = step_reward(reward_in);
  result.terminated = result.termination.terminal();

  const DisturbanceUpdate update =
    update_disturbances(disturbances_, config_.randomization, disturbance_rng_);
  disturbances_ = update.state;
  erosion_active_ = update_erosion(erosion_active_, config_.randomization, augment_rng_);

  // Flight plan, judged against the gate it currently points at.
  TunnelProgress tunnel;
  tunnel.half_thickness = 0.5 * track_->tunnel_thickness();
  tunnel.pre_gate_crossed =
    flight_plan_.index < target_gate_ || (flight_plan_.index == target_gate_ && pre_crossed_);
  const double x_hat = world_to_gate(position, track_->gate(flight_plan_.index)).x();
  const std::int64_t fp_before = flight_plan_.index;
  flight_plan_ = update_index(x_hat, flight_plan_, config_.effective_flight_plan_mode(), tunnel,
                              flight_plan_rng_, *track_, config_.flight_plan_indexing);
  info.flight_plan_advanced = flight_plan_.index != fp_before;

  frame_history_.push_back(state_);
  while (static_cast<int>(frame_history_.size()) > config_.image_delay_steps + 1) {
    frame_history_.pop_front();
  }

  ++step_count_;
  result.truncated = !result.terminated && step_count_ >= config_.episode_steps;
  done_ = result.done();

  result.obs = observe();
  if (config_.informed) result.priv = privileged();

  info.laps = laps_;
  info.flight_plan_index = flight_plan_.index;
  info.target_gate = target_gate_;
  const Vec3 v_body = state_.attitude.conjugate() * state_.velocity;
  info.specific_force = specific_force(v_body, state_.motor_speeds, params_).norm();
  info.specific_thrust = rotor_specific_thrust(state_.motor_speeds, params_);
  info.speed = state_.velocity.norm();

  if (config_.log_replay) {
    ReplayRecord rec;
    rec.kind = RecordKind::step;
    rec.episode = episode_;
    rec.obs = result.obs;
    rec.priv = result.priv;
    rec.action = command;
    rec.reward = result.reward;
    rec.termination = result.termination;
    rec.truncated = result.truncated;
    rec.info = info;
    log_.push_back(std::move(rec));
  }
  return result;
}

Observation Env::observe() {
  Observation o;
  if (config_.render) {
    const DroneState& frame = frame_history_.front();
    MaskImage mask =
      render_mask(frame.position, frame.attitude, draw_.extrinsics, intrinsics_, *track_);
    if (erosion_active_) mask = erode_mask(mask);
    if (draw_.shutter > 0.0) {
      const Vec3 cam_rates = body_rates_to_camera(frame.body_rates, draw_.extrinsics);
      mask = rolling_shutter_warp(mask, draw_.shutter, cam_rates.y(), cam_rates.z());
    }
    o.mask = std::move(mask);
  } else {
    o.mask = MaskImage(config_.image_width, config_.image_height);
  }

  o.rates = state_.body_rates;
  o.motor_speeds = state_.motor_speeds;
  if (config_.sensor_noise.rates > 0.0) {
    const double a = config_.sensor_noise.rates;
    for (int i = 0; i < 3; ++i) o.rates[i] += sensor_rng_.uniform(-a, a);
  }
  if (config_.sensor_noise.motors > 0.0) {
    const double a = config_.sensor_noise.motors;
    for (int i = 0; i < 4; ++i) o.motor_speeds[i] += sensor_rng_.uniform(-a, a);
  }
  o.flight_plan = flight_plan_.f;
  return o;
}

PrivilegedObservation Env::privileged() const {
  const GateSpec& gate = track_->gate(flight_plan_.index);
  const Vec3 euler = euler_from_quat(state_.attitude);
  PrivilegedObservation p;
  p.p_w = state_.position;
  p.p_g = world_to_gate(state_.position, gate);
  p.v_w = state_.velocity;
  p.v_g = gate_frame_velocity(state_.velocity, gate);
  p.attitude = Vec4(euler.x(), euler.y(), euler.z(), wrap_angle(euler.z() - gate.yaw));
  p.rates = state_.body_rates;
  p.motor_speeds = state_.motor_speeds;
  p.extrinsics = Vec3(draw_.extrinsics.roll, draw_.extrinsics.pitch, draw_.extrinsics.yaw);
  p.params = params_.to_vector();
  return p;
}

std::vector<ReplayRecord> Env::take_replay() {
  std::vector<ReplayRecord> out;
  out.swap(log_);
  return out;
}

struct BatchedEnv::Pool {
  explicit Pool(int workers)
    : arena(workers > 0 ? workers : tbb::task_arena::automatic) {}
  tbb::task_arena arena;
};

BatchedEnv::BatchedEnv(std::vector<Env> envs, int workers)
  : envs_(std::move(envs)), pool_(std::make_unique<Pool>(workers)) {}

BatchedEnv::~BatchedEnv() = default;
BatchedEnv::BatchedEnv(BatchedEnv&&) noexcept = default;
BatchedEnv& BatchedEnv::operator=(BatchedEnv&&) noexcept = default;

std::vector<ResetResult> BatchedEnv::reset(std::span<const std::uint64_t> seeds) {
  if (seeds.size() != envs_.size()) {
    throw UsageError("batched reset: " + std::to_string(seeds.size()) + " seeds for " +
                     std::to_string(envs_.size()) + " environments");
  }
  std::vector<ResetResult> out(envs_.size());
  pool_->arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, envs_.size()), [&](const auto& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) out[i] = envs_[i].reset(seeds[i]);
    });
  });
  return out;
}

std::vector<StepResult> BatchedEnv::step(std::span<const Action> actions) {
  if (actions.size() != envs_.size()) {
    throw UsageError("batched step: " + std::to_string(actions.size()) + " actions for " +
                     std::to_string(envs_.size()) + " environments");
  }
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    if (envs_[i].done()) throw UsageError("batched step: environment " + std::to_string(i) + " is done");
    if (!actions[i].is_finite()) throw UsageError("batched step: non-finite action for environment " + std::to_string(i));
  }
  std::vector<StepResult> out(envs_.size());
  pool_->arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, envs_.size()), [&](const auto& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) out[i] = envs_[i].step(actions[i]);
    });
  });
  return out;
}

double smoothness_metric(std::span<const Vec4> trace, double weight) {
  if (trace.size() < 2) throw UsageError("smoothness_metric: need at least 2 entries");
  double sum = 0.0;
  for (std::size_t t = 1; t < trace.size(); ++t) sum += (trace[t] - trace[t - 1]).squaredNorm();
  return weight * sum / static_cast<double>(trace.size() - 1);
}

}  // namespace racesim
