#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "racesim/config.hpp"
#include "racesim/env.hpp"
#include "racesim/replay.hpp"

namespace racesim::tools {

enum class PolicyKind { hover, max_thrust, file };

PolicyKind parse_policy(const std::string& name);

struct RolloutSpec {
  PolicyKind policy = PolicyKind::hover;
  std::vector<Action> actions;  // file policy
  std::int64_t steps = 0;       // 0: episode cap * episodes
  int episodes = 1;
  std::uint64_t seed = 0;
};

struct RolloutSummary {
  std::int64_t steps = 0;
  int episodes = 0;
  double episode_return = 0.0;
  std::int64_t laps = 0;
  std::int64_t crossings = 0;
  std::int64_t gates_passed = 0;
  double max_speed = 0.0;
  double max_specific_force = 0.0;
  double max_specific_thrust = 0.0;
  int terminated = 0;
  int truncated = 0;
};

/// One action per line, four numbers separated by commas or whitespace.
/// Blank lines and lines starting with '#' are skipped.
std::vector<Action> read_action_file(const std::string& path);
void write_action_file(const std::string& path, const std::vector<Action>& actions);

/// Resets for the hover policy: level attitude at the sampled spawn, zero
/// rates, motors at the trim speeds of the episode's parameters. Returns the
/// trim command.
Action reset_hover(Env& env, std::uint64_t seed);

/// Runs the rollout; when `writer` is set every record is streamed to it.
RolloutSummary run_rollout(Env& env, const RolloutSpec& spec, ReplayWriter* writer);

std::string summary_text(const RolloutSummary& s);
std::string summary_json(const RolloutSummary& s);

}  // namespace racesim::tools
