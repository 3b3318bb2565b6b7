#include "rollout.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "racesim/error.hpp"

namespace racesim::tools {

PolicyKind parse_policy(const std::string& name) {
  if (name == "hover") return PolicyKind::hover;
  if (name == "max-thrust") return PolicyKind::max_thrust;
  if (name == "file") return PolicyKind::file;
  throw UsageError("unknown policy '" + name + "' (expected hover, max-thrust or file)");
}

std::vector<Action> read_action_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open action file '" + path + "'");
  std::vector<Action> actions;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Action a;
    for (int i = 0; i < 4; ++i) {
      if (!(ss >> a.u[i])) {
        throw UsageError(path + ":" + std::to_string(line_no) + ": expected 4 numbers");
      }
    }
    std::string rest;
    if (ss >> rest) throw UsageError(path + ":" + std::to_string(line_no) + ": trailing text '" + rest + "'");
    if (!a.is_finite()) throw UsageError(path + ":" + std::to_string(line_no) + ": non-finite action");
    actions.push_back(a);
  }
  return actions;
}

void write_action_file(const std::string& path, const std::vector<Action>& actions) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write action file '" + path + "'");
  char buf[128];
  for (const Action& a : actions) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", a.u[0], a.u[1], a.u[2], a.u[3]);
    out << buf;
  }
}

Action reset_hover(Env& env, std::uint64_t seed) {
  const EpisodeDraw draw = env.peek_draw(seed);
  const HoverTrim trim = solve_hover_trim(draw.params);
  DroneState s;
  s.position = draw.initial.position;
  s.attitude = quat_from_euler(0.0, 0.0, euler_from_quat(draw.initial.attitude).z());
  s.motor_speeds = trim.motor_speeds;
  env.reset_to(seed, s, trim.action, draw.start_gate);
  return trim.action;
}

RolloutSummary run_rollout(Env& env, const RolloutSpec& spec, ReplayWriter* writer) {
  if (spec.episodes < 1) throw UsageError("episodes must be at least 1");
  const std::int64_t cap = static_cast<std::int64_t>(env.config().episode_steps) * spec.episodes;
  const std::int64_t total = spec.steps > 0 ? spec.steps : cap;
  if (total > cap) {
    throw UsageError("steps " + std::to_string(total) + " exceed the episode cap " +
                     std::to_string(env.config().episode_steps) + " x " +
                     std::to_string(spec.episodes) + " episodes");
  }
  if (spec.policy == PolicyKind::file && static_cast<std::int64_t>(spec.actions.size()) < total) {
    throw UsageError("action file holds " + std::to_string(spec.actions.size()) +
                     " actions but " + std::to_string(total) + " steps were requested");
  }

  auto flush = [&] {
    auto records = env.take_replay();
    if (writer) {
      for (const auto& r : records) writer->append(r);
    }
  };

  RolloutSummary s;
  Action full;
  full.u = Vec4::Ones();
  for (int ep = 0; ep < spec.episodes && s.steps < total; ++ep) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(ep);
    Action hold = full;
    if (spec.policy == PolicyKind::hover) {
      hold = reset_hover(env, seed);
    } else {
      env.reset(seed);
    }
    ++s.episodes;
    flush();
    std::uint32_t laps = 0;
    while (!env.done() && s.steps < total) {
      const Action a = spec.policy == PolicyKind::file ? spec.actions[s.steps] : hold;
      const StepResult r = env.step(a);
      ++s.steps;
      s.episode_return += r.reward.total;
      s.crossings += static_cast<std::int64_t>(r.info.crossings.size());
      for (const auto& c : r.info.crossings) s.gates_passed += c.kind == CrossingKind::main;
      s.max_speed = std::max(s.max_speed, r.info.speed);
      s.max_specific_force = std::max(s.max_specific_force, r.info.specific_force);
      s.max_specific_thrust = std::max(s.max_specific_thrust, r.info.specific_thrust);
      s.terminated += r.terminated;
      s.truncated += r.truncated;
      laps = r.info.laps;
      flush();
    }
    s.laps += laps;
  }
  return s;
}

std::string summary_text(const RolloutSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "steps %lld  episodes %d  return %.6f  laps %lld  crossings %lld (gates %lld)\n"
                "max speed %.4f m/s  max specific force %.4f m/s^2  max rotor thrust %.4f m/s^2\n"
                "terminated %d  truncated %d\n",
                static_cast<long long>(s.steps), s.episodes, s.episode_return,
                static_cast<long long>(s.laps), static_cast<long long>(s.crossings),
                static_cast<long long>(s.gates_passed), s.max_speed, s.max_specific_force,
                s.max_specific_thrust, s.terminated, s.truncated);
  return buf;
}

std::string summary_json(const RolloutSummary& s) {
  nlohmann::ordered_json j;
  j["command"] = "run";
  j["steps"] = s.steps;
  j["episodes"] = s.episodes;
  j["return"] = s.episode_return;
  j["laps"] = s.laps;
  j["crossings"] = s.crossings;
  j["gates_passed"] = s.gates_passed;
  j["max_speed"] = s.max_speed;
  j["max_specific_force"] = s.max_specific_force;
  j["max_specific_thrust"] = s.max_specific_thrust;
  j["terminated"] = s.terminated;
  j["truncated"] = s.truncated;
  return j.dump();
}

}  // namespace racesim::tools
