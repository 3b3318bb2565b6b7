#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "racesim/camera.hpp"
#include "racesim/config.hpp"
#include "racesim/env.hpp"
#include "racesim/error.hpp"
#include "racesim/replay.hpp"
#include "rollout.hpp"

namespace fs = std::filesystem;
using namespace racesim;

namespace {

struct Options {
  std::string config;
  std::optional<std::string> track;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> steps;
  std::optional<int> episodes;
  std::optional<std::string> policy;
  std::optional<std::string> actions;
  std::optional<std::string> out;
  std::optional<int> batch;
  std::optional<double> duration;
  std::optional<int> workers;
  std::string replay;
  std::string frames;
  std::string frames_dir;
};

// Config file first, then flags on top.
ConfigFile resolve(const Options& o) {
  ConfigFile file;
  if (!o.config.empty()) file = load_config_file(o.config);
  if (o.track) file.env.track_path = *o.track;
  if (o.seed) file.env.seed = *o.seed;
  if (o.steps) file.run.steps = *o.steps;
  if (o.episodes) file.run.episodes = *o.episodes;
  if (o.policy) file.run.policy = *o.policy;
  if (o.actions) file.run.actions = *o.actions;
  if (o.out) file.run.out = *o.out;
  if (o.batch) file.run.batch = *o.batch;
  if (o.duration) file.run.duration = *o.duration;
  if (o.workers) file.run.workers = *o.workers;
  if (file.env.track_path.empty()) throw UsageError("no track given (use --track or env.track)");
  file.env.validate();
  return file;
}

int cmd_run(const Options& o) {
  ConfigFile file = resolve(o);
  const RunSettings& run = file.run;
  tools::RolloutSpec spec;
  spec.policy = tools::parse_policy(run.policy);
  if (spec.policy == tools::PolicyKind::file) {
    if (run.actions.empty()) throw UsageError("policy 'file' needs --actions");
    spec.actions = tools::read_action_file(run.actions);
  }
  spec.steps = run.steps;
  spec.episodes = run.episodes;
  spec.seed = file.env.seed;

  file.env.log_replay = !run.out.empty();
  Env env(file.env);
  std::optional<ReplayWriter> writer;
  if (!run.out.empty()) {
    writer.emplace(run.out, file.env.image_width, file.env.image_height, file.env.informed);
  }
  const auto summary = tools::run_rollout(env, spec, writer ? &*writer : nullptr);
  if (writer) writer->finish();

  std::cout << tools::summary_text(summary);
  if (!run.out.empty()) std::cout << "replay written to " << run.out << "\n";
  std::cout << tools::summary_json(summary) << std::endl;
  return 0;
}

int cmd_render(const Options& o) {
  const Replay replay = read_replay(o.replay);
  const auto count = static_cast<std::int64_t>(replay.records.size());
  std::int64_t first = 0;
  std::int64_t last = count;
  if (!o.frames.empty()) {
    const auto colon = o.frames.find(':');
    if (colon == std::string::npos) throw UsageError("--frames expects a:b");
    try {
      const std::string a = o.frames.substr(0, colon);
      const std::string b = o.frames.substr(colon + 1);
      first = a.empty() ? 0 : std::stoll(a);
      last = b.empty() ? count : std::stoll(b);
    } catch (const std::logic_error&) {
      throw UsageError("--frames expects integers, got '" + o.frames + "'");
    }
  }
  if (first < 0 || first > last || last > count) {
    throw UsageError("frame range " + std::to_string(first) + ":" + std::to_string(last) +
                     " outside 0:" + std::to_string(count));
  }
  std::error_code ec;
  fs::create_directories(o.frames_dir.empty() ? "." : o.frames_dir, ec);
  if (ec) throw IoError("cannot create '" + o.frames_dir + "': " + ec.message());
  char name[32];
  for (std::int64_t i = first; i < last; ++i) {
    std::snprintf(name, sizeof(name), "frame_%06lld.pgm", static_cast<long long>(i));
    write_pgm((fs::path(o.frames_dir.empty() ? "." : o.frames_dir) / name).string(), replay.records[i].obs.mask);
  }
  std::cout << "wrote " << (last - first) << " frames to " << (o.frames_dir.empty() ? "." : o.frames_dir) << "\n";
  nlohmann::ordered_json j;
  j["command"] = "render";
  j["first"] = first;
  j["last"] = last;
  j["files"] = last - first;
  std::cout << j.dump() << std::endl;
  return 0;
}

double bench_mode(const ConfigFile& file, bool render) {
  EnvConfig cfg = file.env;
  cfg.render = render;
  cfg.log_replay = false;
  const Track track = load_track(cfg.track_path, {cfg.randomization.gate_half_extent,
                                                  cfg.randomization.tunnel_thickness});
  std::vector<Env> envs;
  for (int i = 0; i < file.run.batch; ++i) envs.emplace_back(cfg, track);
  BatchedEnv batch(std::move(envs), file.run.workers);
  std::vector<std::uint64_t> seeds(batch.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = cfg.seed + i;
  batch.reset(seeds);

  std::vector<Action> actions(batch.size());
  for (auto& a : actions) a.u = Vec4::Constant(0.2);
  std::int64_t steps = 0;
  const auto t0 = std::chrono::steady_clock::now();
  double elapsed = 0.0;
  while (elapsed < file.run.duration) {
    batch.step(actions);
    steps += static_cast<std::int64_t>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch.env(i).done()) batch.env(i).reset();
    }
    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return static_cast<double>(steps) / elapsed;
}

int cmd_bench(const Options& o) {
  const ConfigFile file = resolve(o);
  if (file.run.batch < 1) throw UsageError("--batch must be at least 1");
  if (!(file.run.duration > 0.0)) throw UsageError("--duration must be positive");
  const double with_render = bench_mode(file, true);
  const double physics_only = bench_mode(file, false);
  std::printf("batch %d: %.0f steps/s with rendering, %.0f steps/s physics only\n",
              file.run.batch, with_render, physics_only);
  nlohmann::ordered_json j;
  j["command"] = "bench";
  j["batch"] = file.run.batch;
  j["duration"] = file.run.duration;
  j["steps_per_sec_render"] = with_render;
  j["steps_per_sec_physics"] = physics_only;
  std::cout << j.dump() << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"racesim: quadcopter racing environment rollouts, rendering and benchmarks"};
  app.require_subcommand(1);
  Options o;

  auto add_env_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "YAML config file");
    cmd->add_option("--track", o.track, "track file (overrides env.track)");
    cmd->add_option("--seed", o.seed, "base seed (overrides env.seed)");
    cmd->add_option("--workers", o.workers, "worker threads (0: all cores)");
  };

  auto* run = app.add_subcommand("run", "roll out a scripted policy and write a replay");
  add_env_flags(run);
  run->add_option("--steps", o.steps, "control steps in total");
  run->add_option("--episodes", o.episodes, "episodes to run");
  run->add_option("--policy", o.policy, "hover | max-thrust | file");
  run->add_option("--actions", o.actions, "action file for --policy file");
  run->add_option("--out", o.out, "replay output path");

  auto* render = app.add_subcommand("render", "dump replay masks as PGM images");
  render->add_option("--replay", o.replay, "replay file")->required();
  render->add_option("--frames", o.frames, "half-open record range a:b");
  render->add_option("--out", o.frames_dir, "output directory");

  auto* bench = app.add_subcommand("bench", "measure batched stepping throughput");
  add_env_flags(bench);
  bench->add_option("--batch", o.batch, "environments per batch");
  bench->add_option("--duration", o.duration, "seconds per mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::usage);
  }

  try {
    if (*run) return cmd_run(o);
    if (*render) return cmd_render(o);
    if (*bench) return cmd_bench(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::io);
  }
  return 0;
}
