#include "racesim/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "racesim/error.hpp"

namespace racesim {

namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.is_null() ? std::string() : " (line " + std::to_string(mark.line + 1) + ")";
}

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& field, const char* what) {
  if (!node.IsScalar()) throw ConfigError(field + ": expected " + what + where(node));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field + ": expected " + what + ", got '" + node.Scalar() + "'" + where(node));
  }
}

const char* to_name(FlightPlanMode m) { return m == FlightPlanMode::train ? "train" : "deploy"; }
const char* to_name(DifferenceIndexing d) {
  return d == DifferenceIndexing::ahead ? "ahead" : "formula";
}

// Reads the fields present in a YAML mapping; finish() rejects unknown keys.
class Reader {
 public:
  Reader(const YAML::Node& node, std::string prefix) : node_(node), prefix_(std::move(prefix)) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(prefix_ + ": expected a mapping" + where(node_));
    }
  }
  void finish() const {
    if (!node_.IsDefined() || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(field(key) + ": unknown key" + where(kv.first));
    }
  }

  std::string field(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }
  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    if (!node_.IsDefined() || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node& map = node_;
    return map[key];
  }

  void value(const std::string& key, double& v) {
    if (auto n = child(key)) v = scalar_as<double>(n, field(key), "a number");
  }
  void value(const std::string& key, int& v) {
    if (auto n = child(key)) v = scalar_as<int>(n, field(key), "an integer");
  }
  void value(const std::string& key, std::int64_t& v) {
    if (auto n = child(key)) v = scalar_as<std::int64_t>(n, field(key), "an integer");
  }
  void value(const std::string& key, std::uint64_t& v) {
    if (auto n = child(key)) v = scalar_as<std::uint64_t>(n, field(key), "a non-negative integer");
  }
  void value(const std::string& key, bool& v) {
    if (auto n = child(key)) v = scalar_as<bool>(n, field(key), "true or false");
  }
  void value(const std::string& key, std::string& v) {
    if (auto n = child(key)) v = scalar_as<std::string>(n, field(key), "a string");
  }
  void value(const std::string& key, Range& r) {
    auto n = child(key);
    if (!n) return;
    if (!n.IsSequence() || n.size() != 2) throw ConfigError(field(key) + ": expected [lo, hi]" + where(n));
    r.lo = scalar_as<double>(n[0], field(key) + "[0]", "a number");
    r.hi = scalar_as<double>(n[1], field(key) + "[1]", "a number");
  }
  template <std::size_t N>
  void value(const std::string& key, std::array<double, N>& a) {
    auto n = child(key);
    if (!n) return;
    if (!n.IsSequence() || n.size() != N) {
      throw ConfigError(field(key) + ": expected a list of " + std::to_string(N) + " numbers" + where(n));
    }
    for (std::size_t i = 0; i < N; ++i) {
      a[i] = scalar_as<double>(n[i], field(key) + "[" + std::to_string(i) + "]", "a number");
    }
  }
  template <typename E>
  void choice(const std::string& key, E& v, std::initializer_list<std::pair<const char*, E>> options) {
    auto n = child(key);
    if (!n) return;
    const auto s = scalar_as<std::string>(n, field(key), "a string");
    std::string names;
    for (const auto& [name, e] : options) {
      if (s == name) {
        v = e;
        return;
      }
      names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(field(key) + ": '" + s + "' is not one of " + names + where(n));
  }

 private:
  YAML::Node node_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void read_initial(Reader& parent, const std::string& key, InitialStateRanges& r) {
  Reader in(parent.child(key), parent.field(key));
  in.value("x_g", r.x_g);
  in.value("y_g", r.y_g);
  in.value("z_g", r.z_g);
  in.value("rates", r.rates);
  in.value("motor_fraction", r.motor_fraction);
  in.value("attitude", r.attitude);
  in.finish();
}

void read_randomization(Reader& in, RandomizationConfig& c) {
  in.value("camera_roll_deg", c.camera_roll_deg);
  in.value("camera_pitch_deg", c.camera_pitch_deg);
  in.value("camera_yaw_deg", c.camera_yaw_deg);
  in.value("motor_bound_band", c.motor_bound_band);
  in.value("param_band", c.param_band);
  in.value("accel_slow", c.accel_slow);
  in.value("moment_slow", c.moment_slow);
  in.value("moment_fast", c.moment_fast);
  in.value("action_fast", c.action_fast);
  in.value("slow_change_probability", c.slow_change_probability);
  in.value("gate_half_extent", c.gate_half_extent);
  in.value("tunnel_thickness", c.tunnel_thickness);
  read_initial(in, "train_initial", c.train_initial);
  read_initial(in, "eval_initial", c.eval_initial);
  in.value("any_gate_probability", c.any_gate_probability);
  in.value("shutter", c.shutter);
  in.value("erosion_probability", c.erosion_probability);
  in.value("erosion_change_probability", c.erosion_change_probability);
  in.value("randomize_dynamics", c.randomize_dynamics);
  in.value("randomize_extrinsics", c.randomize_extrinsics);
  in.value("disturbances", c.disturbances);
  in.value("augmentations", c.augmentations);
  in.finish();
}

void read_dynamics(Reader& in, DynamicsParams& p) {
  for_each_param(p, [&](std::string_view name, double& v) { in.value(std::string(name), v); });
  in.value("r_prop", p.r_prop);
  in.finish();
}

YAML::Node range_node(const Range& r) {
  YAML::Node n;
  n.SetStyle(YAML::EmitterStyle::Flow);
  n.push_back(r.lo);
  n.push_back(r.hi);
  return n;
}

YAML::Node initial_node(const InitialStateRanges& r) {
  YAML::Node n;
  n["x_g"] = range_node(r.x_g);
  n["y_g"] = range_node(r.y_g);
  n["z_g"] = range_node(r.z_g);
  n["rates"] = range_node(r.rates);
  n["motor_fraction"] = range_node(r.motor_fraction);
  n["attitude"] = range_node(r.attitude);
  return n;
}

}  // namespace

ConfigFile parse_config_file(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }

  ConfigFile file;
  EnvConfig& c = file.env;
  Reader top(root, "");
  {
    // Mode first: it selects the randomization defaults the rest overrides.
    Reader env(top.child("env"), "env");
    env.choice("mode", c.mode, {{"train", Mode::train}, {"eval", Mode::eval}});
    c.randomization = RandomizationConfig::defaults(c.mode);
    env.value("control_frequency", c.control_frequency);
    env.value("substeps", c.substeps);
    env.value("discount", c.discount);
    env.value("image_delay_steps", c.image_delay_steps);
    env.value("action_delay_steps", c.action_delay_steps);
    env.value("episode_steps", c.episode_steps);
    env.value("informed", c.informed);
    env.value("render", c.render);
    std::string fp = c.flight_plan_mode ? to_name(*c.flight_plan_mode) : "auto";
    env.choice("flight_plan_mode", fp, {{"auto", std::string("auto")},
                                        {"deploy", std::string("deploy")},
                                        {"train", std::string("train")}});
    if (fp == "auto") {
      c.flight_plan_mode.reset();
    } else {
      c.flight_plan_mode = fp == "train" ? FlightPlanMode::train : FlightPlanMode::deploy;
    }
    env.choice("flight_plan_indexing", c.flight_plan_indexing,
               {{"formula", DifferenceIndexing::formula}, {"ahead", DifferenceIndexing::ahead}});
    env.value("track", c.track_path);
    env.value("seed", c.seed);
    env.value("log_replay", c.log_replay);
    env.value("image_width", c.image_width);
    env.value("image_height", c.image_height);
    env.finish();
  }
  {
    Reader noise(top.child("sensor_noise"), "sensor_noise");
    noise.value("rates", c.sensor_noise.rates);
    noise.value("motors", c.sensor_noise.motors);
    noise.finish();
  }
  {
    Reader dyn(top.child("dynamics"), "dynamics");
    read_dynamics(dyn, c.dynamics);
  }
  {
    Reader rnd(top.child("randomization"), "randomization");
    read_randomization(rnd, c.randomization);
  }
  if (auto node = top.child("battery"); node && !node.IsNull()) {
    Reader bat(node, "battery");
    BatteryDecay b;
    bat.value("start", b.start);
    bat.value("end", b.end);
    bat.value("start_step", b.start_step);
    bat.value("ramp_steps", b.ramp_steps);
    bat.finish();
    c.battery = b;
  }

  {
    Reader run(top.child("run"), "run");
    RunSettings& r = file.run;
    run.value("steps", r.steps);
    run.value("episodes", r.episodes);
    run.value("policy", r.policy);
    run.value("actions", r.actions);
    run.value("out", r.out);
    run.value("batch", r.batch);
    run.value("duration", r.duration);
    run.value("workers", r.workers);
    run.finish();
    if (!base_dir.empty()) {
      for (std::string* path : {&r.actions, &r.out}) {
        if (!path->empty() && std::filesystem::path(*path).is_relative()) {
          *path = (std::filesystem::path(base_dir) / *path).lexically_normal().string();
        }
      }
    }
  }
  top.finish();

  if (!base_dir.empty() && !c.track_path.empty() &&
      std::filesystem::path(c.track_path).is_relative()) {
    c.track_path = (std::filesystem::path(base_dir) / c.track_path).lexically_normal().string();
  }
  c.validate();
  return file;
}

ConfigFile load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  try {
    return parse_config_file(ss.str(), dir);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

EnvConfig parse_env_config(const std::string& text, const std::string& base_dir) {
  return parse_config_file(text, base_dir).env;
}

EnvConfig load_env_config(const std::string& path) { return load_config_file(path).env; }

std::string emit_env_config(const EnvConfig& c) { return emit_config_file({c, RunSettings{}}); }

std::string emit_config_file(const ConfigFile& file) {
  const EnvConfig& c = file.env;
  YAML::Node root;
  YAML::Node env = root["env"];
  env["mode"] = to_string(c.mode);
  env["control_frequency"] = c.control_frequency;
  env["substeps"] = c.substeps;
  env["discount"] = c.discount;
  env["image_delay_steps"] = c.image_delay_steps;
  env["action_delay_steps"] = c.action_delay_steps;
  env["episode_steps"] = c.episode_steps;
  env["informed"] = c.informed;
  env["render"] = c.render;
  env["flight_plan_mode"] = c.flight_plan_mode ? to_name(*c.flight_plan_mode) : "auto";
  env["flight_plan_indexing"] = to_name(c.flight_plan_indexing);
  env["track"] = c.track_path;
  env["seed"] = c.seed;
  env["log_replay"] = c.log_replay;
  env["image_width"] = c.image_width;
  env["image_height"] = c.image_height;

  root["sensor_noise"]["rates"] = c.sensor_noise.rates;
  root["sensor_noise"]["motors"] = c.sensor_noise.motors;

  YAML::Node dyn = root["dynamics"];
  DynamicsParams p = c.dynamics;
  for_each_param(p, [&](std::string_view name, double& v) { dyn[std::string(name)] = v; });
  dyn["r_prop"] = p.r_prop;

  const RandomizationConfig& r = c.randomization;
  YAML::Node rnd = root["randomization"];
  rnd["camera_roll_deg"] = range_node(r.camera_roll_deg);
  rnd["camera_pitch_deg"] = range_node(r.camera_pitch_deg);
  rnd["camera_yaw_deg"] = range_node(r.camera_yaw_deg);
  rnd["motor_bound_band"] = r.motor_bound_band;
  rnd["param_band"] = r.param_band;
  rnd["accel_slow"] = range_node(r.accel_slow);
  rnd["moment_slow"] = range_node(r.moment_slow);
  rnd["moment_fast"] = range_node(r.moment_fast);
  rnd["action_fast"] = range_node(r.action_fast);
  rnd["slow_change_probability"] = r.slow_change_probability;
  rnd["gate_half_extent"] = r.gate_half_extent;
  rnd["tunnel_thickness"] = r.tunnel_thickness;
  rnd["train_initial"] = initial_node(r.train_initial);
  rnd["eval_initial"] = initial_node(r.eval_initial);
  rnd["any_gate_probability"] = r.any_gate_probability;
  rnd["shutter"] = range_node(r.shutter);
  rnd["erosion_probability"] = r.erosion_probability;
  rnd["erosion_change_probability"] = r.erosion_change_probability;
  rnd["randomize_dynamics"] = r.randomize_dynamics;
  rnd["randomize_extrinsics"] = r.randomize_extrinsics;
  rnd["disturbances"] = r.disturbances;
  rnd["augmentations"] = r.augmentations;

  if (c.battery) {
    root["battery"]["start"] = c.battery->start;
    root["battery"]["end"] = c.battery->end;
    root["battery"]["start_step"] = c.battery->start_step;
    root["battery"]["ramp_steps"] = c.battery->ramp_steps;
  }

  const RunSettings& run = file.run;
  root["run"]["steps"] = run.steps;
  root["run"]["episodes"] = run.episodes;
  root["run"]["policy"] = run.policy;
  root["run"]["actions"] = run.actions;
  root["run"]["out"] = run.out;
  root["run"]["batch"] = run.batch;
  root["run"]["duration"] = run.duration;
  root["run"]["workers"] = run.workers;

  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << root;
  return std::string(out.c_str()) + "\n";
}

}  // namespace racesim
