#include "mosaic/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "mosaic/rng.hpp"

namespace mosaic {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& msg) {
  throw ConfigError(origin + ": " + path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// One JSON object with strict key accounting: finish() rejects any key that
// was never asked for, so typos and stale fields surface immediately.
class Reader {
 public:
  Reader(const std::string& origin, const json& obj, std::string path)
      : origin_(origin), obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(origin_, path_, "must be an object");
  }

  const json* get(const char* key) {
    seen_.push_back(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& require(const char* key) {
    const json* v = get(key);
    if (v == nullptr) fail(origin_, join(path_, key), "missing required field");
    return *v;
  }

  void finish() const {
    for (const auto& item : obj_.items())
      if (std::find(seen_.begin(), seen_.end(), item.key()) == seen_.end())
        fail(origin_, join(path_, item.key()), "unknown field");
  }

  std::string sub(const char* key) const { return join(path_, key); }

 private:
  const std::string& origin_;
  const json& obj_;
  std::string path_;
  std::vector<std::string> seen_;
};

double as_double(const std::string& origin, const json& v, const std::string& path) {
  if (!v.is_number()) fail(origin, path, "must be a number");
  return v.get<double>();
}

int as_int(const std::string& origin, const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(origin, path, "must be an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const std::string& origin, const json& v,
                     const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(origin, path, "must be a non-negative integer");
}

bool as_bool(const std::string& origin, const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(origin, path, "must be a boolean");
  return v.get<bool>();
}

std::string as_string(const std::string& origin, const json& v,
                      const std::string& path) {
  if (!v.is_string()) fail(origin, path, "must be a string");
  return v.get<std::string>();
}

Vec2 as_vec2(const std::string& origin, const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(origin, path, "must be [x, y]");
  return Vec2(as_double(origin, v[0], path + "[0]"),
              as_double(origin, v[1], path + "[1]"));
}

NetworkConfig parse_network(const std::string& origin, const json& v) {
  Reader r(origin, v, "network");
  NetworkConfig net;
  net.layer_count = as_int(origin, r.require("layer_count"), r.sub("layer_count"));
  net.comm_radius =
      as_double(origin, r.require("comm_radius"), r.sub("comm_radius"));
  if (const json* d = r.get("decay"))
    net.decay = as_double(origin, *d, r.sub("decay"));

  if (const json* agents = r.get("agents")) {
    if (!agents->is_array()) fail(origin, r.sub("agents"), "must be an array");
    for (size_t i = 0; i < agents->size(); ++i) {
      const std::string path = "network.agents[" + std::to_string(i) + "]";
      Reader ra(origin, (*agents)[i], path);
      Agent a;
      a.id = as_int(origin, ra.require("id"), ra.sub("id"));
      a.layer = as_int(origin, ra.require("layer"), ra.sub("layer"));
      a.position = as_vec2(origin, ra.require("position"), ra.sub("position"));
      a.max_step = as_double(origin, ra.require("max_step"), ra.sub("max_step"));
      a.status = AgentStatus::Active;
      ra.finish();
      net.agents.push_back(a);
    }
  }

  if (const json* random = r.get("random_agents")) {
    Reader rr(origin, *random, "network.random_agents");
    RandomAgents spec;
    const json& counts = rr.require("counts_per_layer");
    if (!counts.is_array())
      fail(origin, rr.sub("counts_per_layer"), "must be an array of integers");
    for (size_t i = 0; i < counts.size(); ++i)
      spec.counts_per_layer.push_back(as_int(
          origin, counts[i],
          "network.random_agents.counts_per_layer[" + std::to_string(i) + "]"));
    const json& box = rr.require("bounding_box");
    if (!box.is_array() || box.size() != 4)
      fail(origin, rr.sub("bounding_box"), "must be [x0, y0, x1, y1]");
    for (int i = 0; i < 4; ++i)
      spec.bounding_box[i] =
          as_double(origin, box[i],
                    "network.random_agents.bounding_box[" + std::to_string(i) + "]");
    spec.max_step = as_double(origin, rr.require("max_step"), rr.sub("max_step"));
    rr.finish();
    net.random_agents = std::move(spec);
  }

  r.finish();
  return net;
}

AttackEvent parse_attack(const std::string& origin, const json& v,
                         const std::string& path) {
  Reader r(origin, v, path);
  const std::string kind = as_string(origin, r.require("kind"), r.sub("kind"));
  AttackEvent ev;
  if (kind == "jam") {
    ev.kind = AttackKind::Jam;
  } else if (kind == "spoof") {
    ev.kind = AttackKind::Spoof;
  } else if (kind == "node_loss") {
    ev.kind = AttackKind::NodeLoss;
  } else {
    fail(origin, r.sub("kind"), "must be one of jam, spoof, node_loss");
  }
  ev.start_step = as_int(origin, r.require("start_step"), r.sub("start_step"));
  if (const json* d = r.get("duration"))
    ev.duration = as_int(origin, *d, r.sub("duration"));

  switch (ev.kind) {
    case AttackKind::Jam:
      if (const json* b = r.get("budget"))
        ev.budget = as_int(origin, *b, r.sub("budget"));
      break;
    case AttackKind::Spoof: {
      const std::string spoof_path = r.sub("spoof");
      Reader rs(origin, r.require("spoof"), spoof_path);
      SpoofSpec spec;
      spec.entry_position =
          as_vec2(origin, rs.require("entry_position"), rs.sub("entry_position"));
      if (const json* l = rs.get("layer"))
        spec.layer = as_int(origin, *l, rs.sub("layer"));
      if (const json* vel = rs.get("velocity"))
        spec.velocity = as_vec2(origin, *vel, rs.sub("velocity"));
      rs.finish();
      ev.spoof = spec;
      break;
    }
    case AttackKind::NodeLoss:
      ev.target = as_int(origin, r.require("target"), r.sub("target"));
      break;
  }
  r.finish();
  return ev;
}

MissionPlan parse_mission(const std::string& origin, const json& v) {
  Reader r(origin, v, "mission");
  MissionPlan plan;
  if (const json* h = r.get("horizon"))
    plan.horizon = as_int(origin, *h, r.sub("horizon"));
  const json& stages = r.require("stages");
  if (!stages.is_array()) fail(origin, r.sub("stages"), "must be an array");
  for (size_t i = 0; i < stages.size(); ++i) {
    const std::string path = "mission.stages[" + std::to_string(i) + "]";
    Reader rs(origin, stages[i], path);
    MissionStage stage;
    const json& wp = rs.require("waypoints");
    if (!wp.is_array())
      fail(origin, rs.sub("waypoints"), "must be an array of [x, y] pairs");
    for (size_t w = 0; w < wp.size(); ++w)
      stage.waypoints.push_back(as_vec2(
          origin, wp[w], path + ".waypoints[" + std::to_string(w) + "]"));
    if (const json* b = rs.get("beta"))
      stage.beta = as_double(origin, *b, rs.sub("beta"));
    if (const json* f = rs.get("lambda_floor"))
      stage.lambda_floor = as_double(origin, *f, rs.sub("lambda_floor"));
    stage.start_step = as_int(origin, rs.require("start_step"), rs.sub("start_step"));
    stage.end_step = as_int(origin, rs.require("end_step"), rs.sub("end_step"));
    rs.finish();
    plan.stages.push_back(std::move(stage));
  }
  r.finish();
  return plan;
}

}  // namespace

const char* to_string(TacticalMode mode) {
  return mode == TacticalMode::Robust ? "robust" : "nominal";
}

void ScenarioConfig::validate() const {
  if (network.layer_count < 1) throw ConfigError("network.layer_count: must be >= 1");
  if (!(network.comm_radius > 0.0) || !std::isfinite(network.comm_radius))
    throw ConfigError("network.comm_radius: must be > 0");
  if (network.decay < 0.0 || !std::isfinite(network.decay))
    throw ConfigError("network.decay: must be >= 0");

  const bool explicit_agents = !network.agents.empty();
  if (explicit_agents == network.random_agents.has_value())
    throw ConfigError("network: exactly one of agents and random_agents is required");

  int total_agents = 0;
  if (explicit_agents) {
    for (size_t i = 0; i < network.agents.size(); ++i) {
      const Agent& a = network.agents[i];
      const std::string path = "network.agents[" + std::to_string(i) + "]";
      if (i > 0 && a.id <= network.agents[i - 1].id)
        throw ConfigError(path + ".id: ids must be ascending and unique");
      if (a.layer < 0 || a.layer >= network.layer_count)
        throw ConfigError(path + ".layer: out of range");
      if (!(a.max_step >= 0.0) || !std::isfinite(a.max_step))
        throw ConfigError(path + ".max_step: must be >= 0");
      if (!a.position.allFinite())
        throw ConfigError(path + ".position: must be finite");
      if (a.status != AgentStatus::Active)
        throw ConfigError(path + ": initial agents must be active");
    }
    total_agents = static_cast<int>(network.agents.size());
  } else {
    const RandomAgents& spec = *network.random_agents;
    if (static_cast<int>(spec.counts_per_layer.size()) != network.layer_count)
      throw ConfigError(
          "network.random_agents.counts_per_layer: needs one count per layer");
    for (size_t i = 0; i < spec.counts_per_layer.size(); ++i) {
      if (spec.counts_per_layer[i] < 0)
        throw ConfigError("network.random_agents.counts_per_layer[" +
                          std::to_string(i) + "]: must be >= 0");
      total_agents += spec.counts_per_layer[i];
    }
    const auto& b = spec.bounding_box;
    const bool box_ok = std::isfinite(b[0]) && std::isfinite(b[1]) &&
                        std::isfinite(b[2]) && std::isfinite(b[3]) &&
                        b[2] > b[0] && b[3] > b[1];
    if (!box_ok)
      throw ConfigError(
          "network.random_agents.bounding_box: must be [x0, y0, x1, y1] with "
          "x1 > x0 and y1 > y0");
    if (!(spec.max_step >= 0.0) || !std::isfinite(spec.max_step))
      throw ConfigError("network.random_agents.max_step: must be >= 0");
  }
  if (total_agents < 2) throw ConfigError("network: needs at least 2 agents");

  if (total_steps < 1) throw ConfigError("total_steps: must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw ConfigError("epsilon: must be > 0");
  if (jam_defense_budget < 1) throw ConfigError("jam_defense_budget: must be >= 1");
  if (detection_delay < 0) throw ConfigError("detection_delay: must be >= 0");
  if (candidate_directions < 1)
    throw ConfigError("candidate_directions: must be >= 1");
  if (max_rounds < 1) throw ConfigError("max_rounds: must be >= 1");
  if (!(coupling >= 0.0) || !std::isfinite(coupling))
    throw ConfigError("coupling: must be >= 0");
  if (enumeration_cap < 1) throw ConfigError("enumeration_cap: must be >= 1");

  for (size_t i = 0; i < attacks.size(); ++i) {
    const AttackEvent& ev = attacks[i];
    const std::string path = "attacks[" + std::to_string(i) + "]";
    try {
      ev.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ": " + e.what());
    }
    if (ev.end_step() > total_steps)
      throw ConfigError(path + ": attack window must end by total_steps");
    if (ev.kind == AttackKind::Spoof && ev.spoof->layer >= network.layer_count)
      throw ConfigError(path + ".spoof.layer: out of range");
    if (ev.kind == AttackKind::NodeLoss) {
      bool known = false;
      if (explicit_agents) {
        for (const Agent& a : network.agents) known = known || a.id == ev.target;
      } else {
        known = ev.target >= 0 && ev.target < total_agents;
      }
      if (!known) throw ConfigError(path + ".target: unknown agent id");
    }
  }

  if (mission) {
    try {
      mission->validate(network.layer_count);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("mission: ") + e.what());
    }
  }
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(origin + ": top level must be an object");

  Reader r(origin, doc, "");
  const int version = as_int(origin, r.require("version"), "version");
  if (version != 1)
    fail(origin, "version", "unsupported schema version (expected 1)");

  ScenarioConfig cfg;
  if (const json* n = r.get("name")) cfg.name = as_string(origin, *n, "name");
  cfg.network = parse_network(origin, r.require("network"));
  if (const json* attacks = r.get("attacks")) {
    if (!attacks->is_array()) fail(origin, "attacks", "must be an array");
    for (size_t i = 0; i < attacks->size(); ++i)
      cfg.attacks.push_back(parse_attack(
          origin, (*attacks)[i], "attacks[" + std::to_string(i) + "]"));
  }
  if (const json* m = r.get("mission")) cfg.mission = parse_mission(origin, *m);
  cfg.total_steps = as_int(origin, r.require("total_steps"), "total_steps");
  if (const json* s = r.get("seed")) cfg.seed = as_u64(origin, *s, "seed");
  if (const json* m = r.get("mode")) {
    const std::string mode = as_string(origin, *m, "mode");
    if (mode == "nominal")
      cfg.mode = TacticalMode::Nominal;
    else if (mode == "robust")
      cfg.mode = TacticalMode::Robust;
    else
      fail(origin, "mode", "must be nominal or robust");
  }
  if (const json* e = r.get("epsilon"))
    cfg.epsilon = as_double(origin, *e, "epsilon");
  if (const json* j = r.get("jam_defense_budget"))
    cfg.jam_defense_budget = as_int(origin, *j, "jam_defense_budget");
  if (const json* d = r.get("detection"))
    cfg.detection = as_bool(origin, *d, "detection");
  if (const json* d = r.get("detection_delay"))
    cfg.detection_delay = as_int(origin, *d, "detection_delay");
  if (const json* c = r.get("candidate_directions"))
    cfg.candidate_directions = as_int(origin, *c, "candidate_directions");
  if (const json* m = r.get("max_rounds"))
    cfg.max_rounds = as_int(origin, *m, "max_rounds");
  if (const json* c = r.get("coupling"))
    cfg.coupling = as_double(origin, *c, "coupling");
  if (const json* c = r.get("enumeration_cap"))
    cfg.enumeration_cap = as_int(origin, *c, "enumeration_cap");
  r.finish();

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path);
}

LayeredNetwork build_network(const ScenarioConfig& config) {
  config.validate();
  LayeredNetwork net;
  net.layer_count = config.network.layer_count;
  net.comm_radius = config.network.comm_radius;
  net.decay = config.network.decay;
  net.step_index = 0;

  if (!config.network.agents.empty()) {
    net.agents = config.network.agents;
  } else {
    const RandomAgents& spec = *config.network.random_agents;
    Xoshiro256pp rng(config.seed);
    int id = 0;
    for (int layer = 0; layer < net.layer_count; ++layer) {
      for (int k = 0; k < spec.counts_per_layer[layer]; ++k) {
        Agent a;
        a.id = id++;
        a.layer = layer;
        // x before y, agents in id order: the draw sequence is part of the
        // trace determinism contract.
        const double x = rng.uniform(spec.bounding_box[0], spec.bounding_box[2]);
        const double y = rng.uniform(spec.bounding_box[1], spec.bounding_box[3]);
        a.position = Vec2(x, y);
        a.max_step = spec.max_step;
        net.agents.push_back(a);
      }
    }
  }
  net.validate();
  return net;
}

}  // namespace mosaic
