#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mosaic/mission.hpp"
#include "mosaic/network.hpp"
#include "mosaic/security.hpp"

namespace mosaic {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RandomAgents {
  std::vector<int> counts_per_layer;
  std::array<double, 4> bounding_box{0.0, 0.0, 1.0, 1.0};  // x0, y0, x1, y1
  double max_step = 0.0;
};

struct NetworkConfig {
  int layer_count = 1;
  double comm_radius = 1.0;
  double decay = 0.0;
  std::vector<Agent> agents;                  // explicit placement ...
  std::optional<RandomAgents> random_agents;  // ... or seeded placement
};

enum class TacticalMode { Nominal, Robust };

const char* to_string(TacticalMode mode);

struct ScenarioConfig {
  std::string name;
  NetworkConfig network;
  std::vector<AttackEvent> attacks;
  std::optional<MissionPlan> mission;  // absent = plain connectivity seeking
  int total_steps = 1;
  std::uint64_t seed = 0;
  TacticalMode mode = TacticalMode::Nominal;
  double epsilon = 1e-4;
  int jam_defense_budget = 1;  // robust mode's anticipated jam size
  bool detection = true;
  int detection_delay = kDefaultDetectionDelay;
  int candidate_directions = kDefaultCandidateDirections;
  int max_rounds = kDefaultGneMaxRounds;
  double coupling = 1.0;  // cross-layer weight scale
  int enumeration_cap = kDefaultEnumerationCap;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Strict, versioned JSON: unknown fields and malformed values are rejected
// with the JSON path in the message. `origin` prefixes error messages.
ScenarioConfig parse_scenario(const std::string& text,
                              const std::string& origin = "scenario");
ScenarioConfig load_scenario(const std::string& path);

// Explicit agents verbatim; random placement drawn uniformly inside the
// bounding box from the config seed (same seed, same network, any platform).
LayeredNetwork build_network(const ScenarioConfig& config);

}  // namespace mosaic
