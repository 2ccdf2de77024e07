#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace mosaic {

using Vec2 = Eigen::Vector2d;

enum class AgentStatus { Active, Quarantined, Spoofed };

const char* to_string(AgentStatus status);

struct Agent {
  int id = 0;
  int layer = 0;
  Vec2 position = Vec2::Zero();
  double max_step = 0.0;
  AgentStatus status = AgentStatus::Active;
};

// Multi-layer network over point agents. Link weights are derived from
// positions on demand (see spectral.hpp); there is no stored adjacency.
struct LayeredNetwork {
  std::vector<Agent> agents;  // ascending id, enforced by validate()
  int layer_count = 1;
  double comm_radius = 1.0;
  double decay = 0.0;  // weight falls off as exp(-decay * distance)
  int step_index = 0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  int index_of(int agent_id) const;  // -1 when absent
  const Agent* find(int agent_id) const;
  Agent* find(int agent_id);
  int count(AgentStatus status) const;
};

// One operator's joint move for the agents of its layer.
struct OperatorDecision {
  int operator_layer = 0;
  std::map<int, Vec2> moves;  // agent id -> displacement
};

// Validates ownership (active agents of the operator's layer only) and the
// per-agent displacement bound, then returns the moved network.
LayeredNetwork apply_decision(const LayeredNetwork& net,
                              const OperatorDecision& decision);

}  // namespace mosaic
