#include "mosaic/network.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace mosaic {

const char* to_string(AgentStatus status) {
  switch (status) {
    case AgentStatus::Active:
      return "active";
    case AgentStatus::Quarantined:
      return "quarantined";
    case AgentStatus::Spoofed:
      return "spoofed";
  }
  return "unknown";
}

void LayeredNetwork::validate() const {
  if (layer_count < 1) throw std::invalid_argument("layer_count must be >= 1");
  if (!(comm_radius > 0.0))
    throw std::invalid_argument("comm_radius must be > 0");
  if (!(decay >= 0.0)) throw std::invalid_argument("decay must be >= 0");
  std::set<int> seen;
  int prev_id = -1;
  for (const Agent& a : agents) {
    if (!seen.insert(a.id).second)
      throw std::invalid_argument("duplicate agent id " + std::to_string(a.id));
    if (a.id < prev_id)
      throw std::invalid_argument("agents must be sorted by ascending id");
    prev_id = a.id;
    if (a.layer < 0 || a.layer >= layer_count)
      throw std::invalid_argument("agent " + std::to_string(a.id) +
                                  " references missing layer " +
                                  std::to_string(a.layer));
    if (!(a.max_step >= 0.0))
      throw std::invalid_argument("agent " + std::to_string(a.id) +
                                  " max_step must be >= 0");
    if (!std::isfinite(a.position.x()) || !std::isfinite(a.position.y()))
      throw std::invalid_argument("agent " + std::to_string(a.id) +
                                  " position must be finite");
  }
}

int LayeredNetwork::index_of(int agent_id) const {
  for (std::size_t i = 0; i < agents.size(); ++i)
    if (agents[i].id == agent_id) return static_cast<int>(i);
  return -1;
}

const Agent* LayeredNetwork::find(int agent_id) const {
  int i = index_of(agent_id);
  return i < 0 ? nullptr : &agents[i];
}

Agent* LayeredNetwork::find(int agent_id) {
  int i = index_of(agent_id);
  return i < 0 ? nullptr : &agents[i];
}

int LayeredNetwork::count(AgentStatus status) const {
  int n = 0;
  for (const Agent& a : agents)
    if (a.status == status) ++n;
  return n;
}

LayeredNetwork apply_decision(const LayeredNetwork& net,
                              const OperatorDecision& decision) {
  if (decision.operator_layer < 0 || decision.operator_layer >= net.layer_count)
    throw std::invalid_argument("decision references missing layer " +
                                std::to_string(decision.operator_layer));
  LayeredNetwork out = net;
  for (const auto& [id, displacement] : decision.moves) {
    Agent* agent = out.find(id);
    if (agent == nullptr)
      throw std::invalid_argument("decision moves unknown agent " +
                                  std::to_string(id));
    if (agent->layer != decision.operator_layer)
      throw std::invalid_argument("decision moves agent " + std::to_string(id) +
                                  " outside operator layer");
    if (agent->status != AgentStatus::Active)
      throw std::invalid_argument("decision moves non-active agent " +
                                  std::to_string(id));
    if (displacement.norm() > agent->max_step + 1e-12)
      throw std::invalid_argument("decision exceeds max_step for agent " +
                                  std::to_string(id));
    agent->position += displacement;
  }
  return out;
}

}  // namespace mosaic
