#include "mosaic/tactical.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mosaic {
namespace {

constexpr double kImproveTol = 1e-12;

int active_agent_count(const LayeredNetwork& net) {
  int count = 0;
  for (const Agent& a : net.agents)
    if (a.status == AgentStatus::Active) ++count;
  return count;
}

}  // namespace

double Objective::eval(const LayeredNetwork& net) const {
  if (robust_k < 0) throw std::invalid_argument("robust_k must be >= 0");
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (beta > 0.0 && static_cast<int>(waypoints.size()) != net.layer_count)
    throw std::invalid_argument("objective needs one waypoint per layer");

  double connectivity_term;
  if (robust_k > 0) {
    connectivity_term =
        worst_case_jam(net, robust_k, view, cross_coupling, enumeration_cap)
            .lambda2_after;
  } else {
    connectivity_term = connectivity(net, view, cross_coupling).lambda2();
  }

  double penalty = 0.0;
  if (beta > 0.0) {
    int count = 0;
    double total = 0.0;
    for (const Agent& a : net.agents) {
      if (a.status != AgentStatus::Active) continue;
      total += (a.position - waypoints[a.layer]).squaredNorm();
      ++count;
    }
    if (count > 0) penalty = beta * total / count;
  }
  return connectivity_term - penalty;
}

std::optional<Vec2> Objective::position_gradient(const LayeredNetwork& net,
                                                 const NetworkSpectral& spectral,
                                                 int agent_id) const {
  std::optional<Vec2> lambda_grad =
      lambda2_position_gradient(net, spectral, agent_id);
  if (!lambda_grad) return std::nullopt;

  Vec2 grad = *lambda_grad;
  if (beta > 0.0) {
    if (static_cast<int>(waypoints.size()) != net.layer_count)
      throw std::invalid_argument("objective needs one waypoint per layer");
    const Agent* agent = net.find(agent_id);
    if (agent == nullptr)
      throw std::invalid_argument("unknown agent " + std::to_string(agent_id));
    const int count = active_agent_count(net);
    if (count > 0)
      grad -= beta * (2.0 / count) * (agent->position - waypoints[agent->layer]);
  }
  return grad;
}

std::vector<Vec2> candidate_moves(const LayeredNetwork& net,
                                  const Objective& objective, int agent_id,
                                  int directions) {
  if (directions < 1) throw std::invalid_argument("directions must be >= 1");
  const Agent* agent = net.find(agent_id);
  if (agent == nullptr)
    throw std::invalid_argument("unknown agent " + std::to_string(agent_id));

  std::vector<Vec2> moves;
  moves.push_back(Vec2::Zero());
  if (agent->status != AgentStatus::Active || agent->max_step <= 0.0) return moves;

  for (int i = 0; i < directions; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / directions;
    moves.push_back(agent->max_step * Vec2(std::cos(angle), std::sin(angle)));
  }

  const NetworkSpectral spectral =
      connectivity(net, objective.view, objective.cross_coupling);
  const std::optional<Vec2> grad =
      objective.position_gradient(net, spectral, agent_id);
  if (grad && grad->norm() > 1e-12)
    moves.push_back(agent->max_step * grad->normalized());
  return moves;
}

BestResponse operator_best_response(const LayeredNetwork& net,
                                    const Objective& objective, int operator_layer,
                                    int directions) {
  if (operator_layer < 0 || operator_layer >= net.layer_count)
    throw std::invalid_argument("operator layer " + std::to_string(operator_layer) +
                                " out of range");

  BestResponse out;
  out.decision.operator_layer = operator_layer;
  out.net = net;
  out.value = objective.eval(out.net);

  for (size_t i = 0; i < out.net.agents.size(); ++i) {
    const Agent& agent = out.net.agents[i];
    if (agent.layer != operator_layer || agent.status != AgentStatus::Active)
      continue;

    const std::vector<Vec2> moves =
        candidate_moves(out.net, objective, agent.id, directions);
    Vec2 best_move = Vec2::Zero();
    double best_value = out.value;
    for (const Vec2& move : moves) {
      if (move.isZero(0.0)) continue;  // keeps the current value exactly
      LayeredNetwork trial = out.net;
      trial.agents[i].position += move;
      const double value = objective.eval(trial);
      if (value > best_value + kImproveTol) {
        best_value = value;
        best_move = move;
      }
    }
    out.decision.moves[agent.id] = best_move;
    out.net.agents[i].position += best_move;
    out.value = best_value;
  }
  return out;
}

GneResult gne_iterate(const LayeredNetwork& net, const Objective& objective,
                      double epsilon, int max_rounds, int directions) {
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");

  GneResult result;
  result.net = net;
  double value = objective.eval(result.net);

  bool certificate_checked = false;
  for (int round = 1; round <= max_rounds; ++round) {
    const double cycle_start = value;
    for (int layer = 0; layer < result.net.layer_count; ++layer) {
      BestResponse br =
          operator_best_response(result.net, objective, layer, directions);
      result.decisions.push_back(std::move(br.decision));
      result.net = std::move(br.net);
      result.lambda2_trace.push_back(br.value);
      value = br.value;
    }
    result.rounds = round;
    if (value - cycle_start <= epsilon) {
      result.certificate =
          check_gne(NetworkGneProblem(result.net, objective, directions), epsilon);
      certificate_checked = true;
      if (result.certificate.holds) {
        result.converged = true;
        break;
      }
      // Flat cycle but some unilateral deviation still gains: keep iterating.
    }
  }
  if (!certificate_checked)
    result.certificate =
        check_gne(NetworkGneProblem(result.net, objective, directions), epsilon);
  return result;
}

NetworkGneProblem::NetworkGneProblem(const LayeredNetwork& net,
                                     const Objective& objective, int directions)
    : net_(net), objective_(objective) {
  base_value_ = objective_.eval(net_);
  deviations_.resize(net_.layer_count);
  for (const Agent& a : net_.agents) {
    if (a.status != AgentStatus::Active) continue;
    for (const Vec2& move : candidate_moves(net_, objective_, a.id, directions))
      deviations_[a.layer].emplace_back(a.id, move);
  }
  gain_cache_.resize(deviations_.size());
  for (size_t p = 0; p < deviations_.size(); ++p)
    gain_cache_[p].assign(deviations_[p].size(), std::nullopt);
}

int NetworkGneProblem::player_count() const {
  return net_.layer_count;
}

int NetworkGneProblem::deviation_count(int player) const {
  return static_cast<int>(deviations_[player].size());
}

double NetworkGneProblem::local_gain(int player, int deviation) const {
  std::optional<double>& slot = gain_cache_[player][deviation];
  if (!slot) {
    const auto& [agent_id, move] = deviations_[player][deviation];
    if (move.isZero(0.0)) {
      slot = 0.0;
    } else {
      LayeredNetwork trial = net_;
      trial.agents[trial.index_of(agent_id)].position += move;
      slot = objective_.eval(trial) - base_value_;
    }
  }
  return *slot;
}

double NetworkGneProblem::composed_gain(int player, int deviation) const {
  // Fully cooperative: the composed objective is the local one.
  return local_gain(player, deviation);
}

}  // namespace mosaic
