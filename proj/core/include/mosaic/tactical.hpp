#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mosaic/game.hpp"
#include "mosaic/network.hpp"
#include "mosaic/security.hpp"
#include "mosaic/spectral.hpp"

namespace mosaic {

inline constexpr int kDefaultCandidateDirections = 8;
inline constexpr int kDefaultGneMaxRounds = 100;

// What the operators maximize each step. The three operator modes map onto
// the first two fields: nominal = {True, 0}, robust(k) = {True, k},
// perceived = {Perceived, 0}. With robust_k > 0 the connectivity term is the
// worst case over removals of up to robust_k links; beta trades connectivity
// against mean squared distance to the per-layer waypoints.
struct Objective {
  NetView view = NetView::True;
  int robust_k = 0;
  double beta = 0.0;
  std::vector<Vec2> waypoints;  // one per layer, required when beta > 0
  double lambda_floor = 0.0;    // reported, never enforced
  double cross_coupling = 1.0;
  int enumeration_cap = kDefaultEnumerationCap;

  double eval(const LayeredNetwork& net) const;

  // Ascent direction for one agent: connectivity gradient minus the waypoint
  // pull. Absent when the connectivity gradient is untrustworthy (degenerate
  // view, closed eigengap, or the agent is not a participant).
  std::optional<Vec2> position_gradient(const LayeredNetwork& net,
                                        const NetworkSpectral& spectral,
                                        int agent_id) const;
};

// Zero move first, then `directions` (>= 1) unit steps at evenly spaced
// angles ascending, then the objective gradient direction when available.
// All scaled to max_step.
std::vector<Vec2> candidate_moves(const LayeredNetwork& net, const Objective& objective,
                                  int agent_id,
                                  int directions = kDefaultCandidateDirections);

struct BestResponse {
  OperatorDecision decision;
  double value = 0.0;   // objective after the operator moved
  LayeredNetwork net;   // network with the decision applied
};

// Coordinate-wise greedy over the operator's active agents in ascending id
// order. The zero move is always a candidate, so the objective never drops.
BestResponse operator_best_response(const LayeredNetwork& net,
                                    const Objective& objective, int operator_layer,
                                    int directions = kDefaultCandidateDirections);

struct GneResult {
  LayeredNetwork net;  // state after the last applied response
  std::vector<OperatorDecision> decisions;
  // Objective value after each applied response; nondecreasing. Equals the
  // lambda2 trajectory whenever the objective has no waypoint term.
  std::vector<double> lambda2_trace;
  int rounds = 0;
  bool converged = false;
  GneCertificate certificate;
};

// Cycles best responses over operators 0..L-1 until a full cycle gains at
// most epsilon AND the equilibrium certificate holds, or max_rounds runs out.
GneResult gne_iterate(const LayeredNetwork& net, const Objective& objective,
                      double epsilon, int max_rounds = kDefaultGneMaxRounds,
                      int directions = kDefaultCandidateDirections);

// Equilibrium check adapter: players are operators, deviations are the
// candidate moves of each of their agents, one agent at a time. The network
// game is fully cooperative, so local and composed gains coincide.
class NetworkGneProblem final : public GnePlayerModel {
 public:
  NetworkGneProblem(const LayeredNetwork& net, const Objective& objective,
                    int directions = kDefaultCandidateDirections);

  int player_count() const override;
  int deviation_count(int player) const override;
  double local_gain(int player, int deviation) const override;
  double composed_gain(int player, int deviation) const override;

 private:
  LayeredNetwork net_;
  Objective objective_;
  double base_value_ = 0.0;
  std::vector<std::vector<std::pair<int, Vec2>>> deviations_;  // per player
  mutable std::vector<std::vector<std::optional<double>>> gain_cache_;
};

}  // namespace mosaic
