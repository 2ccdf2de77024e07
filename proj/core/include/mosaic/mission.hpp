#pragma once

#include <vector>

#include "mosaic/network.hpp"
#include "mosaic/tactical.hpp"

namespace mosaic {

struct MissionStage {
  std::vector<Vec2> waypoints;  // one per layer
  double beta = 0.0;
  double lambda_floor = 0.0;
  int start_step = 0;
  int end_step = 0;  // exclusive

  void validate(int layer_count) const;
};

struct MissionPlan {
  int horizon = 1;
  std::vector<MissionStage> stages;  // ascending, non-overlapping

  void validate(int layer_count) const;
  const MissionStage* stage_at(int step) const;
};

// Stage score on the true network: connectivity minus the waypoint penalty.
double stage_payoff(const LayeredNetwork& net, const MissionStage& stage,
                    double cross_coupling = 1.0);

// Knobs the planner hands to the tactical layer each step.
struct TacticalParams {
  double epsilon = 1e-3;
  int max_rounds = kDefaultGneMaxRounds;
  int directions = kDefaultCandidateDirections;
  NetView view = NetView::Perceived;  // operators act on what they can see
  int robust_k = 0;
  double cross_coupling = 1.0;
  int enumeration_cap = kDefaultEnumerationCap;
};

// Objective for one stage (nullptr = no active stage: bare connectivity).
Objective stage_objective(const MissionStage* stage, const TacticalParams& params);

// One planned step: each operator issues one decision, so every agent moves
// at most max_step this step. Telemetry comes from the full equilibrium
// iteration the decisions were cut from.
struct PlanStep {
  std::vector<OperatorDecision> decisions;  // one per operator layer
  int gne_rounds = 0;
  bool gne_converged = false;
  GneCertificate certificate;
  double objective_value = 0.0;  // at the iteration's resting point
};

struct Rollout {
  int start_step = 0;
  std::vector<PlanStep> steps;
};

// Certainty-equivalent lookahead over min(horizon, steps left in the current
// stage): at each projected step run gne_iterate on the stage objective from
// the projected state, apply the first response cycle, and carry on. No
// attacks are assumed during the projection.
Rollout plan_rollout(const LayeredNetwork& net, const MissionPlan& plan,
                     const TacticalParams& params, int step);

// First step of the rollout (receding horizon).
PlanStep plan_step(const LayeredNetwork& net, const MissionPlan& plan,
                   const TacticalParams& params, int step);

struct StepEvents {
  bool attack_activity = false;      // live attack, detector flag, spoof motion
  bool attack_window_ended = false;
  bool quarantine_or_loss = false;
  bool stage_boundary = false;

  bool any() const {
    return attack_activity || attack_window_ended || quarantine_or_loss ||
           stage_boundary;
  }
};

// A cached rollout stays valid only while the world matches the projection.
bool replan_trigger(const StepEvents& events);

// Serves one PlanStep per sim step from a cached rollout, recomputing it
// whenever events invalidate the projection or the cache runs dry.
class Planner {
 public:
  Planner(MissionPlan plan, TacticalParams params);

  const MissionPlan& plan() const { return plan_; }
  PlanStep step(const LayeredNetwork& net, int step_index, const StepEvents& events);

 private:
  MissionPlan plan_;
  TacticalParams params_;
  Rollout cache_;
  size_t cursor_ = 0;
  bool has_cache_ = false;
};

}  // namespace mosaic
