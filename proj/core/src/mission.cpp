#include "mosaic/mission.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mosaic {

void MissionStage::validate(int layer_count) const {
  if (start_step < 0) throw std::invalid_argument("stage start_step must be >= 0");
  if (end_step <= start_step)
    throw std::invalid_argument("stage end_step must be > start_step");
  if (beta < 0.0) throw std::invalid_argument("stage beta must be >= 0");
  if (lambda_floor < 0.0)
    throw std::invalid_argument("stage lambda_floor must be >= 0");
  if (static_cast<int>(waypoints.size()) != layer_count)
    throw std::invalid_argument("stage needs exactly one waypoint per layer");
  for (const Vec2& w : waypoints)
    if (!w.allFinite())
      throw std::invalid_argument("stage waypoints must be finite");
}

void MissionPlan::validate(int layer_count) const {
  if (horizon < 1) throw std::invalid_argument("mission horizon must be >= 1");
  for (size_t i = 0; i < stages.size(); ++i) {
    stages[i].validate(layer_count);
    if (i > 0 && stages[i].start_step < stages[i - 1].end_step)
      throw std::invalid_argument("mission stages must be ascending and disjoint");
  }
}

const MissionStage* MissionPlan::stage_at(int step) const {
  for (const MissionStage& s : stages)
    if (s.start_step <= step && step < s.end_step) return &s;
  return nullptr;
}

double stage_payoff(const LayeredNetwork& net, const MissionStage& stage,
                    double cross_coupling) {
  Objective obj;
  obj.view = NetView::True;
  obj.beta = stage.beta;
  obj.waypoints = stage.waypoints;
  obj.lambda_floor = stage.lambda_floor;
  obj.cross_coupling = cross_coupling;
  return obj.eval(net);
}

Objective stage_objective(const MissionStage* stage, const TacticalParams& params) {
  Objective obj;
  obj.view = params.view;
  obj.robust_k = params.robust_k;
  obj.cross_coupling = params.cross_coupling;
  obj.enumeration_cap = params.enumeration_cap;
  if (stage != nullptr) {
    obj.beta = stage->beta;
    obj.waypoints = stage->waypoints;
    obj.lambda_floor = stage->lambda_floor;
  }
  return obj;
}

Rollout plan_rollout(const LayeredNetwork& net, const MissionPlan& plan,
                     const TacticalParams& params, int step) {
  Rollout rollout;
  rollout.start_step = step;

  const MissionStage* stage = plan.stage_at(step);
  if (stage == nullptr) {
    // No objective outside stages: everyone stays put.
    PlanStep ps;
    for (int layer = 0; layer < net.layer_count; ++layer) {
      OperatorDecision d;
      d.operator_layer = layer;
      ps.decisions.push_back(std::move(d));
    }
    ps.gne_rounds = 0;
    ps.gne_converged = true;
    ps.certificate = GneCertificate{true, 0.0, std::nullopt};
    ps.objective_value = stage_objective(nullptr, params).eval(net);
    rollout.steps.push_back(std::move(ps));
    return rollout;
  }

  const int count = std::min(plan.horizon, stage->end_step - step);
  const Objective obj = stage_objective(stage, params);
  LayeredNetwork state = net;
  for (int t = 0; t < count; ++t) {
    GneResult g =
        gne_iterate(state, obj, params.epsilon, params.max_rounds, params.directions);
    PlanStep ps;
    ps.decisions.assign(g.decisions.begin(), g.decisions.begin() + net.layer_count);
    ps.gne_rounds = g.rounds;
    ps.gne_converged = g.converged;
    ps.certificate = g.certificate;
    ps.objective_value = g.lambda2_trace.back();
    for (const OperatorDecision& d : ps.decisions) state = apply_decision(state, d);
    rollout.steps.push_back(std::move(ps));
  }
  return rollout;
}

PlanStep plan_step(const LayeredNetwork& net, const MissionPlan& plan,
                   const TacticalParams& params, int step) {
  return plan_rollout(net, plan, params, step).steps.front();
}

bool replan_trigger(const StepEvents& events) {
  return events.any();
}

Planner::Planner(MissionPlan plan, TacticalParams params)
    : plan_(std::move(plan)), params_(params) {}

PlanStep Planner::step(const LayeredNetwork& net, int step_index,
                       const StepEvents& events) {
  const bool stale = !has_cache_ || replan_trigger(events) ||
                     cursor_ >= cache_.steps.size() ||
                     cache_.start_step + static_cast<int>(cursor_) != step_index;
  if (stale) {
    cache_ = plan_rollout(net, plan_, params_, step_index);
    cursor_ = 0;
    has_cache_ = true;
  }
  return cache_.steps[cursor_++];
}

}  // namespace mosaic
