#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "mosaic/mission.hpp"

using namespace mosaic;
using testutil::agent;
using testutil::net_of;

namespace {

MissionStage stage_of(int start, int end, double beta,
                      std::vector<Vec2> waypoints, double floor = 0.0) {
  MissionStage s;
  s.start_step = start;
  s.end_step = end;
  s.beta = beta;
  s.waypoints = std::move(waypoints);
  s.lambda_floor = floor;
  return s;
}

bool same_decision(const OperatorDecision& a, const OperatorDecision& b) {
  if (a.operator_layer != b.operator_layer) return false;
  if (a.moves.size() != b.moves.size()) return false;
  auto ib = b.moves.begin();
  for (const auto& [id, move] : a.moves) {
    if (id != ib->first) return false;
    if ((move - ib->second).norm() > 1e-12) return false;
    ++ib;
  }
  return true;
}

bool same_decisions(const std::vector<OperatorDecision>& a,
                    const std::vector<OperatorDecision>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!same_decision(a[i], b[i])) return false;
  return true;
}

LayeredNetwork apply_step(LayeredNetwork net, const PlanStep& ps) {
  for (const OperatorDecision& d : ps.decisions) net = apply_decision(net, d);
  return net;
}

}  // namespace

TEST_CASE("stage validation rejects malformed stages") {
  const std::vector<Vec2> wp = {Vec2::Zero()};
  CHECK_THROWS_WITH_AS(stage_of(-1, 3, 0.0, wp).validate(1),
                       "stage start_step must be >= 0", std::invalid_argument);
  CHECK_THROWS_WITH_AS(stage_of(3, 3, 0.0, wp).validate(1),
                       "stage end_step must be > start_step",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(stage_of(0, 3, -0.5, wp).validate(1),
                       "stage beta must be >= 0", std::invalid_argument);
  CHECK_THROWS_WITH_AS(stage_of(0, 3, 0.0, wp, -1.0).validate(1),
                       "stage lambda_floor must be >= 0",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(stage_of(0, 3, 0.0, wp).validate(2),
                       "stage needs exactly one waypoint per layer",
                       std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(stage_of(0, 3, 0.0, {Vec2(inf, 0.0)}).validate(1),
                       "stage waypoints must be finite", std::invalid_argument);
  CHECK_NOTHROW(stage_of(0, 3, 1.0, wp).validate(1));
}

TEST_CASE("plan validation rejects bad horizons and overlapping stages") {
  const std::vector<Vec2> wp = {Vec2::Zero()};
  MissionPlan plan;
  plan.horizon = 0;
  CHECK_THROWS_WITH_AS(plan.validate(1), "mission horizon must be >= 1",
                       std::invalid_argument);

  plan.horizon = 2;
  plan.stages = {stage_of(0, 5, 0.0, wp), stage_of(4, 8, 0.0, wp)};
  CHECK_THROWS_WITH_AS(plan.validate(1),
                       "mission stages must be ascending and disjoint",
                       std::invalid_argument);

  plan.stages = {stage_of(0, 5, 0.0, wp), stage_of(5, 8, 0.0, wp)};
  CHECK_NOTHROW(plan.validate(1));
}

TEST_CASE("stage lookup is start-inclusive and end-exclusive") {
  const std::vector<Vec2> wp = {Vec2::Zero()};
  MissionPlan plan;
  plan.stages = {stage_of(2, 5, 0.0, wp), stage_of(7, 9, 1.0, wp)};
  CHECK(plan.stage_at(0) == nullptr);
  CHECK(plan.stage_at(2) == &plan.stages[0]);
  CHECK(plan.stage_at(4) == &plan.stages[0]);
  CHECK(plan.stage_at(5) == nullptr);
  CHECK(plan.stage_at(7) == &plan.stages[1]);
  CHECK(plan.stage_at(9) == nullptr);
}

TEST_CASE("stage payoff is connectivity minus the mean waypoint penalty") {
  auto net = net_of({agent(0, 0, 0.0, 0.0), agent(1, 0, 0.8, 0.0)}, 1, 1.0);
  const auto stage = stage_of(0, 10, 2.0, {Vec2(0.4, 0.3)});
  // lambda2 = 2 and both agents sit 0.25 squared meters from the waypoint.
  CHECK(stage_payoff(net, stage) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("stage payoff scores the true network, not the perceived one") {
  auto net = net_of({agent(0, 0, 0.0, 0.0), agent(1, 0, 1.8, 0.0),
                     agent(2, 0, 0.9, 0.0, 0.25, AgentStatus::Spoofed)},
                    1, 1.0);
  const auto stage = stage_of(0, 10, 0.0, {Vec2::Zero()});
  Objective perceived;
  perceived.view = NetView::Perceived;
  CHECK(perceived.eval(net) > 0.5);
  CHECK(stage_payoff(net, stage) == 0.0);
}

TEST_CASE("the stage objective carries tactical knobs and stage terms") {
  TacticalParams params;
  params.view = NetView::Perceived;
  params.robust_k = 2;
  params.cross_coupling = 0.5;
  params.enumeration_cap = 77;

  const auto stage = stage_of(0, 4, 1.5, {Vec2(1.0, 2.0)}, 0.3);
  const Objective obj = stage_objective(&stage, params);
  CHECK(obj.view == NetView::Perceived);
  CHECK(obj.robust_k == 2);
  CHECK(obj.cross_coupling == 0.5);
  CHECK(obj.enumeration_cap == 77);
  CHECK(obj.beta == 1.5);
  CHECK(obj.lambda_floor == 0.3);
  REQUIRE(obj.waypoints.size() == 1);
  CHECK(obj.waypoints[0] == Vec2(1.0, 2.0));

  const Objective bare = stage_objective(nullptr, params);
  CHECK(bare.beta == 0.0);
  CHECK(bare.waypoints.empty());
}

TEST_CASE("off-stage planning keeps everyone in place") {
  auto net = testutil::complete4();
  MissionPlan plan;
  plan.stages = {stage_of(5, 8, 0.0, {Vec2::Zero()})};
  TacticalParams params;

  const PlanStep ps = plan_step(net, plan, params, 0);
  REQUIRE(ps.decisions.size() == 1);
  CHECK(ps.decisions[0].moves.empty());
  CHECK(ps.gne_rounds == 0);
  CHECK(ps.gne_converged);
  CHECK(ps.certificate.holds);
  CHECK(ps.objective_value == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("the rollout stops at the stage boundary") {
  auto net = testutil::complete4();
  MissionPlan plan;
  plan.horizon = 5;
  plan.stages = {stage_of(0, 2, 0.0, {Vec2::Zero()})};
  TacticalParams params;

  const Rollout rollout = plan_rollout(net, plan, params, 0);
  CHECK(rollout.start_step == 0);
  CHECK(rollout.steps.size() == 2);
}

TEST_CASE("plan steps issue one decision per operator within step bounds") {
  Xoshiro256pp rng(811);
  auto net = testutil::random_network(rng, 6, 2, 2.0, 1.4, 0.5);
  MissionPlan plan;
  plan.horizon = 2;
  plan.stages = {stage_of(0, 10, 0.5, {Vec2(1.0, 1.0), Vec2(1.0, 1.0)})};
  TacticalParams params;

  const PlanStep ps = plan_step(net, plan, params, 0);
  REQUIRE(ps.decisions.size() == 2);
  for (int layer = 0; layer < 2; ++layer) {
    CHECK(ps.decisions[layer].operator_layer == layer);
    for (const auto& [id, move] : ps.decisions[layer].moves) {
      const Agent* a = net.find(id);
      REQUIRE(a != nullptr);
      CHECK(a->layer == layer);
      CHECK(move.norm() <= a->max_step + 1e-12);
    }
  }
  CHECK_NOTHROW(apply_step(net, ps));
}

TEST_CASE("a plan step serves the first response cycle of the iteration") {
  Xoshiro256pp rng(821);
  auto net = testutil::random_network(rng, 5, 1, 2.0, 1.4, 0.5);
  MissionPlan plan;
  plan.stages = {stage_of(0, 10, 0.0, {Vec2::Zero()})};
  TacticalParams params;

  const PlanStep ps = plan_step(net, plan, params, 0);
  const GneResult g = gne_iterate(net, stage_objective(&plan.stages[0], params),
                                  params.epsilon, params.max_rounds,
                                  params.directions);
  REQUIRE(ps.decisions.size() == 1);
  CHECK(same_decision(ps.decisions[0], g.decisions[0]));
  CHECK(ps.gne_rounds == g.rounds);
  CHECK(ps.gne_converged == g.converged);
  CHECK(ps.objective_value ==
        doctest::Approx(g.lambda2_trace.back()).epsilon(1e-12));
}

TEST_CASE("without a waypoint pull the horizon cannot change the path") {
  Xoshiro256pp rng(823);
  auto net = testutil::random_network(rng, 4, 1, 2.0, 1.4, 0.5);
  MissionPlan base;
  base.stages = {stage_of(0, 12, 0.0, {Vec2::Zero()})};
  TacticalParams params;

  MissionPlan shallow = base;
  shallow.horizon = 1;
  MissionPlan deep = base;
  deep.horizon = 4;

  Planner p1(shallow, params);
  Planner p4(deep, params);
  LayeredNetwork s1 = net;
  LayeredNetwork s4 = net;
  const StepEvents quiet;
  for (int step = 0; step < 5; ++step) {
    const PlanStep a = p1.step(s1, step, quiet);
    const PlanStep b = p4.step(s4, step, quiet);
    CHECK(same_decisions(a.decisions, b.decisions));
    s1 = apply_step(std::move(s1), a);
    s4 = apply_step(std::move(s4), b);
  }
  for (size_t i = 0; i < s1.agents.size(); ++i)
    CHECK((s1.agents[i].position - s4.agents[i].position).norm() <= 1e-12);
}

TEST_CASE("crossing a stage boundary switches the waypoint pull") {
  auto net = net_of({agent(0, 0, 0.0, 0.0, 0.5), agent(1, 0, 0.6, 0.0, 0.5)},
                    1, 1.0, 0.3);
  MissionPlan plan;
  plan.stages = {stage_of(0, 3, 4.0, {Vec2(-2.0, 0.0)}),
                 stage_of(3, 6, 4.0, {Vec2(3.0, 0.0)})};
  TacticalParams params;

  const PlanStep before = plan_step(net, plan, params, 2);
  const PlanStep after = plan_step(net, plan, params, 3);
  double drift_before = 0.0;
  double drift_after = 0.0;
  for (const auto& [id, move] : before.decisions[0].moves) drift_before += move.x();
  for (const auto& [id, move] : after.decisions[0].moves) drift_after += move.x();
  CHECK(drift_before < 0.0);
  CHECK(drift_after > 0.0);
}

TEST_CASE("replan triggers on any event flag and only then") {
  StepEvents quiet;
  CHECK_FALSE(replan_trigger(quiet));

  StepEvents e1;
  e1.attack_activity = true;
  StepEvents e2;
  e2.attack_window_ended = true;
  StepEvents e3;
  e3.quarantine_or_loss = true;
  StepEvents e4;
  e4.stage_boundary = true;
  CHECK(replan_trigger(e1));
  CHECK(replan_trigger(e2));
  CHECK(replan_trigger(e3));
  CHECK(replan_trigger(e4));
}

TEST_CASE("the planner serves cached projections until an event hits") {
  Xoshiro256pp rng(829);
  auto net = testutil::random_network(rng, 4, 1, 2.0, 1.4, 0.5);
  auto decoy = testutil::random_network(rng, 4, 1, 2.0, 1.4, 0.5);
  MissionPlan plan;
  plan.horizon = 3;
  plan.stages = {stage_of(0, 10, 0.0, {Vec2::Zero()})};
  TacticalParams params;

  const Rollout projected = plan_rollout(net, plan, params, 0);
  REQUIRE(projected.steps.size() == 3);

  Planner planner(plan, params);
  const StepEvents quiet;
  const PlanStep first = planner.step(net, 0, quiet);
  CHECK(same_decisions(first.decisions, projected.steps[0].decisions));

  // A quiet step is served from the cache; the live network is not consulted.
  const PlanStep second = planner.step(decoy, 1, quiet);
  CHECK(same_decisions(second.decisions, projected.steps[1].decisions));

  // An event invalidates the cache and the decoy network takes over.
  StepEvents alarm;
  alarm.attack_activity = true;
  const PlanStep third = planner.step(decoy, 2, alarm);
  const PlanStep fresh = plan_step(decoy, plan, params, 2);
  CHECK(same_decisions(third.decisions, fresh.decisions));
}

TEST_CASE("the planner recomputes when asked for an out-of-sequence step") {
  auto net = testutil::complete4();
  MissionPlan plan;
  plan.horizon = 3;
  plan.stages = {stage_of(0, 10, 0.0, {Vec2::Zero()})};
  TacticalParams params;

  Planner planner(plan, params);
  const StepEvents quiet;
  (void)planner.step(net, 0, quiet);
  const PlanStep jumped = planner.step(net, 7, quiet);
  const PlanStep fresh = plan_step(net, plan, params, 7);
  CHECK(same_decisions(jumped.decisions, fresh.decisions));
}
