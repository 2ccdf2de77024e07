#include "mosaic/sim.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "mosaic/log.hpp"
#include "mosaic/spectral.hpp"
#include "mosaic/tactical.hpp"

namespace mosaic {
namespace {

MissionPlan effective_plan(const ScenarioConfig& cfg, int layer_count) {
  if (cfg.mission) return *cfg.mission;
  // No mission: one neutral stage spanning the whole run, so the operators
  // simply keep maximizing connectivity.
  MissionStage stage;
  stage.waypoints.assign(layer_count, Vec2::Zero());
  stage.beta = 0.0;
  stage.lambda_floor = 0.0;
  stage.start_step = 0;
  stage.end_step = cfg.total_steps;
  MissionPlan plan;
  plan.horizon = 1;
  plan.stages.push_back(std::move(stage));
  return plan;
}

TacticalParams tactical_params(const ScenarioConfig& cfg) {
  TacticalParams params;
  params.epsilon = cfg.epsilon;
  params.max_rounds = cfg.max_rounds;
  params.directions = cfg.candidate_directions;
  params.view = NetView::Perceived;  // equals the true view until a spoof lands
  params.robust_k = cfg.mode == TacticalMode::Robust ? cfg.jam_defense_budget : 0;
  params.cross_coupling = cfg.coupling;
  params.enumeration_cap = cfg.enumeration_cap;
  return params;
}

}  // namespace

SimTrace run(const ScenarioConfig& cfg) {
  cfg.validate();
  LayeredNetwork net = build_network(cfg);

  MissionPlan plan = effective_plan(cfg, net.layer_count);
  plan.validate(net.layer_count);

  TacticalParams params = tactical_params(cfg);
  Planner planner(plan, params);

  // Spoof agents get ids above the initial roster, in schedule order.
  int next_id = 0;
  for (const Agent& a : net.agents) next_id = std::max(next_id, a.id + 1);
  std::vector<size_t> spoof_events;
  for (size_t e = 0; e < cfg.attacks.size(); ++e)
    if (cfg.attacks[e].kind == AttackKind::Spoof) spoof_events.push_back(e);
  std::stable_sort(spoof_events.begin(), spoof_events.end(),
                   [&](size_t a, size_t b) {
                     return cfg.attacks[a].start_step < cfg.attacks[b].start_step;
                   });
  std::map<size_t, int> spoof_id;         // attack index -> agent id
  std::map<int, Vec2> planned_position;   // agent id -> entry position
  for (size_t e : spoof_events) {
    spoof_id[e] = next_id;
    planned_position[next_id] = cfg.attacks[e].spoof->entry_position;
    ++next_id;
  }

  SimTrace trace;
  trace.name = cfg.name;
  for (const Agent& a : net.agents) trace.roster.push_back(a.id);
  for (const auto& [e, id] : spoof_id) trace.roster.push_back(id);
  std::sort(trace.roster.begin(), trace.roster.end());
  for (const AttackEvent& ev : cfg.attacks)
    trace.attacks.push_back({ev.kind, ev.start_step, ev.end_step()});

  std::deque<PerceivedSnapshot> history;
  const size_t history_cap = static_cast<size_t>(cfg.detection_delay) + 2;

  for (int s = 0; s < cfg.total_steps; ++s) {
    net.step_index = s;
    StepEvents events;

    // Attack-schedule transitions.
    for (size_t e = 0; e < cfg.attacks.size(); ++e) {
      const AttackEvent& ev = cfg.attacks[e];
      const bool active = ev.start_step <= s && s < ev.end_step();
      switch (ev.kind) {
        case AttackKind::Jam:
          // Jamming removes links only inside the connectivity records; it
          // never moves an agent, so a cached plan stays valid mid-window.
          if (s == ev.start_step) events.attack_activity = true;
          if (s == ev.end_step()) events.attack_window_ended = true;
          break;
        case AttackKind::Spoof: {
          const int id = spoof_id.at(e);
          if (s == ev.start_step) {
            net = inject_spoof(net, ev, id);
            events.attack_activity = true;
          } else if (active) {
            Agent* fake = net.find(id);
            if (fake != nullptr && fake->status == AgentStatus::Spoofed) {
              fake->position += ev.spoof->velocity;
              // The perceived graph shifted under the cached projection.
              events.attack_activity = true;
            }
          }
          if (s == ev.end_step()) {
            Agent* fake = net.find(id);
            if (fake != nullptr && fake->status == AgentStatus::Spoofed) {
              net = quarantine(net, {id});
              events.quarantine_or_loss = true;
              log_line(LogLevel::Info,
                       "spoof " + std::to_string(id) + " expired into quarantine");
            }
            events.attack_window_ended = true;
          }
          break;
        }
        case AttackKind::NodeLoss:
          if (s == ev.start_step) {
            net = quarantine(net, {ev.target});
            events.attack_activity = true;
            events.quarantine_or_loss = true;
          }
          if (s == ev.end_step()) {
            net.find(ev.target)->status = AgentStatus::Active;
            events.attack_window_ended = true;
            events.quarantine_or_loss = true;
          }
          break;
      }
    }

    // Perception snapshot, then spoof detection and quarantine.
    PerceivedSnapshot snap;
    snap.step = s;
    for (int id : view_participants(net, NetView::Perceived))
      snap.positions.emplace_back(id, net.find(id)->position);
    history.push_back(std::move(snap));
    while (history.size() > history_cap) history.pop_front();
    if (cfg.detection) {
      std::vector<int> fresh;
      for (int id : detect_spoof(history, net, cfg.detection_delay)) {
        const Agent* a = net.find(id);
        if (a != nullptr && a->status != AgentStatus::Quarantined)
          fresh.push_back(id);
      }
      if (!fresh.empty()) {
        net = quarantine(net, fresh);
        events.attack_activity = true;
        events.quarantine_or_loss = true;
        for (int id : fresh)
          log_line(LogLevel::Info,
                   "detector quarantined agent " + std::to_string(id) +
                       " at step " + std::to_string(s));
      }
    }

    for (const MissionStage& stage : plan.stages)
      if (stage.start_step == s || stage.end_step == s) events.stage_boundary = true;

    // Plan and move.
    const PlanStep ps = planner.step(net, s, events);
    for (const OperatorDecision& d : ps.decisions) net = apply_decision(net, d);

    // Active jammers hit the moved network; both records see the same cuts.
    int jam_budget = 0;
    for (const AttackEvent& ev : cfg.attacks)
      if (ev.kind == AttackKind::Jam && ev.start_step <= s && s < ev.end_step())
        jam_budget += ev.budget;
    std::vector<LinkId> jammed;
    double lambda2_true, lambda2_perceived;
    if (jam_budget > 0) {
      JamPlan jp = worst_case_jam(net, jam_budget, NetView::True, cfg.coupling,
                                  cfg.enumeration_cap);
      jammed = std::move(jp.links);
      lambda2_true = jp.lambda2_after;
      lambda2_perceived =
          connectivity_without_links(net, jammed, NetView::Perceived, cfg.coupling)
              .lambda2();
    } else {
      lambda2_true = connectivity(net, NetView::True, cfg.coupling).lambda2();
      lambda2_perceived =
          connectivity(net, NetView::Perceived, cfg.coupling).lambda2();
    }

    StepRecord rec;
    rec.step = s;
    rec.lambda2_true = lambda2_true;
    rec.lambda2_perceived = lambda2_perceived;
    rec.jam_links_removed = static_cast<int>(jammed.size());
    rec.spoof_active = net.count(AgentStatus::Spoofed);
    rec.quarantined_count = net.count(AgentStatus::Quarantined);
    rec.gne_rounds = ps.gne_rounds;
    rec.gne_converged = ps.gne_converged;
    const MissionStage* stage = plan.stage_at(s);
    rec.lambda_floor_violation =
        stage != nullptr && lambda2_true < stage->lambda_floor;
    for (int id : trace.roster) {
      AgentRecord ar;
      ar.id = id;
      if (const Agent* a = net.find(id)) {
        ar.position = a->position;
        ar.status = a->status;
        ar.present = true;
      } else {
        ar.position = planned_position.at(id);
        ar.status = AgentStatus::Spoofed;
        ar.present = false;
      }
      rec.agents.push_back(ar);
    }
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

GneResult solve_equilibrium(const ScenarioConfig& cfg) {
  cfg.validate();
  LayeredNetwork net = build_network(cfg);
  MissionPlan plan = effective_plan(cfg, net.layer_count);
  plan.validate(net.layer_count);
  TacticalParams params = tactical_params(cfg);
  Objective obj = stage_objective(plan.stage_at(0), params);
  return gne_iterate(net, obj, params.epsilon, params.max_rounds,
                     params.directions);
}

RunSummary summarize(const SimTrace& trace) {
  if (trace.steps.empty()) throw std::invalid_argument("empty trace");

  RunSummary out;
  out.name = trace.name;
  out.total_steps = static_cast<int>(trace.steps.size());
  out.min_lambda2_true = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const StepRecord& rec : trace.steps) {
    total += rec.lambda2_true;
    out.min_lambda2_true = std::min(out.min_lambda2_true, rec.lambda2_true);
    if (rec.lambda2_true <= 0.0) ++out.steps_disconnected;
    if (rec.lambda_floor_violation) ++out.floor_violations;
  }
  out.final_lambda2_true = trace.steps.back().lambda2_true;
  out.mean_lambda2_true = total / static_cast<double>(trace.steps.size());

  for (const AttackWindow& window : trace.attacks) {
    AttackOutcome o;
    o.kind = window.kind;
    o.start_step = window.start_step;
    o.end_step = window.end_step;
    const int pre_end =
        std::min<int>(window.start_step, static_cast<int>(trace.steps.size()));
    for (int s = 0; s < pre_end; ++s)
      if (trace.steps[s].gne_converged) o.pre_lambda2 = trace.steps[s].lambda2_true;
    if (o.pre_lambda2) {
      for (int s = window.end_step; s < static_cast<int>(trace.steps.size()); ++s) {
        if (trace.steps[s].lambda2_true >= 0.95 * *o.pre_lambda2) {
          o.recovery_steps = s - window.end_step;
          o.recovered = true;
          break;
        }
      }
    }
    out.attacks.push_back(o);
  }
  return out;
}

std::vector<BatchResult> run_batch(const std::vector<ScenarioConfig>& configs,
                                   int jobs) {
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  std::vector<BatchResult> results(configs.size());
  std::atomic<size_t> cursor{0};

  auto worker = [&]() {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= configs.size()) return;
      BatchResult& r = results[i];
      r.name = configs[i].name;
      try {
        r.trace = run(configs[i]);
        r.summary = summarize(r.trace);
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };

  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return results;
}

}  // namespace mosaic
