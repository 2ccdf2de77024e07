#include "mosaic/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mosaic {
namespace {

constexpr double kTieTol = 1e-12;

// Number of subsets of size 0..k from n items, saturating at cap + 1.
long long count_subsets_up_to(int n, int k, long long cap) {
  long long total = 0;
  double binom = 1.0;  // C(n, 0)
  for (int s = 0; s <= k; ++s) {
    if (binom > static_cast<double>(cap) + 1.0) return cap + 1;
    total += static_cast<long long>(binom);
    if (total > cap) return cap + 1;
    binom = binom * (n - s) / (s + 1);
  }
  return total;
}

bool next_combination_indices(std::vector<int>& idx, int n) {
  const int s = static_cast<int>(idx.size());
  for (int i = s - 1; i >= 0; --i) {
    if (idx[i] < n - s + i) {
      ++idx[i];
      for (int j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<LinkId> pick_links(const std::vector<LinkId>& links,
                               const std::vector<int>& idx) {
  std::vector<LinkId> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(links[i]);
  return out;
}

bool lex_less(const std::vector<LinkId>& a, const std::vector<LinkId>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::Jam:
      return "jam";
    case AttackKind::Spoof:
      return "spoof";
    case AttackKind::NodeLoss:
      return "node_loss";
  }
  return "unknown";
}

void AttackEvent::validate() const {
  if (start_step < 0) throw std::invalid_argument("attack start_step must be >= 0");
  if (duration < 1) throw std::invalid_argument("attack duration must be >= 1");
  switch (kind) {
    case AttackKind::Jam:
      if (budget < 1) throw std::invalid_argument("jam budget must be >= 1");
      break;
    case AttackKind::Spoof:
      if (!spoof) throw std::invalid_argument("spoof attack needs a spoof spec");
      if (!spoof->entry_position.allFinite() || !spoof->velocity.allFinite())
        throw std::invalid_argument("spoof positions must be finite");
      if (spoof->layer < 0) throw std::invalid_argument("spoof layer must be >= 0");
      break;
    case AttackKind::NodeLoss:
      if (target < 0) throw std::invalid_argument("node_loss target must be a valid agent id");
      break;
  }
}

JamPlan worst_case_jam(const LayeredNetwork& net, int budget, NetView view,
                       double cross_coupling, int enumeration_cap) {
  if (budget < 1) throw std::invalid_argument("jam budget must be >= 1");
  if (enumeration_cap < 1) throw std::invalid_argument("enumeration_cap must be >= 1");

  const std::vector<LinkId> links = present_links(net, view, cross_coupling);
  JamPlan plan;
  if (links.empty()) {
    plan.lambda2_after = connectivity(net, view, cross_coupling).lambda2();
    plan.exact = true;
    return plan;
  }

  const int link_count = static_cast<int>(links.size());
  const int k = std::min(budget, link_count);
  const long long combos = count_subsets_up_to(link_count, k, enumeration_cap);

  if (combos <= enumeration_cap) {
    // Exhaustive: every subset of size 0..k. The empty set keeps lambda2 at
    // its nominal value, so a removal only wins by strictly lowering it.
    std::vector<LinkId> best_set;
    double best_value = connectivity(net, view, cross_coupling).lambda2();
    for (int s = 1; s <= k; ++s) {
      std::vector<int> idx(s);
      for (int i = 0; i < s; ++i) idx[i] = i;
      do {
        std::vector<LinkId> removed = pick_links(links, idx);
        const double value =
            connectivity_without_links(net, removed, view, cross_coupling).lambda2();
        if (value < best_value - kTieTol ||
            (std::abs(value - best_value) <= kTieTol && lex_less(removed, best_set))) {
          best_value = value;
          best_set = std::move(removed);
        }
      } while (next_combination_indices(idx, link_count));
    }
    plan.links = std::move(best_set);
    plan.lambda2_after = best_value;
    plan.exact = true;
    return plan;
  }

  // Greedy: repeatedly remove the single link that hurts lambda2 the most.
  std::vector<LinkId> removed;
  std::vector<LinkId> remaining = links;
  for (int round = 0; round < k && !remaining.empty(); ++round) {
    double best_value = std::numeric_limits<double>::infinity();
    int best_index = -1;
    std::vector<LinkId> trial = removed;
    trial.push_back(LinkId{});
    for (int i = 0; i < static_cast<int>(remaining.size()); ++i) {
      trial.back() = remaining[i];
      const double value =
          connectivity_without_links(net, trial, view, cross_coupling).lambda2();
      if (value < best_value - kTieTol) {
        best_value = value;
        best_index = i;
      }
    }
    removed.push_back(remaining[best_index]);
    remaining.erase(remaining.begin() + best_index);
  }
  std::sort(removed.begin(), removed.end());
  plan.links = std::move(removed);
  plan.lambda2_after =
      connectivity_without_links(net, plan.links, view, cross_coupling).lambda2();
  plan.exact = false;
  return plan;
}

ThreatAssessment robust_connectivity(const LayeredNetwork& net, int budget,
                                     NetView view, double cross_coupling,
                                     int enumeration_cap) {
  ThreatAssessment out;
  out.nominal_lambda2 = connectivity(net, view, cross_coupling).lambda2();
  JamPlan plan = worst_case_jam(net, budget, view, cross_coupling, enumeration_cap);
  // Removing links cannot raise lambda2; clamp eigensolver jitter.
  out.robust_lambda2 = std::min(plan.lambda2_after, out.nominal_lambda2);
  out.critical_links = std::move(plan.links);
  out.exact = plan.exact;
  return out;
}

JamMatrixGame jam_as_matrix_game(const LayeredNetwork& net,
                                 const std::vector<OperatorDecision>& defender_moves,
                                 int budget, int enumeration_cap) {
  if (defender_moves.empty())
    throw std::invalid_argument("jam game needs at least one defender move");
  if (budget < 1) throw std::invalid_argument("jam budget must be >= 1");
  if (enumeration_cap < 1) throw std::invalid_argument("enumeration_cap must be >= 1");

  std::vector<LayeredNetwork> moved;
  moved.reserve(defender_moves.size());
  for (const OperatorDecision& d : defender_moves) moved.push_back(apply_decision(net, d));

  std::vector<LinkId> universe;
  for (const LayeredNetwork& m : moved) {
    std::vector<LinkId> links = present_links(m, NetView::True, 1.0);
    universe.insert(universe.end(), links.begin(), links.end());
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

  const int link_count = static_cast<int>(universe.size());
  const int k = std::min(budget, link_count);

  JamMatrixGame out;
  const long long combos = count_subsets_up_to(link_count, k, enumeration_cap);
  if (combos <= enumeration_cap) {
    out.columns.emplace_back();  // empty removal
    for (int s = 1; s <= k; ++s) {
      std::vector<int> idx(s);
      for (int i = 0; i < s; ++i) idx[i] = i;
      do {
        out.columns.push_back(pick_links(universe, idx));
      } while (next_combination_indices(idx, link_count));
    }
    out.approximate = false;
  } else {
    // Rank links by single-removal damage on the current network, then keep
    // the subsets built from the most damaging links until the cap fills.
    std::vector<std::pair<double, LinkId>> ranked;
    ranked.reserve(universe.size());
    for (const LinkId& link : universe) {
      const double value =
          connectivity_without_links(net, {link}, NetView::True, 1.0).lambda2();
      ranked.emplace_back(value, link);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
    std::vector<LinkId> ordered;
    ordered.reserve(ranked.size());
    for (const auto& [value, link] : ranked) ordered.push_back(link);

    out.columns.emplace_back();
    for (int s = 1; s <= k && static_cast<int>(out.columns.size()) < enumeration_cap; ++s) {
      std::vector<int> idx(s);
      for (int i = 0; i < s; ++i) idx[i] = i;
      do {
        std::vector<LinkId> subset = pick_links(ordered, idx);
        std::sort(subset.begin(), subset.end());
        out.columns.push_back(std::move(subset));
      } while (static_cast<int>(out.columns.size()) < enumeration_cap &&
               next_combination_indices(idx, link_count));
    }
    out.approximate = true;
  }

  const int rows = static_cast<int>(moved.size());
  const int cols = static_cast<int>(out.columns.size());
  out.game.payoff.resize(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      out.game.payoff(r, c) =
          connectivity_without_links(moved[r], out.columns[c], NetView::True, 1.0)
              .lambda2();
  out.game.validate();
  return out;
}

LayeredNetwork inject_spoof(const LayeredNetwork& net, const AttackEvent& event,
                            int agent_id) {
  if (event.kind != AttackKind::Spoof || !event.spoof)
    throw std::invalid_argument("inject_spoof needs a spoof attack event");
  event.validate();
  const SpoofSpec& spec = *event.spoof;
  if (spec.layer >= net.layer_count)
    throw std::invalid_argument("spoof layer " + std::to_string(spec.layer) +
                                " out of range");
  if (const Agent* existing = net.find(agent_id)) {
    if (existing->status == AgentStatus::Spoofed)
      throw std::runtime_error("duplicate active spoof id " + std::to_string(agent_id));
    throw std::invalid_argument("agent id " + std::to_string(agent_id) +
                                " already in use");
  }

  // Mimic the best mobility on the entry layer so plausible motion stays
  // under the displacement detector's threshold.
  double claimed = 0.0;
  bool layer_has_agents = false;
  for (const Agent& a : net.agents) {
    if (a.layer == spec.layer) {
      claimed = layer_has_agents ? std::max(claimed, a.max_step) : a.max_step;
      layer_has_agents = true;
    }
  }
  if (!layer_has_agents)
    for (const Agent& a : net.agents) claimed = std::max(claimed, a.max_step);

  Agent fake;
  fake.id = agent_id;
  fake.layer = spec.layer;
  fake.position = spec.entry_position;
  fake.max_step = claimed;
  fake.status = AgentStatus::Spoofed;

  LayeredNetwork out = net;
  auto it = std::lower_bound(out.agents.begin(), out.agents.end(), agent_id,
                             [](const Agent& a, int id) { return a.id < id; });
  out.agents.insert(it, fake);
  out.validate();
  return out;
}

std::vector<int> detect_spoof(const std::deque<PerceivedSnapshot>& history,
                              const LayeredNetwork& net, int detection_delay) {
  if (detection_delay < 0)
    throw std::invalid_argument("detection_delay must be >= 0");
  std::vector<int> flagged;

  // Displacement rule: consecutive reported positions further apart than the
  // agent's claimed per-step reach. Honest agents move at most max_step per
  // step, so they never trip this.
  for (size_t t = 1; t < history.size(); ++t) {
    const auto& prev = history[t - 1].positions;
    const auto& cur = history[t].positions;
    size_t i = 0, j = 0;
    while (i < prev.size() && j < cur.size()) {
      if (prev[i].first < cur[j].first) {
        ++i;
      } else if (cur[j].first < prev[i].first) {
        ++j;
      } else {
        const Agent* agent = net.find(prev[i].first);
        if (agent != nullptr) {
          const double moved = (cur[j].second - prev[i].second).norm();
          if (moved > agent->max_step * (1.0 + 1e-6)) flagged.push_back(agent->id);
        }
        ++i;
        ++j;
      }
    }
  }

  // Fallback: a fake agent that moves plausibly still gets flagged once it
  // has lingered past the detection delay.
  for (const Agent& a : net.agents) {
    if (a.status != AgentStatus::Spoofed) continue;
    int seen = 0;
    for (const PerceivedSnapshot& snap : history) {
      const auto it = std::lower_bound(
          snap.positions.begin(), snap.positions.end(), a.id,
          [](const std::pair<int, Vec2>& p, int id) { return p.first < id; });
      if (it != snap.positions.end() && it->first == a.id) ++seen;
    }
    if (seen >= detection_delay + 1) flagged.push_back(a.id);
  }

  std::sort(flagged.begin(), flagged.end());
  flagged.erase(std::unique(flagged.begin(), flagged.end()), flagged.end());
  return flagged;
}

LayeredNetwork quarantine(const LayeredNetwork& net,
                          const std::vector<int>& agent_ids) {
  LayeredNetwork out = net;
  for (int id : agent_ids) {
    const int idx = out.index_of(id);
    if (idx < 0)
      throw std::invalid_argument("cannot quarantine unknown agent " +
                                  std::to_string(id));
    out.agents[idx].status = AgentStatus::Quarantined;
  }
  return out;
}

}  // namespace mosaic
