#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mosaic/mission.hpp"
#include "mosaic/network.hpp"
#include "mosaic/scenario.hpp"
#include "mosaic/security.hpp"

namespace mosaic {

struct AgentRecord {
  int id = 0;
  Vec2 position = Vec2::Zero();
  AgentStatus status = AgentStatus::Active;
  bool present = true;  // false before a scheduled spoof enters the network
};

struct StepRecord {
  int step = 0;
  double lambda2_true = 0.0;
  double lambda2_perceived = 0.0;
  int jam_links_removed = 0;
  int spoof_active = 0;
  int quarantined_count = 0;
  int gne_rounds = 0;
  bool gne_converged = false;
  bool lambda_floor_violation = false;
  std::vector<AgentRecord> agents;  // full roster, ascending id
};

struct AttackWindow {
  AttackKind kind = AttackKind::Jam;
  int start_step = 0;
  int end_step = 0;  // exclusive
};

struct SimTrace {
  std::string name;
  std::vector<int> roster;  // ascending ids, scheduled spoofs included
  std::vector<AttackWindow> attacks;
  std::vector<StepRecord> steps;  // one per step, 0 .. total_steps-1
};

struct AttackOutcome {
  AttackKind kind = AttackKind::Jam;
  int start_step = 0;
  int end_step = 0;
  // lambda2 at the last converged step before the attack started.
  std::optional<double> pre_lambda2;
  // Steps past end_step until lambda2 first reached 95% of pre_lambda2.
  std::optional<int> recovery_steps;
  bool recovered = false;
};

struct RunSummary {
  std::string name;
  int total_steps = 0;
  double final_lambda2_true = 0.0;
  double min_lambda2_true = 0.0;
  double mean_lambda2_true = 0.0;
  int steps_disconnected = 0;  // lambda2_true at zero
  int floor_violations = 0;
  std::vector<AttackOutcome> attacks;
};

// Deterministic simulation loop. Step order: attack-schedule transitions,
// spoof detection and quarantine, planning, movement, jamming applied to the
// step's connectivity records, record append.
SimTrace run(const ScenarioConfig& config);

// Equilibrium-only entry: builds the scenario network and runs gne_iterate
// under the step-0 stage objective (a neutral whole-run stage when the
// scenario has no mission).
GneResult solve_equilibrium(const ScenarioConfig& config);

// Throws std::invalid_argument on an empty trace.
RunSummary summarize(const SimTrace& trace);

struct BatchResult {
  std::string name;
  bool ok = false;
  std::string error;  // set when !ok
  SimTrace trace;
  RunSummary summary;
};

// Runs scenarios on up to `jobs` worker threads. Results keep input order
// and one scenario's failure never takes down the rest.
std::vector<BatchResult> run_batch(const std::vector<ScenarioConfig>& configs,
                                   int jobs = 1);

}  // namespace mosaic
