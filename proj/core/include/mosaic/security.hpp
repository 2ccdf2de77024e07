#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "mosaic/game.hpp"
#include "mosaic/network.hpp"
#include "mosaic/spectral.hpp"

namespace mosaic {

// Past this many candidate subsets the jammer search switches from
// exhaustive enumeration to greedy link removal.
inline constexpr int kDefaultEnumerationCap = 5000;

// Fallback detection horizon: a fake agent is flagged once it has been
// present this many steps even if it moves plausibly.
inline constexpr int kDefaultDetectionDelay = 6;

enum class AttackKind { Jam, Spoof, NodeLoss };

const char* to_string(AttackKind kind);

struct SpoofSpec {
  Vec2 entry_position = Vec2::Zero();
  int layer = 0;
  Vec2 velocity = Vec2::Zero();  // reported motion per step after entry
};

struct AttackEvent {
  AttackKind kind = AttackKind::Jam;
  int start_step = 0;
  int duration = 1;
  int budget = 1;                  // jam: links removed per step
  std::optional<SpoofSpec> spoof;  // spoof only
  int target = -1;                 // node_loss: quarantined agent id

  int end_step() const { return start_step + duration; }
  void validate() const;
};

struct JamPlan {
  std::vector<LinkId> links;  // ascending; lexicographically smallest minimizer
  double lambda2_after = 0.0;
  bool exact = true;  // exhaustive enumeration vs greedy removal
};

// Minimizes lambda2 over removals of at most `budget` present links.
// Exhaustive when the subset count fits the cap, otherwise greedy removal of
// the single most damaging link, budget times.
JamPlan worst_case_jam(const LayeredNetwork& net, int budget,
                       NetView view = NetView::True,
                       double cross_coupling = 1.0,
                       int enumeration_cap = kDefaultEnumerationCap);

struct ThreatAssessment {
  double nominal_lambda2 = 0.0;
  double robust_lambda2 = 0.0;  // <= nominal
  std::vector<LinkId> critical_links;
  bool exact = true;
};

ThreatAssessment robust_connectivity(const LayeredNetwork& net, int budget,
                                     NetView view = NetView::True,
                                     double cross_coupling = 1.0,
                                     int enumeration_cap = kDefaultEnumerationCap);

// Defender moves vs jammer removal subsets; payoff is lambda2 after the move
// and then the removal. Columns cover every subset of at most `budget` links
// over the union of post-move graphs; when that explodes past the cap only
// the most damaging subsets are kept and the game is flagged approximate.
struct JamMatrixGame {
  MatrixGame game;
  std::vector<std::vector<LinkId>> columns;
  bool approximate = false;
};

JamMatrixGame jam_as_matrix_game(const LayeredNetwork& net,
                                 const std::vector<OperatorDecision>& defender_moves,
                                 int budget,
                                 int enumeration_cap = kDefaultEnumerationCap);

// Adds a fake agent with the given id. The spoofed agent shows up in
// neighbor discovery and perceived connectivity but never in the true view.
// Its claimed max_step (used by the displacement detector) mimics the
// largest max_step on its entry layer. Errors on id collisions.
LayeredNetwork inject_spoof(const LayeredNetwork& net, const AttackEvent& event,
                            int agent_id);

// Reported positions of the agents an operator can see, one snapshot per
// step, ascending step order.
struct PerceivedSnapshot {
  int step = 0;
  std::vector<std::pair<int, Vec2>> positions;  // ascending agent id
};

// Flags agents whose consecutive reported displacement exceeds their claimed
// max_step, plus (fallback) any spoofed agent already present for
// detection_delay steps. Returns ascending agent ids.
std::vector<int> detect_spoof(const std::deque<PerceivedSnapshot>& history,
                              const LayeredNetwork& net,
                              int detection_delay = kDefaultDetectionDelay);

// Marks the agents quarantined: all their link weights drop to zero and they
// leave both the true and the perceived view.
LayeredNetwork quarantine(const LayeredNetwork& net,
                          const std::vector<int>& agent_ids);

}  // namespace mosaic
