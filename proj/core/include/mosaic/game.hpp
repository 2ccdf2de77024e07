#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace mosaic {

struct MixedStrategy {
  std::vector<double> probs;

  void validate() const;  // probs >= 0, sum within 1e-9 of 1
  static MixedStrategy pure(int action, int action_count);
  static MixedStrategy uniform(int action_count);
};

// Two-player zero-sum matrix game: the row player maximizes payoff(r, c),
// the column player minimizes it.
struct MatrixGame {
  Eigen::MatrixXd payoff;

  int rows() const { return static_cast<int>(payoff.rows()); }
  int cols() const { return static_cast<int>(payoff.cols()); }
  void validate() const;
  double expected(const MixedStrategy& row, const MixedStrategy& col) const;
};

enum class GameSide { Row, Col };

// Pure best response against a mixed opponent, ties to the lowest index.
int best_response_pure(const MatrixGame& game, const MixedStrategy& opponent,
                       GameSide side);

struct ZeroSumSolution {
  double value = 0.0;
  MixedStrategy row;
  MixedStrategy col;
  long iterations = 0;
  bool exact = false;   // true when support enumeration produced the answer
  double regret = 0.0;  // max exact regret of the two players at the output
};

// Non-convergence carries the best iterate found and its regret.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& message, ZeroSumSolution best_iterate)
      : std::runtime_error(message), best_(std::move(best_iterate)) {}
  const ZeroSumSolution& best() const { return best_; }

 private:
  ZeroSumSolution best_;
};

// Fictitious play until the empirical profile's regret drops to tol. If the
// iteration budget runs out, games with min(rows, cols) <= 4 fall back to
// exact support enumeration; larger ones raise SolveError.
ZeroSumSolution solve_zero_sum(const MatrixGame& game, double tol = 1e-4,
                               long max_iters = 100000);

// Exact equilibrium by square-support enumeration, valid (and used as the
// in-library fallback) when min(rows, cols) <= 4.
ZeroSumSolution solve_by_support_enumeration(const MatrixGame& game);

// One decision maker picking an index to maximize.
struct SoloGame {
  std::vector<double> payoff;
};

struct GameBlock {
  std::variant<SoloGame, MatrixGame> game;

  int player_count() const;
  int action_count(int local_player) const;
};

// Bilinear cross-block term kappa * x_a' W x_b, credited symmetrically to
// both endpoint players in the composed payoff.
struct CrossCoupling {
  int player_a = 0;  // global player indices
  int player_b = 0;
  Eigen::MatrixXd weights;
  double scale = 1.0;
};

struct ComposedGame {
  int player_count = 0;
  std::vector<GameBlock> blocks;
  double coupling = 0.0;  // kappa of the outermost composition
  std::vector<CrossCoupling> cross_terms;

  static ComposedGame empty();
  static ComposedGame from(MatrixGame game);
  static ComposedGame from(SoloGame game);

  int action_count(int player) const;
  double local_payoff(const std::vector<MixedStrategy>& profile,
                      int player) const;
  double composed_payoff(const std::vector<MixedStrategy>& profile,
                         int player) const;
};

// Concatenates the two games into an (N+M)-player game. Unless one side is
// empty, a bilinear bridge is attached between the last player of a and the
// first player of b; the default all-ones weights couple payoffs without
// moving equilibria, and the explicit-bridge overload installs real coupling
// (bridge indices are local to a and b respectively).
ComposedGame compose(const ComposedGame& a, const ComposedGame& b,
                     double kappa);
ComposedGame compose(const ComposedGame& a, const ComposedGame& b,
                     double kappa, CrossCoupling bridge);

struct GneCertificate {
  bool holds = true;
  double worst_regret = 0.0;
  // Worst player when the check fails: global player index for composed
  // matrix games, operator layer for network games.
  std::optional<int> violator;
};

// Deviation enumeration plus payoff evaluation around one fixed profile.
// Implemented by composed matrix games here and by the network game in
// tactical.hpp, so a single certificate checker serves both.
class GnePlayerModel {
 public:
  virtual ~GnePlayerModel() = default;
  virtual int player_count() const = 0;
  virtual int player_label(int player) const { return player; }
  virtual int deviation_count(int player) const = 0;
  virtual double local_gain(int player, int deviation) const = 0;
  virtual double composed_gain(int player, int deviation) const = 0;
};

// Gestalt equilibrium check: no player may gain more than epsilon in its
// local game nor in the composed game, over its whole deviation set.
GneCertificate check_gne(const GnePlayerModel& model, double epsilon);
GneCertificate check_gne(const std::vector<MixedStrategy>& profile,
                         const ComposedGame& games, double epsilon);

}  // namespace mosaic
