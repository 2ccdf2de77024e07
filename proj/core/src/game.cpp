#include "mosaic/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mosaic {

void MixedStrategy::validate() const {
  if (probs.empty()) throw std::invalid_argument("empty mixed strategy");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= -1e-12))
      throw std::invalid_argument("mixed strategy probability < 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("mixed strategy must sum to 1");
}

MixedStrategy MixedStrategy::pure(int action, int action_count) {
  if (action < 0 || action >= action_count)
    throw std::invalid_argument("pure action out of range");
  MixedStrategy s;
  s.probs.assign(action_count, 0.0);
  s.probs[action] = 1.0;
  return s;
}

MixedStrategy MixedStrategy::uniform(int action_count) {
  if (action_count <= 0) throw std::invalid_argument("empty strategy space");
  MixedStrategy s;
  s.probs.assign(action_count, 1.0 / action_count);
  return s;
}

void MatrixGame::validate() const {
  if (payoff.rows() < 1 || payoff.cols() < 1)
    throw std::invalid_argument("payoff matrix must be at least 1x1");
  if (!payoff.allFinite())
    throw std::invalid_argument("payoff matrix must be finite");
}

double MatrixGame::expected(const MixedStrategy& row,
                            const MixedStrategy& col) const {
  if (static_cast<int>(row.probs.size()) != rows() ||
      static_cast<int>(col.probs.size()) != cols())
    throw std::invalid_argument("strategy dimensions do not match game");
  double value = 0.0;
  for (int i = 0; i < rows(); ++i) {
    if (row.probs[i] == 0.0) continue;
    double inner = 0.0;
    for (int j = 0; j < cols(); ++j) inner += payoff(i, j) * col.probs[j];
    value += row.probs[i] * inner;
  }
  return value;
}

int best_response_pure(const MatrixGame& game, const MixedStrategy& opponent,
                       GameSide side) {
  game.validate();
  if (side == GameSide::Row) {
    if (static_cast<int>(opponent.probs.size()) != game.cols())
      throw std::invalid_argument("opponent strategy dimension mismatch");
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < game.rows(); ++i) {
      double score = 0.0;
      for (int j = 0; j < game.cols(); ++j)
        score += game.payoff(i, j) * opponent.probs[j];
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }
  if (static_cast<int>(opponent.probs.size()) != game.rows())
    throw std::invalid_argument("opponent strategy dimension mismatch");
  int best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (int j = 0; j < game.cols(); ++j) {
    double score = 0.0;
    for (int i = 0; i < game.rows(); ++i)
      score += game.payoff(i, j) * opponent.probs[i];
    if (score < best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

namespace {

// Exact regrets of a profile; also reports the profile's expected value.
double exact_regret(const MatrixGame& game, const MixedStrategy& x,
                    const MixedStrategy& y, double* value_out) {
  const int rows = game.rows();
  const int cols = game.cols();
  double value = 0.0;
  double best_row = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows; ++i) {
    double payoff_i = 0.0;
    for (int j = 0; j < cols; ++j) payoff_i += game.payoff(i, j) * y.probs[j];
    best_row = std::max(best_row, payoff_i);
    value += x.probs[i] * payoff_i;
  }
  double best_col = std::numeric_limits<double>::infinity();
  for (int j = 0; j < cols; ++j) {
    double cost_j = 0.0;
    for (int i = 0; i < rows; ++i) cost_j += game.payoff(i, j) * x.probs[i];
    best_col = std::min(best_col, cost_j);
  }
  if (value_out != nullptr) *value_out = value;
  return std::max(best_row - value, value - best_col);
}

bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Equalizing strategy over a square support pair, or nothing if the induced
// linear system is singular or infeasible.
std::optional<ZeroSumSolution> try_support(const MatrixGame& game,
                                           const std::vector<int>& support_rows,
                                           const std::vector<int>& support_cols,
                                           double scale) {
  const int s = static_cast<int>(support_rows.size());
  // Unknowns (x_S, v): sum_i x_i A(i, j) = v for j in T, sum_i x_i = 1.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s + 1, s + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  for (int jt = 0; jt < s; ++jt) {
    for (int it = 0; it < s; ++it)
      m(jt, it) = game.payoff(support_rows[it], support_cols[jt]);
    m(jt, s) = -1.0;
  }
  for (int it = 0; it < s; ++it) m(s, it) = 1.0;
  rhs(s) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_x(m);
  if (!lu_x.isInvertible()) return std::nullopt;
  Eigen::VectorXd xv = lu_x.solve(rhs);

  // Unknowns (y_T, u): sum_j A(i, j) y_j = u for i in S, sum_j y_j = 1.
  Eigen::MatrixXd mt = Eigen::MatrixXd::Zero(s + 1, s + 1);
  for (int it = 0; it < s; ++it) {
    for (int jt = 0; jt < s; ++jt)
      mt(it, jt) = game.payoff(support_rows[it], support_cols[jt]);
    mt(it, s) = -1.0;
  }
  for (int jt = 0; jt < s; ++jt) mt(s, jt) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_y(mt);
  if (!lu_y.isInvertible()) return std::nullopt;
  Eigen::VectorXd yu = lu_y.solve(rhs);

  const double v = xv(s);
  const double u = yu(s);
  if (std::abs(v - u) > 1e-7 * scale) return std::nullopt;

  const double feas_tol = 1e-9 * scale;
  for (int it = 0; it < s; ++it)
    if (xv(it) < -feas_tol) return std::nullopt;
  for (int jt = 0; jt < s; ++jt)
    if (yu(jt) < -feas_tol) return std::nullopt;

  MixedStrategy x;
  x.probs.assign(game.rows(), 0.0);
  for (int it = 0; it < s; ++it)
    x.probs[support_rows[it]] = std::max(0.0, xv(it));
  MixedStrategy y;
  y.probs.assign(game.cols(), 0.0);
  for (int jt = 0; jt < s; ++jt)
    y.probs[support_cols[jt]] = std::max(0.0, yu(jt));
  double xs = std::accumulate(x.probs.begin(), x.probs.end(), 0.0);
  double ys = std::accumulate(y.probs.begin(), y.probs.end(), 0.0);
  for (double& p : x.probs) p /= xs;
  for (double& p : y.probs) p /= ys;

  // Off-support actions must not beat the candidate value.
  for (int j = 0; j < game.cols(); ++j) {
    double cost = 0.0;
    for (int i = 0; i < game.rows(); ++i) cost += game.payoff(i, j) * x.probs[i];
    if (cost < v - 1e-8 * scale) return std::nullopt;
  }
  for (int i = 0; i < game.rows(); ++i) {
    double gain = 0.0;
    for (int j = 0; j < game.cols(); ++j) gain += game.payoff(i, j) * y.probs[j];
    if (gain > v + 1e-8 * scale) return std::nullopt;
  }

  ZeroSumSolution out;
  out.row = std::move(x);
  out.col = std::move(y);
  out.exact = true;
  out.regret = exact_regret(game, out.row, out.col, &out.value);
  return out;
}

}  // namespace

ZeroSumSolution solve_by_support_enumeration(const MatrixGame& game) {
  game.validate();
  const double scale = std::max(1.0, game.payoff.cwiseAbs().maxCoeff());
  const int smax = std::min(game.rows(), game.cols());
  for (int s = 1; s <= smax; ++s) {
    std::vector<int> rows_idx(s);
    std::iota(rows_idx.begin(), rows_idx.end(), 0);
    do {
      std::vector<int> cols_idx(s);
      std::iota(cols_idx.begin(), cols_idx.end(), 0);
      do {
        auto sol = try_support(game, rows_idx, cols_idx, scale);
        if (sol.has_value()) return std::move(*sol);
      } while (next_combination(cols_idx, game.cols()));
    } while (next_combination(rows_idx, game.rows()));
  }
  throw std::runtime_error("support enumeration found no equilibrium");
}

ZeroSumSolution solve_zero_sum(const MatrixGame& game, double tol,
                               long max_iters) {
  game.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  const int rows = game.rows();
  const int cols = game.cols();

  std::vector<long> row_counts(rows, 0);
  std::vector<long> col_counts(cols, 0);
  ZeroSumSolution best;
  best.regret = std::numeric_limits<double>::infinity();

  const long check_stride = 64;
  for (long t = 1; t <= max_iters; ++t) {
    // Simultaneous fictitious play against the opponents' empirical counts.
    int row_br = 0;
    double row_best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      double score = 0.0;
      for (int j = 0; j < cols; ++j)
        score += game.payoff(i, j) * static_cast<double>(col_counts[j]);
      if (score > row_best) {
        row_best = score;
        row_br = i;
      }
    }
    int col_br = 0;
    double col_best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < cols; ++j) {
      double score = 0.0;
      for (int i = 0; i < rows; ++i)
        score += game.payoff(i, j) * static_cast<double>(row_counts[i]);
      if (score < col_best) {
        col_best = score;
        col_br = j;
      }
    }
    ++row_counts[row_br];
    ++col_counts[col_br];

    if (t % check_stride == 0 || t == max_iters) {
      MixedStrategy x, y;
      x.probs.resize(rows);
      y.probs.resize(cols);
      for (int i = 0; i < rows; ++i)
        x.probs[i] = static_cast<double>(row_counts[i]) / static_cast<double>(t);
      for (int j = 0; j < cols; ++j)
        y.probs[j] = static_cast<double>(col_counts[j]) / static_cast<double>(t);
      double value = 0.0;
      const double regret = exact_regret(game, x, y, &value);
      if (regret < best.regret) {
        best.value = value;
        best.row = x;
        best.col = y;
        best.iterations = t;
        best.regret = regret;
      }
      if (regret <= tol) {
        best.exact = false;
        return best;
      }
    }
  }

  if (std::min(rows, cols) <= 4) {
    ZeroSumSolution exact = solve_by_support_enumeration(game);
    exact.iterations = max_iters;
    return exact;
  }
  throw SolveError("fictitious play did not reach tol within max_iters", best);
}

int GameBlock::player_count() const {
  return std::holds_alternative<SoloGame>(game) ? 1 : 2;
}

int GameBlock::action_count(int local_player) const {
  if (const auto* solo = std::get_if<SoloGame>(&game)) {
    if (local_player != 0) throw std::invalid_argument("solo game has 1 player");
    return static_cast<int>(solo->payoff.size());
  }
  const auto& matrix = std::get<MatrixGame>(game);
  if (local_player == 0) return matrix.rows();
  if (local_player == 1) return matrix.cols();
  throw std::invalid_argument("matrix game has 2 players");
}

ComposedGame ComposedGame::empty() { return ComposedGame{}; }

ComposedGame ComposedGame::from(MatrixGame game) {
  game.validate();
  ComposedGame g;
  g.player_count = 2;
  g.blocks.push_back(GameBlock{std::move(game)});
  return g;
}

ComposedGame ComposedGame::from(SoloGame game) {
  if (game.payoff.empty())
    throw std::invalid_argument("solo game needs at least one action");
  ComposedGame g;
  g.player_count = 1;
  g.blocks.push_back(GameBlock{std::move(game)});
  return g;
}

namespace {

// Block index and player index within the block, for a global player index.
std::pair<int, int> locate_player(const ComposedGame& g, int player) {
  int offset = 0;
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const int count = g.blocks[b].player_count();
    if (player < offset + count) return {static_cast<int>(b), player - offset};
    offset += count;
  }
  throw std::invalid_argument("player index out of range");
}

}  // namespace

int ComposedGame::action_count(int player) const {
  auto [block, local] = locate_player(*this, player);
  return blocks[block].action_count(local);
}

double ComposedGame::local_payoff(const std::vector<MixedStrategy>& profile,
                                  int player) const {
  auto [block, local] = locate_player(*this, player);
  int first = player - local;  // global index of the block's first player
  const GameBlock& gb = blocks[block];
  if (const auto* solo = std::get_if<SoloGame>(&gb.game)) {
    double u = 0.0;
    for (std::size_t a = 0; a < solo->payoff.size(); ++a)
      u += profile[player].probs[a] * solo->payoff[a];
    return u;
  }
  const auto& matrix = std::get<MatrixGame>(gb.game);
  const double e = matrix.expected(profile[first], profile[first + 1]);
  return local == 0 ? e : -e;
}

double ComposedGame::composed_payoff(const std::vector<MixedStrategy>& profile,
                                     int player) const {
  double u = local_payoff(profile, player);
  for (const CrossCoupling& ct : cross_terms) {
    if (ct.player_a != player && ct.player_b != player) continue;
    const auto& xa = profile[ct.player_a].probs;
    const auto& xb = profile[ct.player_b].probs;
    double term = 0.0;
    for (int i = 0; i < ct.weights.rows(); ++i) {
      if (xa[i] == 0.0) continue;
      for (int j = 0; j < ct.weights.cols(); ++j)
        term += xa[i] * ct.weights(i, j) * xb[j];
    }
    u += ct.scale * term;
  }
  return u;
}

ComposedGame compose(const ComposedGame& a, const ComposedGame& b,
                     double kappa) {
  if (a.player_count == 0 || b.player_count == 0) {
    ComposedGame out = a.player_count == 0 ? b : a;
    out.coupling = kappa;
    return out;
  }
  CrossCoupling bridge;
  bridge.player_a = a.player_count - 1;
  bridge.player_b = 0;
  bridge.weights = Eigen::MatrixXd::Ones(a.action_count(a.player_count - 1),
                                         b.action_count(0));
  return compose(a, b, kappa, std::move(bridge));
}

ComposedGame compose(const ComposedGame& a, const ComposedGame& b,
                     double kappa, CrossCoupling bridge) {
  if (a.player_count == 0 || b.player_count == 0)
    throw std::invalid_argument("explicit bridge requires non-empty games");
  if (bridge.player_a < 0 || bridge.player_a >= a.player_count ||
      bridge.player_b < 0 || bridge.player_b >= b.player_count)
    throw std::invalid_argument("bridge player out of range");
  if (bridge.weights.rows() != a.action_count(bridge.player_a) ||
      bridge.weights.cols() != b.action_count(bridge.player_b))
    throw std::invalid_argument("bridge weight dimensions mismatch");

  ComposedGame out;
  out.player_count = a.player_count + b.player_count;
  out.blocks = a.blocks;
  out.blocks.insert(out.blocks.end(), b.blocks.begin(), b.blocks.end());
  out.coupling = kappa;
  out.cross_terms = a.cross_terms;
  for (CrossCoupling ct : b.cross_terms) {
    ct.player_a += a.player_count;
    ct.player_b += a.player_count;
    out.cross_terms.push_back(std::move(ct));
  }
  bridge.player_b += a.player_count;
  bridge.scale = kappa;
  out.cross_terms.push_back(std::move(bridge));
  return out;
}

GneCertificate check_gne(const GnePlayerModel& model, double epsilon) {
  GneCertificate cert;
  cert.worst_regret = 0.0;
  int worst_player = -1;
  for (int p = 0; p < model.player_count(); ++p) {
    for (int d = 0; d < model.deviation_count(p); ++d) {
      const double gain =
          std::max(model.local_gain(p, d), model.composed_gain(p, d));
      if (gain > cert.worst_regret) {
        cert.worst_regret = gain;
        worst_player = p;
      }
    }
  }
  cert.holds = cert.worst_regret <= epsilon;
  if (!cert.holds && worst_player >= 0)
    cert.violator = model.player_label(worst_player);
  return cert;
}

namespace {

class ComposedModel final : public GnePlayerModel {
 public:
  ComposedModel(const std::vector<MixedStrategy>& profile,
                const ComposedGame& game)
      : profile_(profile), game_(game) {}

  int player_count() const override { return game_.player_count; }
  int deviation_count(int player) const override {
    return game_.action_count(player);
  }
  double local_gain(int player, int deviation) const override {
    std::vector<MixedStrategy> dev = profile_;
    dev[player] = MixedStrategy::pure(deviation, game_.action_count(player));
    return game_.local_payoff(dev, player) - game_.local_payoff(profile_, player);
  }
  double composed_gain(int player, int deviation) const override {
    std::vector<MixedStrategy> dev = profile_;
    dev[player] = MixedStrategy::pure(deviation, game_.action_count(player));
    return game_.composed_payoff(dev, player) -
           game_.composed_payoff(profile_, player);
  }

 private:
  const std::vector<MixedStrategy>& profile_;
  const ComposedGame& game_;
};

}  // namespace

GneCertificate check_gne(const std::vector<MixedStrategy>& profile,
                         const ComposedGame& games, double epsilon) {
  if (static_cast<int>(profile.size()) != games.player_count)
    throw std::invalid_argument("profile size does not match player count");
  for (int p = 0; p < games.player_count; ++p) {
    profile[p].validate();
    if (static_cast<int>(profile[p].probs.size()) != games.action_count(p))
      throw std::invalid_argument("profile strategy dimension mismatch");
  }
  return check_gne(ComposedModel(profile, games), epsilon);
}

}  // namespace mosaic
