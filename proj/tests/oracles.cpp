#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace oracle {

std::vector<double> jacobi_eigenvalues(Matrix a) {
  const int n = static_cast<int>(a.size());
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("jacobi: square matrix required");

  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-26) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> evals(n);
  for (int i = 0; i < n; ++i) evals[i] = a[i][i];
  std::sort(evals.begin(), evals.end());
  return evals;
}

std::vector<double> laplacian_spectrum(const Matrix& weights) {
  const int n = static_cast<int>(weights.size());
  Matrix lap(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double degree = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      lap[i][j] = -weights[i][j];
      degree += weights[i][j];
    }
    lap[i][i] = degree;
  }
  return jacobi_eigenvalues(std::move(lap));
}

double lambda2(const Matrix& weights) {
  const auto evals = laplacian_spectrum(weights);
  if (evals.size() < 2)
    throw std::invalid_argument("lambda2: need at least 2 nodes");
  return evals[1];
}

std::optional<std::vector<double>> solve_linear(Matrix a,
                                                std::vector<double> rhs) {
  const int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return std::nullopt;
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = rhs[i] / a[i][i];
  return x;
}

namespace {

// Equalizing mix for the support pair: unknowns are the k support weights
// plus the value. Row mix makes every support column pay v; column mix makes
// every support row pay v.
struct SupportSolve {
  std::vector<double> row;
  std::vector<double> col;
  double value = 0.0;
};

std::optional<SupportSolve> solve_support_pair(const Matrix& payoff,
                                               const std::vector<int>& rows,
                                               const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());

  // Row-player system: sum_r p_r * a[r][c] - v = 0 for c in cols; sum p = 1.
  Matrix sys(k + 1, std::vector<double>(k + 1, 0.0));
  std::vector<double> rhs(k + 1, 0.0);
  for (int ci = 0; ci < k; ++ci) {
    for (int ri = 0; ri < k; ++ri) sys[ci][ri] = payoff[rows[ri]][cols[ci]];
    sys[ci][k] = -1.0;
  }
  for (int ri = 0; ri < k; ++ri) sys[k][ri] = 1.0;
  rhs[k] = 1.0;
  const auto p = solve_linear(sys, rhs);
  if (!p) return std::nullopt;

  // Column-player system: sum_c q_c * a[r][c] - v = 0 for r in rows.
  Matrix sys2(k + 1, std::vector<double>(k + 1, 0.0));
  std::vector<double> rhs2(k + 1, 0.0);
  for (int ri = 0; ri < k; ++ri) {
    for (int ci = 0; ci < k; ++ci) sys2[ri][ci] = payoff[rows[ri]][cols[ci]];
    sys2[ri][k] = -1.0;
  }
  for (int ci = 0; ci < k; ++ci) sys2[k][ci] = 1.0;
  rhs2[k] = 1.0;
  const auto q = solve_linear(sys2, rhs2);
  if (!q) return std::nullopt;

  constexpr double kFeasTol = 1e-9;
  for (int i = 0; i < k; ++i)
    if ((*p)[i] < -kFeasTol || (*q)[i] < -kFeasTol) return std::nullopt;
  if (std::abs((*p)[k] - (*q)[k]) > 1e-7) return std::nullopt;

  SupportSolve out;
  out.value = (*p)[k];
  out.row.assign(payoff.size(), 0.0);
  out.col.assign(payoff[0].size(), 0.0);
  for (int i = 0; i < k; ++i) {
    out.row[rows[i]] = std::max(0.0, (*p)[i]);
    out.col[cols[i]] = std::max(0.0, (*q)[i]);
  }
  return out;
}

void subsets_of_size(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> pick(k);
  // Odometer over ascending index combinations.
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    out.push_back(pick);
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

double best_row_payoff(const Matrix& payoff, const std::vector<double>& col) {
  double best = -1e300;
  for (const auto& row : payoff) {
    double v = 0.0;
    for (std::size_t c = 0; c < col.size(); ++c) v += row[c] * col[c];
    best = std::max(best, v);
  }
  return best;
}

double best_col_payoff(const Matrix& payoff, const std::vector<double>& row) {
  const std::size_t cols = payoff[0].size();
  double best = 1e300;
  for (std::size_t c = 0; c < cols; ++c) {
    double v = 0.0;
    for (std::size_t r = 0; r < payoff.size(); ++r) v += payoff[r][c] * row[r];
    best = std::min(best, v);
  }
  return best;
}

std::optional<ZeroSumAnswer> solve_zero_sum_by_supports(const Matrix& payoff) {
  const int rows = static_cast<int>(payoff.size());
  const int cols = static_cast<int>(payoff[0].size());
  constexpr double kOptTol = 1e-8;

  for (int k = 1; k <= std::min(rows, cols); ++k) {
    std::vector<std::vector<int>> row_sets, col_sets;
    subsets_of_size(rows, k, row_sets);
    subsets_of_size(cols, k, col_sets);
    for (const auto& rs : row_sets) {
      for (const auto& cs : col_sets) {
        const auto candidate = solve_support_pair(payoff, rs, cs);
        if (!candidate) continue;
        // Optimality against every pure strategy, not just the support.
        if (best_row_payoff(payoff, candidate->col) >
            candidate->value + kOptTol)
          continue;
        if (best_col_payoff(payoff, candidate->row) <
            candidate->value - kOptTol)
          continue;
        ZeroSumAnswer out;
        out.value = candidate->value;
        out.row = candidate->row;
        out.col = candidate->col;
        return out;
      }
    }
  }
  return std::nullopt;
}

}  // namespace oracle
