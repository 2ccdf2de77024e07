#include "mosaic/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mosaic {

namespace {

bool discovered(const LayeredNetwork& net, const Agent& spoofed) {
  for (const Agent& other : net.agents) {
    if (other.status != AgentStatus::Active) continue;
    if ((other.position - spoofed.position).norm() <= net.comm_radius)
      return true;
  }
  return false;
}

bool participates(const LayeredNetwork& net, const Agent& agent, NetView view) {
  switch (agent.status) {
    case AgentStatus::Active:
      return true;
    case AgentStatus::Spoofed:
      return view == NetView::Perceived && discovered(net, agent);
    case AgentStatus::Quarantined:
      return false;
  }
  return false;
}

double raw_weight(const LayeredNetwork& net, const Agent& a, const Agent& b,
                  double cross_coupling) {
  const double d = (a.position - b.position).norm();
  if (d > net.comm_radius) return 0.0;
  double w = std::exp(-net.decay * d);
  if (a.layer != b.layer) w *= cross_coupling;
  return w;
}

}  // namespace

double pair_weight(const LayeredNetwork& net, const Agent& a, const Agent& b,
                   NetView view, double cross_coupling) {
  if (a.id == b.id) return 0.0;
  if (!participates(net, a, view) || !participates(net, b, view)) return 0.0;
  return raw_weight(net, a, b, cross_coupling);
}

Eigen::MatrixXd build_weights(const LayeredNetwork& net, NetView view,
                              double cross_coupling) {
  const int n = static_cast<int>(net.agents.size());
  std::vector<char> in(net.agents.size(), 0);
  for (int i = 0; i < n; ++i)
    in[i] = participates(net, net.agents[i], view) ? 1 : 0;

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (!in[i]) continue;
    for (int j = i + 1; j < n; ++j) {
      if (!in[j]) continue;
      const double wij =
          raw_weight(net, net.agents[i], net.agents[j], cross_coupling);
      w(i, j) = wij;
      w(j, i) = wij;
    }
  }
  return w;
}

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& weights) {
  if (weights.rows() != weights.cols())
    throw std::invalid_argument("weight matrix must be square");
  const int n = static_cast<int>(weights.rows());
  const double scale = std::max(1.0, weights.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0)
      throw std::invalid_argument("weight matrix must have zero diagonal");
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(weights(i, j)))
        throw std::invalid_argument("weight matrix must be finite");
      if (weights(i, j) < 0.0)
        throw std::invalid_argument("weight matrix must be nonnegative");
      if (std::abs(weights(i, j) - weights(j, i)) > 1e-12 * scale)
        throw std::invalid_argument("weight matrix must be symmetric");
    }
  }
  Eigen::MatrixXd lap = -weights;
  for (int i = 0; i < n; ++i) lap(i, i) = weights.row(i).sum();
  return lap;
}

SpectralResult algebraic_connectivity(const Eigen::MatrixXd& lap) {
  if (lap.rows() != lap.cols())
    throw std::invalid_argument("Laplacian must be square");
  const int n = static_cast<int>(lap.rows());
  if (n < 2) throw std::invalid_argument("degenerate network: need n >= 2");

  const double scale = std::max(1.0, lap.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(lap(i, j)))
        throw std::invalid_argument("Laplacian must be finite");
      if (std::abs(lap(i, j) - lap(j, i)) > 1e-9 * scale)
        throw std::invalid_argument("Laplacian must be symmetric");
      if (i != j && lap(i, j) > 1e-12 * scale)
        throw std::invalid_argument("Laplacian off-diagonal must be <= 0");
      row_sum += lap(i, j);
    }
    if (std::abs(row_sum) > 1e-8 * n * scale)
      throw std::invalid_argument("Laplacian rows must sum to zero");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vecs = solver.eigenvectors();

  const double ev_scale = std::max(1.0, std::abs(ev(n - 1)));
  double lambda2 = ev(1);
  if (std::abs(lambda2) <= 1e-10 * ev_scale) lambda2 = 0.0;

  double eigengap = n >= 3 ? ev(2) - ev(1)
                           : std::numeric_limits<double>::infinity();
  if (eigengap < 0.0) eigengap = 0.0;

  // Eigenspace of lambda2 under multiplicity. When lambda2 is (numerically)
  // zero the kernel basis can mix in the all-ones direction, so the basis is
  // projected against exact ones and re-orthonormalized before tie-breaking.
  const double mult_tol = 1e-9 * ev_scale;
  std::vector<Eigen::VectorXd> basis;
  const Eigen::VectorXd ones_dir =
      Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int c = 0; c < n; ++c) {
    if (std::abs(ev(c) - ev(1)) > mult_tol) continue;
    Eigen::VectorXd v = vecs.col(c);
    v -= ones_dir.dot(v) * ones_dir;
    for (const Eigen::VectorXd& b : basis) v -= b.dot(v) * b;
    const double norm = v.norm();
    if (norm < 1e-8) continue;
    basis.push_back(v / norm);
  }
  if (basis.empty())
    throw std::runtime_error("empty lambda2 eigenspace after projection");

  // Sign convention: lowest-index nonzero entry positive. Among basis
  // vectors, the one with the largest first component wins.
  int best = 0;
  double best_first = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Eigen::VectorXd& v = basis[k];
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    if (v(0) > best_first + 1e-12) {
      best_first = v(0);
      best = static_cast<int>(k);
    }
  }
  Eigen::VectorXd fiedler = basis[best];

  SpectralResult result{lambda2, std::move(fiedler), eigengap};

  // Internal consistency checks, cheap at this scale.
  const double max_degree = lap.diagonal().maxCoeff();
  if (result.lambda2 < 0.0 || ev(n - 1) > 2.0 * max_degree + 1e-8 * ev_scale ||
      result.lambda2 > ev(n - 1) + 1e-9 * ev_scale)
    throw std::runtime_error("spectral bounds violated");
  const double residual =
      (lap * result.fiedler - ev(1) * result.fiedler).norm();
  if (residual > 1e-8 * ev_scale)
    throw std::runtime_error("Fiedler residual too large");
  if (std::abs(result.fiedler.sum()) / std::sqrt(static_cast<double>(n)) >
      1e-9)
    throw std::runtime_error("Fiedler vector not orthogonal to ones");

  return result;
}

std::optional<double> lambda2_edge_gradient(const SpectralResult& spectral,
                                            int i, int j,
                                            double eigengap_floor) {
  const int n = static_cast<int>(spectral.fiedler.size());
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw std::invalid_argument("edge gradient index out of range");
  if (spectral.eigengap <= eigengap_floor) return std::nullopt;
  if (i == j) return 0.0;
  const double diff = spectral.fiedler(i) - spectral.fiedler(j);
  return diff * diff;
}

int NetworkSpectral::participant_index(int agent_id) const {
  for (std::size_t i = 0; i < participant_ids.size(); ++i)
    if (participant_ids[i] == agent_id) return static_cast<int>(i);
  return -1;
}

namespace {

NetworkSpectral connectivity_impl(const LayeredNetwork& net, NetView view,
                                  double cross_coupling,
                                  const std::vector<LinkId>* removed) {
  const int n = static_cast<int>(net.agents.size());
  NetworkSpectral out;
  out.view = view;
  out.cross_coupling = cross_coupling;

  Eigen::MatrixXd w = build_weights(net, view, cross_coupling);
  std::vector<int> indices;
  for (int i = 0; i < n; ++i) {
    if (participates(net, net.agents[i], view)) {
      indices.push_back(i);
      out.participant_ids.push_back(net.agents[i].id);
    }
  }
  if (removed != nullptr) {
    for (const LinkId& link : *removed) {
      const int i = net.index_of(link.a);
      const int j = net.index_of(link.b);
      if (i < 0 || j < 0) continue;
      w(i, j) = 0.0;
      w(j, i) = 0.0;
    }
  }

  const int m = static_cast<int>(indices.size());
  if (m < 2) {
    out.degenerate = true;
    out.spectral.lambda2 = 0.0;
    out.spectral.eigengap = 0.0;
    return out;
  }

  Eigen::MatrixXd sub(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sub(i, j) = w(indices[i], indices[j]);
  out.spectral = algebraic_connectivity(laplacian(sub));
  return out;
}

}  // namespace

NetworkSpectral connectivity(const LayeredNetwork& net, NetView view,
                             double cross_coupling) {
  return connectivity_impl(net, view, cross_coupling, nullptr);
}

NetworkSpectral connectivity_without_links(const LayeredNetwork& net,
                                           const std::vector<LinkId>& removed,
                                           NetView view,
                                           double cross_coupling) {
  return connectivity_impl(net, view, cross_coupling, &removed);
}

std::vector<LinkId> present_links(const LayeredNetwork& net, NetView view,
                                  double cross_coupling) {
  Eigen::MatrixXd w = build_weights(net, view, cross_coupling);
  std::vector<LinkId> links;
  const int n = static_cast<int>(net.agents.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (w(i, j) > 0.0) links.push_back({net.agents[i].id, net.agents[j].id});
  std::sort(links.begin(), links.end());
  return links;
}

std::vector<int> view_participants(const LayeredNetwork& net, NetView view) {
  std::vector<int> ids;
  for (const Agent& a : net.agents)
    if (participates(net, a, view)) ids.push_back(a.id);
  return ids;
}

std::optional<Vec2> lambda2_position_gradient(const LayeredNetwork& net,
                                              const NetworkSpectral& spectral,
                                              int agent_id,
                                              double eigengap_floor) {
  if (spectral.degenerate) return std::nullopt;
  const int vi = spectral.participant_index(agent_id);
  if (vi < 0) return std::nullopt;
  if (spectral.spectral.eigengap <= eigengap_floor) return std::nullopt;

  const Agent* self = net.find(agent_id);
  if (self == nullptr) throw std::invalid_argument("unknown agent id");

  Vec2 grad = Vec2::Zero();
  const Eigen::VectorXd& v = spectral.spectral.fiedler;
  for (std::size_t k = 0; k < spectral.participant_ids.size(); ++k) {
    const int other_id = spectral.participant_ids[k];
    if (other_id == agent_id) continue;
    const Agent* other = net.find(other_id);
    const double d = (self->position - other->position).norm();
    if (d <= 0.0 || d > net.comm_radius) continue;  // coincident or out of range
    const double w =
        pair_weight(net, *self, *other, spectral.view, spectral.cross_coupling);
    if (w <= 0.0) continue;
    const double diff = v(vi) - v(static_cast<int>(k));
    grad += diff * diff * (-net.decay * w / d) * (self->position - other->position);
  }
  return grad;
}

}  // namespace mosaic
