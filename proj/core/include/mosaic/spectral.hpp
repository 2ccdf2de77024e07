#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mosaic/network.hpp"

namespace mosaic {

// Below this eigengap the Fiedler vector is numerically unreliable and
// gradient queries return nothing; callers fall back to their fixed
// candidate grids.
inline constexpr double kGradientEigengapFloor = 1e-6;

struct SpectralResult {
  double lambda2 = 0.0;
  Eigen::VectorXd fiedler;  // unit norm, orthogonal to the all-ones vector
  double eigengap = 0.0;    // lambda3 - lambda2; +inf for 2-node graphs
};

// Whose links count. True: active agents only. Perceived: active agents plus
// spoofed agents that at least one active agent can hear (a fake node out of
// everyone's range is never discovered and perception matches truth).
enum class NetView { True, Perceived };

// Pairwise weight exp(-decay*d) inside comm_radius, 0 outside, 0 unless both
// endpoints participate in the view. Cross-layer pairs are scaled by
// cross_coupling (the composed-game coupling; 1 keeps physical weights).
double pair_weight(const LayeredNetwork& net, const Agent& a, const Agent& b,
                   NetView view, double cross_coupling = 1.0);

// Full n x n symmetric weight matrix in agent order. Non-participating agents
// keep their (all-zero) row and column.
Eigen::MatrixXd build_weights(const LayeredNetwork& net,
                              NetView view = NetView::True,
                              double cross_coupling = 1.0);

// L = D - W. Rejects asymmetric or negative input.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& weights);

// Dense symmetric eigensolve. Throws on n < 2 ("degenerate network") and on
// invalid Laplacians. lambda2 is clamped to exactly 0 for disconnected
// graphs; the Fiedler vector is deterministic under eigenvalue multiplicity
// (basis vectors are sign-normalized so the lowest-index nonzero entry is
// positive, then the one with the largest first component wins).
SpectralResult algebraic_connectivity(const Eigen::MatrixXd& laplacian);

// d(lambda2)/d(w_ij) = (v_i - v_j)^2 to first order. Empty when the eigengap
// is below the floor.
std::optional<double> lambda2_edge_gradient(
    const SpectralResult& spectral, int i, int j,
    double eigengap_floor = kGradientEigengapFloor);

// Connectivity of the view's participant submatrix, with the index mapping
// needed to push gradients back to agents. Fewer than two participants is
// reported as a disconnected (lambda2 = 0) degenerate result instead of an
// error so simulation records stay total.
struct NetworkSpectral {
  SpectralResult spectral;
  std::vector<int> participant_ids;  // ascending agent ids
  NetView view = NetView::True;
  double cross_coupling = 1.0;
  bool degenerate = false;  // fewer than two participants

  double lambda2() const { return spectral.lambda2; }
  int participant_index(int agent_id) const;  // -1 when absent
};

struct LinkId {
  int a = 0;  // lower agent id
  int b = 0;

  friend bool operator==(const LinkId&, const LinkId&) = default;
  friend auto operator<=>(const LinkId&, const LinkId&) = default;
};

NetworkSpectral connectivity(const LayeredNetwork& net,
                             NetView view = NetView::True,
                             double cross_coupling = 1.0);

// Same, with the listed links' weights forced to zero first (jamming).
NetworkSpectral connectivity_without_links(const LayeredNetwork& net,
                                           const std::vector<LinkId>& removed,
                                           NetView view = NetView::True,
                                           double cross_coupling = 1.0);

// Present links (weight > 0) of the view's graph, ascending (a, b) order.
std::vector<LinkId> present_links(const LayeredNetwork& net,
                                  NetView view = NetView::True,
                                  double cross_coupling = 1.0);

// Agents visible in the view, ascending id: active agents, plus (perceived
// view only) spoofed agents within comm_radius of at least one active agent.
std::vector<int> view_participants(const LayeredNetwork& net,
                                   NetView view = NetView::True);

// d(lambda2)/d(position of agent_id) through the weight model. Zero
// contribution from coincident pairs and from pairs beyond comm_radius.
// Empty when the eigengap is below the floor or the agent does not
// participate in the spectral view.
std::optional<Vec2> lambda2_position_gradient(
    const LayeredNetwork& net, const NetworkSpectral& spectral, int agent_id,
    double eigengap_floor = kGradientEigengapFloor);

}  // namespace mosaic
