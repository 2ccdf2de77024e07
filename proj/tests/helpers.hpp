#pragma once

#include <string>
#include <vector>

#include "mosaic/network.hpp"
#include "mosaic/rng.hpp"
#include "mosaic/spectral.hpp"
#include "oracles.hpp"

// Instance builders shared across the suite.
namespace testutil {

inline mosaic::Agent agent(int id, int layer, double x, double y,
                           double max_step = 0.25,
                           mosaic::AgentStatus status =
                               mosaic::AgentStatus::Active) {
  mosaic::Agent a;
  a.id = id;
  a.layer = layer;
  a.position = mosaic::Vec2(x, y);
  a.max_step = max_step;
  a.status = status;
  return a;
}

inline mosaic::LayeredNetwork net_of(std::vector<mosaic::Agent> agents,
                                     int layer_count, double comm_radius,
                                     double decay = 0.0) {
  mosaic::LayeredNetwork net;
  net.agents = std::move(agents);
  net.layer_count = layer_count;
  net.comm_radius = comm_radius;
  net.decay = decay;
  net.validate();
  return net;
}

// Unit square with diagonal inside comm_radius: complete unit-weight K4.
inline mosaic::LayeredNetwork complete4() {
  return net_of({agent(0, 0, 0.0, 0.0), agent(1, 0, 1.0, 0.0),
                 agent(2, 0, 0.0, 1.0), agent(3, 0, 1.0, 1.0)},
                1, 2.0, 0.0);
}

// Three agents on a line, unit spacing, radius 1: unit-weight path.
inline mosaic::LayeredNetwork path3() {
  return net_of({agent(0, 0, 0.0, 0.0), agent(1, 0, 1.0, 0.0),
                 agent(2, 0, 2.0, 0.0)},
                1, 1.0, 0.0);
}

// Two unit-weight pairs too far apart to hear each other.
inline mosaic::LayeredNetwork split_pairs() {
  return net_of({agent(0, 0, 0.0, 0.0), agent(1, 0, 1.0, 0.0),
                 agent(2, 0, 10.0, 0.0), agent(3, 0, 11.0, 0.0)},
                1, 1.0, 0.0);
}

// Hub at the origin, three unit-weight leaves out of each other's range.
inline mosaic::LayeredNetwork star4() {
  return net_of({agent(0, 0, 0.0, 0.0), agent(1, 0, 1.0, 0.0),
                 agent(2, 0, -0.5, 0.8660254037844386),
                 agent(3, 0, -0.5, -0.8660254037844386)},
                1, 1.0, 0.0);
}

inline mosaic::LayeredNetwork random_network(mosaic::Xoshiro256pp& rng, int n,
                                             int layers, double box,
                                             double comm_radius, double decay,
                                             double max_step = 0.25) {
  std::vector<mosaic::Agent> agents;
  agents.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(0.0, box);
    const double y = rng.uniform(0.0, box);
    agents.push_back(agent(i, i % layers, x, y, max_step));
  }
  return net_of(std::move(agents), layers, comm_radius, decay);
}

inline oracle::Matrix to_rows(const Eigen::MatrixXd& m) {
  oracle::Matrix rows(m.rows(), std::vector<double>(m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
  return rows;
}

inline std::string fixture_path(const std::string& name) {
  return std::string(MOSAIC_FIXTURE_DIR) + "/" + name;
}

}  // namespace testutil
