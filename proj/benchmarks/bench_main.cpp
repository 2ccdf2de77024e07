#include <benchmark/benchmark.h>

#include <cstdint>

#include "mosaic/game.hpp"
#include "mosaic/network.hpp"
#include "mosaic/rng.hpp"
#include "mosaic/scenario.hpp"
#include "mosaic/security.hpp"
#include "mosaic/sim.hpp"
#include "mosaic/spectral.hpp"
#include "mosaic/tactical.hpp"

namespace {

// Two-layer net scattered over a box sized so the graph stays connected at
// every n used below.
mosaic::LayeredNetwork scattered_net(int n, std::uint64_t seed) {
  mosaic::Xoshiro256pp rng(seed);
  mosaic::LayeredNetwork net;
  net.layer_count = 2;
  net.comm_radius = 1.6;
  net.decay = 0.4;
  net.agents.reserve(n);
  for (int i = 0; i < n; ++i) {
    mosaic::Agent a;
    a.id = i;
    a.layer = i % 2;
    double x = rng.uniform(0.0, 2.5);
    double y = rng.uniform(0.0, 2.5);
    a.position = mosaic::Vec2(x, y);
    a.max_step = 0.2;
    net.agents.push_back(a);
  }
  return net;
}

void BM_Connectivity(benchmark::State& state) {
  const auto net = scattered_net(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    auto s = mosaic::connectivity(net);
    benchmark::DoNotOptimize(s.lambda2());
  }
}
BENCHMARK(BM_Connectivity)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_WorstCaseJam(benchmark::State& state) {
  const auto net = scattered_net(10, 11);
  const int budget = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto plan = mosaic::worst_case_jam(net, budget);
    benchmark::DoNotOptimize(plan.lambda2_after);
  }
}
BENCHMARK(BM_WorstCaseJam)->Arg(1)->Arg(2);

void BM_SolveZeroSum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  mosaic::Xoshiro256pp rng(13);
  mosaic::MatrixGame game;
  game.payoff = Eigen::MatrixXd(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) game.payoff(r, c) = rng.uniform(-1.0, 1.0);
  // Fictitious play alone serves games above the support-enumeration size;
  // 1e-2 keeps the 8x8 inside its iteration budget.
  for (auto _ : state) {
    auto sol = mosaic::solve_zero_sum(game, 1e-2);
    benchmark::DoNotOptimize(sol.value);
  }
}
BENCHMARK(BM_SolveZeroSum)->Arg(3)->Arg(8);

void BM_GneIterate(benchmark::State& state) {
  const auto net = scattered_net(10, 17);
  mosaic::Objective obj;
  for (auto _ : state) {
    auto g = mosaic::gne_iterate(net, obj, 1e-3, 20);
    benchmark::DoNotOptimize(g.rounds);
  }
}
BENCHMARK(BM_GneIterate);

void BM_Run(benchmark::State& state) {
  mosaic::ScenarioConfig cfg;
  cfg.name = "bench";
  cfg.network.layer_count = 2;
  cfg.network.comm_radius = 1.6;
  cfg.network.decay = 0.4;
  mosaic::RandomAgents random;
  random.counts_per_layer = {4, 4};
  random.bounding_box = {0.0, 0.0, 2.5, 2.5};
  random.max_step = 0.2;
  cfg.network.random_agents = random;
  cfg.total_steps = 10;
  cfg.seed = 23;
  cfg.epsilon = 1e-3;
  for (auto _ : state) {
    auto trace = mosaic::run(cfg);
    benchmark::DoNotOptimize(trace.steps.size());
  }
}
BENCHMARK(BM_Run);

}  // namespace

BENCHMARK_MAIN();
