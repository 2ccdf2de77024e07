#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mosaic/emit.hpp"
#include "mosaic/format.hpp"
#include "mosaic/scenario.hpp"
#include "mosaic/sim.hpp"

namespace fs = std::filesystem;

namespace {

mosaic::TacticalMode parse_mode(const std::string& text) {
  if (text == "nominal") return mosaic::TacticalMode::Nominal;
  if (text == "robust") return mosaic::TacticalMode::Robust;
  throw mosaic::ConfigError("mode: expected nominal or robust, got \"" + text +
                            "\"");
}

std::string stem_of(const std::string& path) {
  std::string stem = fs::path(path).stem().string();
  return stem.empty() ? std::string("scenario") : stem;
}

void write_run_outputs(const mosaic::SimTrace& trace,
                       const mosaic::RunSummary& summary,
                       const fs::path& out_dir, const std::string& stem,
                       bool plot) {
  fs::create_directories(out_dir);
  const fs::path csv_path = out_dir / (stem + "_trace.csv");
  const fs::path json_path = out_dir / (stem + "_summary.json");
  mosaic::emit_csv(trace, csv_path.string());
  mosaic::emit_summary(summary, json_path.string());
  std::cout << "wrote " << csv_path.string() << '\n';
  std::cout << "wrote " << json_path.string() << '\n';
  if (plot) {
    const fs::path svg_path = out_dir / (stem + "_plot.svg");
    mosaic::emit_plot(trace, svg_path.string());
    std::cout << "wrote " << svg_path.string() << '\n';
  }
}

void print_summary_line(const mosaic::RunSummary& s) {
  std::cout << s.name << ": final lambda2 "
            << mosaic::fmt_g9(s.final_lambda2_true) << ", min "
            << mosaic::fmt_g9(s.min_lambda2_true) << ", disconnected steps "
            << s.steps_disconnected << ", floor violations "
            << s.floor_violations << '\n';
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            bool has_seed, std::uint64_t seed, const std::string& mode,
            bool plot) {
  mosaic::ScenarioConfig cfg = mosaic::load_scenario(scenario_path);
  if (has_seed) cfg.seed = seed;
  if (!mode.empty()) cfg.mode = parse_mode(mode);
  mosaic::SimTrace trace = mosaic::run(cfg);
  mosaic::RunSummary summary = mosaic::summarize(trace);
  write_run_outputs(trace, summary, out_dir, stem_of(scenario_path), plot);
  print_summary_line(summary);
  return 0;
}

// Per-scenario failures (bad file or failed run) are reported inline and
// turn the exit code to 1; the rest of the batch still completes.
int cmd_batch(const std::string& dir, const std::string& out_dir, int jobs) {
  if (!fs::is_directory(dir))
    throw mosaic::ConfigError("scenario directory not found: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw mosaic::ConfigError("no .json scenarios in " + dir);

  struct Item {
    std::string file;
    std::string error;
    int config_index = -1;
  };
  std::vector<Item> items(files.size());
  std::vector<mosaic::ScenarioConfig> configs;
  for (std::size_t i = 0; i < files.size(); ++i) {
    items[i].file = files[i];
    try {
      configs.push_back(mosaic::load_scenario(files[i]));
      items[i].config_index = static_cast<int>(configs.size()) - 1;
    } catch (const std::exception& e) {
      items[i].error = e.what();
    }
  }

  std::vector<mosaic::BatchResult> results = mosaic::run_batch(configs, jobs);

  bool any_failed = false;
  for (const Item& item : items) {
    const std::string stem = stem_of(item.file);
    if (item.config_index < 0) {
      any_failed = true;
      std::cout << stem << ": FAILED: " << item.error << '\n';
      continue;
    }
    const mosaic::BatchResult& r = results[item.config_index];
    if (!r.ok) {
      any_failed = true;
      std::cout << stem << ": FAILED: " << r.error << '\n';
      continue;
    }
    write_run_outputs(r.trace, r.summary, out_dir, stem, false);
    print_summary_line(r.summary);
  }
  return any_failed ? 1 : 0;
}

int cmd_gne(const std::string& scenario_path) {
  mosaic::ScenarioConfig cfg = mosaic::load_scenario(scenario_path);
  mosaic::GneResult g = mosaic::solve_equilibrium(cfg);
  std::cout << "rounds " << g.rounds
            << (g.converged ? ", converged" : ", not converged") << '\n';
  std::cout << "objective "
            << mosaic::fmt_g9(g.lambda2_trace.empty() ? 0.0
                                                      : g.lambda2_trace.back())
            << '\n';
  std::cout << "certificate " << (g.certificate.holds ? "holds" : "fails")
            << ", worst regret " << mosaic::fmt_g9(g.certificate.worst_regret);
  if (g.certificate.violator)
    std::cout << ", violator operator " << *g.certificate.violator;
  std::cout << '\n';
  return g.converged && g.certificate.holds ? 0 : 1;
}

int cmd_verify(const std::string& scenario_path) {
  mosaic::ScenarioConfig cfg = mosaic::load_scenario(scenario_path);
  int agent_count = 0;
  if (cfg.network.random_agents) {
    const auto& counts = cfg.network.random_agents->counts_per_layer;
    agent_count = std::accumulate(counts.begin(), counts.end(), 0);
  } else {
    agent_count = static_cast<int>(cfg.network.agents.size());
  }
  std::cout << "ok: " << scenario_path << " (" << agent_count << " agents, "
            << cfg.total_steps << " steps, " << cfg.attacks.size()
            << " attacks)" << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered-network connectivity simulator"};
  app.require_subcommand(1);

  std::string run_scenario, run_out, run_mode;
  std::uint64_t run_seed = 0;
  bool run_plot = false;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "Simulate one scenario and emit its trace and summary");
  run_cmd->add_option("--scenario", run_scenario, "Scenario JSON file")
      ->required();
  run_cmd->add_option("--out", run_out, "Output directory")->required();
  CLI::Option* seed_opt =
      run_cmd->add_option("--seed", run_seed, "Override the scenario seed");
  run_cmd->add_option("--mode", run_mode, "Override the tactical mode")
      ->check(CLI::IsMember({"nominal", "robust"}));
  run_cmd->add_flag("--plot", run_plot, "Also emit an SVG plot");

  std::string batch_dir, batch_out;
  int batch_jobs = 1;
  CLI::App* batch_cmd =
      app.add_subcommand("batch", "Run every scenario in a directory");
  batch_cmd
      ->add_option("--scenarios", batch_dir, "Directory of scenario JSON files")
      ->required();
  batch_cmd->add_option("--out", batch_out, "Output directory")->required();
  batch_cmd->add_option("--jobs", batch_jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  std::string gne_scenario;
  CLI::App* gne_cmd_app = app.add_subcommand(
      "gne", "Solve the scenario's stage game and print the certificate");
  gne_cmd_app->add_option("--scenario", gne_scenario, "Scenario JSON file")
      ->required();

  std::string verify_scenario;
  CLI::App* verify_cmd_app =
      app.add_subcommand("verify", "Validate a scenario file");
  verify_cmd_app->add_option("--scenario", verify_scenario, "Scenario JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // Bad invocation counts as a config error; --help stays success.
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd)
      return cmd_run(run_scenario, run_out, seed_opt->count() > 0, run_seed,
                     run_mode, run_plot);
    if (*batch_cmd) return cmd_batch(batch_dir, batch_out, batch_jobs);
    if (*gne_cmd_app) return cmd_gne(gne_scenario);
    if (*verify_cmd_app) return cmd_verify(verify_scenario);
  } catch (const mosaic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
