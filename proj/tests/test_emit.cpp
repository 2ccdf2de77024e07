#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "mosaic/emit.hpp"

using namespace mosaic;
using testutil::agent;

namespace {

SimTrace tiny_trace() {
  SimTrace trace;
  trace.name = "tiny";
  trace.roster = {0, 1};
  StepRecord rec;
  rec.step = 0;
  rec.lambda2_true = 2.0;
  rec.lambda2_perceived = 1.5;
  rec.jam_links_removed = 1;
  rec.spoof_active = 0;
  rec.quarantined_count = 0;
  rec.gne_rounds = 3;
  rec.gne_converged = true;
  rec.lambda_floor_violation = false;
  rec.agents = {AgentRecord{0, Vec2(0.0, 0.25), AgentStatus::Active, true},
                AgentRecord{1, Vec2(0.123456789123, -1.0), AgentStatus::Quarantined, true}};
  trace.steps.push_back(rec);
  return trace;
}

SimTrace moving_trace() {
  ScenarioConfig cfg;
  cfg.name = "emitrun";
  cfg.network.layer_count = 1;
  cfg.network.comm_radius = 1.2;
  cfg.network.decay = 0.5;
  cfg.network.agents = {agent(0, 0, 0.0, 0.0), agent(1, 0, 0.9, 0.1),
                        agent(2, 0, 1.7, 0.0), agent(3, 0, 0.4, 0.8)};
  cfg.total_steps = 12;
  AttackEvent jam;
  jam.kind = AttackKind::Jam;
  jam.start_step = 4;
  jam.duration = 3;
  jam.budget = 1;
  cfg.attacks = {jam};
  return run(cfg);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t count = 0;
  for (size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mosaic_emit_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("the CSV header lists fixed columns then per-agent triples") {
  const std::string csv = trace_csv(tiny_trace());
  const auto lines = split(csv, '\n');
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "step,lambda2_true,lambda2_perceived,jam_links_removed,spoof_active,"
        "quarantined_count,gne_rounds,gne_converged,lambda_floor_violation,"
        "agent0_x,agent0_y,agent0_status,agent1_x,agent1_y,agent1_status");
  CHECK(lines[1] ==
        "0,2,1.5,1,0,0,3,1,0,0,0.25,active,0.123456789,-1,quarantined");
  CHECK(csv.back() == '\n');
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("absent roster entries serialize with their planned position") {
  SimTrace trace = tiny_trace();
  trace.steps[0].agents[1] =
      AgentRecord{1, Vec2(3.0, 4.0), AgentStatus::Spoofed, false};
  const std::string csv = trace_csv(trace);
  const auto lines = split(csv, '\n');
  CHECK(lines[1].find(",3,4,absent") != std::string::npos);
}

TEST_CASE("CSV serialization is deterministic down to the byte") {
  const SimTrace trace = moving_trace();
  const std::string a = trace_csv(trace);
  const std::string b = trace_csv(moving_trace());
  CHECK(a == b);
  CHECK(count_occurrences(a, "\n") == trace.steps.size() + 1);
}

TEST_CASE("CSV floats survive a parse round trip at 9 digits") {
  const SimTrace trace = moving_trace();
  const auto lines = split(trace_csv(trace), '\n');
  REQUIRE(lines.size() == trace.steps.size() + 1);
  for (size_t s = 0; s < trace.steps.size(); ++s) {
    const auto cells = split(lines[s + 1], ',');
    REQUIRE(cells.size() == 9 + 3 * trace.roster.size());
    CHECK(std::stoi(cells[0]) == trace.steps[s].step);
    const double lt = std::stod(cells[1]);
    const double lp = std::stod(cells[2]);
    CHECK(lt == doctest::Approx(trace.steps[s].lambda2_true).epsilon(5e-9));
    CHECK(lp == doctest::Approx(trace.steps[s].lambda2_perceived).epsilon(5e-9));
    for (size_t i = 0; i < trace.roster.size(); ++i) {
      const double x = std::stod(cells[9 + 3 * i]);
      const double y = std::stod(cells[10 + 3 * i]);
      const Vec2 pos = trace.steps[s].agents[i].position;
      CHECK(x == doctest::Approx(pos.x()).epsilon(5e-9));
      CHECK(y == doctest::Approx(pos.y()).epsilon(5e-9));
    }
  }
}

TEST_CASE("summaries serialize to parseable JSON with null-safe fields") {
  const SimTrace trace = moving_trace();
  const RunSummary summary = summarize(trace);
  const std::string text = summary_json(summary);

  const nlohmann::json doc = nlohmann::json::parse(text);
  CHECK(doc.at("name").get<std::string>() == "emitrun");
  CHECK(doc.at("total_steps").get<int>() == summary.total_steps);
  CHECK(doc.at("final_lambda2_true").get<double>() ==
        doctest::Approx(summary.final_lambda2_true).epsilon(5e-9));
  CHECK(doc.at("min_lambda2_true").get<double>() ==
        doctest::Approx(summary.min_lambda2_true).epsilon(5e-9));
  CHECK(doc.at("mean_lambda2_true").get<double>() ==
        doctest::Approx(summary.mean_lambda2_true).epsilon(5e-9));
  CHECK(doc.at("steps_disconnected").get<int>() == summary.steps_disconnected);
  CHECK(doc.at("floor_violations").get<int>() == summary.floor_violations);

  REQUIRE(doc.at("attacks").size() == summary.attacks.size());
  for (size_t i = 0; i < summary.attacks.size(); ++i) {
    const auto& a = doc.at("attacks")[i];
    const AttackOutcome& o = summary.attacks[i];
    CHECK(a.at("kind").get<std::string>() == to_string(o.kind));
    CHECK(a.at("start_step").get<int>() == o.start_step);
    CHECK(a.at("end_step").get<int>() == o.end_step);
    CHECK(a.at("pre_lambda2").is_null() == !o.pre_lambda2.has_value());
    CHECK(a.at("recovery_steps").is_null() == !o.recovery_steps.has_value());
    CHECK(a.at("recovered").get<bool>() == o.recovered);
  }
}

TEST_CASE("JSON name escaping keeps the document parseable") {
  RunSummary summary;
  summary.name = "quo\"ted\\path\n";
  summary.total_steps = 1;
  const nlohmann::json doc = nlohmann::json::parse(summary_json(summary));
  CHECK(doc.at("name").get<std::string>() == "quo\"ted\\path\n");
}

TEST_CASE("missing baselines serialize as JSON nulls") {
  RunSummary summary;
  summary.name = "windows";
  summary.total_steps = 2;
  AttackOutcome o;
  o.kind = AttackKind::Jam;
  o.start_step = 0;
  o.end_step = 1;
  summary.attacks.push_back(o);
  const nlohmann::json doc = nlohmann::json::parse(summary_json(summary));
  CHECK(doc.at("attacks")[0].at("pre_lambda2").is_null());
  CHECK(doc.at("attacks")[0].at("recovery_steps").is_null());
  CHECK_FALSE(doc.at("attacks")[0].at("recovered").get<bool>());
}

TEST_CASE("the SVG plots both curves, shades windows, and strides thumbnails") {
  const SimTrace trace = moving_trace();
  const std::string svg = trace_svg(trace, 5);
  CHECK(svg.rfind("<svg ", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count_occurrences(svg, "<polyline") == 2);
  CHECK(count_occurrences(svg, "fill-opacity=\"0.15\"") == trace.attacks.size());
  // Steps 0, 5, 10 from the stride plus the forced final step 11.
  CHECK(count_occurrences(svg, "<g transform=") == 4);
  CHECK(count_occurrences(svg, "<g ") == count_occurrences(svg, "</g>"));
  CHECK(svg.find("true lambda2") != std::string::npos);
  CHECK(svg.find("perceived lambda2") != std::string::npos);
  CHECK(svg.find("jam [4,7)") != std::string::npos);
}

TEST_CASE("degenerate inputs are rejected before serialization") {
  CHECK_THROWS_WITH_AS(trace_csv(SimTrace{}), "empty trace", std::invalid_argument);
  CHECK_THROWS_WITH_AS(trace_svg(SimTrace{}), "empty trace", std::invalid_argument);
  CHECK_THROWS_WITH_AS(trace_svg(tiny_trace(), 0), "stride must be >= 1",
                       std::invalid_argument);
}

TEST_CASE("emitters write the exact serialized bytes to disk") {
  const TempDir dir;
  const SimTrace trace = moving_trace();
  const RunSummary summary = summarize(trace);

  const auto csv_path = dir.path / "trace.csv";
  const auto json_path = dir.path / "summary.json";
  const auto svg_path = dir.path / "plot.svg";
  emit_csv(trace, csv_path.string());
  emit_summary(summary, json_path.string());
  emit_plot(trace, svg_path.string(), 5);

  CHECK(slurp(csv_path) == trace_csv(trace));
  CHECK(slurp(json_path) == summary_json(summary));
  CHECK(slurp(svg_path) == trace_svg(trace, 5));

  emit_csv(trace, csv_path.string());
  CHECK(slurp(csv_path) == trace_csv(trace));

  CHECK_THROWS_AS(emit_csv(trace, (dir.path / "no" / "dir.csv").string()),
                  std::runtime_error);
}
