#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "blobot/experiments.hpp"

using namespace blobot;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_custom_config() {
  return json{
      {"experiment", "custom"},
      {"mode", "velocity"},
      {"n_particles", 3},
      {"n_times", 3},
      {"dim", 1},
      {"epsilon", 0.05},
      {"delta", 0.3},
      {"source", {{"type", "grid"}, {"box", json::array({json::array({0.0, 1.0})})}}},
      {"target", {{"type", "grid"}, {"box", json::array({json::array({2.0, 2.5})})}}},
      {"optimizer", {{"alpha", 0.01}, {"max_steps", 50}, {"seed", 7}}},
  };
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int lines = 0;
  std::string row;
  while (std::getline(in, row)) ++lines;
  return lines;
}

}  // namespace

TEST_CASE("config errors carry the offending field path") {
  auto field_of = [](const json& doc) {
    try {
      parse_config(doc);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<no error>");
  };

  json base = small_custom_config();

  json missing = base;
  missing.erase("n_particles");
  CHECK(field_of(missing) == "config.n_particles");

  json unknown = base;
  unknown["bogus"] = 1;
  CHECK(field_of(unknown) == "config.bogus");

  json nested_unknown = base;
  nested_unknown["optimizer"]["momentum"] = 0.9;
  CHECK(field_of(nested_unknown) == "config.optimizer.momentum");

  json both_delta = base;
  both_delta["delta_rule"] = {{"k", 0.99}};
  CHECK(field_of(both_delta) == "config");

  json bad_eps = base;
  bad_eps["epsilon"] = 0.0;
  CHECK(field_of(bad_eps) == "config.epsilon");

  json bad_mode = base;
  bad_mode["mode"] = "teleportation";
  CHECK(field_of(bad_mode) == "config.mode");

  json bad_experiment{{"experiment", "nonexistent"}};
  CHECK(field_of(bad_experiment) == "experiment");

  json negative_steps = base;
  negative_steps["optimizer"]["max_steps"] = -1;
  CHECK(field_of(negative_steps) == "config.optimizer.max_steps");
}

TEST_CASE("presets fill defaults and user keys override them") {
  const ExperimentConfig cfg = parse_config(json{{"experiment", "comparison"}});
  CHECK(cfg.n_particles == 30);
  CHECK(cfg.n_times == 3);
  CHECK(cfg.dim == 2);
  CHECK(cfg.epsilon == 0.01);
  CHECK(cfg.compare_assignment);
  CHECK(cfg.optimizer.max_steps == 2000);

  const ExperimentConfig over =
      parse_config(json{{"experiment", "comparison"}, {"n_particles", 12}, {"epsilon", 0.5}});
  CHECK(over.n_particles == 12);
  CHECK(over.epsilon == 0.5);
  CHECK(over.n_times == 3);

  // A user delta replaces the preset's rule.
  const ExperimentConfig with_delta =
      parse_config(json{{"experiment", "comparison"}, {"delta", 0.2}});
  CHECK(with_delta.delta.has_value());
  CHECK(*with_delta.delta == 0.2);
  CHECK(!with_delta.delta_rule_k.has_value());
}

TEST_CASE("user cloud overrides replace the preset cloud wholesale") {
  json doc{{"experiment", "landscape"},
           {"source", {{"type", "points"},
                       {"points", json::array({json::array({0.1}), json::array({0.6})})}}}};
  const ExperimentConfig cfg = parse_config(doc);
  const ResolvedProblem prob = resolve_problem(cfg);
  CHECK(prob.sources.point(0)[0] == 0.1);
  CHECK(prob.sources.point(1)[0] == 0.6);
}

TEST_CASE("landscape marked evaluations order the critical points") {
  const ExperimentConfig cfg = parse_config(json{{"experiment", "landscape"}});
  const json report = landscape_core(cfg);
  const json& marked = report["marked"];

  const double total_target = marked["target"]["total"].get<double>();
  const double total_flipped = marked["flipped"]["total"].get<double>();
  CHECK(total_target < total_flipped);  // crossing paths cost extra kinetic energy

  // The terminal measure is the same multiset either way.
  CHECK(marked["target"]["nonlocal"].get<double>() ==
        doctest::Approx(marked["flipped"]["nonlocal"].get<double>()).epsilon(1e-14));
  CHECK(marked["target"]["terminal_penalty_full"].get<double>() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(marked["flipped"]["terminal_penalty_full"].get<double>() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(marked["source"]["total"].get<double>() > total_target);
}

TEST_CASE("landscape csv has the full grid") {
  TempDir dir("blobot_test_landscape");
  ExperimentConfig cfg = parse_config(
      json{{"experiment", "landscape"}, {"landscape", {{"grid_size", 21}}}});
  run_landscape(cfg, dir.path.string(), false);
  CHECK(count_lines(dir.path / "landscape.csv") == 21 * 21 + 1);
  CHECK(fs::exists(dir.path / "report.json"));
}

TEST_CASE("experiment outputs: file shapes and the overwrite guard") {
  TempDir dir("blobot_test_run");
  const ExperimentConfig cfg = parse_config(small_custom_config());
  const json report = run_experiment(cfg, dir.path.string(), false);

  CHECK(count_lines(dir.path / "trajectories.csv") == 3 * 3 + 1);
  CHECK(count_lines(dir.path / "loss.csv") ==
        static_cast<int>(report["steps_taken"].get<long>()) + 2);
  {
    std::ifstream in(dir.path / "trajectories.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "particle_index,knot_index,t,coord_0");
  }

  CHECK_THROWS_AS(run_experiment(cfg, dir.path.string(), false), ConfigError);
  CHECK_NOTHROW(run_experiment(cfg, dir.path.string(), true));
}

TEST_CASE("acceleration trajectories include backward-difference velocities") {
  TempDir dir("blobot_test_accel_run");
  json doc{
      {"experiment", "acceleration"},
      {"n_particles", 4},
      {"n_times", 4},
      {"optimizer", {{"alpha", 0.001}, {"max_steps", 5}, {"seed", 3}}},
  };
  run_experiment(parse_config(doc), dir.path.string(), false);
  std::ifstream in(dir.path / "trajectories.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "particle_index,knot_index,t,coord_0,vel_0");
  CHECK(count_lines(dir.path / "trajectories.csv") == 4 * 4 + 1);
}

TEST_CASE("the resolved config re-runs bitwise") {
  const ExperimentConfig cfg = parse_config(small_custom_config());
  ExperimentResult first = run_experiment_core(cfg);

  const ExperimentConfig echoed = parse_config(first.report["resolved_config"]);
  ExperimentResult second = run_experiment_core(echoed);

  CHECK(first.gd.best.values == second.gd.best.values);
  first.report.erase("wall_time_seconds");
  second.report.erase("wall_time_seconds");
  CHECK(first.report.dump() == second.report.dump());
}

TEST_CASE("the resolved config re-runs bitwise for random sources") {
  ExperimentConfig cfg = parse_config(json{
      {"experiment", "comparison"},
      {"n_particles", 6},
      {"optimizer", {{"alpha", 0.01}, {"max_steps", 30}, {"seed", 11}}},
  });
  ExperimentResult first = run_experiment_core(cfg);
  ExperimentResult second = run_experiment_core(parse_config(first.report["resolved_config"]));
  CHECK(first.gd.best.values == second.gd.best.values);
  CHECK(first.report["loss"].dump() == second.report["loss"].dump());
  CHECK(first.report["metrics"].dump() == second.report["metrics"].dump());
}

TEST_CASE("zero-step run echoes the initialization") {
  json doc = small_custom_config();
  doc["optimizer"]["max_steps"] = 0;
  const ExperimentResult result = run_experiment_core(parse_config(doc));
  CHECK(result.gd.steps_taken == 0);
  // Chord initialization: knot j of particle i sits on the source-to-center line.
  const double com = 2.25;
  for (int i = 0; i < 3; ++i) {
    const double z = result.problem.sources.point(i)[0];
    for (int j = 0; j < 3; ++j) {
      CHECK(result.gd.best.at(i, j, 0) == doctest::Approx(z + (com - z) * j / 2.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("gradcheck harness reports pass and catches corrupted gradients") {
  const json ok = gradcheck_core(3, 999);
  CHECK(ok["pass"].get<bool>());
  CHECK(ok["max_rel_error"].get<double>() <= 1e-6);

  const json bad = gradcheck_core(3, 999, /*corrupt_gradient=*/true);
  CHECK(!bad["pass"].get<bool>());
}

TEST_CASE("numerical failure writes flagged partial outputs") {
  TempDir dir("blobot_test_diverge");
  json doc = small_custom_config();
  doc["epsilon"] = 1e-12;
  doc["optimizer"]["alpha"] = 1e300;
  doc["optimizer"]["max_steps"] = 50;
  CHECK_THROWS_AS(run_experiment(parse_config(doc), dir.path.string(), false), NumericalError);
  REQUIRE(fs::exists(dir.path / "report.json"));
  std::ifstream in(dir.path / "report.json");
  json report;
  in >> report;
  CHECK(report["partial"].get<bool>());
  CHECK(report["numerical_failure"].get<bool>());
}
