#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "blobot/optimize.hpp"
#include "blobot/problem.hpp"

namespace blobot {

// Configuration problem (bad value, unknown key, missing field). `field` is the
// JSON path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// How to materialize a point cloud.
struct CloudSpec {
  enum class Kind { kGrid, kUniformRandom, kPoints, kPhaseGrid };
  Kind kind = Kind::kPoints;
  std::vector<std::array<double, 2>> box;      // per-coordinate range (grid / uniform_random)
  PointCloud points;                           // explicit points
  std::array<double, 2> position_range{0, 1};  // phase_grid (1-d space)
  std::array<double, 2> velocity_range{0, 0};
};

struct TargetCfg {
  bool gaussian = false;
  std::vector<double> mean;  // Gaussian variant
  double stddev = 0.0;
  CloudSpec cloud;  // empirical variant
};

struct AlphaRule {
  enum class Kind { kConstant, kScaleEps, kScaleEpsFloored };
  Kind kind = Kind::kConstant;
  double value = 0.01;  // constant alpha
  double coeff = 0.0;   // alpha = coeff * epsilon
  double floor = 0.0;   // alpha = max(coeff * epsilon, floor)

  double resolve(double epsilon) const;
};

struct LandscapeCfg {
  int grid_size = 201;
  std::array<double, 2> range{-0.5, 2.5};
};

struct ConvergenceCfg {
  std::vector<int> n_values{5, 10, 20, 40, 80, 100};
  long max_steps = 2000000;
};

struct GradcheckCfg {
  int instances = 100;
  std::uint64_t seed = 12345;
};

struct ExperimentConfig {
  std::string experiment = "custom";
  ControlMode mode = ControlMode::kVelocity;
  int n_particles = 0;
  int n_times = 2;
  int dim = 1;  // spatial dimension
  double epsilon = 1.0;
  std::optional<double> delta;    // exactly one of delta / delta_rule_k
  std::optional<double> delta_rule_k;
  CloudSpec source;
  TargetCfg target;
  std::vector<Obstacle> obstacle_circles;
  std::optional<double> obstacle_strength;  // absent: default rule 10/(h*epsilon)
  std::optional<PointCloud> initial_velocities;  // acceleration mode; absent means zero
  AlphaRule alpha;
  OptimizerConfig optimizer;           // learning_rate filled from alpha at resolve time
  std::optional<std::string> exact_map;  // "geodesic"
  bool compare_assignment = false;
  LandscapeCfg landscape;
  ConvergenceCfg convergence;
  GradcheckCfg gradcheck;
  std::string output_dir = "out";
};

// Parses a config document: fills preset defaults for the named experiment, then
// applies the user's keys. Unknown keys are errors.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_file(const std::string& path);

// Everything needed to run: generated clouds, resolved scalars, problem spec.
struct ResolvedProblem {
  PointCloud sources;
  PointCloud initial_velocities;  // acceleration mode only
  ProblemSpec spec;
  OptimizerConfig optimizer;
  double delta = 0.0;
  double alpha = 0.0;
  double c_omega = 0.0;
  int dim_space = 0;
  int n_times = 2;
};

ResolvedProblem resolve_problem(const ExperimentConfig& cfg);

// Fully-resolved echo of the configuration (explicit points, expanded scalars);
// re-running it reproduces the run bitwise.
nlohmann::json resolved_config_json(const ExperimentConfig& cfg, const ResolvedProblem& prob);

}  // namespace blobot
