#pragma once

#include <cstdint>
#include <vector>

#include "blobot/energy.hpp"
#include "blobot/problem.hpp"

namespace blobot {

struct OptimizerConfig {
  double learning_rate = 0.01;
  long max_steps = 1000;
  double lr_reduce_factor = 0.2;
  int lr_reduce_patience = 2;
  double lr_floor = 1e-8;
  int early_stop_patience = 5;
  std::uint64_t seed = 0;
};

struct LossRecord {
  long iteration = 0;
  double total = 0.0;
  double kinetic_or_cc = 0.0;
  double potential = 0.0;
  double nonlocal = 0.0;
  double learning_rate = 0.0;
};

using LossTrace = std::vector<LossRecord>;

struct GdResult {
  TrajectoryField best;      // iterate with the lowest recorded total loss
  LossTrace trace;           // initial state plus one record per completed step
  bool numerical_failure = false;  // loss or gradient became non-finite; best/trace
                                   // hold the last finite state
  long steps_taken = 0;
};

// Straight-line initialization: chords from each source point to the target's
// center of mass.
TrajectoryField init_straight_lines(const PointCloud& sources, const TargetMeasure& target,
                                    int n_times);

// Acceleration-control initialization: first two knots encode position and initial
// velocity, the rest interpolate linearly to the target's position center of mass.
TrajectoryField init_acceleration(const PointCloud& sources, const PointCloud& initial_velocities,
                                  const TargetMeasure& target, int n_times);

// Plain gradient descent with plateau learning-rate reduction and early stopping.
// A step whose total fails to improve the best seen by more than 1e-12 counts
// against both patience budgets; the reduction is skipped once the reduced rate
// would fall below lr_floor.
GdResult gd_run(const TrajectoryField& init, const ProblemSpec& spec, const OptimizerConfig& cfg);

}  // namespace blobot
