#pragma once

#include "blobot/energy.hpp"
#include "blobot/problem.hpp"

namespace blobot {

// Partial derivatives of the objective with respect to every trajectory entry.
// Entries at frozen knots are identically zero.
struct GradientField {
  int n_particles = 0;
  int n_times = 0;
  int dim = 0;
  std::vector<double> values;

  GradientField() = default;
  explicit GradientField(const TrajectoryField& traj)
      : n_particles(traj.n_particles), n_times(traj.n_times), dim(traj.dim),
        values(traj.values.size(), 0.0) {}

  size_t index(int i, int j, int c) const {
    return (static_cast<size_t>(i) * n_times + j) * dim + c;
  }
  double at(int i, int j, int c) const { return values[index(i, j, c)]; }
  double& at(int i, int j, int c) { return values[index(i, j, c)]; }
};

// Exact gradient of total_objective over free knots.
GradientField objective_gradient(const TrajectoryField& traj, const ProblemSpec& spec);

// Gradient and loss decomposition in a single pass (shares the pairwise kernel
// evaluations); used by the descent loop.
EnergyBreakdown objective_with_gradient(const TrajectoryField& traj, const ProblemSpec& spec,
                                        GradientField& grad);

// Central-difference oracle over free coordinates.
GradientField finite_difference_gradient(const TrajectoryField& traj, const ProblemSpec& spec,
                                         double step);

}  // namespace blobot
