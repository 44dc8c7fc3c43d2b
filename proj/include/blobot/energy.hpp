#pragma once

#include "blobot/problem.hpp"

namespace blobot {

// Loss decomposition at one trajectory field. kinetic_or_cc holds KE in velocity
// mode and the acceleration control cost otherwise.
struct EnergyBreakdown {
  double kinetic_or_cc = 0.0;
  double potential = 0.0;
  double nonlocal = 0.0;
  double total() const { return kinetic_or_cc + potential + nonlocal; }
};

// KE = (M-1)/N * sum_i sum_j |y_{i,j+1} - y_{i,j}|^2, the Riemann sum of the
// squared-speed integral for piecewise-linear paths.
double kinetic_energy(const TrajectoryField& traj);

// PE = 1/(N(M-1)) * sum over all N*M knots of the obstacle penalty. The time sum
// includes the frozen knots, with normalizer M-1.
double potential_energy(const TrajectoryField& traj, const ObstacleSet& obs);

// The terminal penalty without its measure-independent constant. Empirical targets
// require equal counts; Gaussian targets use the exact convolution (variance
// addition) rather than the small-delta approximation. May be negative.
double nonlocal_energy(const PointCloud& terminal, const ProblemSpec& spec);

// nonlocal_energy plus C_{delta,m1}/epsilon: equals (1/eps) |k_delta*mu - k_delta*m1|_{L2}^2,
// hence always >= 0, and 0 for empirical targets iff terminal matches the target as a multiset.
double terminal_penalty_full(const PointCloud& terminal, const ProblemSpec& spec);

// The constant C_{delta,m1} = integral of (K_delta * m1) d m1.
double target_self_interaction(const ProblemSpec& spec);

// CC = (M-1)^3/N * sum of squared second differences (acceleration control).
double control_cost_acceleration(const TrajectoryField& traj);

// Terminal phase points (x_{i,M}, (x_{i,M} - x_{i,M-1})/h) for acceleration control.
PointCloud phase_terminal(const TrajectoryField& traj);

double total_objective(const TrajectoryField& traj, const ProblemSpec& spec);
EnergyBreakdown objective_breakdown(const TrajectoryField& traj, const ProblemSpec& spec);

}  // namespace blobot
