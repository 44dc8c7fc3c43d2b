#pragma once

#include <functional>
#include <span>
#include <vector>

#include "blobot/problem.hpp"

namespace blobot {

// Exact reference trajectory: position at time t of the particle started at y.
using ExactMap = std::function<std::vector<double>(std::span<const double> y, double t)>;

// RMS deviation from the exact map over all knots j = 2..M (the initial knot is
// exact by construction): sqrt( 1/(N(M-1)) sum_{i,j>=2} |y_{i,j} - T(y_{i,1}, t_j)|^2 ).
double error_all_times(const TrajectoryField& traj, const ExactMap& exact);

// RMS deviation at t = 1 only.
double error_terminal(const TrajectoryField& traj, const ExactMap& exact);

// Least-squares slope of log y against log x. All coordinates must be positive.
double loglog_slope(std::span<const std::pair<double, double>> points);

}  // namespace blobot
