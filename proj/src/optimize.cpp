#include "blobot/optimize.hpp"

#include <cmath>
#include <stdexcept>

#include "blobot/gradients.hpp"

namespace blobot {

namespace {

constexpr double kImprovementSlack = 1e-12;

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

TrajectoryField init_straight_lines(const PointCloud& sources, const TargetMeasure& target,
                                    int n_times) {
  if (n_times < 2) throw std::invalid_argument("init_straight_lines: M must be >= 2");
  const std::vector<double> com = target.center_of_mass();
  TrajectoryField traj(sources.n, n_times, sources.dim, 1);
  for (int i = 0; i < sources.n; ++i) {
    auto z = sources.point(i);
    for (int j = 0; j < n_times; ++j) {
      const double t = static_cast<double>(j) / (n_times - 1);
      for (int c = 0; c < sources.dim; ++c) {
        traj.at(i, j, c) = (1.0 - t) * z[c] + t * com[c];
      }
    }
  }
  return traj;
}

TrajectoryField init_acceleration(const PointCloud& sources, const PointCloud& initial_velocities,
                                  const TargetMeasure& target, int n_times) {
  if (n_times < 3) throw std::invalid_argument("init_acceleration: M must be >= 3");
  if (initial_velocities.n != sources.n || initial_velocities.dim != sources.dim) {
    throw std::invalid_argument("init_acceleration: velocity cloud shape mismatch");
  }
  // Position part of the phase-space center of mass.
  const std::vector<double> com = target.center_of_mass();
  const int d = sources.dim;
  TrajectoryField traj(sources.n, n_times, d, 2);
  const double h = traj.timestep();
  for (int i = 0; i < sources.n; ++i) {
    auto z = sources.point(i);
    auto v = initial_velocities.point(i);
    for (int c = 0; c < d; ++c) {
      traj.at(i, 0, c) = z[c];
      traj.at(i, 1, c) = z[c] + h * v[c];
      for (int j = 2; j < n_times; ++j) {
        const double t = static_cast<double>(j - 1) / (n_times - 2);
        traj.at(i, j, c) = (1.0 - t) * traj.at(i, 1, c) + t * com[c];
      }
    }
  }
  return traj;
}

GdResult gd_run(const TrajectoryField& init, const ProblemSpec& spec, const OptimizerConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("gd_run: learning_rate must be positive");
  if (!(cfg.lr_reduce_factor > 0.0 && cfg.lr_reduce_factor < 1.0)) {
    throw std::invalid_argument("gd_run: lr_reduce_factor must lie in (0,1)");
  }
  if (cfg.lr_reduce_patience < 1 || cfg.early_stop_patience < 1) {
    throw std::invalid_argument("gd_run: patience values must be >= 1");
  }

  GdResult result;
  TrajectoryField traj = init;
  GradientField grad;

  double lr = cfg.learning_rate;
  EnergyBreakdown eb = objective_with_gradient(traj, spec, grad);
  result.trace.push_back({0, eb.total(), eb.kinetic_or_cc, eb.potential, eb.nonlocal, lr});
  if (!std::isfinite(eb.total()) || !all_finite(grad.values)) {
    result.best = traj;
    result.numerical_failure = true;
    return result;
  }

  result.best = traj;
  double best_total = eb.total();
  int bad_streak = 0;

  for (long step = 1; step <= cfg.max_steps; ++step) {
    for (size_t idx = 0; idx < traj.values.size(); ++idx) {
      traj.values[idx] -= lr * grad.values[idx];
    }
    eb = objective_with_gradient(traj, spec, grad);
    const double total = eb.total();
    result.trace.push_back({step, total, eb.kinetic_or_cc, eb.potential, eb.nonlocal, lr});
    result.steps_taken = step;

    if (!std::isfinite(total) || !all_finite(grad.values)) {
      result.numerical_failure = true;
      return result;
    }

    if (total < best_total - kImprovementSlack) {
      best_total = total;
      result.best = traj;
      bad_streak = 0;
    } else {
      ++bad_streak;
      if (bad_streak % cfg.lr_reduce_patience == 0) {
        const double reduced = lr * cfg.lr_reduce_factor;
        if (reduced >= cfg.lr_floor) lr = reduced;
      }
      if (bad_streak >= cfg.early_stop_patience) break;
    }
  }
  return result;
}

}  // namespace blobot
