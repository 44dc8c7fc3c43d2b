#include "blobot/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace blobot {

namespace {

double dist_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

void check_nonlocal_args(const PointCloud& terminal, const ProblemSpec& spec) {
  if (terminal.dim != spec.mollifier.dim()) {
    throw std::invalid_argument("nonlocal_energy: terminal dimension does not match mollifier");
  }
  if (spec.target.dim() != terminal.dim) {
    throw std::invalid_argument("nonlocal_energy: target dimension does not match terminal points");
  }
  if (spec.target.kind == TargetMeasure::Kind::kEmpirical && spec.target.points.n != terminal.n) {
    throw std::invalid_argument("nonlocal_energy: empirical target requires equal particle counts");
  }
}

// (1/N^2) sum_{i,k} K_delta(a_i - b_k), row-major order over (i,k).
double mean_pairwise_kernel(const Mollifier& kern, const PointCloud& a, const PointCloud& b) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) {
    auto pi = a.point(i);
    for (int k = 0; k < b.n; ++k) s += kern.value_sq(dist_sq(pi, b.point(k)));
  }
  return s / (static_cast<double>(a.n) * b.n);
}

}  // namespace

double kinetic_energy(const TrajectoryField& traj) {
  if (traj.frozen_knots != 1) throw std::invalid_argument("kinetic_energy: velocity mode only");
  double s = 0.0;
  for (int i = 0; i < traj.n_particles; ++i) {
    for (int j = 0; j + 1 < traj.n_times; ++j) {
      s += dist_sq(traj.knot(i, j + 1), traj.knot(i, j));
    }
  }
  return s * (traj.n_times - 1) / traj.n_particles;
}

double potential_energy(const TrajectoryField& traj, const ObstacleSet& obs) {
  if (obs.empty()) return 0.0;
  double s = 0.0;
  for (int i = 0; i < traj.n_particles; ++i) {
    for (int j = 0; j < traj.n_times; ++j) s += obs.penalty(traj.knot(i, j));
  }
  return s / (static_cast<double>(traj.n_particles) * (traj.n_times - 1));
}

double nonlocal_energy(const PointCloud& terminal, const ProblemSpec& spec) {
  if (spec.nonlocal_disabled) return 0.0;
  check_nonlocal_args(terminal, spec);
  const Mollifier& kern = spec.mollifier;
  const double self = mean_pairwise_kernel(kern, terminal, terminal);

  double cross = 0.0;
  if (spec.target.kind == TargetMeasure::Kind::kEmpirical) {
    cross = mean_pairwise_kernel(kern, terminal, spec.target.points);
  } else {
    // K_delta * m1 evaluated at each terminal point: Gaussian of variance sigma^2 + delta^2.
    const double var = spec.target.stddev * spec.target.stddev;
    double s = 0.0;
    for (int i = 0; i < terminal.n; ++i) {
      s += gaussian_cross_term(kern, terminal.point(i), 0.0, spec.target.mean, var);
    }
    cross = s / terminal.n;
  }
  return (self - 2.0 * cross) / spec.epsilon;
}

double target_self_interaction(const ProblemSpec& spec) {
  if (spec.target.kind == TargetMeasure::Kind::kEmpirical) {
    return mean_pairwise_kernel(spec.mollifier, spec.target.points, spec.target.points);
  }
  const double var = spec.target.stddev * spec.target.stddev;
  return gaussian_cross_term(spec.mollifier, spec.target.mean, var, spec.target.mean, var);
}

double terminal_penalty_full(const PointCloud& terminal, const ProblemSpec& spec) {
  if (spec.nonlocal_disabled) return 0.0;
  return nonlocal_energy(terminal, spec) + target_self_interaction(spec) / spec.epsilon;
}

double control_cost_acceleration(const TrajectoryField& traj) {
  if (traj.n_times < 3) throw std::invalid_argument("control_cost_acceleration: M must be >= 3");
  double s = 0.0;
  for (int i = 0; i < traj.n_particles; ++i) {
    for (int j = 0; j + 2 < traj.n_times; ++j) {
      auto a = traj.knot(i, j);
      auto b = traj.knot(i, j + 1);
      auto c = traj.knot(i, j + 2);
      for (int d = 0; d < traj.dim; ++d) {
        const double dd = a[d] - 2.0 * b[d] + c[d];
        s += dd * dd;
      }
    }
  }
  const double m1 = traj.n_times - 1;
  return s * m1 * m1 * m1 / traj.n_particles;
}

PointCloud phase_terminal(const TrajectoryField& traj) {
  const int d = traj.dim;
  const double inv_h = traj.n_times - 1;
  PointCloud out(traj.n_particles, 2 * d);
  for (int i = 0; i < traj.n_particles; ++i) {
    auto last = traj.knot(i, traj.n_times - 1);
    auto prev = traj.knot(i, traj.n_times - 2);
    auto dst = out.point(i);
    for (int c = 0; c < d; ++c) {
      dst[c] = last[c];
      dst[d + c] = (last[c] - prev[c]) * inv_h;
    }
  }
  return out;
}

EnergyBreakdown objective_breakdown(const TrajectoryField& traj, const ProblemSpec& spec) {
  if ((spec.mode == ControlMode::kVelocity) != (traj.frozen_knots == 1)) {
    throw std::invalid_argument("objective: trajectory and spec control modes disagree");
  }
  EnergyBreakdown out;
  if (spec.mode == ControlMode::kVelocity) {
    out.kinetic_or_cc = kinetic_energy(traj);
    out.potential = potential_energy(traj, spec.obstacles);
    out.nonlocal = nonlocal_energy(traj.terminal(), spec);
  } else {
    out.kinetic_or_cc = control_cost_acceleration(traj);
    out.nonlocal = nonlocal_energy(phase_terminal(traj), spec);
  }
  return out;
}

double total_objective(const TrajectoryField& traj, const ProblemSpec& spec) {
  return objective_breakdown(traj, spec).total();
}

}  // namespace blobot
