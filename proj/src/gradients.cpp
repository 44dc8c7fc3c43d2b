#include "blobot/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "blobot/parallel.hpp"

namespace blobot {

namespace {

// Self-interaction and target cross terms for the particle rows [row_begin, row_end):
// accumulates the per-point gradient into grad and returns the two partial kernel
// sums (unnormalized self sum, unnormalized cross sum).
std::pair<double, double> nonlocal_rows(const PointCloud& cloud, const ProblemSpec& spec,
                                        PointCloud& grad, int row_begin, int row_end) {
  const Mollifier& kern = spec.mollifier;
  const int n = cloud.n;
  const int dim = cloud.dim;
  const double inv_var = 1.0 / (kern.delta() * kern.delta());
  const double pair_w = 1.0 / (spec.epsilon * n * n);

  double self_sum = 0.0;
  double cross_sum = 0.0;
  const bool empirical = spec.target.kind == TargetMeasure::Kind::kEmpirical;
  const double gvar = empirical ? 0.0 : spec.target.stddev * spec.target.stddev;
  const double gs = gvar + kern.delta() * kern.delta();
  const double gcross_w = 2.0 / (spec.epsilon * n);

  for (int i = row_begin; i < row_end; ++i) {
    auto yi = cloud.point(i);
    auto gi = grad.point(i);
    for (int k = 0; k < n; ++k) {
      auto yk = cloud.point(k);
      double dsq = 0.0;
      for (int c = 0; c < dim; ++c) {
        const double d = yi[c] - yk[c];
        dsq += d * d;
      }
      const double v = kern.value_sq(dsq);
      self_sum += v;
      // d/dy_i of the full double sum picks up this pair twice (as (i,k) and (k,i)),
      // hence the factor 2 relative to the single-term derivative.
      const double scale = -2.0 * pair_w * v * inv_var;
      for (int c = 0; c < dim; ++c) gi[c] += scale * (yi[c] - yk[c]);
    }
    if (empirical) {
      const PointCloud& w = spec.target.points;
      for (int k = 0; k < n; ++k) {
        auto wk = w.point(k);
        double dsq = 0.0;
        for (int c = 0; c < dim; ++c) {
          const double d = yi[c] - wk[c];
          dsq += d * d;
        }
        const double v = kern.value_sq(dsq);
        cross_sum += v;
        const double scale = 2.0 * pair_w * v * inv_var;
        for (int c = 0; c < dim; ++c) gi[c] += scale * (yi[c] - wk[c]);
      }
    } else {
      const double g = gaussian_cross_term(kern, yi, 0.0, spec.target.mean, gvar);
      cross_sum += g;
      const double scale = gcross_w * g / gs;
      for (int c = 0; c < dim; ++c) gi[c] += scale * (yi[c] - spec.target.mean[c]);
    }
  }
  return {self_sum, cross_sum};
}

// Nonlocal energy on a point cloud together with its gradient per point,
// accumulated into grad (same shape as cloud). Returns the energy value.
double nonlocal_with_gradient(const PointCloud& cloud, const ProblemSpec& spec, PointCloud& grad) {
  if (spec.nonlocal_disabled) return 0.0;
  if (cloud.dim != spec.mollifier.dim() || spec.target.dim() != cloud.dim) {
    throw std::invalid_argument("nonlocal gradient: dimension mismatch");
  }
  if (spec.target.kind == TargetMeasure::Kind::kEmpirical && spec.target.points.n != cloud.n) {
    throw std::invalid_argument("nonlocal gradient: empirical target requires equal counts");
  }
  const int n = cloud.n;
  const int workers = std::min(thread_count(), n);

  double self_sum = 0.0;
  double cross_sum = 0.0;
  if (workers <= 1) {
    std::tie(self_sum, cross_sum) = nonlocal_rows(cloud, spec, grad, 0, n);
  } else {
    // Contiguous chunks; each worker owns disjoint gradient rows, partial sums
    // combine in chunk order.
    std::vector<std::pair<double, double>> partial(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const int lo = static_cast<int>(static_cast<long>(n) * w / workers);
      const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
      pool.emplace_back([&, w, lo, hi] { partial[w] = nonlocal_rows(cloud, spec, grad, lo, hi); });
    }
    for (auto& t : pool) t.join();
    for (const auto& [s, c] : partial) {
      self_sum += s;
      cross_sum += c;
    }
  }

  const double nn = static_cast<double>(n) * n;
  const double cross_mean =
      spec.target.kind == TargetMeasure::Kind::kEmpirical ? cross_sum / nn : cross_sum / n;
  return (self_sum / nn - 2.0 * cross_mean) / spec.epsilon;
}

}  // namespace

EnergyBreakdown objective_with_gradient(const TrajectoryField& traj, const ProblemSpec& spec,
                                        GradientField& grad) {
  if ((spec.mode == ControlMode::kVelocity) != (traj.frozen_knots == 1)) {
    throw std::invalid_argument("objective_with_gradient: control modes disagree");
  }
  grad = GradientField(traj);
  EnergyBreakdown out;
  const int n = traj.n_particles;
  const int m = traj.n_times;
  const int dim = traj.dim;

  if (spec.mode == ControlMode::kVelocity) {
    // Kinetic term.
    const double ke_w = static_cast<double>(m - 1) / n;
    double ke = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j + 1 < m; ++j) {
        auto a = traj.knot(i, j);
        auto b = traj.knot(i, j + 1);
        for (int c = 0; c < dim; ++c) {
          const double d = b[c] - a[c];
          ke += d * d;
          grad.at(i, j, c) -= 2.0 * ke_w * d;
          grad.at(i, j + 1, c) += 2.0 * ke_w * d;
        }
      }
    }
    out.kinetic_or_cc = ke * ke_w;

    // Obstacle term.
    if (!spec.obstacles.empty()) {
      const double pe_w = 1.0 / (static_cast<double>(n) * (m - 1));
      double pe = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          auto y = traj.knot(i, j);
          for (const auto& circ : spec.obstacles.circles) {
            double dsq = 0.0;
            for (int c = 0; c < dim; ++c) {
              const double d = y[c] - circ.center[c];
              dsq += d * d;
            }
            const double gap = circ.radius * circ.radius - dsq;
            if (gap > 0.0) {
              pe += gap;
              const double scale = -2.0 * pe_w * spec.obstacles.strength;
              for (int c = 0; c < dim; ++c) grad.at(i, j, c) += scale * (y[c] - circ.center[c]);
            }
          }
        }
      }
      out.potential = pe * pe_w * spec.obstacles.strength;
    }

    // Terminal penalty: gradients land at the terminal knot only.
    PointCloud term = traj.terminal();
    PointCloud term_grad(n, dim);
    out.nonlocal = nonlocal_with_gradient(term, spec, term_grad);
    for (int i = 0; i < n; ++i) {
      auto g = term_grad.point(i);
      for (int c = 0; c < dim; ++c) grad.at(i, m - 1, c) += g[c];
    }
  } else {
    // Control cost from second differences.
    const double m1 = m - 1;
    const double cc_w = m1 * m1 * m1 / n;
    double cc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j + 2 < m; ++j) {
        auto a = traj.knot(i, j);
        auto b = traj.knot(i, j + 1);
        auto e = traj.knot(i, j + 2);
        for (int c = 0; c < dim; ++c) {
          const double dd = a[c] - 2.0 * b[c] + e[c];
          cc += dd * dd;
          const double g = 2.0 * cc_w * dd;
          grad.at(i, j, c) += g;
          grad.at(i, j + 1, c) -= 2.0 * g;
          grad.at(i, j + 2, c) += g;
        }
      }
    }
    out.kinetic_or_cc = cc * cc_w;

    // Phase-space terminal penalty, back-propagated through (x_M, (x_M - x_{M-1})/h).
    PointCloud phase = phase_terminal(traj);
    PointCloud phase_grad(n, 2 * dim);
    out.nonlocal = nonlocal_with_gradient(phase, spec, phase_grad);
    const double inv_h = m1;
    for (int i = 0; i < n; ++i) {
      auto g = phase_grad.point(i);
      for (int c = 0; c < dim; ++c) {
        grad.at(i, m - 1, c) += g[c] + inv_h * g[dim + c];
        grad.at(i, m - 2, c) -= inv_h * g[dim + c];
      }
    }
  }

  // Frozen knots are data, not decision variables.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < traj.frozen_knots; ++j) {
      for (int c = 0; c < dim; ++c) grad.at(i, j, c) = 0.0;
    }
  }
  return out;
}

GradientField objective_gradient(const TrajectoryField& traj, const ProblemSpec& spec) {
  GradientField grad;
  objective_with_gradient(traj, spec, grad);
  return grad;
}

GradientField finite_difference_gradient(const TrajectoryField& traj, const ProblemSpec& spec,
                                         double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be positive");
  GradientField grad(traj);
  TrajectoryField work = traj;
  for (int i = 0; i < traj.n_particles; ++i) {
    for (int j = traj.frozen_knots; j < traj.n_times; ++j) {
      for (int c = 0; c < traj.dim; ++c) {
        const size_t idx = traj.index(i, j, c);
        const double saved = work.values[idx];
        work.values[idx] = saved + step;
        const double fp = total_objective(work, spec);
        work.values[idx] = saved - step;
        const double fm = total_objective(work, spec);
        work.values[idx] = saved;
        grad.values[idx] = (fp - fm) / (2.0 * step);
      }
    }
  }
  return grad;
}

}  // namespace blobot
