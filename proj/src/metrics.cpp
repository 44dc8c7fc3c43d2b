#include "blobot/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace blobot {

double error_all_times(const TrajectoryField& traj, const ExactMap& exact) {
  if (traj.n_times < 2) throw std::invalid_argument("error_all_times: M must be >= 2");
  double s = 0.0;
  for (int i = 0; i < traj.n_particles; ++i) {
    auto y0 = traj.knot(i, 0);
    for (int j = 1; j < traj.n_times; ++j) {
      const double t = static_cast<double>(j) / (traj.n_times - 1);
      const std::vector<double> ref = exact(y0, t);
      auto y = traj.knot(i, j);
      for (int c = 0; c < traj.dim; ++c) {
        const double d = y[c] - ref[c];
        s += d * d;
      }
    }
  }
  return std::sqrt(s / (static_cast<double>(traj.n_particles) * (traj.n_times - 1)));
}

double error_terminal(const TrajectoryField& traj, const ExactMap& exact) {
  double s = 0.0;
  for (int i = 0; i < traj.n_particles; ++i) {
    const std::vector<double> ref = exact(traj.knot(i, 0), 1.0);
    auto y = traj.knot(i, traj.n_times - 1);
    for (int c = 0; c < traj.dim; ++c) {
      const double d = y[c] - ref[c];
      s += d * d;
    }
  }
  return std::sqrt(s / traj.n_particles);
}

double loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(x);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(points.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace blobot
