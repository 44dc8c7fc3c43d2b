#include "blobot/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace blobot {

TrajectoryField::TrajectoryField(int n, int m, int d, int frozen)
    : n_particles(n), n_times(m), dim(d), frozen_knots(frozen),
      values(static_cast<size_t>(n) * m * d, 0.0) {
  if (n < 1 || d < 1) throw std::invalid_argument("TrajectoryField: N and d must be >= 1");
  if (frozen != 1 && frozen != 2) throw std::invalid_argument("TrajectoryField: frozen_knots must be 1 or 2");
  const int min_times = frozen == 1 ? 2 : 3;
  if (m < min_times) throw std::invalid_argument("TrajectoryField: too few time knots for the control mode");
}

PointCloud TrajectoryField::terminal() const {
  PointCloud out(n_particles, dim);
  for (int i = 0; i < n_particles; ++i) {
    auto src = knot(i, n_times - 1);
    auto dst = out.point(i);
    for (int c = 0; c < dim; ++c) dst[c] = src[c];
  }
  return out;
}

TargetMeasure TargetMeasure::empirical(PointCloud pts) {
  if (pts.n < 1) throw std::invalid_argument("TargetMeasure: empty point cloud");
  TargetMeasure t;
  t.kind = Kind::kEmpirical;
  t.points = std::move(pts);
  return t;
}

TargetMeasure TargetMeasure::gaussian_iso(std::vector<double> mean, double stddev) {
  if (!(stddev > 0.0)) throw std::invalid_argument("TargetMeasure: stddev must be positive");
  if (mean.empty()) throw std::invalid_argument("TargetMeasure: empty mean");
  TargetMeasure t;
  t.kind = Kind::kGaussianIso;
  t.mean = std::move(mean);
  t.stddev = stddev;
  return t;
}

int TargetMeasure::dim() const {
  return kind == Kind::kEmpirical ? points.dim : static_cast<int>(mean.size());
}

std::vector<double> TargetMeasure::center_of_mass() const {
  if (kind == Kind::kGaussianIso) return mean;
  std::vector<double> com(points.dim, 0.0);
  for (int i = 0; i < points.n; ++i) {
    auto p = points.point(i);
    for (int c = 0; c < points.dim; ++c) com[c] += p[c];
  }
  for (double& v : com) v /= points.n;
  return com;
}

double ObstacleSet::penalty(std::span<const double> y) const {
  if (circles.empty() || strength == 0.0) return 0.0;
  double total = 0.0;
  for (const auto& circ : circles) {
    double dsq = 0.0;
    for (size_t c = 0; c < y.size(); ++c) {
      const double d = y[c] - circ.center[c];
      dsq += d * d;
    }
    const double gap = circ.radius * circ.radius - dsq;
    if (gap > 0.0) total += gap;
  }
  return strength * total;
}

double ObstacleSet::penetration_depth(std::span<const double> y) const {
  double worst = 0.0;
  for (const auto& circ : circles) {
    double dsq = 0.0;
    for (size_t c = 0; c < y.size(); ++c) {
      const double d = y[c] - circ.center[c];
      dsq += d * d;
    }
    const double depth = circ.radius - std::sqrt(dsq);
    if (depth > worst) worst = depth;
  }
  return worst;
}

}  // namespace blobot
