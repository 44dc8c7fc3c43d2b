#pragma once

#include <span>
#include <vector>

#include "blobot/kernels.hpp"

namespace blobot {

// Flat array of n points in R^dim, row-major.
struct PointCloud {
  int n = 0;
  int dim = 0;
  std::vector<double> x;  // n * dim entries

  PointCloud() = default;
  PointCloud(int n_, int dim_) : n(n_), dim(dim_), x(static_cast<size_t>(n_) * dim_, 0.0) {}

  std::span<const double> point(int i) const { return {x.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)}; }
  std::span<double> point(int i) { return {x.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)}; }
};

// The decision variable: N particle trajectories sampled at M uniform time knots in R^d.
// The leading frozen_knots columns are initial data and never move under optimization
// (one knot for velocity control, two for acceleration control).
struct TrajectoryField {
  int n_particles = 0;
  int n_times = 0;
  int dim = 0;
  int frozen_knots = 1;
  std::vector<double> values;  // index (i * n_times + j) * dim + c

  TrajectoryField() = default;
  TrajectoryField(int n, int m, int d, int frozen);

  double timestep() const { return 1.0 / (n_times - 1); }

  size_t index(int i, int j, int c) const {
    return (static_cast<size_t>(i) * n_times + j) * dim + c;
  }
  double at(int i, int j, int c) const { return values[index(i, j, c)]; }
  double& at(int i, int j, int c) { return values[index(i, j, c)]; }
  std::span<const double> knot(int i, int j) const {
    return {values.data() + index(i, j, 0), static_cast<size_t>(dim)};
  }
  std::span<double> knot(int i, int j) {
    return {values.data() + index(i, j, 0), static_cast<size_t>(dim)};
  }

  // Terminal knots of all particles as a point cloud.
  PointCloud terminal() const;
};

// Terminal target measure m1: an equal-weight point cloud or an isotropic Gaussian.
struct TargetMeasure {
  enum class Kind { kEmpirical, kGaussianIso };

  Kind kind = Kind::kEmpirical;
  PointCloud points;         // empirical variant
  std::vector<double> mean;  // Gaussian variant
  double stddev = 0.0;

  static TargetMeasure empirical(PointCloud pts);
  static TargetMeasure gaussian_iso(std::vector<double> mean, double stddev);

  int dim() const;
  std::vector<double> center_of_mass() const;
};

// Union of circular (spherical) obstacles with a quadratic hinge penalty
// L(y) = strength * sum_k max{r_k^2 - |y - c_k|^2, 0}.
struct Obstacle {
  std::vector<double> center;
  double radius = 0.0;
};

struct ObstacleSet {
  std::vector<Obstacle> circles;
  double strength = 0.0;

  bool empty() const { return circles.empty() || strength == 0.0; }
  double penalty(std::span<const double> y) const;
  // Largest positive r_k - dist(y, c_k) over circles; <= 0 outside all of them.
  double penetration_depth(std::span<const double> y) const;
};

enum class ControlMode { kVelocity, kAcceleration };

struct ProblemSpec {
  ControlMode mode = ControlMode::kVelocity;
  double epsilon = 1.0;
  Mollifier mollifier;  // dim = d in velocity mode, 2 * d_space in acceleration mode
  TargetMeasure target;
  ObstacleSet obstacles;
  bool nonlocal_disabled = false;  // test hook: drop the terminal penalty entirely

  int frozen_knots() const { return mode == ControlMode::kVelocity ? 1 : 2; }
};

}  // namespace blobot
