#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "blobot/energy.hpp"
#include "blobot/rng.hpp"

using namespace blobot;

namespace {

TrajectoryField field_1d(std::vector<double> knots, int frozen = 1) {
  TrajectoryField traj(1, static_cast<int>(knots.size()), 1, frozen);
  traj.values = std::move(knots);
  return traj;
}

PointCloud cloud_1d(std::vector<double> pts) {
  PointCloud c(static_cast<int>(pts.size()), 1);
  c.x = std::move(pts);
  return c;
}

ProblemSpec empirical_spec_1d(std::vector<double> targets, double epsilon, double delta) {
  ProblemSpec spec;
  spec.epsilon = epsilon;
  spec.mollifier = Mollifier(delta, 1);
  spec.target = TargetMeasure::empirical(cloud_1d(std::move(targets)));
  return spec;
}

}  // namespace

TEST_CASE("kinetic energy on simple paths") {
  CHECK(kinetic_energy(field_1d({0.5, 0.5, 0.5})) == 0.0);
  CHECK(kinetic_energy(field_1d({0.0, 1.0})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kinetic_energy(field_1d({0.0, 0.5, 1.0})) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("kinetic energy Riemann-sum consistency: uniform speed is exact for every M") {
  for (int m = 2; m <= 40; ++m) {
    std::vector<double> knots(m);
    for (int j = 0; j < m; ++j) knots[j] = static_cast<double>(j) / (m - 1);
    CHECK(kinetic_energy(field_1d(std::move(knots))) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("potential energy counts every knot with normalizer M-1") {
  ObstacleSet obs;
  obs.strength = 100.0;
  obs.circles.push_back({{0.0, 0.0}, 0.2});

  TrajectoryField traj(1, 2, 2, 1);  // both knots at the circle center
  CHECK(potential_energy(traj, obs) == doctest::Approx(8.0).epsilon(1e-12));

  // Entirely outside: clamps to zero.
  for (double& v : traj.values) v = 5.0;
  CHECK(potential_energy(traj, obs) == 0.0);

  CHECK(potential_energy(traj, ObstacleSet{}) == 0.0);
}

TEST_CASE("empirical nonlocal energy single particle at its target") {
  ProblemSpec spec = empirical_spec_1d({0.0}, 1.0, 1.0);
  const double k0 = spec.mollifier.value(std::vector{0.0});
  CHECK(nonlocal_energy(cloud_1d({0.0}), spec) == doctest::Approx(-k0).epsilon(1e-14));
}

TEST_CASE("empirical nonlocal energy depends only on the multiset") {
  Rng rng(21);
  ProblemSpec spec = empirical_spec_1d({0.3, -1.0, 0.7, 2.0}, 0.5, 0.4);
  std::vector<double> pts{0.7, 2.0, 0.3, -1.0};  // permuted target multiset
  const double v = nonlocal_energy(cloud_1d(pts), spec);
  std::vector<double> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  do {
    CHECK(nonlocal_energy(cloud_1d(sorted), spec) == doctest::Approx(v).epsilon(1e-13));
  } while (std::next_permutation(sorted.begin(), sorted.end()));
}

TEST_CASE("empirical nonlocal energy requires equal counts") {
  ProblemSpec spec = empirical_spec_1d({0.0, 1.0}, 1.0, 1.0);
  CHECK_THROWS_AS(nonlocal_energy(cloud_1d({0.0}), spec), std::invalid_argument);
}

TEST_CASE("gaussian nonlocal energy closed-form spot value") {
  ProblemSpec spec;
  spec.epsilon = 1.0;
  spec.mollifier = Mollifier(0.5, 1);
  spec.target = TargetMeasure::gaussian_iso({0.0}, 0.5);
  // single point at the mean: K(0) - 2 * N(0, sigma^2 + delta^2) density at 0
  const double expected = 1.0 / std::sqrt(2.0 * std::numbers::pi * 0.25) -
                          2.0 / std::sqrt(2.0 * std::numbers::pi * 0.5);
  CHECK(nonlocal_energy(cloud_1d({0.0}), spec) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(nonlocal_energy(cloud_1d({0.0}), spec) == doctest::Approx(-0.3304946).epsilon(1e-6));
}

TEST_CASE("full terminal penalty is zero on an exact multiset match") {
  ProblemSpec spec = empirical_spec_1d({1.0, 1.5, -0.2}, 0.7, 0.3);
  CHECK(terminal_penalty_full(cloud_1d({1.5, -0.2, 1.0}), spec) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("full terminal penalty spot value and nonnegativity") {
  ProblemSpec spec = empirical_spec_1d({2.0}, 1.0, 1.0);
  const double k0 = spec.mollifier.value(std::vector{0.0});
  const double k2 = spec.mollifier.value(std::vector{2.0});
  CHECK(terminal_penalty_full(cloud_1d({0.0}), spec) ==
        doctest::Approx(2.0 * k0 - 2.0 * k2).epsilon(1e-12));
  CHECK(terminal_penalty_full(cloud_1d({0.0}), spec) == doctest::Approx(0.6899026).epsilon(1e-6));

  Rng rng(33);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * 5);
    std::vector<double> targets(n), terminal(n);
    for (int i = 0; i < n; ++i) {
      targets[i] = rng.uniform(-2, 2);
      terminal[i] = rng.uniform(-2, 2);
    }
    ProblemSpec s = empirical_spec_1d(targets, rng.uniform(0.1, 2.0), rng.uniform(0.1, 1.0));
    CHECK(terminal_penalty_full(cloud_1d(terminal), s) >= -1e-12);
  }
}

TEST_CASE("full penalty minus nonlocal energy is a terminal-independent constant") {
  ProblemSpec spec = empirical_spec_1d({0.1, 0.9, 1.4}, 0.3, 0.25);
  Rng rng(34);
  const double expected = target_self_interaction(spec) / spec.epsilon;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> terminal{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const PointCloud cloud = cloud_1d(terminal);
    CHECK(terminal_penalty_full(cloud, spec) - nonlocal_energy(cloud, spec) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("acceleration control cost") {
  CHECK(control_cost_acceleration(field_1d({0.0, 0.5, 1.0}, 2)) == 0.0);  // affine path
  CHECK(control_cost_acceleration(field_1d({0.0, 0.0, 1.0}, 2)) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(control_cost_acceleration(field_1d({0.0, 0.0, 0.0, 1.0}, 2)) ==
        doctest::Approx(27.0).epsilon(1e-15));
}

TEST_CASE("acceleration control cost Riemann consistency on a parabola") {
  const int m = 101;
  std::vector<double> knots(m);
  for (int j = 0; j < m; ++j) {
    const double t = static_cast<double>(j) / (m - 1);
    knots[j] = 0.5 * t * t;
  }
  const double cc = control_cost_acceleration(field_1d(std::move(knots), 2));
  CHECK(cc == doctest::Approx(static_cast<double>(m - 2) / (m - 1)).epsilon(1e-12));
  CHECK(cc == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("phase terminal maps position and backward-difference velocity") {
  const PointCloud p3 = phase_terminal(field_1d({0.0, 0.5, 1.0}, 2));
  CHECK(p3.point(0)[0] == doctest::Approx(1.0));
  CHECK(p3.point(0)[1] == doctest::Approx(1.0));

  TrajectoryField stationary(1, 3, 1, 2);
  for (double& v : stationary.values) v = 0.7;
  const PointCloud ps = phase_terminal(stationary);
  CHECK(ps.point(0)[0] == doctest::Approx(0.7));
  CHECK(ps.point(0)[1] == 0.0);
}

TEST_CASE("total objective assembles the pieces") {
  ProblemSpec spec = empirical_spec_1d({1.0}, 1.0, 1.0);
  const double k0 = spec.mollifier.value(std::vector{0.0});
  CHECK(total_objective(field_1d({0.0, 1.0}), spec) == doctest::Approx(1.0 - k0).epsilon(1e-12));
  CHECK(total_objective(field_1d({0.0, 1.0}), spec) == doctest::Approx(0.6010577).epsilon(1e-6));
}

TEST_CASE("total objective mode mismatch is an error") {
  ProblemSpec spec = empirical_spec_1d({1.0}, 1.0, 1.0);  // velocity mode
  CHECK_THROWS_AS(total_objective(field_1d({0.0, 0.5, 1.0}, 2), spec), std::invalid_argument);
}

TEST_CASE("permutation invariance of the objective") {
  Rng rng(35);
  const int n = 5, m = 3, d = 2;
  TrajectoryField traj(n, m, d, 1);
  for (double& v : traj.values) v = rng.uniform(-1, 1);
  PointCloud targets(n, d);
  for (double& v : targets.x) v = rng.uniform(-1, 1);

  ProblemSpec spec;
  spec.epsilon = 0.4;
  spec.mollifier = Mollifier(0.3, d);
  spec.target = TargetMeasure::empirical(targets);
  const double base = total_objective(traj, spec);

  // Relabel particles (reverse) and target points (rotate).
  TrajectoryField permuted = traj;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int c = 0; c < d; ++c) permuted.at(i, j, c) = traj.at(n - 1 - i, j, c);
    }
  }
  PointCloud rotated(n, d);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) rotated.point(i)[c] = targets.point((i + 2) % n)[c];
  }
  ProblemSpec spec2 = spec;
  spec2.target = TargetMeasure::empirical(rotated);
  CHECK(total_objective(permuted, spec2) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("joint translation invariance") {
  Rng rng(36);
  const int n = 4, m = 4, d = 2;
  const std::vector<double> shift{1.7, -2.3};

  TrajectoryField traj(n, m, d, 1);
  for (double& v : traj.values) v = rng.uniform(-1, 1);
  PointCloud targets(n, d);
  for (double& v : targets.x) v = rng.uniform(-1, 1);

  ProblemSpec spec;
  spec.epsilon = 0.2;
  spec.mollifier = Mollifier(0.5, d);
  spec.target = TargetMeasure::empirical(targets);
  spec.obstacles.strength = 10.0;
  spec.obstacles.circles.push_back({{0.2, 0.1}, 0.5});

  const double base = total_objective(traj, spec);

  TrajectoryField moved = traj;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int c = 0; c < d; ++c) moved.at(i, j, c) += shift[c];
    }
  }
  ProblemSpec spec2 = spec;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) spec2.target.points.point(i)[c] += shift[c];
  }
  for (int c = 0; c < d; ++c) spec2.obstacles.circles[0].center[c] += shift[c];
  CHECK(total_objective(moved, spec2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("stationary-on-target assembly") {
  // N particles parked on the target multiset: KE = PE = 0, NE = -C/eps.
  ProblemSpec spec = empirical_spec_1d({0.0, 1.0, 2.5}, 0.5, 0.6);
  TrajectoryField traj(3, 4, 1, 1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) traj.at(i, j, 0) = spec.target.points.point(i)[0];
  }
  const EnergyBreakdown eb = objective_breakdown(traj, spec);
  CHECK(eb.kinetic_or_cc == 0.0);
  CHECK(eb.potential == 0.0);
  CHECK(eb.nonlocal ==
        doctest::Approx(-target_self_interaction(spec) / spec.epsilon).epsilon(1e-13));
}
