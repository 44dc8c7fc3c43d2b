#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "blobot/kernels.hpp"
#include "blobot/rng.hpp"

using namespace blobot;

namespace {

// Midpoint quadrature of f over [lo, hi].
template <typename F>
double quadrature_1d(F f, double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(lo + (i + 0.5) * h);
  return s * h;
}

double normal_density(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Independent oracle for the Gaussian cross term in d=1:
// integral over y of (K_delta * mu)(y) d nu(y) as a double quadrature.
double cross_term_quadrature(double delta, double mean_a, double var_a, double mean_b,
                             double var_b) {
  // K_delta * N(mean_a, var_a) is N(mean_a, var_a + delta^2); integrate against nu.
  auto conv = [&](double y) { return normal_density(y, mean_a, var_a + delta * delta); };
  return quadrature_1d([&](double y) { return conv(y) * normal_density(y, mean_b, var_b); },
                       -30.0, 30.0, 60000);
}

}  // namespace

TEST_CASE("kernel value at the origin and basic points") {
  Mollifier m1(1.0, 1);
  CHECK(m1.value(std::vector{0.0}) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(m1.value(std::vector{1.0}) ==
        doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));

  Mollifier m2(0.5, 2);
  CHECK(m2.value(std::vector{0.0, 0.0}) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi * 0.25)).epsilon(1e-12));
}

TEST_CASE("kernel value dimension mismatch is an argument error") {
  Mollifier m(1.0, 2);
  CHECK_THROWS_AS(m.value(std::vector{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(m.gradient(std::vector{1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(Mollifier(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Mollifier(1.0, 0), std::invalid_argument);
}

TEST_CASE("evenness is bitwise") {
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const int d = 1 + static_cast<int>(rng.uniform() * 3);
    Mollifier m(rng.uniform(0.1, 2.0), d);
    std::vector<double> theta(d), neg(d);
    for (int c = 0; c < d; ++c) {
      theta[c] = rng.uniform(-3.0, 3.0);
      neg[c] = -theta[c];
    }
    CHECK(m.value(theta) == m.value(neg));
  }
}

TEST_CASE("kernel value is maximized at the origin and positive") {
  Rng rng(8);
  Mollifier m(0.7, 3);
  const double at0 = m.value(std::vector{0.0, 0.0, 0.0});
  for (int t = 0; t < 100; ++t) {
    std::vector<double> theta{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double v = m.value(theta);
    CHECK(v > 0.0);
    CHECK(v <= at0);
  }
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + static_cast<int>(rng.uniform() * 3);
    Mollifier m(rng.uniform(0.3, 1.5), d);
    std::vector<double> theta(d);
    double norm = 0.0;
    for (int c = 0; c < d; ++c) {
      theta[c] = rng.uniform(-2.0, 2.0);
      norm = std::max(norm, std::abs(theta[c]));
    }
    const double h = 1e-6 * std::max(1.0, norm);
    const auto grad = m.gradient(theta);
    for (int c = 0; c < d; ++c) {
      std::vector<double> p = theta, q = theta;
      p[c] += h;
      q[c] -= h;
      const double fd = (m.value(p) - m.value(q)) / (2.0 * h);
      CHECK(grad[c] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("gradient at the origin is zero and odd elsewhere") {
  Mollifier m(0.8, 2);
  const auto g0 = m.gradient(std::vector{0.0, 0.0});
  CHECK(g0[0] == 0.0);
  CHECK(g0[1] == 0.0);

  const auto gp = m.gradient(std::vector{0.4, -0.3});
  const auto gn = m.gradient(std::vector{-0.4, 0.3});
  CHECK(gp[0] == doctest::Approx(-gn[0]).epsilon(1e-15));
  CHECK(gp[1] == doctest::Approx(-gn[1]).epsilon(1e-15));

  // d=1 spot value: grad K_1(1) = -K_1(1).
  Mollifier m1(1.0, 1);
  CHECK(m1.gradient(std::vector{1.0})[0] ==
        doctest::Approx(-m1.value(std::vector{1.0})).epsilon(1e-12));
}

TEST_CASE("normalization: quadrature over a wide box integrates to one") {
  for (const double delta : {0.3, 1.0, 2.5}) {
    Mollifier m(delta, 1);
    const double mass =
        quadrature_1d([&](double x) { return m.value(std::vector{x}); }, -8.0 * delta, 8.0 * delta,
                      50000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("convolution square root halves the variance") {
  Mollifier m(1.0, 1);
  const Mollifier k = m.sqrt_kernel();
  CHECK(k.delta() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  // k * k = K via the variance-addition identity checked through the cross term:
  // integral of (k*k)(x - y) against a Dirac pair equals K(x - y).
  const double v =
      gaussian_cross_term(k, std::vector{0.7}, 0.0, std::vector{0.0}, k.delta() * k.delta());
  CHECK(v == doctest::Approx(m.value(std::vector{0.7})).epsilon(1e-12));
}

TEST_CASE("gaussian cross term against double quadrature") {
  Mollifier m(1.0, 1);
  const double same = gaussian_cross_term(m, std::vector{0.0}, 1.0, std::vector{0.0}, 1.0);
  CHECK(same == doctest::Approx(cross_term_quadrature(1.0, 0.0, 1.0, 0.0, 1.0)).epsilon(1e-8));
  CHECK(same == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * 3.0)).epsilon(1e-12));

  const double shifted = gaussian_cross_term(m, std::vector{0.0}, 1.0, std::vector{2.0}, 1.0);
  CHECK(shifted == doctest::Approx(cross_term_quadrature(1.0, 0.0, 1.0, 2.0, 1.0)).epsilon(1e-8));
}

TEST_CASE("gaussian cross term Dirac-Dirac reduces to the kernel") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const int d = 1 + static_cast<int>(rng.uniform() * 2);
    Mollifier m(rng.uniform(0.2, 1.5), d);
    std::vector<double> a(d), b(d), diff(d);
    for (int c = 0; c < d; ++c) {
      a[c] = rng.uniform(-2, 2);
      b[c] = rng.uniform(-2, 2);
      diff[c] = a[c] - b[c];
    }
    CHECK(gaussian_cross_term(m, a, 0.0, b, 0.0) == doctest::Approx(m.value(diff)).epsilon(1e-14));
  }
}

TEST_CASE("delta scaling rule") {
  CHECK(delta_from_n(1, 1, 0.5) == 1.0);
  CHECK(delta_from_n(20, 1, 0.99) == doctest::Approx(std::pow(20.0, -0.99)).epsilon(1e-15));
  CHECK(delta_from_n(20, 1, 0.99) == doctest::Approx(0.0515205).epsilon(1e-5));
  CHECK(delta_from_n(225, 2, 0.99) == doctest::Approx(0.0684967).epsilon(1e-5));
}
