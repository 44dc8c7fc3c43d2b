#pragma once

#include <span>
#include <vector>

namespace blobot {

// Isotropic Gaussian mollifier K_delta(theta) = (2*pi*delta^2)^(-d/2) * exp(-|theta|^2 / (2*delta^2)).
// The convolution square root k_delta satisfies k_delta * k_delta = K_delta and is
// obtained by halving the variance (see sqrt_kernel()).
class Mollifier {
 public:
  Mollifier() : Mollifier(1.0, 1) {}
  Mollifier(double delta, int dim);

  double delta() const { return delta_; }
  int dim() const { return dim_; }

  // K_delta(theta). Strictly positive, even, maximized at the origin.
  double value(std::span<const double> theta) const;

  // Value as a function of the squared norm |theta|^2 alone.
  double value_sq(double norm_sq) const;

  // grad K_delta(theta) = -(theta / delta^2) * K_delta(theta).
  std::vector<double> gradient(std::span<const double> theta) const;

  // k_delta with k*k = K_delta: the Gaussian of variance delta^2 / 2.
  Mollifier sqrt_kernel() const;

 private:
  double delta_;
  int dim_;
  double inv_two_var_;  // 1 / (2 delta^2)
  double norm_const_;   // (2 pi delta^2)^(-d/2)
};

// Integral of (K_delta * mu) d(nu) for isotropic Gaussians mu = N(mean_a, var_a I),
// nu = N(mean_b, var_b I): the N(0, (var_a + var_b + delta^2) I) density at mean_a - mean_b.
// var = 0 denotes a Dirac mass.
double gaussian_cross_term(const Mollifier& m, std::span<const double> mean_a, double var_a,
                           std::span<const double> mean_b, double var_b);

// Width scaling delta = N^(-k/d).
double delta_from_n(int n_particles, int dim, double exponent_k);

}  // namespace blobot
