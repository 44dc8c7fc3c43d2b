#include "blobot/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blobot {

namespace {

void check_dim(std::span<const double> v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(dim) + ", got " + std::to_string(v.size()));
  }
}

double norm_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

Mollifier::Mollifier(double delta, int dim) : delta_(delta), dim_(dim) {
  if (!(delta > 0.0)) throw std::invalid_argument("Mollifier: delta must be positive");
  if (dim < 1) throw std::invalid_argument("Mollifier: dim must be >= 1");
  const double var = delta * delta;
  inv_two_var_ = 1.0 / (2.0 * var);
  norm_const_ = std::pow(2.0 * std::numbers::pi * var, -0.5 * dim);
}

double Mollifier::value_sq(double nsq) const { return norm_const_ * std::exp(-nsq * inv_two_var_); }

double Mollifier::value(std::span<const double> theta) const {
  check_dim(theta, dim_, "Mollifier::value");
  return value_sq(norm_sq(theta));
}

std::vector<double> Mollifier::gradient(std::span<const double> theta) const {
  check_dim(theta, dim_, "Mollifier::gradient");
  const double k = value_sq(norm_sq(theta));
  const double scale = -k / (delta_ * delta_);
  std::vector<double> g(theta.size());
  for (size_t c = 0; c < theta.size(); ++c) g[c] = scale * theta[c];
  return g;
}

Mollifier Mollifier::sqrt_kernel() const { return Mollifier(delta_ / std::numbers::sqrt2, dim_); }

double gaussian_cross_term(const Mollifier& m, std::span<const double> mean_a, double var_a,
                           std::span<const double> mean_b, double var_b) {
  check_dim(mean_a, m.dim(), "gaussian_cross_term: mean_a");
  check_dim(mean_b, m.dim(), "gaussian_cross_term: mean_b");
  if (var_a < 0.0 || var_b < 0.0) throw std::invalid_argument("gaussian_cross_term: negative variance");
  const double s = var_a + var_b + m.delta() * m.delta();
  double dsq = 0.0;
  for (size_t c = 0; c < mean_a.size(); ++c) {
    const double d = mean_a[c] - mean_b[c];
    dsq += d * d;
  }
  return std::pow(2.0 * std::numbers::pi * s, -0.5 * m.dim()) * std::exp(-dsq / (2.0 * s));
}

double delta_from_n(int n_particles, int dim, double exponent_k) {
  if (n_particles < 1) throw std::invalid_argument("delta_from_n: n_particles must be >= 1");
  if (dim < 1) throw std::invalid_argument("delta_from_n: dim must be >= 1");
  return std::pow(static_cast<double>(n_particles), -exponent_k / dim);
}

}  // namespace blobot
