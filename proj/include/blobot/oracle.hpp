#pragma once

#include <span>
#include <vector>

#include "blobot/kernels.hpp"
#include "blobot/problem.hpp"

namespace blobot {

// Perfect matching between equal-count clouds. permutation[i] is the target index
// assigned to source i; mean_cost = (1/N) sum_i |z_i - w_{perm[i]}|^2, directly
// comparable to the kinetic energy of chord trajectories.
struct Assignment {
  std::vector<int> permutation;
  double mean_cost = 0.0;
};

// Minimum-mean-squared-cost matching (Hungarian algorithm, O(N^3)); among
// equal-cost optima returns the lexicographically smallest permutation.
Assignment hungarian_assign(const PointCloud& sources, const PointCloud& targets);

// Exhaustive search over all N! permutations, same tie-break. Guarded to N <= 10.
Assignment brute_force_assign(const PointCloud& sources, const PointCloud& targets);

// Sorted matching, the 1-d optimal transport map.
Assignment monotone_map_1d(std::span<const double> sources, std::span<const double> targets);

// Displacement interpolation for the 1-d uniform example m0 = 1_[0,1], m1 = 2*1_[2,2.5]:
// T(y,t) = (1-t) y + t (y/2 + 2).
double continuum_geodesic(double y, double t);

// (1/eps) |k_delta*mu - k_delta*m1|_{L2}^2 for isotropic Gaussians, via the
// closed-form cross integrals.
double gaussian_penalty_closed_form(std::span<const double> mu_mean, double mu_var,
                                    std::span<const double> m1_mean, double m1_var,
                                    const Mollifier& mollifier, double epsilon);

}  // namespace blobot
