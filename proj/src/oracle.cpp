#include "blobot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace blobot {

namespace {

std::vector<double> cost_matrix(const PointCloud& sources, const PointCloud& targets) {
  if (sources.n != targets.n) throw std::invalid_argument("assignment: clouds must have equal counts");
  if (sources.dim != targets.dim) throw std::invalid_argument("assignment: dimension mismatch");
  if (sources.n < 1) throw std::invalid_argument("assignment: empty clouds");
  const int n = sources.n;
  std::vector<double> cost(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    auto z = sources.point(i);
    for (int j = 0; j < n; ++j) {
      auto w = targets.point(j);
      double s = 0.0;
      for (int c = 0; c < sources.dim; ++c) {
        const double d = z[c] - w[c];
        s += d * d;
      }
      cost[static_cast<size_t>(i) * n + j] = s;
    }
  }
  return cost;
}

// Hungarian algorithm with potentials on rows `rows` x columns `cols` of the full
// cost matrix. Returns the optimal total cost; if out != nullptr also writes the
// column chosen for each listed row.
double hungarian_core(const std::vector<double>& cost, int n, const std::vector<int>& rows,
                      const std::vector<int>& cols, std::vector<int>* out) {
  const int k = static_cast<int>(rows.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0), minv(k + 1);
  std::vector<int> p(k + 1, 0), way(k + 1, 0);
  auto a = [&](int r, int c) { return cost[static_cast<size_t>(rows[r - 1]) * n + cols[c - 1]]; };

  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  for (int j = 1; j <= k; ++j) {
    total += a(p[j], j);
    if (out) (*out)[p[j] - 1] = cols[j - 1];
  }
  return total;
}

}  // namespace

Assignment hungarian_assign(const PointCloud& sources, const PointCloud& targets) {
  const int n = sources.n;
  const std::vector<double> cost = cost_matrix(sources, targets);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const double opt = hungarian_core(cost, n, all, all, nullptr);
  const double tol = 1e-9 * (1.0 + std::abs(opt));

  // Greedy lexicographic refinement: fix, row by row, the smallest column index
  // that still admits an optimal completion.
  Assignment result;
  result.permutation.assign(n, -1);
  std::vector<int> free_cols = all;
  double prefix = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> tail_rows(all.begin() + i + 1, all.end());
    for (size_t c = 0; c < free_cols.size(); ++c) {
      const int j = free_cols[c];
      const double here = cost[static_cast<size_t>(i) * n + j];
      double completion = 0.0;
      if (!tail_rows.empty()) {
        std::vector<int> rest = free_cols;
        rest.erase(rest.begin() + c);
        completion = hungarian_core(cost, n, tail_rows, rest, nullptr);
      }
      if (prefix + here + completion <= opt + tol) {
        result.permutation[i] = j;
        prefix += here;
        free_cols.erase(free_cols.begin() + c);
        break;
      }
    }
  }
  result.mean_cost = prefix / n;
  return result;
}

Assignment brute_force_assign(const PointCloud& sources, const PointCloud& targets) {
  if (sources.n > 10) throw std::invalid_argument("brute_force_assign: N must be <= 10");
  const int n = sources.n;
  const std::vector<double> cost = cost_matrix(sources, targets);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost[static_cast<size_t>(i) * n + perm[i]];
    if (total < best) {  // strict: keeps the lexicographically first optimum
      best = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best_perm, best / n};
}

Assignment monotone_map_1d(std::span<const double> sources, std::span<const double> targets) {
  if (sources.size() != targets.size()) {
    throw std::invalid_argument("monotone_map_1d: clouds must have equal counts");
  }
  const int n = static_cast<int>(sources.size());
  std::vector<int> src_order(n), tgt_order(n);
  std::iota(src_order.begin(), src_order.end(), 0);
  std::iota(tgt_order.begin(), tgt_order.end(), 0);
  std::stable_sort(src_order.begin(), src_order.end(),
                   [&](int a, int b) { return sources[a] < sources[b]; });
  std::stable_sort(tgt_order.begin(), tgt_order.end(),
                   [&](int a, int b) { return targets[a] < targets[b]; });
  Assignment result;
  result.permutation.assign(n, -1);
  double total = 0.0;
  for (int r = 0; r < n; ++r) {
    const int i = src_order[r];
    const int j = tgt_order[r];
    result.permutation[i] = j;
    const double d = sources[i] - targets[j];
    total += d * d;
  }
  result.mean_cost = total / n;
  return result;
}

double continuum_geodesic(double y, double t) { return (1.0 - t) * y + t * (0.5 * y + 2.0); }

double gaussian_penalty_closed_form(std::span<const double> mu_mean, double mu_var,
                                    std::span<const double> m1_mean, double m1_var,
                                    const Mollifier& mollifier, double epsilon) {
  const double t_mm = gaussian_cross_term(mollifier, mu_mean, mu_var, mu_mean, mu_var);
  const double t_mt = gaussian_cross_term(mollifier, mu_mean, mu_var, m1_mean, m1_var);
  const double t_tt = gaussian_cross_term(mollifier, m1_mean, m1_var, m1_mean, m1_var);
  return (t_mm - 2.0 * t_mt + t_tt) / epsilon;
}

}  // namespace blobot
