#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

/// Euclidean distance matrix for the row-major (axis 0 fastest) site numbering.
inline std::vector<std::vector<double>> distances(const std::vector<long>& extents) {
  std::vector<std::vector<long>> coords;
  long total = 1;
  for (long e : extents) total *= e;
  for (long s = 0; s < total; ++s) {
    std::vector<long> c;
    long rest = s;
    for (long e : extents) {
      c.push_back(rest % e);
      rest /= e;
    }
    coords.push_back(c);
  }
  std::vector<std::vector<double>> d(coords.size(), std::vector<double>(coords.size(), 0.0));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = 0; j < coords.size(); ++j) {
      double sq = 0;
      for (std::size_t a = 0; a < extents.size(); ++a) sq += double(coords[i][a] - coords[j][a]) * double(coords[i][a] - coords[j][a]);
      d[i][j] = std::sqrt(sq);
    }
  }
  return d;
}

/// Fixed-step integration of the cascade: every step each target gains dt * (sum of couplings to
/// current controls); targets past pi/2 become controls at the end of the step.
inline double integrate_cascade(const std::vector<std::vector<double>>& h, std::size_t source, double dt = 1e-5) {
  const std::size_t n = h.size();
  std::vector<bool> control(n, false);
  std::vector<double> angle(n, 0.0), rate(n, 0.0);
  control[source] = true;
  for (std::size_t j = 0; j < n; ++j) rate[j] = j == source ? 0.0 : h[source][j];
  std::size_t remaining = n - 1;
  long steps = 0;
  while (remaining > 0) {
    ++steps;
    std::vector<std::size_t> finished;
    for (std::size_t j = 0; j < n; ++j) {
      if (control[j]) continue;
      angle[j] += dt * rate[j];
      if (angle[j] >= std::numbers::pi / 2) finished.push_back(j);
    }
    for (std::size_t f : finished) {
      control[f] = true;
      --remaining;
      for (std::size_t j = 0; j < n; ++j) {
        if (!control[j]) rate[j] += h[f][j];
      }
    }
  }
  return static_cast<double>(steps) * dt;
}

/// Sum over nonzero k in Z^d with |k| R <= r of L^(2d) / (|k| R)^alpha, by enumeration.
inline double same_color_sum(double L, double R, double r, double alpha, int d) {
  const long K = static_cast<long>(std::floor(r / R + 1e-9));
  double s = 0.0;
  const long kz = d == 3 ? K : 0, ky = d >= 2 ? K : 0;
  for (long x = -K; x <= K; ++x) {
    for (long y = -ky; y <= ky; ++y) {
      for (long z = -kz; z <= kz; ++z) {
        const double sq = double(x * x + y * y + z * z);
        if (sq == 0.0) continue;
        const double dist = std::sqrt(sq) * R;
        if (dist > r * (1 + 1e-12)) continue;
        s += std::pow(L, 2.0 * d) / std::pow(dist, alpha);
      }
    }
  }
  return s;
}

/// Cheapest merge chain r = c0 > c1 > ... > ck (c_{i+1} <= c_i / 2, c_k >= 2), each level costing
/// 3x its child plus pi d^(alpha/2) c_i^alpha / c_{i+1}^(2d). Explicit depth-first enumeration.
inline double best_chain_cost(long r, double alpha, int d, const std::function<double(long)>& base) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(long, double, double)> walk = [&](long c, double weight, double acc) {
    best = std::min(best, acc + weight * base(c));
    for (long c1 = 2; c1 <= c / 2; ++c1) {
      const double t2 = std::numbers::pi * std::pow(double(d), alpha / 2) * std::pow(double(c), alpha) /
                        std::pow(double(c1), 2.0 * d);
      walk(c1, 3 * weight, acc + weight * t2);
    }
  };
  walk(r, 1.0, 0.0);
  return best;
}

}  // namespace oracle
