#pragma once

// Cost model of the recursive GHZ-merging step (t = 3 t1 + t2) and the bottom-up
// dynamic program that mixes it with the Eldredge base protocol.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "powerlawst/core_model.hpp"
#include "powerlawst/eldredge.hpp"
#include "powerlawst/scaling.hpp"

namespace powerlawst {

struct ScalingConstants {
  double gamma = 0.0;
  /// log(4) / log(2d/alpha); only meaningful for d < alpha < 2d.
  std::optional<double> kappa;

  static ScalingConstants of(double alpha, int d) {
    ScalingConstants c;
    c.gamma = 3.0 * std::sqrt(static_cast<double>(d));
    if (alpha > d && alpha < 2.0 * d) c.kappa = std::log(4.0) / std::log(2.0 * d / alpha);
    return c;
  }
};

/// Time for the controlled-phase merge of m^d blocks of edge r1:
/// pi * d^(alpha/2) * (m r1)^alpha / r1^(2d), divided by the coupling prefactor.
inline double merge_time_t2(double r1, double m, double alpha, int d, double prefactor = 1.0) {
  if (!(r1 >= 1.0)) throw DomainError("merge needs r1 >= 1");
  if (!(m >= 1.0)) throw DomainError("merge needs m >= 1");
  return std::numbers::pi * std::pow(static_cast<double>(d), alpha / 2.0) * std::pow(m * r1, alpha) /
         std::pow(r1, 2.0 * d) / prefactor;
}

/// Block-count rule m(r1) used by the asymptotic analysis, with unit proportionality constant
/// unless `constant` says otherwise.
inline double choose_m(double r1, double alpha, int d, double constant = 1.0) {
  if (!(r1 >= 2.0)) throw DomainError("choose_m needs r1 >= 2");
  const double twice_d = 2.0 * d;
  if (alpha < twice_d) return constant * std::pow(r1, twice_d / alpha - 1.0);
  if (alpha == twice_d) {
    const double gamma = ScalingConstants::of(alpha, d).gamma;
    return constant * std::exp(gamma / twice_d * std::sqrt(std::log(r1)));
  }
  return constant * r1;
}

inline ScalingClass classify_tran_asymptotics(double alpha, int d) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (!(alpha > d)) throw DomainError("the recursive merge protocol needs alpha > d");
  const auto k = ScalingConstants::of(alpha, d);
  if (alpha < 2.0 * d) return {ScalingKind::kPolylog, *k.kappa};
  if (alpha == 2.0 * d) return {ScalingKind::kStretchedExponential, 0.0, k.gamma};
  return {ScalingKind::kPower, std::min(alpha - 2.0 * d, 1.0)};
}

/// Which Eldredge time the hybrid compares against.
enum class BaseConvention {
  kGhzCreation,    // one encoding pass
  kStateTransfer,  // encode and decode, 2x the GHZ time
};

inline double base_factor(BaseConvention c) { return c == BaseConvention::kStateTransfer ? 2.0 : 1.0; }

struct HybridOptions {
  BaseConvention base = BaseConvention::kStateTransfer;
  /// Multiplies every merge time t2 (the inverse coupling prefactor).
  double merge_time_scale = 1.0;
};

/// Optimal creation time per edge r; split r1 == 0 means "run Eldredge directly".
struct HybridPlan {
  EldredgeFit base;
  HybridOptions options;
  double alpha = 0.0;
  int d = 0;
  long r_max = 0;
  std::vector<double> best_time;  // indexed by r, entries 0 and 1 unused
  std::vector<double> base_time;
  std::vector<long> best_split;
  std::vector<int> depth;

  [[nodiscard]] double m(long r) const {
    return best_split[r] == 0 ? 1.0 : static_cast<double>(r) / static_cast<double>(best_split[r]);
  }

  /// Smallest r whose optimum uses a merge step; 0 if none up to r_max.
  [[nodiscard]] long crossover() const { return first_depth(1); }

  /// Smallest r whose optimum nests at least `k` merge levels; 0 if none up to r_max.
  [[nodiscard]] long first_depth(int k) const {
    for (long r = 2; r <= r_max; ++r) {
      if (depth[r] >= k) return r;
    }
    return 0;
  }
};

namespace detail {

struct SplitChoice {
  double time;
  long split;
};

// Exhaustive minimisation over r1 in [2, r1_max] of 3 t(r1) + K r^alpha / r1^(2d).
inline SplitChoice best_split_for(double base, double merge_numerator, long r1_max,
                                  const std::vector<double>& best, const std::vector<double>& inv_volume_sq) {
  SplitChoice out{base, 0};
  for (long r1 = 2; r1 <= r1_max; ++r1) {
    const double c = 3.0 * best[r1] + merge_numerator * inv_volume_sq[r1];
    if (c < out.time) {
      out.time = c;
      out.split = r1;
    }
  }
  return out;
}

}  // namespace detail

/// Bottom-up dynamic program over r = 2..r_max:
/// t(r) = min(base(r), min_{2 <= r1 <= r/2} 3 t(r1) + t2(r1, r/r1)).
inline HybridPlan optimize(const EldredgeFit& base, long r_max, double alpha, int d,
                           const HybridOptions& options = {}) {
  if (r_max < 2) throw DomainError("hybrid optimisation needs r_max >= 2");
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");

  HybridPlan plan;
  plan.base = base;
  plan.options = options;
  plan.alpha = alpha;
  plan.d = d;
  plan.r_max = r_max;
  const auto size = static_cast<std::size_t>(r_max + 1);
  plan.best_time.assign(size, 0.0);
  plan.base_time.assign(size, 0.0);
  plan.best_split.assign(size, 0);
  plan.depth.assign(size, 0);

  std::vector<double> inv_volume_sq(size, 0.0);
  for (long r1 = 1; r1 <= r_max; ++r1) inv_volume_sq[r1] = std::pow(static_cast<double>(r1), -2.0 * d);

  const double merge_prefactor =
      std::numbers::pi * std::pow(static_cast<double>(d), alpha / 2.0) * options.merge_time_scale;
  const double factor = base_factor(options.base);

  for (long r = 2; r <= r_max; ++r) {
    const double base_t = factor * eldredge_time(base, r);
    const auto choice = detail::best_split_for(base_t, merge_prefactor * std::pow(static_cast<double>(r), alpha),
                                               r / 2, plan.best_time, inv_volume_sq);
    plan.base_time[r] = base_t;
    plan.best_time[r] = choice.time;
    plan.best_split[r] = choice.split;
    plan.depth[r] = choice.split == 0 ? 0 : plan.depth[choice.split] + 1;
  }
  return plan;
}

/// Optimum at an edge beyond the table, using table entries for every candidate r1.
struct HybridPoint {
  long r = 0;
  double best_time = 0.0;
  double base_time = 0.0;
  long split = 0;
  int depth = 0;
  /// True when the search range was clipped by the table and the optimum sits on that edge.
  bool at_table_edge = false;

  [[nodiscard]] double m() const { return split == 0 ? 1.0 : static_cast<double>(r) / static_cast<double>(split); }
};

inline HybridPoint evaluate_point(const HybridPlan& plan, long r) {
  if (r < 2) throw DomainError("hybrid evaluation needs r >= 2");
  if (r <= plan.r_max) {
    return {r, plan.best_time[r], plan.base_time[r], plan.best_split[r], plan.depth[r], false};
  }
  std::vector<double> inv_volume_sq(static_cast<std::size_t>(plan.r_max + 1), 0.0);
  for (long r1 = 1; r1 <= plan.r_max; ++r1) {
    inv_volume_sq[r1] = std::pow(static_cast<double>(r1), -2.0 * plan.d);
  }
  const double merge_prefactor = std::numbers::pi * std::pow(static_cast<double>(plan.d), plan.alpha / 2.0) *
                                 plan.options.merge_time_scale;
  const double base_t = base_factor(plan.options.base) * eldredge_time(plan.base, r);
  const long r1_max = std::min(r / 2, plan.r_max);
  const auto choice = detail::best_split_for(base_t, merge_prefactor * std::pow(static_cast<double>(r), plan.alpha),
                                             r1_max, plan.best_time, inv_volume_sq);
  HybridPoint p{r, choice.time, base_t, choice.split, 0, false};
  p.depth = choice.split == 0 ? 0 : plan.depth[choice.split] + 1;
  p.at_table_edge = choice.split != 0 && choice.split == plan.r_max && r1_max < r / 2;
  return p;
}

/// Number of merge levels needed to shrink r down to r0 when each level divides the edge
/// by choose_m. For alpha = 3, d = 2 this iterates r -> r^(2/3).
inline int recursion_depth_estimate(double r, double r0, double alpha, int d, double m_constant = 1.0) {
  if (!(r0 >= 2.0)) throw DomainError("recursion depth needs r0 >= 2");
  int depth = 0;
  // Relative slack absorbs rounding in families such as r = r0^(1.5^k).
  const double stop = r0 * (1.0 + 1e-9);
  while (r > stop) {
    const double m = choose_m(r, alpha, d, m_constant);
    if (!(m > 1.0)) throw DomainError("block-count rule does not shrink the edge");
    r /= m;
    if (++depth > 10000) throw DomainError("recursion depth did not converge");
  }
  return depth;
}

}  // namespace powerlawst
