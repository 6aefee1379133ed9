#pragma once

// Crosstalk budget between same-color blocks, required color counts and echo pulse counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "powerlawst/core_model.hpp"
#include "powerlawst/scaling.hpp"
#include "powerlawst/tran_hybrid.hpp"

namespace powerlawst {

/// published: eps(L) carries a factor n and R^alpha gives n^(alpha/d - 1) overall.
/// draft: no factor n, so colors enter as n^(alpha/d).
enum class Convention { kPublished, kDraft };

enum class NormModel {
  kLatticeSum,       // exact super-lattice sum truncated at the region radius
  kClosedFormBound,  // c L^(2d) / R^alpha with c the untruncated lattice constant
};

enum class LevelSchedule {
  kAuto,               // regime default for the chosen convention
  kDoublyExponential,  // L_{i+1} = L_i^(2d/alpha)
  kGeometric,          // L_{i+1} = factor * L_i
  kSquaring,           // L_{i+1} = L_i^2
};

inline std::string to_string(Convention c) { return c == Convention::kPublished ? "published" : "draft"; }

inline std::string to_string(LevelSchedule s) {
  switch (s) {
    case LevelSchedule::kAuto: return "auto";
    case LevelSchedule::kDoublyExponential: return "doubly_exponential";
    case LevelSchedule::kGeometric: return "geometric";
    case LevelSchedule::kSquaring: return "squaring";
  }
  return "?";
}

inline double pair_interaction_bound(double L, double dist, double alpha, int d) {
  if (!(L >= 1.0)) throw DomainError("block length must be >= 1");
  if (!(dist >= L)) throw DomainError("blocks closer than their edge length overlap");
  return std::pow(L, 2.0 * d) / std::pow(dist, alpha);
}

/// Cumulative sums of |k|^-alpha over nonzero k in Z^d with |k| <= K.
///
/// Exact up to a table radius, with a continuum tail beyond it.
class LatticeShellSum {
public:
  LatticeShellSum(double alpha, int d) : alpha_(alpha), d_(d) {
    if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    radius_ = d == 1 ? (1L << 16) : d == 2 ? 1024 : 128;
    if (d == 1) {
      // cum_[k] = sum over 1 <= |j| <= k
      cum_.assign(static_cast<std::size_t>(radius_) + 1, 0.0);
      for (long k = 1; k <= radius_; ++k) {
        cum_[k] = cum_[k - 1] + 2.0 * std::pow(static_cast<double>(k), -alpha);
      }
      return;
    }
    // Indexed by squared norm.
    const long smax = radius_ * radius_;
    std::vector<std::uint32_t> count(static_cast<std::size_t>(smax) + 1, 0);
    const long zr = d == 3 ? radius_ : 0;
    for (long x = -radius_; x <= radius_; ++x) {
      for (long y = -radius_; y <= radius_; ++y) {
        for (long z = -zr; z <= zr; ++z) {
          const long s = x * x + y * y + z * z;
          if (s <= smax) ++count[s];
        }
      }
    }
    cum_.assign(count.size(), 0.0);
    for (long s = 1; s <= smax; ++s) {
      cum_[s] = cum_[s - 1] + static_cast<double>(count[s]) * std::pow(static_cast<double>(s), -alpha / 2.0);
    }
  }

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] int dimension() const { return d_; }
  [[nodiscard]] long table_radius() const { return radius_; }
  [[nodiscard]] bool convergent() const { return alpha_ > d_; }

  /// Sum over 0 < |k| <= K.
  [[nodiscard]] double partial(double K) const {
    if (!(K >= 1.0)) return 0.0;
    const double r = static_cast<double>(radius_);
    if (K <= r) {
      if (d_ == 1) return cum_[static_cast<std::size_t>(std::floor(K * (1.0 + 1e-12)))];
      return cum_[static_cast<std::size_t>(std::floor(K * K * (1.0 + 1e-12)))];
    }
    return cum_.back() + tail(r, K);
  }

  /// Sum over all nonzero k; infinite when alpha <= d.
  [[nodiscard]] double total() const {
    if (!convergent()) return std::numeric_limits<double>::infinity();
    return partial(static_cast<double>(radius_)) + tail(static_cast<double>(radius_), std::numeric_limits<double>::infinity());
  }

  /// Shared, lazily built instance per (alpha, d).
  static const LatticeShellSum& cached(double alpha, int d) {
    static std::mutex mu;
    static std::map<std::pair<double, int>, std::unique_ptr<LatticeShellSum>> cache;
    const std::lock_guard lock(mu);
    auto& slot = cache[{alpha, d}];
    if (!slot) slot = std::make_unique<LatticeShellSum>(alpha, d);
    return *slot;
  }

private:
  // Continuum estimate of the sum over a < |k| <= b. In 1D the midpoint shift makes it second order.
  [[nodiscard]] double tail(double a, double b) const {
    const double surface = d_ == 1 ? 2.0 : d_ == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
    if (d_ == 1) {
      a += 0.5;
      if (std::isfinite(b)) b = std::floor(b) + 0.5;
    }
    const double p = d_ - alpha_;
    if (p == 0.0) return surface * std::log(b / a);
    const double hi = std::isfinite(b) ? std::pow(b, p) : (p < 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return surface * (hi - std::pow(a, p)) / p;
  }

  double alpha_;
  int d_;
  long radius_ = 0;
  std::vector<double> cum_;
};

struct CrosstalkNorm {
  /// L^(2d)/R^alpha times the lattice sum over same-color offsets within radius r.
  double value = 0.0;
  /// c L^(2d)/R^alpha with c the untruncated lattice constant.
  double closed_form_bound = 0.0;
  double bound_constant = 0.0;
  /// alpha <= d: the sum grows without bound in r and `value` is the truncated sum.
  bool divergent = false;
};

/// Crosstalk norm on one block from all same-color blocks, which sit on a super-lattice of
/// spacing R. Offsets beyond radius r lie outside the region; r < R gives zero.
inline CrosstalkNorm crosstalk_norm(double L, double R, double r, double alpha, int d) {
  if (!(L >= 1.0)) throw DomainError("block length must be >= 1");
  if (!(R >= L)) throw DomainError("same-color spacing R must be >= L");
  const auto& sums = LatticeShellSum::cached(alpha, d);
  const double unit = std::pow(L, 2.0 * d) / std::pow(R, alpha);
  CrosstalkNorm out;
  out.value = unit * sums.partial(r / R);
  out.divergent = !sums.convergent();
  out.bound_constant = sums.total();
  out.closed_form_bound = out.bound_constant * unit;
  return out;
}

/// GHZ-creation time of a level of edge L, with unit constant.
inline double t_ghz(double L, double alpha, int d) { return classify_tran_asymptotics(alpha, d).evaluate(L); }

/// Error contributed by one level of edge L with n colors and R = n^(1/d) L.
inline double eps_level(double L, double n, double r, double alpha, int d, Convention convention,
                        NormModel model = NormModel::kLatticeSum) {
  if (!(n >= 1.0)) throw DomainError("need at least one color");
  const double R = std::pow(n, 1.0 / d) * L;
  const auto norm = crosstalk_norm(L, R, r, alpha, d);
  const double h = model == NormModel::kLatticeSum ? norm.value : norm.closed_form_bound;
  const double colors = convention == Convention::kPublished ? n : 1.0;
  return colors * t_ghz(L, alpha, d) * h;
}

struct CrosstalkOptions {
  NormModel norm = NormModel::kLatticeSum;
  LevelSchedule schedule = LevelSchedule::kAuto;
  /// Growth factor of geometric schedules.
  double geometric_factor = 2.0;
};

inline LevelSchedule resolve_schedule(double alpha, int d, Convention convention, LevelSchedule requested) {
  if (requested != LevelSchedule::kAuto) return requested;
  if (alpha < 2.0 * d) return LevelSchedule::kDoublyExponential;
  if (alpha == 2.0 * d) return LevelSchedule::kGeometric;
  return convention == Convention::kPublished ? LevelSchedule::kGeometric : LevelSchedule::kSquaring;
}

/// Level edges from r0 up to (and ending at) r.
inline std::vector<double> level_lengths(double r, double r0, double alpha, int d, LevelSchedule schedule,
                                         double geometric_factor = 2.0) {
  if (!(r0 >= 2.0) || !(r > r0)) throw DomainError("level schedule needs 2 <= r0 < r");
  std::vector<double> out;
  double L = r0;
  while (L < r) {
    out.push_back(L);
    switch (schedule) {
      case LevelSchedule::kDoublyExponential: {
        if (!(alpha < 2.0 * d)) throw DomainError("doubly-exponential levels need alpha < 2d");
        L = std::pow(L, 2.0 * d / alpha);
        break;
      }
      case LevelSchedule::kGeometric:
        if (!(geometric_factor > 1.0)) throw DomainError("geometric factor must exceed 1");
        L *= geometric_factor;
        break;
      case LevelSchedule::kSquaring: L *= L; break;
      case LevelSchedule::kAuto: throw DomainError("level schedule must be resolved");
    }
  }
  out.push_back(r);
  return out;
}

struct CrosstalkBudget {
  Convention convention = Convention::kPublished;
  LevelSchedule schedule = LevelSchedule::kAuto;
  double n = 1.0;
  std::vector<std::pair<double, double>> per_level;  // (L, eps(L))
  double total = 0.0;
  /// Index of the last level.
  int i_max = 0;
  /// Closed-form bound of the regime with unit constants.
  double analytic_bound = 0.0;
  bool divergent = false;
};

/// Closed-form total of the regime, constants set to 1.
inline double analytic_crosstalk_bound(double r, double n, double alpha, int d, Convention convention) {
  const double twice_d = 2.0 * d;
  const double lr = std::log(r);
  if (convention == Convention::kPublished) {
    const double colors = std::pow(n, alpha / d - 1.0);
    if (alpha < twice_d) {
      const double kappa = *ScalingConstants::of(alpha, d).kappa;
      return std::log(lr) * std::pow(lr, kappa) * std::pow(r, twice_d - alpha) / colors;
    }
    if (alpha == twice_d) return lr * std::exp(ScalingConstants::of(alpha, d).gamma * std::sqrt(lr)) / n;
    return lr / colors;
  }
  const double colors = std::pow(n, alpha / d);
  if (alpha < twice_d) {
    return std::pow(lr, *ScalingConstants::of(alpha, d).kappa) * std::pow(r, twice_d - alpha) / colors;
  }
  if (alpha == twice_d) return std::pow(r, twice_d - alpha + 1.0) / colors;
  return lr / colors;
}

inline CrosstalkBudget total_crosstalk(double r, double r0, double n, double alpha, int d, Convention convention,
                                       const CrosstalkOptions& options = {}) {
  if (!(alpha > d)) throw DomainError("crosstalk budget needs alpha > d");
  if (!(n >= 1.0)) throw DomainError("need at least one color");
  CrosstalkBudget b;
  b.convention = convention;
  b.schedule = resolve_schedule(alpha, d, convention, options.schedule);
  b.n = n;
  for (double L : level_lengths(r, r0, alpha, d, b.schedule, options.geometric_factor)) {
    const double e = eps_level(L, n, r, alpha, d, convention, options.norm);
    b.per_level.emplace_back(L, e);
    b.total += e;
  }
  b.i_max = static_cast<int>(b.per_level.size()) - 1;
  b.analytic_bound = analytic_crosstalk_bound(r, n, alpha, d, convention);
  return b;
}

/// Growth class of the required color count for the regime.
inline ScalingClass analytic_color_class(double alpha, int d, Convention convention) {
  const double dd = d;
  if (!(alpha > dd)) throw DomainError("color count needs alpha > d");
  if (convention == Convention::kPublished) {
    if (alpha < 2.0 * dd) return {ScalingKind::kPower, dd * (2.0 * dd - alpha) / (alpha - dd)};
    if (alpha == 2.0 * dd) return {ScalingKind::kStretchedExponential, 0.0, ScalingConstants::of(alpha, d).gamma};
    return {ScalingKind::kPolylog, dd / (alpha - dd)};
  }
  if (alpha < 2.0 * dd) return {ScalingKind::kPower, dd * (2.0 * dd - alpha) / alpha};
  if (alpha == 2.0 * dd) return {ScalingKind::kPower, dd / alpha};
  return {ScalingKind::kPolylog, dd / alpha};
}

struct ColorRequirement {
  std::uint64_t n = 1;
  double total_at_n = 0.0;
  ScalingClass analytic;
  /// The search hit its 2^62 ceiling without reaching the target.
  bool saturated = false;
};

/// Smallest n whose total crosstalk is at most eps_target. The total is non-increasing in n.
inline ColorRequirement colors_required(double r, double r0, double eps_target, double alpha, int d,
                                        Convention convention, const CrosstalkOptions& options = {}) {
  if (!(eps_target > 0.0)) throw DomainError("target error must be positive");
  ColorRequirement out;
  out.analytic = analytic_color_class(alpha, d, convention);
  auto total = [&](std::uint64_t n) {
    return total_crosstalk(r, r0, static_cast<double>(n), alpha, d, convention, options).total;
  };
  constexpr std::uint64_t kCeiling = std::uint64_t{1} << 62;
  std::uint64_t hi = 1;
  double t_hi = total(hi);
  while (t_hi > eps_target) {
    if (hi >= kCeiling) {
      out.n = hi;
      out.total_at_n = t_hi;
      out.saturated = true;
      return out;
    }
    hi *= 2;
    t_hi = total(hi);
  }
  std::uint64_t lo = hi / 2;  // total(lo) > eps_target unless hi == 1
  if (hi == 1) lo = 0;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const double t = total(mid);
    if (t <= eps_target) {
      hi = mid;
      t_hi = t;
    } else {
      lo = mid;
    }
  }
  out.n = hi;
  out.total_at_n = t_hi;
  return out;
}

struct PulseCount {
  /// Entry i - 1 is color i's pulse count.
  std::vector<std::uint64_t> per_color;
  /// Distinct pulse instants across all colors.
  std::uint64_t total = 0;
  /// Sum of per_color.
  std::uint64_t sum_over_colors = 0;
};

/// Colors 1 and 2 need 0 and 2 pulses, color i >= 3 needs 2^(i-1); the last color pulses at
/// every instant any color does, so the distinct total is 2^(n-1).
inline PulseCount pulse_count(int n) {
  if (n < 1) throw DomainError("need at least one color");
  if (n > 63) throw DomainError("pulse counts overflow 64 bits beyond 63 colors");
  PulseCount p;
  for (int i = 1; i <= n; ++i) {
    const std::uint64_t c = i == 1 ? 0 : i == 2 ? 2 : (std::uint64_t{1} << (i - 1));
    p.per_color.push_back(c);
    p.sum_over_colors += c;
  }
  p.total = n == 1 ? 0 : (std::uint64_t{1} << (n - 1));
  return p;
}

/// 2^(colors - 1) for a real-valued color count, as in estimates with n = m^2/2.
inline double pulse_total_estimate(double colors) { return std::exp2(colors - 1.0); }

}  // namespace powerlawst
