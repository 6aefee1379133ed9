#pragma once

// Greedy event-driven schedule of the cascaded-CNOT (incremental Eldredge) GHZ growth,
// plus the affine fit used to extrapolate its time beyond exactly simulated sizes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <thread>
#include <vector>

#include "powerlawst/core_model.hpp"
#include "powerlawst/scaling.hpp"

namespace powerlawst {

/// Angle a target must accrue for exp(-i theta X) to act as a NOT.
inline constexpr double kCnotAngle = std::numbers::pi / 2.0;

struct ScheduleEvent {
  double time = 0.0;
  Site site = 0;
  /// Accrued rotation angle of `site` at completion; equals pi/2 up to rounding.
  double angle = 0.0;
};

struct ScheduleResult {
  Site source = 0;
  double total_time = 0.0;
  std::vector<ScheduleEvent> events;

  /// Completion angle per site (source excluded).
  [[nodiscard]] std::map<Site, double> accumulated_phase_at_end() const {
    std::map<Site, double> out;
    for (const auto& e : events) out[e.site] = e.angle;
    return out;
  }
};

namespace detail {

/// Coupling lookup by per-axis absolute displacement; couplings depend only on it.
class DisplacementTable {
public:
  DisplacementTable(const Lattice& lattice, const CouplingModel& model)
      : dim_(lattice.dimension()), extents_(lattice.extents()), values_(lattice.size(), 0.0) {
    for (Site s = 1; s < lattice.size(); ++s) {
      values_[s] = coupling(model, distance(lattice, 0, s));
    }
  }

  [[nodiscard]] double operator()(const long* a, const long* b) const {
    std::size_t idx = 0;
    for (int k = dim_ - 1; k >= 0; --k) {
      idx = idx * static_cast<std::size_t>(extents_[k]) + static_cast<std::size_t>(std::labs(a[k] - b[k]));
    }
    return values_[idx];
  }

private:
  int dim_;
  std::vector<long> extents_;
  std::vector<double> values_;
};

}  // namespace detail

/// Runs the incremental Eldredge schedule from `source` over every other lattice site.
///
/// Every target accrues angle at the summed coupling rate of the current controls. The
/// target with the least remaining time (ties: lowest site index) completes next and its
/// couplings are added to the remaining targets' rates. O(N^2) overall.
inline ScheduleResult run_schedule(const Lattice& lattice, const CouplingModel& model, Site source) {
  model.validate();
  lattice.check(source);
  const std::size_t n = lattice.size();
  const int d = lattice.dimension();
  const detail::DisplacementTable table(lattice, model);

  ScheduleResult result;
  result.source = source;
  if (n == 1) return result;
  result.events.reserve(n - 1);

  // Structure-of-arrays over the remaining targets; completed entries are swap-removed.
  std::vector<Site> site;
  std::vector<long> coords;
  std::vector<double> accrued, rate;
  site.reserve(n - 1);
  coords.reserve((n - 1) * static_cast<std::size_t>(d));
  accrued.reserve(n - 1);
  rate.reserve(n - 1);

  const Coord src = lattice.coordinates(source);
  for (Site s = 0; s < n; ++s) {
    if (s == source) continue;
    const Coord c = lattice.coordinates(s);
    site.push_back(s);
    coords.insert(coords.end(), c.begin(), c.end());
    accrued.push_back(0.0);
    rate.push_back(table(c.data(), src.data()));
  }

  auto pick = [&](std::size_t& best) {
    double best_t = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < site.size(); ++k) {
      const double t = (kCnotAngle - accrued[k]) / rate[k];
      if (t < best_t || (t == best_t && site[k] < site[best])) {
        best_t = t;
        best = k;
      }
    }
    return best_t;
  };

  std::size_t next = 0;
  double dt = pick(next);
  double now = 0.0;
  std::vector<long> done(static_cast<std::size_t>(d));
  while (!site.empty()) {
    dt = std::max(dt, 0.0);
    now += dt;
    result.events.push_back({now, site[next], accrued[next] + dt * rate[next]});
    std::copy_n(coords.begin() + static_cast<std::ptrdiff_t>(next * d), d, done.begin());

    const std::size_t last = site.size() - 1;
    site[next] = site[last];
    accrued[next] = accrued[last];
    rate[next] = rate[last];
    std::copy_n(coords.begin() + static_cast<std::ptrdiff_t>(last * d), d,
                coords.begin() + static_cast<std::ptrdiff_t>(next * d));
    site.pop_back();
    accrued.pop_back();
    rate.pop_back();
    coords.resize(site.size() * static_cast<std::size_t>(d));

    double best_t = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t k = 0; k < site.size(); ++k) {
      accrued[k] += dt * rate[k];
      rate[k] += table(&coords[k * d], done.data());
      const double t = (kCnotAngle - accrued[k]) / rate[k];
      if (t < best_t || (t == best_t && site[k] < site[best])) {
        best_t = t;
        best = k;
      }
    }
    next = best;
    dt = best_t;
  }
  result.total_time = now;
  return result;
}

/// GHZ-creation time over an r^d hypercube with the source at the corner site.
inline double ghz_time_hypercube(long r, int d, const CouplingModel& model) {
  if (r < 1) throw DomainError("hypercube edge must be positive");
  return run_schedule(Lattice::hypercube(d, r), model, 0).total_time;
}

/// Exact corner-source GHZ times for every edge in [r_lo, r_hi], spread over threads.
inline std::map<long, double> exact_series(long r_lo, long r_hi, int d, const CouplingModel& model,
                                           unsigned threads = 0) {
  if (r_lo < 1 || r_hi < r_lo) throw DomainError("invalid edge range for exact series");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const long count = r_hi - r_lo + 1;
  std::vector<double> times(static_cast<std::size_t>(count));
  auto work = [&](unsigned w) {
    // Largest sizes first so the slowest runs start early.
    for (long k = static_cast<long>(w); k < count; k += static_cast<long>(threads)) {
      const long r = r_hi - k;
      times[static_cast<std::size_t>(r - r_lo)] = ghz_time_hypercube(r, d, model);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  std::map<long, double> out;
  for (long r = r_lo; r <= r_hi; ++r) out[r] = times[static_cast<std::size_t>(r - r_lo)];
  return out;
}

/// Exact GHZ times on small sizes plus an affine extrapolation fitted over [r_lo, r_hi].
struct EldredgeFit {
  std::map<long, double> exact_times;
  double fit_slope = 0.0;
  double fit_intercept = 0.0;
  long r_lo = 0;
  long r_hi = 0;
  double max_relative_residual = 0.0;

  [[nodiscard]] double predict(double r) const { return fit_slope * r + fit_intercept; }
};

inline EldredgeFit fit_eldredge(std::map<long, double> exact_times, long r_lo, long r_hi) {
  std::vector<double> xs, ys;
  for (const auto& [r, t] : exact_times) {
    if (r >= r_lo && r <= r_hi) {
      xs.push_back(static_cast<double>(r));
      ys.push_back(t);
    }
  }
  if (xs.size() < 2) throw DomainError("fit window holds fewer than two exact runs");
  const LineFit line = least_squares(xs, ys);
  EldredgeFit fit;
  fit.exact_times = std::move(exact_times);
  fit.fit_slope = line.slope;
  fit.fit_intercept = line.intercept;
  fit.r_lo = r_lo;
  fit.r_hi = r_hi;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fit.max_relative_residual =
        std::max(fit.max_relative_residual, std::abs(fit.predict(xs[i]) - ys[i]) / ys[i]);
  }
  return fit;
}

/// Exact time when r lies inside the simulated range, affine extrapolation beyond it.
inline double eldredge_time(const EldredgeFit& fit, long r) {
  if (r < 2) throw DomainError("Eldredge time needs r >= 2");
  if (r <= fit.r_hi) {
    const auto it = fit.exact_times.find(r);
    if (it == fit.exact_times.end()) {
      throw DomainError("no exact Eldredge run cached for r=" + std::to_string(r));
    }
    return it->second;
  }
  return fit.predict(static_cast<double>(r));
}

/// Log-log slope of the exact times over the fit window.
inline double fitted_exponent(const EldredgeFit& fit) {
  std::vector<double> xs, ys;
  for (const auto& [r, t] : fit.exact_times) {
    if (r >= fit.r_lo && r <= fit.r_hi) {
      xs.push_back(static_cast<double>(r));
      ys.push_back(t);
    }
  }
  return log_log_slope(xs, ys);
}

/// Asymptotic GHZ/state-transfer time class of the Eldredge protocol.
inline ScalingClass classify_eldredge_asymptotics(double alpha, int d) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
  const double dd = d;
  if (alpha < dd) return {ScalingKind::kConstant};
  if (alpha == dd) return {ScalingKind::kLogarithmic};
  return {ScalingKind::kPower, std::min(alpha - dd, 1.0)};
}

}  // namespace powerlawst
