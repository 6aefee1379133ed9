#pragma once

// Spin-echo schedules: control/target refocusing, per-target pulse timing and the
// n-color square-wave sign sequences, with exact accumulated-coupling bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "powerlawst/core_model.hpp"

namespace powerlawst {

struct PulseSequence {
  double T = 0.0;
  std::vector<double> durations;
  /// signs[c][k]: sign of color c (0-based) during segment k.
  std::vector<std::vector<int>> signs;
  /// Sign changes per color, counting the return to + after T.
  std::vector<std::uint64_t> pulses_of_color;
  /// Instants in (0, T] at which at least one color flips.
  std::uint64_t total_pulse_instants = 0;

  [[nodiscard]] int num_colors() const { return static_cast<int>(signs.size()); }
  [[nodiscard]] std::size_t num_segments() const { return durations.size(); }

  /// Duration-weighted inner product of two sign rows.
  [[nodiscard]] double overlap(int c1, int c2) const {
    double s = 0.0;
    for (std::size_t k = 0; k < durations.size(); ++k) s += signs[c1][k] * signs[c2][k] * durations[k];
    return s;
  }
};

inline constexpr int kMaxWalshColors = 20;

/// Square-wave sign rows over 2^(n-1) equal segments. Color 1 is constant; color i >= 2
/// alternates in blocks of 2^(n-i) segments starting with +.
inline PulseSequence walsh_sequence(int n, double T) {
  if (n < 1) throw DomainError("need at least one color");
  if (n > kMaxWalshColors) throw DomainError("walsh sequence limited to 20 colors");
  if (!(T > 0.0)) throw DomainError("total time must be positive");
  PulseSequence seq;
  seq.T = T;
  const std::size_t segments = std::size_t{1} << (n - 1);
  seq.durations.assign(segments, T / static_cast<double>(segments));
  seq.signs.assign(static_cast<std::size_t>(n), std::vector<int>(segments, 1));
  for (int i = 2; i <= n; ++i) {
    const std::size_t block = std::size_t{1} << (n - i);
    for (std::size_t k = 0; k < segments; ++k) seq.signs[i - 1][k] = (k / block) % 2 == 0 ? 1 : -1;
  }
  std::vector<bool> flips_at(segments, false);  // boundary after segment k
  for (const auto& row : seq.signs) {
    std::uint64_t count = 0;
    int prev = 1;
    for (std::size_t k = 0; k <= segments; ++k) {
      const int s = k < segments ? row[k] : 1;
      if (s != prev) {
        ++count;
        flips_at[k == 0 ? 0 : k - 1] = true;
      }
      prev = s;
    }
    seq.pulses_of_color.push_back(count);
  }
  seq.total_pulse_instants = static_cast<std::uint64_t>(std::count(flips_at.begin(), flips_at.end(), true));
  return seq;
}

enum class SiteRole { kControl, kTarget, kUninvolved };

struct EffectiveCouplings {
  /// Accumulated coupling times time per pair.
  CouplingMatrix matrix;
  std::vector<SiteRole> labels;
};

/// One step of a diagonal schedule: evolve under sum_{i<j} J_ij Z_i Z_j / 2 style couplings, or flip qubits.
struct EvolveStep {
  CouplingMatrix couplings;
  double time = 0.0;
};

struct FlipStep {
  std::vector<Site> sites;
};

using EchoStep = std::variant<EvolveStep, FlipStep>;

struct EchoResult {
  EffectiveCouplings effective;
  std::vector<EchoStep> schedule;
};

/// Evolve under J for t, flip the targets, evolve under -a J for t/a, flip back.
///
/// Uninvolved sites are shelved (couplings dropped) unless `shelve_uninvolved` is false,
/// in which case their pairs accumulate as residuals.
inline EchoResult control_target_echo(const CouplingMatrix& J, const std::vector<SiteRole>& labels, double t, double a,
                                      bool shelve_uninvolved = true) {
  if (labels.size() != J.size()) throw DomainError("one role label per site required");
  if (!(a > 0.0)) throw DomainError("echo strength a must be positive");
  if (!(t >= 0.0)) throw DomainError("echo time must be non-negative");
  const std::size_t n = J.size();

  CouplingMatrix active(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool shelved =
          shelve_uninvolved && (labels[i] == SiteRole::kUninvolved || labels[j] == SiteRole::kUninvolved);
      if (!shelved) active.set(i, j, J(i, j));
    }
  }

  EchoResult out;
  out.effective.labels = labels;
  out.effective.matrix = CouplingMatrix(n);
  const double t2 = t / a;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool flipped = (labels[i] == SiteRole::kTarget) != (labels[j] == SiteRole::kTarget);
      const double second = (-a * active(i, j)) * t2;
      out.effective.matrix.set(i, j, active(i, j) * t + (flipped ? -second : second));
    }
  }

  std::vector<Site> targets;
  for (Site s = 0; s < n; ++s) {
    if (labels[s] == SiteRole::kTarget) targets.push_back(s);
  }
  out.schedule.emplace_back(EvolveStep{active, t});
  out.schedule.emplace_back(FlipStep{targets});
  out.schedule.emplace_back(EvolveStep{active.scaled(-a), t2});
  out.schedule.emplace_back(FlipStep{targets});
  return out;
}

struct TrimPulse {
  Site target = 0;
  double time = 0.0;
  /// False when t_i == t_max: the pulse would land on the end of the window.
  bool needed = true;
};

struct TrimResult {
  double t_max = 0.0;
  std::vector<TrimPulse> pulses;
  EffectiveCouplings effective;
  std::vector<EchoStep> schedule;
};

/// Runs all couplings for t_max and flips target i at t_i + (t_max - t_i)/2 so its net
/// coupling time to the (never flipped) controls is t_i. Flipped targets are restored at t_max.
inline TrimResult per_target_trim(const std::map<Site, double>& t_required, const CouplingMatrix& J) {
  if (t_required.empty()) throw DomainError("no targets given");
  const std::size_t n = J.size();
  TrimResult out;
  for (const auto& [site, t] : t_required) {
    if (site >= n) throw DomainError("target site outside coupling matrix");
    if (!(t > 0.0)) throw DomainError("required target times must be positive");
    out.t_max = std::max(out.t_max, t);
  }
  std::vector<SiteRole> labels(n, SiteRole::kControl);
  for (const auto& [site, t] : t_required) {
    labels[site] = SiteRole::kTarget;
    const bool needed = t < out.t_max;
    out.pulses.push_back({site, needed ? t + (out.t_max - t) / 2.0 : out.t_max, needed});
  }
  std::sort(out.pulses.begin(), out.pulses.end(),
            [](const TrimPulse& x, const TrimPulse& y) { return x.time < y.time || (x.time == y.time && x.target < y.target); });

  std::vector<double> flip_time(n, out.t_max);  // sign of site s is + before flip_time[s], - after
  for (const auto& p : out.pulses) flip_time[p.target] = p.time;

  // Net signed time of a pair: (+ until the first flip) (- between flips) (+ after the second).
  out.effective.labels = labels;
  out.effective.matrix = CouplingMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double lo = std::min(flip_time[i], flip_time[j]);
      const double hi = std::max(flip_time[i], flip_time[j]);
      const double signed_time = lo - (hi - lo) + (out.t_max - hi);
      out.effective.matrix.set(i, j, J(i, j) * signed_time);
    }
  }

  double now = 0.0;
  std::vector<Site> restore;
  for (const auto& p : out.pulses) {
    if (!p.needed) continue;
    if (p.time > now) out.schedule.emplace_back(EvolveStep{J, p.time - now});
    out.schedule.emplace_back(FlipStep{{p.target}});
    restore.push_back(p.target);
    now = p.time;
  }
  if (out.t_max > now) out.schedule.emplace_back(EvolveStep{J, out.t_max - now});
  if (!restore.empty()) out.schedule.emplace_back(FlipStep{restore});
  return out;
}

struct BlockPairCoupling {
  std::size_t block_a = 0;
  std::size_t block_b = 0;
  /// Sum of h(i, j) over i in A, j in B.
  double raw = 0.0;
  /// Accumulated coupling times time after the sign sequence.
  double accumulated = 0.0;
};

struct CancellationReport {
  double max_cross_color_residual = 0.0;
  /// max |accumulated| / (T * raw) over cross-color pairs.
  double max_cross_color_relative = 0.0;
  std::size_t cross_color_pairs = 0;
  std::vector<BlockPairCoupling> same_color_pairs;
  double same_color_total = 0.0;
};

/// Accumulates every inter-block coupling under the sign sequence, treating couplings as static
/// diagonal terms. Block colors index the rows of `seq`.
inline CancellationReport verify_cancellation(const PulseSequence& seq, const PlaquetteTiling& tiling,
                                              const Lattice& lattice, const CouplingModel& model) {
  if (tiling.num_colors > seq.num_colors()) throw DomainError("tiling uses more colors than the sequence provides");
  const std::size_t nb = tiling.block_count();
  std::vector<std::size_t> block_of(lattice.size());
  for (std::size_t b = 0; b < nb; ++b) {
    for (Site s : tiling.blocks[b]) block_of[s] = b;
  }
  std::vector<double> raw(nb * nb, 0.0);
  for (Site i = 0; i < lattice.size(); ++i) {
    for (Site j = i + 1; j < lattice.size(); ++j) {
      const std::size_t a = block_of[i], b = block_of[j];
      if (a == b) continue;
      const double h = coupling(model, distance(lattice, i, j));
      raw[std::min(a, b) * nb + std::max(a, b)] += h;
    }
  }

  CancellationReport rep;
  for (std::size_t a = 0; a < nb; ++a) {
    for (std::size_t b = a + 1; b < nb; ++b) {
      const int ca = tiling.color_of_block[a], cb = tiling.color_of_block[b];
      const double w = seq.overlap(ca, cb);
      const double r = raw[a * nb + b];
      const double acc = w * r;
      if (ca == cb) {
        rep.same_color_pairs.push_back({a, b, r, acc});
        rep.same_color_total += acc;
      } else {
        ++rep.cross_color_pairs;
        rep.max_cross_color_residual = std::max(rep.max_cross_color_residual, std::abs(acc));
        if (r > 0.0) rep.max_cross_color_relative = std::max(rep.max_cross_color_relative, std::abs(acc) / (seq.T * r));
      }
    }
  }
  return rep;
}

}  // namespace powerlawst
