#pragma once

// Dense state-vector simulation of the Eldredge and merge protocols at desk scale.
// Qubit q is bit q of the basis index.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <variant>
#include <vector>

#include "powerlawst/core_model.hpp"
#include "powerlawst/echo.hpp"
#include "powerlawst/eldredge.hpp"

namespace powerlawst {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 22;

class QuantumState {
public:
  /// All qubits in |0>.
  explicit QuantumState(int num_qubits) : n_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) throw DomainError("state vector supports 1 to 22 qubits");
    amp_.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
    amp_[0] = 1.0;
  }

  /// Product state with qubit q in single[q][0]|0> + single[q][1]|1>.
  static QuantumState product(const std::vector<std::array<Amplitude, 2>>& single) {
    QuantumState s(static_cast<int>(single.size()));
    for (std::size_t idx = 0; idx < s.amp_.size(); ++idx) {
      Amplitude a = 1.0;
      for (std::size_t q = 0; q < single.size(); ++q) a *= single[q][(idx >> q) & 1U];
      s.amp_[idx] = a;
    }
    return s;
  }

  [[nodiscard]] int num_qubits() const { return n_; }
  [[nodiscard]] std::size_t dimension() const { return amp_.size(); }
  [[nodiscard]] const std::vector<Amplitude>& amplitudes() const { return amp_; }
  std::vector<Amplitude>& amplitudes() { return amp_; }
  Amplitude& operator[](std::size_t i) { return amp_[i]; }
  const Amplitude& operator[](std::size_t i) const { return amp_[i]; }

  [[nodiscard]] double norm() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

  void check(Site q) const {
    if (q >= static_cast<Site>(n_)) throw DomainError("qubit index out of range");
  }

private:
  int n_;
  std::vector<Amplitude> amp_;
};

inline void apply_x(QuantumState& state, Site q) {
  state.check(q);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if ((i & bit) == 0) std::swap(state[i], state[i | bit]);
  }
}

inline void apply_hadamard(QuantumState& state, Site q) {
  state.check(q);
  const std::size_t bit = std::size_t{1} << q;
  const double s = 1.0 / std::numbers::sqrt2;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if ((i & bit) != 0) continue;
    const Amplitude a0 = state[i], a1 = state[i | bit];
    state[i] = s * (a0 + a1);
    state[i | bit] = s * (a0 - a1);
  }
}

/// diag(1, i) on `q`, or diag(1, -i) when inverted.
inline void phase_fix(QuantumState& state, Site q, bool inverse = false) {
  state.check(q);
  const std::size_t bit = std::size_t{1} << q;
  const Amplitude ph{0.0, inverse ? -1.0 : 1.0};
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if ((i & bit) != 0) state[i] *= ph;
  }
}

/// Evolution under sum_{i in controls, j in targets} h_ij |1><1|_i X_j with target j's full
/// angle angles[k] (targets[k]) split over controls in proportion to h_ij.
inline void evolve_controlled_x(QuantumState& state, const std::vector<Site>& controls, const std::vector<Site>& targets,
                                const std::vector<double>& angles, const CouplingMatrix& h) {
  if (angles.size() != targets.size()) throw DomainError("one angle per target required");
  for (Site c : controls) {
    state.check(c);
    if (std::find(targets.begin(), targets.end(), c) != targets.end()) {
      throw DomainError("controls and targets overlap");
    }
  }
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const Site j = targets[k];
    state.check(j);
    double total = 0.0;
    for (Site c : controls) total += h(c, j);
    if (total == 0.0 || angles[k] == 0.0) continue;
    std::vector<double> w;
    for (Site c : controls) w.push_back(h(c, j) / total * angles[k]);
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t i = 0; i < state.dimension(); ++i) {
      if ((i & bit) != 0) continue;
      double theta = 0.0;
      for (std::size_t c = 0; c < controls.size(); ++c) {
        if ((i >> controls[c]) & 1U) theta += w[c];
      }
      if (theta == 0.0) continue;
      const double cs = std::cos(theta), sn = std::sin(theta);
      const Amplitude a0 = state[i], a1 = state[i | bit];
      state[i] = cs * a0 - Amplitude{0.0, sn} * a1;
      state[i | bit] = cs * a1 - Amplitude{0.0, sn} * a0;
    }
  }
}

enum class DiagonalForm {
  kZZ,            // E = sum_{i<j} J_ij z_i z_j, z = +-1
  kNumberNumber,  // E = sum_{i<j} J_ij n_i n_j, n = 0/1
};

/// Multiplies each amplitude by exp(-i t E(bits)).
inline void evolve_diagonal(QuantumState& state, const CouplingMatrix& J, double t,
                            DiagonalForm form = DiagonalForm::kZZ) {
  if (J.size() > static_cast<std::size_t>(state.num_qubits())) throw DomainError("coupling matrix larger than state");
  struct Pair {
    Site i, j;
    double v;
  };
  std::vector<Pair> pairs;
  for (Site i = 0; i < J.size(); ++i) {
    for (Site j = i + 1; j < J.size(); ++j) {
      if (J(i, j) != 0.0) pairs.push_back({i, j, J(i, j)});
    }
  }
  for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
    double e = 0.0;
    for (const auto& p : pairs) {
      const unsigned bi = (idx >> p.i) & 1U, bj = (idx >> p.j) & 1U;
      if (form == DiagonalForm::kZZ) {
        e += (bi == bj) ? p.v : -p.v;
      } else if (bi & bj) {
        e += p.v;
      }
    }
    if (e != 0.0) state[idx] *= std::polar(1.0, -t * e);
  }
}

inline void evolve_diagonal_zz(QuantumState& state, const CouplingMatrix& J, double t) {
  evolve_diagonal(state, J, t, DiagonalForm::kZZ);
}

/// Replays an echo schedule (ZZ couplings, X flips).
inline void replay(QuantumState& state, const std::vector<EchoStep>& schedule) {
  for (const auto& step : schedule) {
    if (const auto* e = std::get_if<EvolveStep>(&step)) {
      evolve_diagonal_zz(state, e->couplings, e->time);
    } else {
      for (Site s : std::get<FlipStep>(step).sites) apply_x(state, s);
    }
  }
}

struct ControlledXSegment {
  std::vector<Site> controls;
  std::vector<Site> targets;
  std::vector<double> angles;
};

struct PhaseFixOp {
  Site qubit = 0;
  bool inverse = false;
};

struct HadamardOp {
  Site qubit = 0;
};

using CircuitOp = std::variant<ControlledXSegment, PhaseFixOp, HadamardOp>;

struct Circuit {
  std::vector<CircuitOp> ops;

  [[nodiscard]] Circuit inverse() const {
    Circuit out;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
      if (const auto* s = std::get_if<ControlledXSegment>(&*it)) {
        ControlledXSegment r = *s;
        for (double& a : r.angles) a = -a;
        out.ops.emplace_back(std::move(r));
      } else if (const auto* p = std::get_if<PhaseFixOp>(&*it)) {
        out.ops.emplace_back(PhaseFixOp{p->qubit, !p->inverse});
      } else {
        out.ops.push_back(*it);
      }
    }
    return out;
  }
};

inline void apply(QuantumState& state, const Circuit& circuit, const CouplingMatrix& h) {
  for (const auto& op : circuit.ops) {
    if (const auto* s = std::get_if<ControlledXSegment>(&op)) {
      evolve_controlled_x(state, s->controls, s->targets, s->angles, h);
    } else if (const auto* p = std::get_if<PhaseFixOp>(&op)) {
      phase_fix(state, p->qubit, p->inverse);
    } else {
      apply_hadamard(state, std::get<HadamardOp>(op).qubit);
    }
  }
}

/// Segments between schedule events; after each completion a diag(1, i) on the source
/// removes the -i picked up by the all-ones branch. `qubit_of[s]` maps lattice sites to qubits.
inline Circuit eldredge_circuit(const ScheduleResult& schedule, const Lattice& lattice, const CouplingModel& model,
                                const std::vector<Site>& qubit_of) {
  const std::size_t n = lattice.size();
  std::vector<Site> controls{qubit_of[schedule.source]};
  std::vector<bool> done(n, false);
  done[schedule.source] = true;
  Circuit c;
  double now = 0.0;
  for (const auto& e : schedule.events) {
    const double dt = e.time - now;
    ControlledXSegment seg;
    seg.controls = controls;
    for (Site s = 0; s < n; ++s) {
      if (done[s]) continue;
      double rate = 0.0;
      for (Site ctl = 0; ctl < n; ++ctl) {
        if (done[ctl]) rate += coupling(model, distance(lattice, ctl, s));
      }
      seg.targets.push_back(qubit_of[s]);
      seg.angles.push_back(dt * rate);
    }
    if (dt > 0.0) c.ops.emplace_back(std::move(seg));
    c.ops.emplace_back(PhaseFixOp{qubit_of[schedule.source], false});
    done[e.site] = true;
    controls.push_back(qubit_of[e.site]);
    now = e.time;
  }
  return c;
}

struct GhzOverlap {
  double fidelity = 0.0;
  /// Probability that every qubit outside the region is |0>.
  double rest_zero_weight = 0.0;
};

/// |<GHZ(a,b)|psi>|^2 with qubits outside `region` projected on |0>.
inline GhzOverlap ghz_fidelity(const QuantumState& state, const std::vector<Site>& region, Amplitude a, Amplitude b) {
  std::size_t mask = 0;
  for (Site q : region) {
    state.check(q);
    mask |= std::size_t{1} << q;
  }
  GhzOverlap out;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if ((i & ~mask) == 0) out.rest_zero_weight += std::norm(state[i]);
  }
  const Amplitude overlap = std::conj(a) * state[0] + std::conj(b) * state[mask];
  out.fidelity = std::norm(overlap);
  return out;
}

struct ProtocolRun {
  QuantumState state{1};
  double fidelity = 0.0;
  double rest_zero_weight = 0.0;
};

inline constexpr std::size_t kMaxEldredgeQubits = 16;

inline ProtocolRun run_eldredge_protocol(const Lattice& lattice, const CouplingModel& model, Site source, Amplitude a,
                                         Amplitude b) {
  const std::size_t n = lattice.size();
  if (n < 2 || n > kMaxEldredgeQubits) throw DomainError("Eldredge verification needs 2 to 16 sites");
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12) throw DomainError("|a|^2 + |b|^2 must be 1");
  const auto schedule = run_schedule(lattice, model, source);
  std::vector<Site> identity(n);
  for (Site s = 0; s < n; ++s) identity[s] = s;
  const auto h = CouplingMatrix::from_lattice(lattice, model);

  std::vector<std::array<Amplitude, 2>> single(n, {Amplitude{1.0}, Amplitude{0.0}});
  single[source] = {a, b};
  ProtocolRun run;
  run.state = QuantumState::product(single);
  apply(run.state, eldredge_circuit(schedule, lattice, model, identity), h);
  const auto ov = ghz_fidelity(run.state, identity, a, b);
  run.fidelity = ov.fidelity;
  run.rest_zero_weight = ov.rest_zero_weight;
  return run;
}

inline constexpr std::size_t kMaxTranQubits = 20;

struct TranStepRun {
  QuantumState state{1};
  double fidelity = 0.0;
  double rest_zero_weight = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
};

/// Blocks of edge r1 inside an (m r1)^d region, in block-index order.
struct BlockLayout {
  Lattice region;
  std::vector<std::vector<Site>> blocks;
};

inline BlockLayout block_layout(int d, long r1, long m) {
  if (r1 < 1 || m < 2) throw DomainError("merge step needs r1 >= 1 and m >= 2");
  BlockLayout out{Lattice::hypercube(d, m * r1), {}};
  const auto tiling = tile_and_color(out.region, r1, 1);
  out.blocks = tiling.blocks;
  return out;
}

/// Merge step: GHZ inside every block, a uniform controlled-phase from block 1 to the others,
/// then undo, Hadamard and redo on the other blocks. Block sources are their lowest-index corners.
inline TranStepRun run_tran_step(int d, long r1, long m, const CouplingModel& model, Amplitude a, Amplitude b) {
  model.validate();
  const auto layout = block_layout(d, r1, m);
  const std::size_t n = layout.region.size();
  if (n > kMaxTranQubits) throw DomainError("merge verification limited to 20 qubits");
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12) throw DomainError("|a|^2 + |b|^2 must be 1");
  const auto h = CouplingMatrix::from_lattice(layout.region, model);

  const Lattice block_lattice = Lattice::hypercube(d, r1);
  const auto schedule = run_schedule(block_lattice, model, 0);
  std::vector<Circuit> U;
  for (const auto& sites : layout.blocks) {
    // blocks[b] lists sites in increasing global index, which matches local row-major order.
    U.push_back(eldredge_circuit(schedule, block_lattice, model, sites));
  }

  std::vector<std::array<Amplitude, 2>> single(n, {Amplitude{1.0}, Amplitude{0.0}});
  const double s = 1.0 / std::numbers::sqrt2;
  single[layout.blocks[0][0]] = {a, b};
  for (std::size_t j = 1; j < layout.blocks.size(); ++j) single[layout.blocks[j][0]] = {Amplitude{s}, Amplitude{s}};

  TranStepRun run;
  run.state = QuantumState::product(single);
  run.t1 = schedule.total_time;

  for (const auto& u : U) apply(run.state, u, h);

  const double V = std::pow(static_cast<double>(r1), d);
  const double strength = model.prefactor * std::pow(static_cast<double>(m * r1) * std::sqrt(static_cast<double>(d)), -model.alpha);
  run.t2 = std::numbers::pi / (V * V * strength);
  CouplingMatrix phase(n);
  for (Site i : layout.blocks[0]) {
    for (std::size_t j = 1; j < layout.blocks.size(); ++j) {
      for (Site k : layout.blocks[j]) phase.set(i, k, strength);
    }
  }
  evolve_diagonal(run.state, phase, run.t2, DiagonalForm::kNumberNumber);

  for (std::size_t j = 1; j < U.size(); ++j) apply(run.state, U[j].inverse(), h);
  for (std::size_t j = 1; j < U.size(); ++j) apply_hadamard(run.state, layout.blocks[j][0]);
  for (std::size_t j = 1; j < U.size(); ++j) apply(run.state, U[j], h);

  std::vector<Site> all(n);
  for (Site q = 0; q < n; ++q) all[q] = q;
  const auto ov = ghz_fidelity(run.state, all, a, b);
  run.fidelity = ov.fidelity;
  run.rest_zero_weight = ov.rest_zero_weight;
  return run;
}

}  // namespace powerlawst
