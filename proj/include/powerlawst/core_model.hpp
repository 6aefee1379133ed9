#pragma once

// Lattice geometry, power-law couplings and plaquette coloring.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace powerlawst {

/// Raised when an operation's precondition is violated by its inputs.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Site = std::size_t;
using Coord = std::vector<long>;

/// d-dimensional hypercubic lattice with unit spacing.
///
/// Sites are numbered row-major with axis 0 fastest:
/// index = x0 + e0 * (x1 + e1 * x2).
class Lattice {
public:
  Lattice(int dimension, std::vector<long> extents)
      : dim_(dimension), extents_(std::move(extents)) {
    if (dim_ < 1 || dim_ > 3) {
      throw DomainError("lattice dimension must be 1, 2 or 3");
    }
    if (static_cast<int>(extents_.size()) != dim_) {
      throw DomainError("lattice needs exactly one extent per axis");
    }
    size_ = 1;
    for (long e : extents_) {
      if (e < 1) throw DomainError("lattice extents must be positive");
      size_ *= static_cast<std::size_t>(e);
    }
  }

  /// Hypercube of edge `r` in dimension `d`.
  static Lattice hypercube(int d, long r) {
    return Lattice(d, std::vector<long>(static_cast<std::size_t>(std::max(d, 0)), r));
  }

  [[nodiscard]] int dimension() const { return dim_; }
  [[nodiscard]] const std::vector<long>& extents() const { return extents_; }
  [[nodiscard]] std::size_t size() const { return size_; }

  [[nodiscard]] Coord coordinates(Site s) const {
    check(s);
    Coord c(static_cast<std::size_t>(dim_));
    for (int a = 0; a < dim_; ++a) {
      c[a] = static_cast<long>(s % static_cast<std::size_t>(extents_[a]));
      s /= static_cast<std::size_t>(extents_[a]);
    }
    return c;
  }

  [[nodiscard]] Site index(const Coord& c) const {
    if (static_cast<int>(c.size()) != dim_) throw DomainError("coordinate rank mismatch");
    Site s = 0;
    for (int a = dim_ - 1; a >= 0; --a) {
      if (c[a] < 0 || c[a] >= extents_[a]) throw DomainError("coordinate outside lattice");
      s = s * static_cast<Site>(extents_[a]) + static_cast<Site>(c[a]);
    }
    return s;
  }

  void check(Site s) const {
    if (s >= size_) {
      throw DomainError("site index " + std::to_string(s) + " out of range (lattice has " +
                        std::to_string(size_) + " sites)");
    }
  }

private:
  int dim_;
  std::vector<long> extents_;
  std::size_t size_ = 0;
};

/// Euclidean distance between two sites.
inline double distance(const Lattice& lattice, Site i, Site j) {
  const Coord a = lattice.coordinates(i);
  const Coord b = lattice.coordinates(j);
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double dx = static_cast<double>(a[k] - b[k]);
    sq += dx * dx;
  }
  return std::sqrt(sq);
}

/// Worst-case separation of two points inside a hypercube of edge r: r * sqrt(d).
inline double worst_case_distance(long r, int d) {
  return static_cast<double>(r) * std::sqrt(static_cast<double>(d));
}

/// Isotropic power-law coupling h = prefactor / dist^alpha.
struct CouplingModel {
  double alpha = 3.0;
  double prefactor = 1.0;

  void validate() const {
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (!(prefactor > 0.0)) throw DomainError("coupling prefactor must be positive");
  }
};

inline double coupling(const CouplingModel& model, double dist) {
  model.validate();
  if (!(dist >= 1.0)) {
    throw DomainError("coupling queried below one lattice spacing (dist=" +
                      std::to_string(dist) + ")");
  }
  return model.prefactor * std::pow(dist, -model.alpha);
}

/// Dense symmetric coupling table over a small set of sites; diagonal is zero.
class CouplingMatrix {
public:
  CouplingMatrix() = default;
  explicit CouplingMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  static CouplingMatrix from_lattice(const Lattice& lattice, const CouplingModel& model) {
    CouplingMatrix m(lattice.size());
    for (Site i = 0; i < lattice.size(); ++i) {
      for (Site j = i + 1; j < lattice.size(); ++j) {
        m.set(i, j, coupling(model, distance(lattice, i, j)));
      }
    }
    return m;
  }

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    if (i == j) throw DomainError("coupling matrix has no diagonal");
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }

  [[nodiscard]] CouplingMatrix scaled(double factor) const {
    CouplingMatrix out = *this;
    for (double& v : out.values_) v *= factor;
    return out;
  }

private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Hypercubic blocks of edge L colored periodically so same-color blocks sit far apart.
struct PlaquetteTiling {
  long block_length = 1;
  int num_colors = 1;
  int dimension = 1;
  std::vector<long> blocks_per_axis;
  /// Edge of the periodic color super-cell, in blocks.
  long supercell_edge = 1;
  std::vector<std::vector<Site>> blocks;
  std::vector<Coord> block_coords;
  std::vector<int> color_of_block;
  /// Blocks clipped by the lattice boundary (fewer than L^d sites).
  std::vector<bool> truncated;
  bool has_truncated_blocks = false;
  /// Smallest center-to-center distance between two blocks of equal color, in sites.
  /// Infinity when every color appears at most once.
  double min_same_color_distance = std::numeric_limits<double>::infinity();

  [[nodiscard]] std::size_t block_count() const { return blocks.size(); }

  /// Block center in lattice units, treating truncated blocks as full ones.
  [[nodiscard]] std::vector<double> center(std::size_t b) const {
    std::vector<double> c(block_coords[b].size());
    for (std::size_t a = 0; a < c.size(); ++a) {
      c[a] = (static_cast<double>(block_coords[b][a]) + 0.5) * static_cast<double>(block_length);
    }
    return c;
  }

  [[nodiscard]] double center_distance(std::size_t a, std::size_t b) const {
    double sq = 0.0;
    for (std::size_t k = 0; k < block_coords[a].size(); ++k) {
      const double dx = static_cast<double>(block_coords[a][k] - block_coords[b][k]);
      sq += dx * dx;
    }
    return std::sqrt(sq) * static_cast<double>(block_length);
  }
};

/// Integer part of n^(1/d), computed without floating-point drift.
inline long integer_root(long n, int d) {
  long s = static_cast<long>(std::floor(std::pow(static_cast<double>(n), 1.0 / d)));
  auto power = [d](long x) {
    long p = 1;
    for (int i = 0; i < d; ++i) p *= x;
    return p;
  };
  while (s > 1 && power(s) > n) --s;
  while (power(s + 1) <= n) ++s;
  return std::max(s, 1L);
}

/// Splits the lattice into blocks of edge L and assigns n colors on a periodic super-cell.
///
/// The super-cell edge is floor(n^(1/d)) blocks, so equal colors repeat every
/// floor(n^(1/d)) * L sites along each axis; colors beyond floor(n^(1/d))^d stay unused.
inline PlaquetteTiling tile_and_color(const Lattice& lattice, long L, int n) {
  if (L < 1) throw DomainError("block length must be positive");
  if (n < 1) throw DomainError("need at least one color");
  const int d = lattice.dimension();

  PlaquetteTiling t;
  t.block_length = L;
  t.num_colors = n;
  t.dimension = d;
  t.supercell_edge = integer_root(n, d);

  std::size_t nblocks = 1;
  for (long e : lattice.extents()) {
    const long per_axis = (e + L - 1) / L;
    t.blocks_per_axis.push_back(per_axis);
    nblocks *= static_cast<std::size_t>(per_axis);
  }
  if (static_cast<std::size_t>(n) > nblocks) {
    throw DomainError("requested " + std::to_string(n) + " colors but the tiling has only " +
                      std::to_string(nblocks) + " blocks");
  }

  t.blocks.resize(nblocks);
  t.block_coords.resize(nblocks);
  t.color_of_block.resize(nblocks);
  t.truncated.assign(nblocks, false);

  for (std::size_t b = 0; b < nblocks; ++b) {
    Coord bc(static_cast<std::size_t>(d));
    std::size_t rest = b;
    int color = 0;
    long weight = 1;
    for (int a = 0; a < d; ++a) {
      bc[a] = static_cast<long>(rest % static_cast<std::size_t>(t.blocks_per_axis[a]));
      rest /= static_cast<std::size_t>(t.blocks_per_axis[a]);
      color += static_cast<int>((bc[a] % t.supercell_edge) * weight);
      weight *= t.supercell_edge;
      if ((bc[a] + 1) * L > lattice.extents()[a]) t.truncated[b] = true;
    }
    t.block_coords[b] = bc;
    t.color_of_block[b] = color;
    t.has_truncated_blocks = t.has_truncated_blocks || t.truncated[b];
  }

  for (Site s = 0; s < lattice.size(); ++s) {
    const Coord c = lattice.coordinates(s);
    std::size_t b = 0;
    for (int a = d - 1; a >= 0; --a) {
      b = b * static_cast<std::size_t>(t.blocks_per_axis[a]) + static_cast<std::size_t>(c[a] / L);
    }
    t.blocks[b].push_back(s);
  }

  // Same-color blocks differ by a nonzero multiple of the super-cell edge on some axis.
  for (std::size_t a = 0; a < nblocks; ++a) {
    for (std::size_t b = a + 1; b < nblocks; ++b) {
      if (t.color_of_block[a] == t.color_of_block[b]) {
        t.min_same_color_distance = std::min(t.min_same_color_distance, t.center_distance(a, b));
      }
    }
  }
  return t;
}

}  // namespace powerlawst
