#pragma once

// Site percolation on square lattices: spanning tests (union-find and the
// fire-spread net), cluster statistics and threshold estimation.

#include <cstdint>
#include <string>
#include <vector>

#include "patchnet/spatial.hpp"

namespace patchnet {

/// n x n occupancy, row-major (index = row * n + col).
struct Lattice {
  int n = 0;
  std::vector<bool> occupied;

  explicit Lattice(int n = 0) : n(n), occupied(static_cast<std::size_t>(n) * n, false) {}
  bool at(int row, int col) const { return occupied[static_cast<std::size_t>(row) * n + col]; }
  void set(int row, int col, bool v = true) { occupied[static_cast<std::size_t>(row) * n + col] = v; }
  std::size_t occupied_count() const;
};

/// Disjoint sets with path compression and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t x);
  void unite(std::size_t a, std::size_t b);
  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// Each cell occupied independently with probability p (u < p, u uniform
/// in [0, 1) from SplitMix64 seeded with `seed`).
Lattice sample_occupancy(int n, double p, std::uint64_t seed);

/// Whether an occupied left-column cell connects to an occupied
/// right-column cell.
bool spans(const Lattice& lat, Neighborhood mode);

/// sum(s^2) / sum(s) over occupied clusters; 0 for an empty lattice.
double mean_cluster_size(const Lattice& lat, Neighborhood mode);

/// Builds the fire net (occupied = fuel, seeds = occupied left column),
/// runs it to quiescence and reports whether fire reached the right column.
bool percolate_via_net(const Lattice& lat, Neighborhood mode);

enum class PercolationEngine { oracle, net };

struct ThresholdEstimate {
  std::vector<double> p_grid;
  std::vector<double> spanning_prob;
  std::vector<double> mean_cluster_size;  // averaged over the same lattices
  double p_c_estimate = 0;
  int trials = 0;
};

/// Seed of trial `trial` at grid point `p_index`; shared by both engines.
std::uint64_t lattice_seed(std::uint64_t seed, std::size_t p_index, std::size_t trial);

/// Linear interpolation of the first 0.5 crossing of `prob` over `p`.
/// Throws NoCrossingError if there is none.
double half_crossing(const std::vector<double>& p, const std::vector<double>& prob);

/// Spanning probability per grid point over `trials` lattices each.
/// `threads` > 1 spreads grid points over worker threads; results do not
/// depend on it.
ThresholdEstimate estimate_threshold(int n, const std::vector<double>& p_grid, int trials,
                                     std::uint64_t seed, PercolationEngine engine,
                                     Neighborhood mode = Neighborhood::moore, unsigned threads = 1);

/// "p,spanning_prob,mean_cluster_size" CSV.
std::string write_threshold_csv(const ThresholdEstimate& est);

}  // namespace patchnet
