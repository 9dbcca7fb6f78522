#include "patchnet/percolation.hpp"

#include <algorithm>
#include <set>

#include "parallel.hpp"
#include "patchnet/core.hpp"
#include "patchnet/error.hpp"
#include "patchnet/rng.hpp"
#include "patchnet/templates.hpp"
#include "patchnet/text.hpp"

namespace patchnet {

std::size_t Lattice::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), true));
}

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
  for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
}

std::size_t UnionFind::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const auto up = parent_[x];
    parent_[x] = root;
    x = up;
  }
  return root;
}

void UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
}

Lattice sample_occupancy(int n, double p, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("lattice side must be positive");
  if (!(p >= 0 && p <= 1)) throw PreconditionError("occupation probability must lie in [0, 1]");
  SplitMix64 rng(seed);
  Lattice lat(n);
  for (std::size_t i = 0; i < lat.occupied.size(); ++i) lat.occupied[i] = rng.uniform() < p;
  return lat;
}

namespace {

UnionFind clusters(const Lattice& lat, Neighborhood mode) {
  const int n = lat.n;
  UnionFind uf(lat.occupied.size());
  auto idx = [n](int r, int c) { return static_cast<std::size_t>(r) * n + c; };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (!lat.at(r, c)) continue;
      auto link = [&](int dr, int dc) {
        const int rr = r + dr, cc = c + dc;
        if (rr >= 0 && rr < n && cc >= 0 && cc < n && lat.at(rr, cc)) uf.unite(idx(r, c), idx(rr, cc));
      };
      link(0, 1);
      link(1, 0);
      if (mode == Neighborhood::moore) {
        link(1, 1);
        link(1, -1);
      }
    }
  return uf;
}

}  // namespace

bool spans(const Lattice& lat, Neighborhood mode) {
  const int n = lat.n;
  if (n == 0) return false;
  auto uf = clusters(lat, mode);
  std::set<std::size_t> left;
  for (int r = 0; r < n; ++r)
    if (lat.at(r, 0)) left.insert(uf.find(static_cast<std::size_t>(r) * n));
  for (int r = 0; r < n; ++r)
    if (lat.at(r, n - 1) && left.count(uf.find(static_cast<std::size_t>(r) * n + n - 1))) return true;
  return false;
}

double mean_cluster_size(const Lattice& lat, Neighborhood mode) {
  auto uf = clusters(lat, mode);
  double sum_s = 0, sum_s2 = 0;
  for (std::size_t i = 0; i < lat.occupied.size(); ++i) {
    if (!lat.occupied[i] || uf.find(i) != i) continue;
    const double s = static_cast<double>(uf.size_of(i));
    sum_s += s;
    sum_s2 += s * s;
  }
  return sum_s > 0 ? sum_s2 / sum_s : 0.0;
}

bool percolate_via_net(const Lattice& lat, Neighborhood mode) {
  const int n = lat.n;
  if (n == 0) return false;
  const auto grid = full_grid(n, n);
  const auto adj = neighbors(grid, mode);
  std::set<std::string> occupied, seeds;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (!lat.at(r, c)) continue;
      occupied.insert(patch_id(r, c));
      if (c == 0) seeds.insert(patch_id(r, c));
    }
  const auto model = assemble_fire(adj, occupied, seeds);
  const auto bound = static_cast<std::size_t>(8) * n * n;
  const auto result = run_to_quiescence(model.net, model.marking, bound);
  for (int r = 0; r < n; ++r)
    if (lat.at(r, n - 1) && result.marking.get(model.net, "Fire_" + patch_id(r, n - 1)) > 0)
      return true;
  return false;
}

std::uint64_t lattice_seed(std::uint64_t seed, std::size_t p_index, std::size_t trial) {
  return derive_seed(derive_seed(seed, p_index), trial);
}

double half_crossing(const std::vector<double>& p, const std::vector<double>& prob) {
  if (p.size() != prob.size() || p.empty()) throw PreconditionError("grid and probabilities differ in length");
  if (prob[0] == 0.5) return p[0];
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (prob[i] < 0.5 && prob[i + 1] >= 0.5)
      return p[i] + (0.5 - prob[i]) / (prob[i + 1] - prob[i]) * (p[i + 1] - p[i]);
  }
  throw NoCrossingError("spanning probability never crosses 0.5 on the grid; widen the p range");
}

ThresholdEstimate estimate_threshold(int n, const std::vector<double>& p_grid, int trials,
                                     std::uint64_t seed, PercolationEngine engine,
                                     Neighborhood mode, unsigned threads) {
  if (trials < 1) throw PreconditionError("trials must be at least 1");
  if (p_grid.empty()) throw PreconditionError("p grid is empty");
  if (!std::is_sorted(p_grid.begin(), p_grid.end())) throw PreconditionError("p grid must be ascending");
  ThresholdEstimate est;
  est.p_grid = p_grid;
  est.trials = trials;
  est.spanning_prob.assign(p_grid.size(), 0.0);
  est.mean_cluster_size.assign(p_grid.size(), 0.0);
  detail::parallel_for(p_grid.size(), threads, [&](std::size_t i) {
    int spanning = 0;
    double cluster_sum = 0;
    for (int t = 0; t < trials; ++t) {
      const auto lat = sample_occupancy(n, p_grid[i], lattice_seed(seed, i, static_cast<std::size_t>(t)));
      const bool hit = engine == PercolationEngine::oracle ? spans(lat, mode) : percolate_via_net(lat, mode);
      spanning += hit ? 1 : 0;
      cluster_sum += mean_cluster_size(lat, mode);
    }
    est.spanning_prob[i] = static_cast<double>(spanning) / trials;
    est.mean_cluster_size[i] = cluster_sum / trials;
  });
  est.p_c_estimate = half_crossing(est.p_grid, est.spanning_prob);
  return est;
}

std::string write_threshold_csv(const ThresholdEstimate& est) {
  std::string out = "p,spanning_prob,mean_cluster_size\n";
  for (std::size_t i = 0; i < est.p_grid.size(); ++i)
    out += text::format_real(est.p_grid[i]) + "," + text::format_real(est.spanning_prob[i]) + "," +
           text::format_real(est.mean_cluster_size[i]) + "\n";
  return out;
}

}  // namespace patchnet
