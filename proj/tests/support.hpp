#pragma once

// Test-only generators and oracles. Nothing here calls into the code paths
// it is used to check (the flood fill and the reference SSA are written
// from scratch).

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "patchnet/core.hpp"
#include "patchnet/formats.hpp"
#include "patchnet/spatial.hpp"

namespace testing {

using namespace patchnet;

inline std::string name(const char* prefix, std::size_t i) { return prefix + std::to_string(i); }

/// Random net with up to `max_places` places and `max_transitions`
/// transitions, arcs of weight 1..3.
inline PetriNet random_net(std::mt19937_64& rng, std::size_t max_places, std::size_t max_transitions,
                           bool allow_empty = true) {
  std::uniform_int_distribution<std::size_t> np(allow_empty ? 0 : 1, max_places);
  std::uniform_int_distribution<std::size_t> nt(0, max_transitions);
  std::uniform_int_distribution<int> w(1, 3);
  std::bernoulli_distribution arc(0.15);
  NetBuilder b;
  const auto places = np(rng);
  const auto transitions = places == 0 ? 0 : nt(rng);
  for (std::size_t p = 0; p < places; ++p) b.add_place(name("P", p));
  for (std::size_t t = 0; t < transitions; ++t) {
    b.add_transition(name("T", t));
    for (std::size_t p = 0; p < places; ++p) {
      if (arc(rng)) b.set_input(p, t, w(rng));
      if (arc(rng)) b.set_output(t, p, w(rng));
    }
  }
  return b.build();
}

inline Marking random_marking(std::mt19937_64& rng, const PetriNet& net, Tokens max = 6) {
  std::uniform_int_distribution<Tokens> d(0, max);
  Marking m(net.place_count());
  for (std::size_t p = 0; p < net.place_count(); ++p) m.set(p, d(rng));
  return m;
}

inline NetDocument random_document(std::mt19937_64& rng, std::size_t max_places, std::size_t max_transitions) {
  NetDocument doc;
  doc.name = "doc" + std::to_string(rng() % 1000);
  doc.net = random_net(rng, max_places, max_transitions);
  doc.marking = random_marking(rng, doc.net, 1000);
  std::uniform_real_distribution<double> r(1e-4, 50.0);
  for (std::size_t t = 0; t < doc.net.transition_count(); ++t) doc.rates.push_back(r(rng));
  return doc;
}

/// Random graph on `n` nodes named "a0".."a{n-1}".
inline Adjacency random_adjacency(std::mt19937_64& rng, std::size_t n, double edge_p) {
  std::bernoulli_distribution e(edge_p);
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(name("a", i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (e(rng)) edges.emplace_back(nodes[i], nodes[j]);
  return Adjacency(nodes, edges);
}

/// Breadth-first reachability from `seeds` through the subgraph induced by `occupied`.
inline std::set<std::string> flood_fill(const Adjacency& adj, const std::set<std::string>& occupied,
                                        const std::set<std::string>& seeds) {
  std::map<std::string, std::vector<std::string>> nbr;
  for (const auto& [a, b] : adj.edges()) {
    nbr[adj.nodes()[a]].push_back(adj.nodes()[b]);
    nbr[adj.nodes()[b]].push_back(adj.nodes()[a]);
  }
  std::set<std::string> seen(seeds.begin(), seeds.end());
  std::deque<std::string> queue(seeds.begin(), seeds.end());
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (const auto& v : nbr[u])
      if (occupied.count(v) && seen.insert(v).second) queue.push_back(v);
  }
  return seen;
}

/// Spanning check by breadth-first search on the raw occupancy array.
inline bool bfs_spans(int n, const std::vector<bool>& occ, bool moore) {
  std::vector<bool> seen(occ.size(), false);
  std::deque<int> queue;
  for (int r = 0; r < n; ++r)
    if (occ[r * n]) {
      seen[r * n] = true;
      queue.push_back(r * n);
    }
  while (!queue.empty()) {
    const int cell = queue.front();
    queue.pop_front();
    const int r = cell / n, c = cell % n;
    if (c == n - 1) return true;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        if (!moore && dr != 0 && dc != 0) continue;
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
        const int k = rr * n + cc;
        if (occ[k] && !seen[k]) {
          seen[k] = true;
          queue.push_back(k);
        }
      }
  }
  return false;
}

/// Cluster sizes by breadth-first search.
inline std::vector<std::size_t> bfs_cluster_sizes(int n, const std::vector<bool>& occ, bool moore) {
  std::vector<bool> seen(occ.size(), false);
  std::vector<std::size_t> sizes;
  for (int start = 0; start < n * n; ++start) {
    if (!occ[start] || seen[start]) continue;
    std::size_t size = 0;
    std::deque<int> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      const int cell = queue.front();
      queue.pop_front();
      ++size;
      const int r = cell / n, c = cell % n;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if ((dr == 0 && dc == 0) || (!moore && dr != 0 && dc != 0)) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
          const int k = rr * n + cc;
          if (occ[k] && !seen[k]) {
            seen[k] = true;
            queue.push_back(k);
          }
        }
    }
    sizes.push_back(size);
  }
  return sizes;
}

/// Straightforward direct-method SSA on one S/I/R patch using std::mt19937_64
/// and linear propensity scans. Returns the final (S, I, R).
inline std::array<long, 3> reference_sir(long s, long i, long r, double beta, double gamma, double t_end,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double t = 0;
  while (true) {
    const double a1 = beta * static_cast<double>(s) * static_cast<double>(i);
    const double a2 = gamma * static_cast<double>(i);
    const double a0 = a1 + a2;
    if (a0 <= 0) break;
    t += -std::log(1.0 - u(rng)) / a0;
    if (t > t_end) break;
    if (u(rng) * a0 < a1) {
      --s;
      ++i;
    } else {
      --i;
      ++r;
    }
  }
  return {s, i, r};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::random_device rd;
  auto dir = std::filesystem::temp_directory_path() /
             ("patchnet_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
