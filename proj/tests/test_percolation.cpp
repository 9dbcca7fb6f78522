#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "patchnet/error.hpp"
#include "patchnet/percolation.hpp"
#include "patchnet/rng.hpp"
#include "support.hpp"

using namespace patchnet;

namespace {

double oracle_mean_cluster(int n, const std::vector<bool>& occ, bool moore) {
  double s1 = 0, s2 = 0;
  for (auto s : testing::bfs_cluster_sizes(n, occ, moore)) {
    s1 += static_cast<double>(s);
    s2 += static_cast<double>(s * s);
  }
  return s1 == 0 ? 0.0 : s2 / s1;
}

}  // namespace

TEST_CASE("sample_occupancy extremes") {
  CHECK(sample_occupancy(10, 0.0, 1).occupied_count() == 0);
  CHECK(sample_occupancy(10, 1.0, 1).occupied_count() == 100);
  CHECK(sample_occupancy(10, 0.5, 9).occupied == sample_occupancy(10, 0.5, 9).occupied);
}

TEST_CASE("spans") {
  Lattice empty(4);
  CHECK_FALSE(spans(empty, Neighborhood::moore));
  CHECK_FALSE(spans(sample_occupancy(6, 0.0, 1), Neighborhood::moore));
  CHECK(spans(sample_occupancy(6, 1.0, 1), Neighborhood::von_neumann));

  Lattice row(4);
  for (int c = 0; c < 4; ++c) row.set(2, c);
  CHECK(spans(row, Neighborhood::von_neumann));

  Lattice diag(3);
  for (int i = 0; i < 3; ++i) diag.set(i, i);
  CHECK(spans(diag, Neighborhood::moore));
  CHECK_FALSE(spans(diag, Neighborhood::von_neumann));

  Lattice single(1);
  single.set(0, 0);
  CHECK(spans(single, Neighborhood::moore));
}

TEST_CASE("mean_cluster_size") {
  Lattice one(3);
  one.set(1, 1);
  CHECK(mean_cluster_size(one, Neighborhood::moore) == 1.0);

  // Clusters of sizes 1 and 3 -> (1 + 9) / 4.
  Lattice two(4);
  two.set(0, 0);
  two.set(3, 1);
  two.set(3, 2);
  two.set(3, 3);
  CHECK(mean_cluster_size(two, Neighborhood::von_neumann) == 2.5);

  CHECK(mean_cluster_size(Lattice(5), Neighborhood::moore) == 0.0);
}

TEST_CASE("union-find against breadth-first search") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const int n = static_cast<int>(rng() % 20) + 1;
    const auto lat = sample_occupancy(n, p(rng), rng());
    for (bool moore : {true, false}) {
      const auto mode = moore ? Neighborhood::moore : Neighborhood::von_neumann;
      CHECK(spans(lat, mode) == testing::bfs_spans(n, lat.occupied, moore));
      CHECK(mean_cluster_size(lat, mode) == doctest::Approx(oracle_mean_cluster(n, lat.occupied, moore)));
    }
  }
}

TEST_CASE("net engine agrees with the oracle") {
  std::mt19937_64 rng(72);
  for (int i = 0; i < 300; ++i) {
    const int n = static_cast<int>(rng() % 12) + 1;
    const auto lat = sample_occupancy(n, 0.3 + 0.3 * static_cast<double>(rng() % 100) / 100.0, rng());
    for (auto mode : {Neighborhood::moore, Neighborhood::von_neumann})
      CHECK(percolate_via_net(lat, mode) == spans(lat, mode));
  }
}

TEST_CASE("spanning is monotone in added sites") {
  std::mt19937_64 rng(73);
  for (int i = 0; i < 300; ++i) {
    const int n = 10;
    auto lat = sample_occupancy(n, 0.4, rng());
    bool before = spans(lat, Neighborhood::moore);
    for (int k = 0; k < 10; ++k) {
      lat.set(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
      const bool after = spans(lat, Neighborhood::moore);
      CHECK((!before || after));
      before = after;
    }
  }
}

TEST_CASE("half_crossing") {
  CHECK(half_crossing({0.0, 1.0}, {0.0, 1.0}) == 0.5);
  CHECK(half_crossing({0.1, 0.2, 0.3}, {0.0, 0.25, 0.75}) == doctest::Approx(0.25));
  CHECK(half_crossing({0.1, 0.2}, {0.5, 1.0}) == 0.1);
  CHECK_THROWS_AS(half_crossing({0.1, 0.2}, {0.0, 0.3}), NoCrossingError);
  CHECK_THROWS_AS(half_crossing({0.1, 0.2}, {0.6, 0.9}), NoCrossingError);
}

TEST_CASE("estimate_threshold") {
  const std::vector<double> grid{0.2, 0.4, 0.6};
  const auto a = estimate_threshold(12, grid, 30, 5, PercolationEngine::oracle);
  const auto b = estimate_threshold(12, grid, 30, 5, PercolationEngine::net);
  const auto c = estimate_threshold(12, grid, 30, 5, PercolationEngine::oracle, Neighborhood::moore, 4);
  CHECK(a.spanning_prob == b.spanning_prob);
  CHECK(a.spanning_prob == c.spanning_prob);
  CHECK(a.mean_cluster_size == c.mean_cluster_size);
  CHECK(a.p_c_estimate == b.p_c_estimate);
  CHECK(a.spanning_prob.front() < 0.5);
  CHECK(a.spanning_prob.back() > 0.5);
  CHECK(write_threshold_csv(a).rfind("p,spanning_prob,mean_cluster_size\n0.2,", 0) == 0);

  // Trial lattices are reproducible from the published seed scheme.
  const auto lat = sample_occupancy(12, 0.4, lattice_seed(5, 1, 0));
  CHECK(lat.occupied == sample_occupancy(12, 0.4, derive_seed(derive_seed(5, 1), 0)).occupied);
}
