#pragma once

// Exact stochastic simulation (Gillespie direct method) of a NetDocument.

#include <cstdint>
#include <string_view>
#include <vector>

#include "patchnet/core.hpp"
#include "patchnet/formats.hpp"
#include "patchnet/rng.hpp"

namespace patchnet {

struct SimConfig {
  double t_end = 100.0;
  double record_dt = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t max_events = 10'000'000;
  bool log_firings = false;

  void validate() const;
};

/// Mass-action propensity: rate * prod over inputs of C(m(p), w(p, t)).
/// Zero when any input is short; `rate` for a transition without inputs.
double propensity(const PetriNet& net, const Marking& m, std::size_t t, double rate);
double propensity(const PetriNet& net, const Marking& m, std::string_view t, double rate);

/// Binomial coefficient C(n, k) as a double; 0 when n < k.
double binomial(Tokens n, Tokens k);

/// One run's mutable state. Not safe for concurrent use; independent
/// instances share nothing.
class SsaEngine {
 public:
  SsaEngine(const NetDocument& doc, std::uint64_t seed);

  double time() const { return time_; }
  const std::vector<Tokens>& tokens() const { return tokens_; }
  double total_propensity() const { return tree_.empty() ? 0.0 : tree_[1]; }

  /// Draws the next waiting time; returns the absolute event time, or +inf
  /// when nothing is enabled.
  double next_event_time();
  /// Selects and fires one transition at time `at` (from next_event_time).
  std::size_t fire_next(double at);

 private:
  void update(std::size_t t);
  std::size_t select(double target) const;

  const NetDocument& doc_;
  SplitMix64 rng_;
  std::vector<Tokens> tokens_;
  std::size_t leaves_ = 1;
  std::vector<double> tree_;  // 1-based sum tree over propensities
  double time_ = 0;
};

/// Records the marking at every multiple of record_dt up to t_end (the
/// latest marking at or before each record time). Hitting max_events before
/// t_end returns the rows recorded so far with `truncated` set.
Trace simulate_ssa(const NetDocument& doc, const SimConfig& cfg);

}  // namespace patchnet
