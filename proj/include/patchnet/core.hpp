#pragma once

// Place/transition nets: structure, markings and the untimed firing rule.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "patchnet/error.hpp"

namespace patchnet {

using Tokens = std::int64_t;

/// One weighted arc as seen from a transition: the place index and weight.
struct ArcTerm {
  std::size_t place;
  Tokens weight;
  friend bool operator==(const ArcTerm&, const ArcTerm&) = default;
};

/// True when `id` matches [A-Za-z_][A-Za-z0-9_]*.
bool is_valid_identifier(std::string_view id);

class NetBuilder;

/// Immutable place/transition net. Places and transitions keep declaration
/// order; that order is the canonical order used everywhere else. Arcs are
/// stored sparsely per transition, sorted by place index.
class PetriNet {
 public:
  PetriNet() = default;

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<std::string>& transitions() const { return transitions_; }
  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }

  // Throw IdentifierError naming the id when it is not declared.
  std::size_t place_index(std::string_view id) const;
  std::size_t transition_index(std::string_view id) const;
  bool has_place(std::string_view id) const;
  bool has_transition(std::string_view id) const;

  std::span<const ArcTerm> inputs(std::size_t t) const { return inputs_[t]; }
  std::span<const ArcTerm> outputs(std::size_t t) const { return outputs_[t]; }

  /// 0 when there is no arc.
  Tokens input_weight(std::string_view place, std::string_view transition) const;
  Tokens output_weight(std::string_view transition, std::string_view place) const;

  /// Transitions that have `place` as an input, in canonical order.
  std::span<const std::size_t> consumers(std::size_t place) const { return consumers_[place]; }

  friend bool operator==(const PetriNet& a, const PetriNet& b) {
    return a.places_ == b.places_ && a.transitions_ == b.transitions_ &&
           a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_;
  }

 private:
  friend class NetBuilder;

  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::vector<std::vector<ArcTerm>> inputs_;
  std::vector<std::vector<ArcTerm>> outputs_;
  std::vector<std::vector<std::size_t>> consumers_;
  std::unordered_map<std::string, std::size_t> place_lookup_;
  std::unordered_map<std::string, std::size_t> transition_lookup_;
};

/// Accumulates declarations and validates them in build().
class NetBuilder {
 public:
  NetBuilder() = default;
  /// Start from an existing net (used to override arc weights).
  explicit NetBuilder(const PetriNet& net);

  std::size_t add_place(std::string id);
  std::size_t add_transition(std::string id);

  /// Set (not accumulate) the weight of place -> transition. Weight must be >= 1.
  void set_input(std::size_t place, std::size_t transition, Tokens weight);
  /// Set the weight of transition -> place.
  void set_output(std::size_t transition, std::size_t place, Tokens weight);
  void set_input(std::string_view place, std::string_view transition, Tokens weight);
  void set_output(std::string_view transition, std::string_view place, Tokens weight);

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }

  /// Throws IdentifierError for invalid or duplicate ids (including ids shared
  /// between places and transitions).
  PetriNet build() const;

 private:
  std::size_t find_place(std::string_view id) const;
  std::size_t find_transition(std::string_view id) const;

  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::vector<std::map<std::size_t, Tokens>> inputs_;
  std::vector<std::map<std::size_t, Tokens>> outputs_;
  std::unordered_map<std::string, std::size_t> place_lookup_;
  std::unordered_map<std::string, std::size_t> transition_lookup_;
};

/// Token counts in the canonical place order of some net.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places) : tokens_(places, 0) {}
  explicit Marking(std::vector<Tokens> tokens);

  /// Build from a sparse id -> count map; absent places read as 0.
  static Marking from_map(const PetriNet& net, const std::map<std::string, Tokens>& counts);

  std::size_t size() const { return tokens_.size(); }
  Tokens operator[](std::size_t p) const { return tokens_[p]; }
  /// Throws PreconditionError on a negative count.
  void set(std::size_t p, Tokens count);
  Tokens get(const PetriNet& net, std::string_view place) const;
  std::span<const Tokens> tokens() const { return tokens_; }
  Tokens total() const;

  friend bool operator==(const Marking&, const Marking&) = default;

 private:
  friend Marking fire(const PetriNet&, const Marking&, std::size_t);
  std::vector<Tokens> tokens_;
};

class NonQuiescentError : public RuntimeFailure {
 public:
  NonQuiescentError(Marking partial, std::size_t firings)
      : RuntimeFailure("firing bound of " + std::to_string(firings) +
                       " exhausted with transitions still enabled"),
        partial(std::move(partial)),
        firings(firings) {}
  Marking partial;
  std::size_t firings;
};

bool is_enabled(const PetriNet& net, const Marking& m, std::size_t t);
bool is_enabled(const PetriNet& net, const Marking& m, std::string_view t);

/// Pure: returns the successor marking. Throws SemanticsError if disabled.
Marking fire(const PetriNet& net, const Marking& m, std::size_t t);
Marking fire(const PetriNet& net, const Marking& m, std::string_view t);

/// Indices of enabled transitions in canonical order.
std::vector<std::size_t> enabled_set(const PetriNet& net, const Marking& m);
/// Same, as transition ids.
std::vector<std::string> enabled_ids(const PetriNet& net, const Marking& m);

struct QuiescentResult {
  Marking marking;
  std::size_t firings = 0;
};

/// Fires the first enabled transition (canonical order) until none is
/// enabled. Throws NonQuiescentError once max_firings firings have happened
/// and something is still enabled.
QuiescentResult run_to_quiescence(const PetriNet& net, const Marking& m0,
                                  std::size_t max_firings);

}  // namespace patchnet
