#include "patchnet/core.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace patchnet {

bool is_valid_identifier(std::string_view id) {
  if (id.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(id.front())) return false;
  return std::all_of(id.begin() + 1, id.end(), [&](char c) { return alpha(c) || digit(c); });
}

// ---------------------------------------------------------------- PetriNet

std::size_t PetriNet::place_index(std::string_view id) const {
  auto it = place_lookup_.find(std::string(id));
  if (it == place_lookup_.end()) throw IdentifierError("unknown place '" + std::string(id) + "'");
  return it->second;
}

std::size_t PetriNet::transition_index(std::string_view id) const {
  auto it = transition_lookup_.find(std::string(id));
  if (it == transition_lookup_.end())
    throw IdentifierError("unknown transition '" + std::string(id) + "'");
  return it->second;
}

bool PetriNet::has_place(std::string_view id) const {
  return place_lookup_.count(std::string(id)) != 0;
}

bool PetriNet::has_transition(std::string_view id) const {
  return transition_lookup_.count(std::string(id)) != 0;
}

static Tokens weight_of(std::span<const ArcTerm> arcs, std::size_t place) {
  auto it = std::lower_bound(arcs.begin(), arcs.end(), place,
                             [](const ArcTerm& a, std::size_t p) { return a.place < p; });
  return (it != arcs.end() && it->place == place) ? it->weight : 0;
}

Tokens PetriNet::input_weight(std::string_view place, std::string_view transition) const {
  return weight_of(inputs(transition_index(transition)), place_index(place));
}

Tokens PetriNet::output_weight(std::string_view transition, std::string_view place) const {
  return weight_of(outputs(transition_index(transition)), place_index(place));
}

// ---------------------------------------------------------------- NetBuilder

NetBuilder::NetBuilder(const PetriNet& net)
    : places_(net.places_),
      transitions_(net.transitions_),
      inputs_(net.transition_count()),
      outputs_(net.transition_count()),
      place_lookup_(net.place_lookup_),
      transition_lookup_(net.transition_lookup_) {
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    for (const auto& a : net.inputs_[t]) inputs_[t][a.place] = a.weight;
    for (const auto& a : net.outputs_[t]) outputs_[t][a.place] = a.weight;
  }
}

std::size_t NetBuilder::add_place(std::string id) {
  if (!is_valid_identifier(id)) throw IdentifierError("invalid place identifier '" + id + "'");
  if (place_lookup_.count(id) || transition_lookup_.count(id))
    throw IdentifierError("duplicate identifier '" + id + "'");
  place_lookup_.emplace(id, places_.size());
  places_.push_back(std::move(id));
  return places_.size() - 1;
}

std::size_t NetBuilder::add_transition(std::string id) {
  if (!is_valid_identifier(id))
    throw IdentifierError("invalid transition identifier '" + id + "'");
  if (place_lookup_.count(id) || transition_lookup_.count(id))
    throw IdentifierError("duplicate identifier '" + id + "'");
  transition_lookup_.emplace(id, transitions_.size());
  transitions_.push_back(std::move(id));
  inputs_.emplace_back();
  outputs_.emplace_back();
  return transitions_.size() - 1;
}

void NetBuilder::set_input(std::size_t place, std::size_t transition, Tokens weight) {
  if (place >= places_.size() || transition >= transitions_.size())
    throw IdentifierError("arc references an undeclared node");
  if (weight < 1) throw PreconditionError("arc weight must be >= 1");
  inputs_[transition][place] = weight;
}

void NetBuilder::set_output(std::size_t transition, std::size_t place, Tokens weight) {
  if (place >= places_.size() || transition >= transitions_.size())
    throw IdentifierError("arc references an undeclared node");
  if (weight < 1) throw PreconditionError("arc weight must be >= 1");
  outputs_[transition][place] = weight;
}

void NetBuilder::set_input(std::string_view place, std::string_view transition, Tokens weight) {
  set_input(find_place(place), find_transition(transition), weight);
}

void NetBuilder::set_output(std::string_view transition, std::string_view place, Tokens weight) {
  set_output(find_transition(transition), find_place(place), weight);
}

std::size_t NetBuilder::find_place(std::string_view id) const {
  auto it = place_lookup_.find(std::string(id));
  if (it == place_lookup_.end()) throw IdentifierError("unknown place '" + std::string(id) + "'");
  return it->second;
}

std::size_t NetBuilder::find_transition(std::string_view id) const {
  auto it = transition_lookup_.find(std::string(id));
  if (it == transition_lookup_.end())
    throw IdentifierError("unknown transition '" + std::string(id) + "'");
  return it->second;
}

PetriNet NetBuilder::build() const {
  PetriNet net;
  net.places_ = places_;
  net.transitions_ = transitions_;
  net.place_lookup_ = place_lookup_;
  net.transition_lookup_ = transition_lookup_;
  net.inputs_.resize(transitions_.size());
  net.outputs_.resize(transitions_.size());
  net.consumers_.resize(places_.size());
  for (std::size_t t = 0; t < transitions_.size(); ++t) {
    for (const auto& [p, w] : inputs_[t]) {
      net.inputs_[t].push_back({p, w});
      net.consumers_[p].push_back(t);
    }
    for (const auto& [p, w] : outputs_[t]) net.outputs_[t].push_back({p, w});
  }
  return net;
}

// ---------------------------------------------------------------- Marking

Marking::Marking(std::vector<Tokens> tokens) : tokens_(std::move(tokens)) {
  for (auto c : tokens_)
    if (c < 0) throw PreconditionError("token counts must be non-negative");
}

Marking Marking::from_map(const PetriNet& net, const std::map<std::string, Tokens>& counts) {
  Marking m(net.place_count());
  for (const auto& [id, c] : counts) m.set(net.place_index(id), c);
  return m;
}

void Marking::set(std::size_t p, Tokens count) {
  if (count < 0) throw PreconditionError("token counts must be non-negative");
  tokens_.at(p) = count;
}

Tokens Marking::get(const PetriNet& net, std::string_view place) const {
  return tokens_.at(net.place_index(place));
}

Tokens Marking::total() const { return std::accumulate(tokens_.begin(), tokens_.end(), Tokens{0}); }

// ---------------------------------------------------------------- semantics

static void check_transition(const PetriNet& net, std::size_t t) {
  if (t >= net.transition_count())
    throw IdentifierError("unknown transition index " + std::to_string(t));
}

static bool enabled_unchecked(const PetriNet& net, std::span<const Tokens> m, std::size_t t) {
  for (const auto& a : net.inputs(t))
    if (m[a.place] < a.weight) return false;
  return true;
}

bool is_enabled(const PetriNet& net, const Marking& m, std::size_t t) {
  check_transition(net, t);
  return enabled_unchecked(net, m.tokens(), t);
}

bool is_enabled(const PetriNet& net, const Marking& m, std::string_view t) {
  return is_enabled(net, m, net.transition_index(t));
}

Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
  if (!is_enabled(net, m, t))
    throw SemanticsError("transition '" + net.transitions()[t] + "' is not enabled");
  Marking next = m;
  for (const auto& a : net.inputs(t)) next.tokens_[a.place] -= a.weight;
  for (const auto& a : net.outputs(t)) next.tokens_[a.place] += a.weight;
  return next;
}

Marking fire(const PetriNet& net, const Marking& m, std::string_view t) {
  return fire(net, m, net.transition_index(t));
}

std::vector<std::size_t> enabled_set(const PetriNet& net, const Marking& m) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (enabled_unchecked(net, m.tokens(), t)) out.push_back(t);
  return out;
}

std::vector<std::string> enabled_ids(const PetriNet& net, const Marking& m) {
  std::vector<std::string> out;
  for (auto t : enabled_set(net, m)) out.push_back(net.transitions()[t]);
  return out;
}

QuiescentResult run_to_quiescence(const PetriNet& net, const Marking& m0,
                                  std::size_t max_firings) {
  if (m0.size() != net.place_count())
    throw PreconditionError("marking size does not match the net");

  // Ordered enabled set, refreshed only for transitions that read a place
  // whose count changed; begin() is always the first enabled transition.
  std::set<std::size_t> enabled;
  for (auto t : enabled_set(net, m0)) enabled.insert(t);

  std::vector<Tokens> m(m0.tokens().begin(), m0.tokens().end());
  std::size_t firings = 0;
  std::vector<std::size_t> touched;
  while (!enabled.empty()) {
    if (firings == max_firings) throw NonQuiescentError(Marking(m), firings);
    const std::size_t t = *enabled.begin();
    touched.clear();
    for (const auto& a : net.inputs(t)) {
      m[a.place] -= a.weight;
      touched.push_back(a.place);
    }
    for (const auto& a : net.outputs(t)) {
      m[a.place] += a.weight;
      touched.push_back(a.place);
    }
    ++firings;
    // Transitions with no inputs never change status and never quiesce.
    for (auto p : touched)
      for (auto u : net.consumers(p)) {
        if (enabled_unchecked(net, m, u))
          enabled.insert(u);
        else
          enabled.erase(u);
      }
  }
  return {Marking(std::move(m)), firings};
}

}  // namespace patchnet
