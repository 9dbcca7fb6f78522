#pragma once

// Multi-patch net templates: metapopulation SIR and fire spread.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "patchnet/core.hpp"
#include "patchnet/layers.hpp"
#include "patchnet/spatial.hpp"

namespace patchnet {

/// Default rates plus optional per-patch overrides keyed by rate name
/// ("infect", "recover", "cross_infect").
struct SirParams {
  double infect = 0.1;
  double recover = 0.05;
  double cross_infect = 0.01;
  PatchRates overrides;
};

struct SirModel {
  PetriNet net;
  std::vector<double> rates;  // aligned with net.transitions()
};

/// Places S_i, I_i, R_i per patch (patches in ascending id order);
/// transitions infect_i, recover_i per patch, then cross_i_j and cross_j_i
/// for every edge {i, j}. cross_i_j is S_i + I_j -> I_i + I_j and uses the
/// cross_infect rate of patch i.
SirModel assemble_sir(const Adjacency& adj, const SirParams& params);

struct FireModel {
  PetriNet net;
  Marking marking;
};

/// Places Alive_i, Fire_i per occupied patch; spread_i_j
/// (Fire_i + Alive_j -> Fire_i + Fire_j) for both directions of every edge
/// whose ends are both occupied. Seeds start with Fire, the rest with Alive.
FireModel assemble_fire(const Adjacency& adj, const std::set<std::string>& occupied,
                        const std::set<std::string>& seeds);

enum class ArcDirection { input, output };

struct ArcOverride {
  std::string place;
  std::string transition;
  ArcDirection direction = ArcDirection::input;
  Tokens weight = 1;
};

/// Initial tokens and arc weights loaded from an init CSV.
struct InitSpec {
  std::map<std::string, Tokens> places;
  std::vector<ArcOverride> arcs;
};

struct InitializedNet {
  PetriNet net;
  Marking marking;
};

/// With a spec: its place counts over an all-zero marking and its arc
/// weights over the template's. Without one: 100 tokens in the first place.
/// Overrides must name existing places, transitions and arcs; all offenders
/// are listed in a single IdentifierError.
InitializedNet apply_init(const PetriNet& net, const std::optional<InitSpec>& spec);

inline constexpr Tokens kDefaultFirstPlaceTokens = 100;

/// "kind,id,value" with kind in {place, arc_in, arc_out}; arc ids are
/// "place:transition".
InitSpec parse_init_csv(std::string_view text);

}  // namespace patchnet
