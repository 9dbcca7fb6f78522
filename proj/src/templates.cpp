#include "patchnet/templates.hpp"

#include "patchnet/error.hpp"
#include "patchnet/text.hpp"

namespace patchnet {

namespace {

double patch_rate(const SirParams& params, const std::string& patch, const char* name,
                  double fallback) {
  double rate = fallback;
  if (auto p = params.overrides.find(patch); p != params.overrides.end())
    if (auto r = p->second.find(name); r != p->second.end()) rate = r->second;
  if (!(rate > 0))
    throw PreconditionError(std::string("rate '") + name + "' for patch '" + patch +
                            "' must be positive");
  return rate;
}

}  // namespace

SirModel assemble_sir(const Adjacency& adj, const SirParams& params) {
  if (adj.node_count() == 0) throw PreconditionError("adjacency has no patches");
  const auto& ids = adj.nodes();
  const std::size_t k = ids.size();
  NetBuilder b;
  std::vector<std::size_t> s(k), i(k), r(k);
  for (std::size_t n = 0; n < k; ++n) {
    s[n] = b.add_place("S_" + ids[n]);
    i[n] = b.add_place("I_" + ids[n]);
    r[n] = b.add_place("R_" + ids[n]);
  }
  std::vector<double> rates;
  rates.reserve(2 * k + 2 * adj.edge_count());
  for (std::size_t n = 0; n < k; ++n) {
    auto inf = b.add_transition("infect_" + ids[n]);
    b.set_input(s[n], inf, 1);
    b.set_input(i[n], inf, 1);
    b.set_output(inf, i[n], 2);
    rates.push_back(patch_rate(params, ids[n], "infect", params.infect));

    auto rec = b.add_transition("recover_" + ids[n]);
    b.set_input(i[n], rec, 1);
    b.set_output(rec, r[n], 1);
    rates.push_back(patch_rate(params, ids[n], "recover", params.recover));
  }
  auto cross = [&](std::size_t to, std::size_t from) {
    auto t = b.add_transition("cross_" + ids[to] + "_" + ids[from]);
    b.set_input(s[to], t, 1);
    b.set_input(i[from], t, 1);
    b.set_output(t, i[to], 1);
    b.set_output(t, i[from], 1);
    rates.push_back(patch_rate(params, ids[to], "cross_infect", params.cross_infect));
  };
  for (const auto& [a, c] : adj.edges()) {
    cross(a, c);
    cross(c, a);
  }
  return {b.build(), std::move(rates)};
}

FireModel assemble_fire(const Adjacency& adj, const std::set<std::string>& occupied,
                        const std::set<std::string>& seeds) {
  for (const auto& id : occupied)
    if (!adj.index_of(id)) throw PreconditionError("occupied patch '" + id + "' is not in the adjacency");
  for (const auto& id : seeds)
    if (!occupied.count(id)) throw PreconditionError("seed patch '" + id + "' is not occupied");

  const auto& ids = adj.nodes();
  NetBuilder b;
  std::vector<std::size_t> alive(ids.size()), fire(ids.size());
  std::vector<bool> fuel(ids.size(), false);
  for (std::size_t n = 0; n < ids.size(); ++n) {
    if (!occupied.count(ids[n])) continue;
    fuel[n] = true;
    alive[n] = b.add_place("Alive_" + ids[n]);
    fire[n] = b.add_place("Fire_" + ids[n]);
  }
  auto spread = [&](std::size_t from, std::size_t to) {
    auto t = b.add_transition("spread_" + ids[from] + "_" + ids[to]);
    b.set_input(fire[from], t, 1);
    b.set_input(alive[to], t, 1);
    b.set_output(t, fire[from], 1);
    b.set_output(t, fire[to], 1);
  };
  for (const auto& [a, c] : adj.edges()) {
    if (!fuel[a] || !fuel[c]) continue;
    spread(a, c);
    spread(c, a);
  }
  FireModel model{b.build(), {}};
  model.marking = Marking(model.net.place_count());
  for (std::size_t n = 0; n < ids.size(); ++n) {
    if (!fuel[n]) continue;
    model.marking.set(seeds.count(ids[n]) ? fire[n] : alive[n], 1);
  }
  return model;
}

InitializedNet apply_init(const PetriNet& net, const std::optional<InitSpec>& spec) {
  if (!spec) {
    Marking m(net.place_count());
    if (net.place_count() > 0) m.set(0, kDefaultFirstPlaceTokens);
    return {net, std::move(m)};
  }

  std::vector<std::string> offenders;
  for (const auto& [id, count] : spec->places) {
    if (!net.has_place(id)) offenders.push_back("place '" + id + "'");
    if (count < 0) throw PreconditionError("negative token count for '" + id + "'");
  }
  for (const auto& arc : spec->arcs) {
    const bool p = net.has_place(arc.place), t = net.has_transition(arc.transition);
    if (!p) offenders.push_back("place '" + arc.place + "'");
    if (!t) offenders.push_back("transition '" + arc.transition + "'");
    if (p && t) {
      const Tokens w = arc.direction == ArcDirection::input
                           ? net.input_weight(arc.place, arc.transition)
                           : net.output_weight(arc.transition, arc.place);
      if (w == 0) offenders.push_back("arc '" + arc.place + ":" + arc.transition + "'");
    }
  }
  if (!offenders.empty()) {
    std::string msg = "init spec references unknown ids:";
    for (const auto& o : offenders) msg += " " + o;
    throw IdentifierError(msg);
  }

  NetBuilder b(net);
  for (const auto& arc : spec->arcs) {
    if (arc.direction == ArcDirection::input)
      b.set_input(arc.place, arc.transition, arc.weight);
    else
      b.set_output(arc.transition, arc.place, arc.weight);
  }
  InitializedNet out{b.build(), {}};
  out.marking = Marking::from_map(out.net, spec->places);
  return out;
}

InitSpec parse_init_csv(std::string_view csv) {
  auto lines = text::split_lines(csv);
  if (lines.empty() || text::trim(lines[0]) != "kind,id,value")
    throw ParseError("init CSV row 1: header must be 'kind,id,value'", 1, 1);
  InitSpec spec;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (text::trim(lines[r]).empty()) continue;
    const auto row = r + 1;
    auto fail = [&](const std::string& why, std::size_t col) {
      return ParseError("init CSV row " + std::to_string(row) + ": " + why, row, col);
    };
    auto f = text::split_fields(lines[r]);
    if (f.size() != 3) throw fail("expected 3 fields", 1);
    const std::string kind(text::trim(f[0]));
    const std::string id(text::trim(f[1]));
    std::int64_t value;
    if (!text::parse_int(f[2], value)) throw fail("value is not an integer", 3);
    if (kind == "place") {
      if (value < 0) throw fail("token count must be non-negative", 3);
      if (!is_valid_identifier(id)) throw fail("invalid place id '" + id + "'", 2);
      spec.places[id] = value;
    } else if (kind == "arc_in" || kind == "arc_out") {
      if (value < 1) throw fail("arc weight must be positive", 3);
      const auto colon = id.find(':');
      if (colon == std::string::npos) throw fail("arc id must be 'place:transition'", 2);
      ArcOverride arc{id.substr(0, colon), id.substr(colon + 1),
                      kind == "arc_in" ? ArcDirection::input : ArcDirection::output, value};
      if (!is_valid_identifier(arc.place) || !is_valid_identifier(arc.transition))
        throw fail("arc id must be 'place:transition'", 2);
      spec.arcs.push_back(std::move(arc));
    } else {
      throw fail("unknown kind '" + kind + "'", 1);
    }
  }
  return spec;
}

}  // namespace patchnet
