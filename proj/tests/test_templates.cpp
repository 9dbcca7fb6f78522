#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "patchnet/error.hpp"
#include "patchnet/sim.hpp"
#include "patchnet/templates.hpp"
#include "support.hpp"

using namespace patchnet;

TEST_CASE("assemble_sir structure") {
  SUBCASE("one patch") {
    const auto m = assemble_sir(Adjacency({"p0"}, {}), {});
    CHECK(m.net.places() == std::vector<std::string>{"S_p0", "I_p0", "R_p0"});
    CHECK(m.net.transitions() == std::vector<std::string>{"infect_p0", "recover_p0"});
    CHECK(m.net.input_weight("S_p0", "infect_p0") == 1);
    CHECK(m.net.input_weight("I_p0", "infect_p0") == 1);
    CHECK(m.net.output_weight("infect_p0", "I_p0") == 2);
    CHECK(m.net.output_weight("recover_p0", "R_p0") == 1);
  }
  SUBCASE("two patches, one edge: 6 places, 6 transitions") {
    const auto m = assemble_sir(Adjacency({"a", "b"}, {{"a", "b"}}), {});
    CHECK(m.net.place_count() == 6);
    CHECK(m.net.transition_count() == 6);
    // S_a + I_b -> I_a + I_b
    CHECK(m.net.input_weight("S_a", "cross_a_b") == 1);
    CHECK(m.net.input_weight("I_b", "cross_a_b") == 1);
    CHECK(m.net.output_weight("cross_a_b", "I_a") == 1);
    CHECK(m.net.output_weight("cross_a_b", "I_b") == 1);
    CHECK(m.net.input_weight("S_b", "cross_b_a") == 1);
    CHECK(m.net.input_weight("I_a", "cross_b_a") == 1);
  }
  SUBCASE("rates: defaults and per-patch overrides") {
    SirParams params{0.2, 0.03, 0.004, {{"b", {{"infect", 0.9}, {"cross_infect", 0.5}}}}};
    const auto m = assemble_sir(Adjacency({"a", "b"}, {{"a", "b"}}), params);
    auto rate = [&](const char* t) { return m.rates[m.net.transition_index(t)]; };
    CHECK(rate("infect_a") == 0.2);
    CHECK(rate("infect_b") == 0.9);
    CHECK(rate("recover_b") == 0.03);
    CHECK(rate("cross_a_b") == 0.004);
    CHECK(rate("cross_b_a") == 0.5);
  }
  SUBCASE("empty adjacency") {
    CHECK_THROWS_AS(assemble_sir(Adjacency{}, {}), PreconditionError);
  }
}

TEST_CASE("property: SIR counts match the closed formulas") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> k(1, 30);
  for (int trial = 0; trial < 200; ++trial) {
    const auto adj = testing::random_adjacency(rng, k(rng), 0.3);
    const auto m = assemble_sir(adj, {});
    CHECK(m.net.place_count() == 3 * adj.node_count());
    CHECK(m.net.transition_count() == 2 * adj.node_count() + 2 * adj.edge_count());
    CHECK(m.rates.size() == m.net.transition_count());
  }
}

TEST_CASE("property: SIR transitions conserve tokens under random firing") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> k(1, 20);
  for (int trial = 0; trial < 100; ++trial) {
    const auto adj = testing::random_adjacency(rng, k(rng), 0.3);
    const auto model = assemble_sir(adj, {});
    for (std::size_t t = 0; t < model.net.transition_count(); ++t) {
      Tokens in = 0, out = 0;
      for (const auto& a : model.net.inputs(t)) in += a.weight;
      for (const auto& a : model.net.outputs(t)) out += a.weight;
      CHECK(in == out);
    }
    auto m = testing::random_marking(rng, model.net, 5);
    const auto total = m.total();
    for (int step = 0; step < 200; ++step) {
      auto enabled = enabled_set(model.net, m);
      if (enabled.empty()) break;
      m = fire(model.net, m, enabled[rng() % enabled.size()]);
      CHECK(m.total() == total);
    }
  }
}

TEST_CASE("assemble_fire") {
  const Adjacency path({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  SUBCASE("all occupied, seed a: fire reaches every cell") {
    const auto model = assemble_fire(path, {"a", "b", "c"}, {"a"});
    CHECK(model.net.place_count() == 6);
    CHECK(model.net.transition_count() == 4);
    CHECK(model.marking.get(model.net, "Fire_a") == 1);
    CHECK(model.marking.get(model.net, "Alive_b") == 1);
    const auto q = run_to_quiescence(model.net, model.marking, 100);
    for (const char* id : {"Fire_a", "Fire_b", "Fire_c"}) CHECK(q.marking.get(model.net, id) == 1);
  }
  SUBCASE("a gap blocks the spread") {
    const auto model = assemble_fire(path, {"a", "c"}, {"a"});
    CHECK(model.net.transition_count() == 0);
    const auto q = run_to_quiescence(model.net, model.marking, 100);
    CHECK(q.marking.get(model.net, "Fire_a") == 1);
    CHECK(q.marking.get(model.net, "Fire_c") == 0);
  }
  SUBCASE("no seeds: nothing happens") {
    const auto model = assemble_fire(path, {"a", "b", "c"}, {});
    const auto q = run_to_quiescence(model.net, model.marking, 100);
    CHECK(q.marking == model.marking);
    CHECK(q.firings == 0);
  }
  SUBCASE("seed must be occupied") {
    CHECK_THROWS_AS(assemble_fire(path, {"a"}, {"b"}), PreconditionError);
  }
}

TEST_CASE("property: quiescent fire equals flood fill and only grows") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<std::size_t> k(1, 25);
  std::bernoulli_distribution occ(0.7), seed(0.2);
  for (int trial = 0; trial < 500; ++trial) {
    const auto adj = testing::random_adjacency(rng, k(rng), 0.15);
    std::set<std::string> occupied, seeds;
    for (const auto& id : adj.nodes())
      if (occ(rng)) {
        occupied.insert(id);
        if (seed(rng)) seeds.insert(id);
      }
    const auto model = assemble_fire(adj, occupied, seeds);

    // Monotonicity along one random firing sequence.
    Marking m = model.marking;
    std::set<std::size_t> burning;
    while (true) {
      auto enabled = enabled_set(model.net, m);
      if (enabled.empty()) break;
      m = fire(model.net, m, enabled[rng() % enabled.size()]);
      std::set<std::size_t> now;
      for (std::size_t p = 0; p < model.net.place_count(); ++p)
        if (model.net.places()[p].starts_with("Fire_") && m[p] > 0) now.insert(p);
      CHECK(std::includes(now.begin(), now.end(), burning.begin(), burning.end()));
      burning = now;
    }

    const auto q = run_to_quiescence(model.net, model.marking, 1000);
    CHECK(q.marking == m);
    const auto expect = testing::flood_fill(adj, occupied, seeds);
    for (const auto& id : occupied) CHECK((q.marking.get(model.net, "Fire_" + id) == 1) == (expect.count(id) == 1));
  }
}

TEST_CASE("apply_init") {
  const auto sir = assemble_sir(Adjacency({"p0"}, {}), {});
  SUBCASE("no spec: 100 tokens in the first place") {
    const auto out = apply_init(sir.net, std::nullopt);
    CHECK(out.marking == Marking::from_map(sir.net, {{"S_p0", 100}}));
    CHECK(out.net == sir.net);
  }
  SUBCASE("spec counts over a zero baseline") {
    InitSpec spec;
    spec.places = {{"S_p0", 99}, {"I_p0", 1}};
    const auto out = apply_init(sir.net, spec);
    CHECK(out.marking == Marking::from_map(sir.net, {{"S_p0", 99}, {"I_p0", 1}}));
  }
  SUBCASE("empty spec differs from no spec only by the default tokens") {
    const auto with = apply_init(sir.net, InitSpec{});
    const auto without = apply_init(sir.net, std::nullopt);
    CHECK(with.net == without.net);
    CHECK(with.marking.total() == 0);
    Marking expect = with.marking;
    expect.set(0, 100);
    CHECK(without.marking == expect);
  }
  SUBCASE("arc override changes exactly one arc") {
    const auto two = assemble_sir(Adjacency({"a", "b"}, {{"a", "b"}}), {});
    InitSpec spec;
    spec.arcs.push_back({"S_a", "cross_a_b", ArcDirection::input, 2});
    const auto out = apply_init(two.net, spec);
    CHECK(out.net.input_weight("S_a", "cross_a_b") == 2);
    for (std::size_t t = 0; t < two.net.transition_count(); ++t) {
      const auto& tid = two.net.transitions()[t];
      for (const auto& pid : two.net.places()) {
        if (tid == "cross_a_b" && pid == "S_a") continue;
        CHECK(out.net.input_weight(pid, tid) == two.net.input_weight(pid, tid));
        CHECK(out.net.output_weight(tid, pid) == two.net.output_weight(tid, pid));
      }
    }
  }
  SUBCASE("unknown ids are all listed") {
    InitSpec spec;
    spec.places = {{"S_zz", 1}, {"Q", 2}};
    spec.arcs.push_back({"S_p0", "nope", ArcDirection::output, 1});
    try {
      apply_init(sir.net, spec);
      FAIL("expected IdentifierError");
    } catch (const IdentifierError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("S_zz") != std::string::npos);
      CHECK(msg.find("'Q'") != std::string::npos);
      CHECK(msg.find("nope") != std::string::npos);
    }
  }
}

TEST_CASE("parse_init_csv") {
  const auto a = parse_init_csv("kind,id,value\nplace,S_p0,99\n");
  CHECK(a.places == std::map<std::string, Tokens>{{"S_p0", 99}});
  const auto b = parse_init_csv("kind,id,value\narc_in,S_p0:infect_p0,2\narc_out,I_p0:infect_p0,3\n");
  REQUIRE(b.arcs.size() == 2);
  CHECK(b.arcs[0].place == "S_p0");
  CHECK(b.arcs[0].transition == "infect_p0");
  CHECK(b.arcs[0].direction == ArcDirection::input);
  CHECK(b.arcs[0].weight == 2);
  CHECK(b.arcs[1].direction == ArcDirection::output);

  auto row_of = [](const char* text) -> std::size_t {
    try {
      parse_init_csv(text);
    } catch (const ParseError& e) {
      return e.line;
    }
    return 0;
  };
  CHECK(row_of("kind,id,value\nplace,S_p0,-1\n") == 2);
  CHECK(row_of("kind,id,value\nplace,S_p0,1\nweird,S_p0,1\n") == 3);
  CHECK(row_of("kind,id,value\narc_in,S_p0,1\n") == 2);
  CHECK(row_of("kind,id,value\narc_in,S_p0:t,0\n") == 2);
}
