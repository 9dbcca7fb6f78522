#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <set>

#include "patchnet/error.hpp"
#include "patchnet/rng.hpp"
#include "patchnet/sweep.hpp"
#include "patchnet/templates.hpp"
#include "patchnet/text.hpp"
#include "support.hpp"

using namespace patchnet;
namespace fs = std::filesystem;

namespace {

NetDocument base_doc() {
  const auto m = assemble_sir(Adjacency({"p0", "p1"}, {{"p0", "p1"}}), {});
  return {"base", m.net, Marking::from_map(m.net, {{"S_p0", 50}, {"I_p0", 2}, {"S_p1", 40}}), m.rates};
}

SweepSpec spec_3x4x2() {
  SweepSpec s;
  s.name = "demo";
  s.base = base_doc();
  s.axes = {{"rates.infect_p0", {0.05, 0.1, 0.2}}, {"marking.S_p1", {10, 20, 30, 40}}};
  s.replicates = 2;
  s.base_seed = 11;
  return s;
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = text::read_file(e.path());
  return out;
}

}  // namespace

TEST_CASE("expand_sweep") {
  const auto spec = spec_3x4x2();
  const auto recs = expand_sweep(spec);
  REQUIRE(recs.size() == 24);
  CHECK(recs[0].run_id == "run_0_0_r0");
  CHECK(recs[1].run_id == "run_0_0_r1");
  CHECK(recs[2].run_id == "run_0_1_r0");
  CHECK(recs[23].run_id == "run_2_3_r1");
  CHECK(recs[23].assignment == std::vector<double>{0.2, 40});

  std::set<std::string> ids;
  std::set<std::vector<double>> combos;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].index == i);
    CHECK(recs[i].seed == derive_seed(11, i));
    CHECK(recs[i].status == RunStatus::pending);
    ids.insert(recs[i].run_id);
    auto key = recs[i].assignment;
    key.push_back(static_cast<double>(recs[i].replicate));
    combos.insert(key);
    if (i > 0) CHECK(recs[i - 1].run_id < recs[i].run_id);
  }
  CHECK(ids.size() == 24);
  CHECK(combos.size() == 24);

  SUBCASE("deterministic") {
    const auto again = expand_sweep(spec);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(again[i].run_id == recs[i].run_id);
      CHECK(again[i].seed == recs[i].seed);
    }
  }
  SUBCASE("zero axes") {
    auto s = spec;
    s.axes.clear();
    s.replicates = 5;
    const auto r = expand_sweep(s);
    REQUIRE(r.size() == 5);
    CHECK(r[0].run_id == "run_r0");
    CHECK(r[4].assignment.empty());
  }
  SUBCASE("padding keeps sort order") {
    auto s = spec;
    s.axes = {{"rates.infect_p0", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2}}};
    s.replicates = 1;
    const auto r = expand_sweep(s);
    CHECK(r[0].run_id == "run_00_r0");
    CHECK(r[11].run_id == "run_11_r0");
  }
  SUBCASE("bad axis paths") {
    auto s = spec;
    s.axes = {{"rates.nope", {1}}};
    CHECK_THROWS_AS(expand_sweep(s), IdentifierError);
    s.axes = {{"weights.S_p0", {1}}};
    CHECK_THROWS_AS(expand_sweep(s), IdentifierError);
  }
}

TEST_CASE("apply_assignment") {
  const auto spec = spec_3x4x2();
  const auto recs = expand_sweep(spec);
  const auto doc = apply_assignment(spec, recs[23]);
  CHECK(doc.rate("infect_p0") == 0.2);
  CHECK(doc.marking.get(doc.net, "S_p1") == 40);
  CHECK(doc.rate("recover_p0") == spec.base.rate("recover_p0"));
}

TEST_CASE("run_sweep and merge_csv") {
  auto spec = spec_3x4x2();
  spec.axes.pop_back();  // 3 values x 2 replicates = 6 runs
  const SimConfig cfg{20.0, 1.0};
  const auto dir = testing::temp_dir("sweep");
  const auto done = run_sweep(spec, expand_sweep(spec), cfg, dir, 2);
  REQUIRE(done.size() == 6);
  for (const auto& r : done) {
    CHECK(r.status == RunStatus::ok);
    CHECK(fs::exists(dir / r.file));
    CHECK(read_trace_csv(text::read_file(dir / r.file)) == [&] {
      SimConfig c = cfg;
      c.seed = r.seed;
      return simulate_ssa(apply_assignment(spec, r), c);
    }());
  }
  const auto manifest = text::split_lines(text::read_file(dir / "manifest.csv"));
  CHECK(manifest[0] == "run_id,status,seed,rates.infect_p0,file");
  CHECK(manifest.size() == 7);

  const auto merged = merge_csv(dir);
  const auto lines = text::split_lines(merged.merged);
  CHECK(lines[0] == "run_id,rates.infect_p0,time,S_p0,I_p0,R_p0,S_p1,I_p1,R_p1");
  CHECK(lines.size() == 1 + 6 * 21);
  CHECK(lines[1].rfind("run_0_r0,0.05,0,50,2,0,40,0,0", 0) == 0);

  const auto summary = text::split_lines(merged.summary);
  CHECK(summary.size() == 1 + 6 * 6);
  // Check one summary row against the trace.
  const auto t = read_trace_csv(text::read_file(dir / "run_1_r0.csv"));
  Tokens lo = t.rows[0].tokens[1], hi = lo;
  double sum = 0;
  for (const auto& row : t.rows) {
    lo = std::min(lo, row.tokens[1]);
    hi = std::max(hi, row.tokens[1]);
    sum += static_cast<double>(row.tokens[1]);
  }
  const std::string expect = "run_1_r0,I_p0," + std::to_string(t.rows.back().tokens[1]) + "," + std::to_string(lo) +
                             "," + std::to_string(hi) + "," + text::format_real(sum / static_cast<double>(t.rows.size()));
  CHECK(std::find(summary.begin(), summary.end(), expect) != summary.end());

  SUBCASE("idempotent") {
    const auto again = merge_csv(dir);
    CHECK(again.merged == merged.merged);
    CHECK(again.summary == merged.summary);
  }
  SUBCASE("missing trace") {
    fs::remove(dir / "run_2_r1.csv");
    CHECK_THROWS_AS(merge_csv(dir), MergeError);
  }
  fs::remove_all(dir);
}

TEST_CASE("merge without a manifest") {
  const auto dir = testing::temp_dir("empty");
  CHECK_THROWS_AS(merge_csv(dir), MergeError);
  fs::remove_all(dir);
}

TEST_CASE("parallelism does not change outputs") {
  const auto spec = spec_3x4x2();
  const SimConfig cfg{15.0, 0.5};
  const auto a = testing::temp_dir("par1"), b = testing::temp_dir("par8");
  run_sweep(spec, expand_sweep(spec), cfg, a, 1);
  run_sweep(spec, expand_sweep(spec), cfg, b, 8);
  const auto ca = dir_contents(a), cb = dir_contents(b);
  CHECK(ca.size() == 25);
  CHECK(ca == cb);
  CHECK(merge_csv(a).merged == merge_csv(b).merged);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("an overlong run is marked truncated, the rest finish") {
  SweepSpec spec;
  spec.base = base_doc();
  spec.axes = {{"marking.I_p0", {0, 30}}};
  spec.base_seed = 3;
  SimConfig cfg{50.0, 1.0};
  cfg.max_events = 60;
  const auto dir = testing::temp_dir("trunc");
  const auto done = run_sweep(spec, expand_sweep(spec), cfg, dir, 2);
  CHECK(done[0].status == RunStatus::ok);
  CHECK(done[1].status == RunStatus::truncated);
  CHECK(text::read_file(dir / "manifest.csv").find("run_1_r0,truncated,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("a failing run is recorded and does not stop the others") {
  SweepSpec spec;
  spec.base = base_doc();
  spec.axes = {{"marking.S_p0", {10, 2.5}}};
  const auto dir = testing::temp_dir("fail");
  const auto done = run_sweep(spec, expand_sweep(spec), {5.0, 1.0}, dir, 1);
  CHECK(done[0].status == RunStatus::ok);
  CHECK(done[1].status == RunStatus::failed);
  CHECK(done[1].file.empty());
  CHECK_FALSE(done[1].message.empty());
  CHECK(text::split_lines(merge_csv(dir).merged).size() == 1 + 6);
  fs::remove_all(dir);
}

TEST_CASE("parse_sweep_file") {
  const auto dir = testing::temp_dir("spec");
  text::write_file(dir / "base.andl", emit_andl(base_doc()));
  const auto file = parse_sweep_file(
      "# demo\nname = demo\nmodel = base.andl\nreplicates = 2\nbase_seed = 7\nt_end = 50\nrecord_dt = 0.5\n"
      "max_events = 1000\naxis rates.infect_p0 = 0.1, 0.2\n",
      dir);
  CHECK(file.spec.name == "demo");
  CHECK(file.spec.base == base_doc());
  CHECK(file.spec.replicates == 2);
  CHECK(file.spec.base_seed == 7);
  CHECK(file.sim.t_end == 50);
  CHECK(file.sim.record_dt == 0.5);
  CHECK(file.sim.max_events == 1000);
  REQUIRE(file.spec.axes.size() == 1);
  CHECK(file.spec.axes[0].values == std::vector<double>{0.1, 0.2});
  CHECK_THROWS_AS(parse_sweep_file("name = x\n", dir), ValidationError);
  CHECK_THROWS_AS(parse_sweep_file("model = base.andl\ncolour = red\n", dir), ValidationError);
  CHECK(default_output_dir_name("demo").size() == std::string("demo_20260101T000000Z").size());
  fs::remove_all(dir);
}

TEST_CASE("merge_csv on hand-written traces") {
  const auto dir = testing::temp_dir("hand");
  text::write_file(dir / "manifest.csv", "run_id,status,seed,rates.t,file\nrun_1_r0,ok,2,0.5,b.csv\nrun_0_r0,ok,1,0.25,a.csv\n");
  text::write_file(dir / "a.csv", "time,A,B\n0,100,0\n1,100,50\n2,100,100\n");
  text::write_file(dir / "b.csv", "time,A,B\n0,100,7\n1,100,7\n2,100,7\n");
  const auto merged = merge_csv(dir);
  CHECK(merged.merged ==
        "run_id,rates.t,time,A,B\n"
        "run_0_r0,0.25,0,100,0\nrun_0_r0,0.25,1,100,50\nrun_0_r0,0.25,2,100,100\n"
        "run_1_r0,0.5,0,100,7\nrun_1_r0,0.5,1,100,7\nrun_1_r0,0.5,2,100,7\n");
  CHECK(merged.summary ==
        "run_id,place,final,min,max,mean\n"
        "run_0_r0,A,100,100,100,100\nrun_0_r0,B,100,0,100,50\n"
        "run_1_r0,A,100,100,100,100\nrun_1_r0,B,7,7,7,7\n");
  fs::remove_all(dir);
}
