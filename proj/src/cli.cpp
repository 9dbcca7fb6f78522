#include "patchnet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <set>
#include <thread>

#include "CLI11.hpp"

#include "patchnet/error.hpp"
#include "patchnet/formats.hpp"
#include "patchnet/layers.hpp"
#include "patchnet/percolation.hpp"
#include "patchnet/sim.hpp"
#include "patchnet/spatial.hpp"
#include "patchnet/sweep.hpp"
#include "patchnet/templates.hpp"
#include "patchnet/text.hpp"

namespace fs = std::filesystem;

namespace patchnet {

namespace {

std::string read_input(const std::string& path) {
  if (!fs::exists(path)) throw ValidationError("input file '" + path + "' does not exist");
  return text::read_file(path);
}

std::set<std::string> id_list(const std::string& csv) {
  std::set<std::string> ids;
  for (const auto& f : text::split_fields(csv)) {
    auto id = std::string(text::trim(f));
    if (!id.empty()) ids.insert(std::move(id));
  }
  return ids;
}

struct GridArgs {
  std::string region, out, grid_out, mode = "moore";
  double cell_size = 0;
};

void cmd_grid(const GridArgs& a, std::ostream& out) {
  const auto mode = parse_neighborhood(a.mode);
  const auto grid = grid_from_region(load_region(read_input(a.region)), a.cell_size);
  const auto adj = neighbors(grid, mode);
  text::write_file(a.out, write_adjacency_csv(adj));
  if (!a.grid_out.empty()) text::write_file(a.grid_out, write_patch_csv(grid));
  out << "grid: " << adj.node_count() << " patches, " << adj.edge_count() << " edges\n";
}

struct AssembleArgs {
  std::string tmpl, adjacency, layers, rate_rule, aggregate = "mean", init, andl, sbml, name;
  std::string occupied, seeds;
  double infect = 0.1, recover = 0.05, cross_infect = 0.01;
};

void cmd_assemble(const AssembleArgs& a, std::ostream& out) {
  if (a.andl.empty() && a.sbml.empty())
    throw ValidationError("assemble needs at least one of --andl or --sbml");
  if (a.tmpl != "sir" && !a.rate_rule.empty())
    throw ValidationError("--rate-rule only applies to the sir template");
  const auto adj = load_adjacency_csv(read_input(a.adjacency));
  std::optional<InitSpec> init;
  if (!a.init.empty()) init = parse_init_csv(read_input(a.init));

  NetDocument doc;
  doc.name = a.name.empty() ? a.tmpl : a.name;
  if (a.tmpl == "sir") {
    SirParams params{a.infect, a.recover, a.cross_infect, {}};
    if (!a.rate_rule.empty()) {
      if (a.layers.empty()) throw ValidationError("--rate-rule needs --layers");
      const auto attrs = bind_layers(adj.nodes(), parse_layers_csv(read_input(a.layers)),
                                     parse_aggregate(a.aggregate));
      params.overrides = derive_rates(attrs, parse_rate_rules(a.rate_rule));
    }
    auto model = assemble_sir(adj, params);
    auto ready = apply_init(model.net, init);
    doc.net = std::move(ready.net);
    doc.marking = std::move(ready.marking);
    doc.rates = std::move(model.rates);
  } else {
    const auto occupied = a.occupied.empty() ? std::set<std::string>(adj.nodes().begin(), adj.nodes().end())
                                             : id_list(a.occupied);
    const auto seeds = id_list(a.seeds);
    auto model = assemble_fire(adj, occupied, seeds);
    doc.rates.assign(model.net.transition_count(), 1.0);
    if (init || seeds.empty()) {
      auto ready = apply_init(model.net, init);
      doc.net = std::move(ready.net);
      doc.marking = std::move(ready.marking);
    } else {
      doc.net = std::move(model.net);
      doc.marking = std::move(model.marking);
    }
  }
  if (!a.andl.empty()) text::write_file(a.andl, emit_andl(doc));
  if (!a.sbml.empty()) text::write_file(a.sbml, emit_sbml(doc));
  out << "assemble: " << doc.net.place_count() << " places, " << doc.net.transition_count()
      << " transitions\n";
}

struct SimulateArgs {
  std::string model, out;
  double t_end = 100, record_dt = 1;
  std::uint64_t seed = 0, max_events = 10'000'000;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  SimConfig cfg{a.t_end, a.record_dt, a.seed, a.max_events, false};
  cfg.validate();
  std::vector<std::string> warnings;
  const auto doc = load_document(a.model, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  const auto trace = simulate_ssa(doc, cfg);
  text::write_file(a.out, write_trace_csv(trace, doc.net));
  out << "simulate: " << trace.events << " events, " << trace.rows.size() << " rows"
      << (trace.truncated ? " (truncated at max events)" : "") << "\n";
}

struct SweepArgs {
  std::string spec, out_dir;
  unsigned parallelism = 1;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const auto spec_path = fs::path(a.spec);
  const auto file = parse_sweep_file(read_input(a.spec), spec_path.parent_path());
  const auto records = expand_sweep(file.spec);
  const fs::path dir = a.out_dir.empty() ? fs::path(default_output_dir_name(file.spec.name)) : fs::path(a.out_dir);
  const auto done = run_sweep(file.spec, records, file.sim, dir, a.parallelism);
  std::size_t ok = 0, truncated = 0, failed = 0;
  for (const auto& r : done) {
    ok += r.status == RunStatus::ok;
    truncated += r.status == RunStatus::truncated;
    failed += r.status == RunStatus::failed;
  }
  out << "sweep: " << done.size() << " runs in " << dir.string() << " (" << ok << " ok, " << truncated
      << " truncated, " << failed << " failed)\n";
}

void cmd_merge(const std::string& dir, std::ostream& out) {
  const auto merged = merge_csv(dir);
  text::write_file(fs::path(dir) / "merged.csv", merged.merged);
  text::write_file(fs::path(dir) / "summary.csv", merged.summary);
  out << "merge: wrote merged.csv and summary.csv in " << dir << "\n";
}

struct PercolationArgs {
  int n = 100, trials = 200;
  double p_min = 0.35, p_max = 0.47, step = 0.01;
  std::uint64_t seed = 0;
  std::string engine = "oracle", mode = "moore", out;
  unsigned threads = 1;
};

std::vector<double> p_range(double lo, double hi, double step) {
  if (!(step > 0)) throw ValidationError("--step must be positive");
  if (!(lo >= 0 && hi <= 1 && lo <= hi)) throw ValidationError("need 0 <= p-min <= p-max <= 1");
  std::vector<double> grid;
  for (long k = 0;; ++k) {
    double p = std::round((lo + static_cast<double>(k) * step) * 1e9) / 1e9;
    if (p > hi + 1e-12) break;
    grid.push_back(std::min(p, 1.0));
  }
  return grid;
}

void cmd_percolation(const PercolationArgs& a, std::ostream& out) {
  if (a.engine != "oracle" && a.engine != "net") throw ValidationError("--engine must be oracle or net");
  const auto mode = parse_neighborhood(a.mode);
  const auto grid = p_range(a.p_min, a.p_max, a.step);
  const auto engine = a.engine == "net" ? PercolationEngine::net : PercolationEngine::oracle;
  const auto est = estimate_threshold(a.n, grid, a.trials, a.seed, engine, mode, a.threads);
  if (!a.out.empty()) text::write_file(a.out, write_threshold_csv(est));
  out << "p_c = " << text::format_real(est.p_c_estimate) << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Assemble, serialize and simulate spatial Petri nets", "patchnet"};
  app.require_subcommand(1);

  GridArgs grid;
  auto* g = app.add_subcommand("grid", "Grid a GeoJSON region and write its adjacency");
  g->add_option("--region", grid.region, "GeoJSON file")->required();
  g->add_option("--cell-size", grid.cell_size, "Cell side in region units")->required()->check(CLI::PositiveNumber);
  g->add_option("--mode", grid.mode, "moore | vonneumann")->check(CLI::IsMember({"moore", "vonneumann", "von_neumann"}));
  g->add_option("--out", grid.out, "Adjacency matrix CSV")->required();
  g->add_option("--grid-out", grid.grid_out, "Patch listing CSV");

  AssembleArgs as;
  auto* a = app.add_subcommand("assemble", "Build a net from an adjacency and write ANDL/SBML");
  a->add_option("--template", as.tmpl, "sir | fire")->required()->check(CLI::IsMember({"sir", "fire"}));
  a->add_option("--adjacency", as.adjacency, "Adjacency CSV (matrix or edge list)")->required();
  a->add_option("--layers", as.layers, "Id-keyed layer CSV");
  a->add_option("--rate-rule", as.rate_rule, "rate=slope*layer+intercept[min,max];...");
  a->add_option("--aggregate", as.aggregate, "mean | sum | max")->check(CLI::IsMember({"mean", "sum", "max"}));
  a->add_option("--init", as.init, "Init CSV (kind,id,value)");
  a->add_option("--andl", as.andl, "ANDL output path");
  a->add_option("--sbml", as.sbml, "SBML output path");
  a->add_option("--name", as.name, "Model name");
  a->add_option("--infect", as.infect, "Default infection rate")->check(CLI::PositiveNumber);
  a->add_option("--recover", as.recover, "Default recovery rate")->check(CLI::PositiveNumber);
  a->add_option("--cross-infect", as.cross_infect, "Default cross-patch rate")->check(CLI::PositiveNumber);
  a->add_option("--occupied", as.occupied, "fire: comma-separated occupied patches (default all)");
  a->add_option("--seeds", as.seeds, "fire: comma-separated burning patches");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run the stochastic simulator on a model file");
  s->add_option("--model", sim.model, ".andl or .xml model")->required();
  s->add_option("--t-end", sim.t_end, "End time")->check(CLI::PositiveNumber);
  s->add_option("--record-dt", sim.record_dt, "Recording interval")->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "RNG seed");
  s->add_option("--max-events", sim.max_events, "Event budget")->check(CLI::PositiveNumber);
  s->add_option("--out", sim.out, "Trace CSV")->required();

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Run a parameter sweep");
  w->add_option("--spec", sw.spec, "Sweep spec file")->required();
  w->add_option("--out-dir", sw.out_dir, "Output directory (default <name>_<UTC timestamp>)");
  w->add_option("--parallelism", sw.parallelism, "Concurrent runs")->check(CLI::PositiveNumber);

  std::string merge_dir;
  auto* m = app.add_subcommand("merge", "Merge sweep traces into merged.csv and summary.csv");
  m->add_option("--dir", merge_dir, "Sweep output directory")->required();

  PercolationArgs pc;
  auto* p = app.add_subcommand("percolation", "Estimate the site percolation threshold");
  p->add_option("--n", pc.n, "Lattice side")->check(CLI::PositiveNumber);
  p->add_option("--p-min", pc.p_min, "Lowest occupation probability");
  p->add_option("--p-max", pc.p_max, "Highest occupation probability");
  p->add_option("--step", pc.step, "Grid step");
  p->add_option("--trials", pc.trials, "Lattices per grid point")->check(CLI::PositiveNumber);
  p->add_option("--seed", pc.seed, "RNG seed");
  p->add_option("--engine", pc.engine, "oracle | net")->check(CLI::IsMember({"oracle", "net"}));
  p->add_option("--mode", pc.mode, "moore | vonneumann")->check(CLI::IsMember({"moore", "vonneumann", "von_neumann"}));
  p->add_option("--threads", pc.threads, "Worker threads")->check(CLI::PositiveNumber);
  p->add_option("--out", pc.out, "CSV of p,spanning_prob,mean_cluster_size");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) cmd_grid(grid, out);
    else if (*a) cmd_assemble(as, out);
    else if (*s) cmd_simulate(sim, out, err);
    else if (*w) cmd_sweep(sw, out);
    else if (*m) cmd_merge(merge_dir, out);
    else if (*p) cmd_percolation(pc, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace patchnet
