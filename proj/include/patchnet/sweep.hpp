#pragma once

// Parameter sweeps: expand a hyperparameter grid into runs, execute them,
// and merge the per-run traces into one CSV plus a per-place summary.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "patchnet/formats.hpp"
#include "patchnet/sim.hpp"

namespace patchnet {

/// `path` is "rates.<transition>" or "marking.<place>".
struct SweepAxis {
  std::string path;
  std::vector<double> values;
};

struct SweepSpec {
  std::string name = "sweep";
  NetDocument base;
  std::vector<SweepAxis> axes;
  int replicates = 1;
  std::uint64_t base_seed = 0;
};

enum class RunStatus { pending, ok, truncated, failed };

std::string_view to_string(RunStatus s);

struct RunRecord {
  std::string run_id;
  std::size_t index = 0;              // position in expansion order
  std::vector<std::size_t> axis_index;
  std::size_t replicate = 0;
  std::vector<double> assignment;     // one value per axis
  std::uint64_t seed = 0;
  std::string file;                   // "<run id>.csv", empty for failed runs
  RunStatus status = RunStatus::pending;
  std::string message;
};

/// Cartesian product of the axes times replicates, axis 0 slowest and the
/// replicate fastest. Run i gets seed derive_seed(base_seed, i). Run ids are
/// "run_<axis indices>_r<replicate>", zero-padded so that sorting ids
/// reproduces expansion order.
std::vector<RunRecord> expand_sweep(const SweepSpec& spec);

/// Base document with one run's assignment applied. Rates must stay
/// positive; marking values must be non-negative integers.
NetDocument apply_assignment(const SweepSpec& spec, const RunRecord& record);

/// Runs every record (up to `parallelism` at once), writing "<run id>.csv"
/// into out_dir, then writes "manifest.csv" once all runs have settled.
/// A failing run is recorded as failed; the others still run.
std::vector<RunRecord> run_sweep(const SweepSpec& spec, std::vector<RunRecord> records,
                                 const SimConfig& cfg, const std::filesystem::path& out_dir,
                                 unsigned parallelism);

struct MergedResults {
  std::string merged;   // run_id,<axes>,time,<places>
  std::string summary;  // run_id,place,final,min,max,mean
};

/// Reads manifest.csv and the traces it lists. Pure read: the caller decides
/// where the outputs go.
MergedResults merge_csv(const std::filesystem::path& out_dir);

/// Sweep spec file plus the simulation settings it carries.
struct SweepFile {
  SweepSpec spec;
  SimConfig sim;
};

/// Line format, '#' starts a comment:
///   name = demo
///   model = base.andl            (relative to `base_dir`)
///   replicates = 2
///   base_seed = 7
///   t_end = 50
///   record_dt = 1
///   max_events = 1000000
///   axis rates.infect_p0 = 0.1, 0.2
SweepFile parse_sweep_file(std::string_view text, const std::filesystem::path& base_dir);

/// "<name>_<YYYYMMDDTHHMMSSZ>" for the current UTC time.
std::string default_output_dir_name(std::string_view spec_name);

}  // namespace patchnet
