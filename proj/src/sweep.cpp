#include "patchnet/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <set>

#include "parallel.hpp"
#include "patchnet/error.hpp"
#include "patchnet/rng.hpp"
#include "patchnet/text.hpp"

namespace fs = std::filesystem;

namespace patchnet {

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::pending: return "pending";
    case RunStatus::ok: return "ok";
    case RunStatus::truncated: return "truncated";
    case RunStatus::failed: return "failed";
  }
  return "unknown";
}

namespace {

constexpr std::string_view kRates = "rates.";
constexpr std::string_view kMarking = "marking.";
constexpr const char* kManifest = "manifest.csv";

void check_path(const NetDocument& doc, const std::string& path) {
  if (path.starts_with(kRates)) {
    if (!doc.net.has_transition(path.substr(kRates.size())))
      throw IdentifierError("sweep axis '" + path + "' names an unknown transition");
  } else if (path.starts_with(kMarking)) {
    if (!doc.net.has_place(path.substr(kMarking.size())))
      throw IdentifierError("sweep axis '" + path + "' names an unknown place");
  } else {
    throw IdentifierError("sweep axis '" + path + "' must start with 'rates.' or 'marking.'");
  }
}

std::string pad(std::size_t value, std::size_t count) {
  const auto width = std::to_string(count > 0 ? count - 1 : 0).size();
  auto s = std::to_string(value);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

}  // namespace

std::vector<RunRecord> expand_sweep(const SweepSpec& spec) {
  if (spec.replicates < 1) throw PreconditionError("replicates must be at least 1");
  std::set<std::string> names;
  for (const auto& axis : spec.axes) {
    if (!names.insert(axis.path).second) throw IdentifierError("duplicate sweep axis '" + axis.path + "'");
    if (axis.values.empty()) throw PreconditionError("sweep axis '" + axis.path + "' has no values");
    check_path(spec.base, axis.path);
  }

  std::size_t total = static_cast<std::size_t>(spec.replicates);
  for (const auto& axis : spec.axes) total *= axis.values.size();

  std::vector<RunRecord> records;
  records.reserve(total);
  std::vector<std::size_t> idx(spec.axes.size(), 0);
  for (std::size_t run = 0; run < total; ++run) {
    // Mixed-radix decode, replicate fastest.
    std::size_t rest = run;
    RunRecord rec;
    rec.replicate = rest % static_cast<std::size_t>(spec.replicates);
    rest /= static_cast<std::size_t>(spec.replicates);
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      idx[a] = rest % spec.axes[a].values.size();
      rest /= spec.axes[a].values.size();
    }
    rec.index = run;
    rec.axis_index = idx;
    rec.run_id = "run";
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      rec.run_id += "_" + pad(idx[a], spec.axes[a].values.size());
      rec.assignment.push_back(spec.axes[a].values[idx[a]]);
    }
    rec.run_id += "_r" + pad(rec.replicate, static_cast<std::size_t>(spec.replicates));
    rec.seed = derive_seed(spec.base_seed, run);
    records.push_back(std::move(rec));
  }
  return records;
}

NetDocument apply_assignment(const SweepSpec& spec, const RunRecord& record) {
  NetDocument doc = spec.base;
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    const auto& path = spec.axes[a].path;
    const double v = record.assignment.at(a);
    if (path.starts_with(kRates)) {
      if (!(v > 0)) throw PreconditionError("axis '" + path + "' assigns a non-positive rate");
      doc.rates[doc.net.transition_index(path.substr(kRates.size()))] = v;
    } else {
      if (v < 0 || v != std::floor(v))
        throw PreconditionError("axis '" + path + "' assigns a non-integral token count");
      doc.marking.set(doc.net.place_index(path.substr(kMarking.size())), static_cast<Tokens>(v));
    }
  }
  return doc;
}

std::vector<RunRecord> run_sweep(const SweepSpec& spec, std::vector<RunRecord> records,
                                 const SimConfig& cfg, const fs::path& out_dir, unsigned parallelism) {
  if (parallelism < 1) throw PreconditionError("parallelism must be at least 1");
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  detail::parallel_for(records.size(), parallelism, [&](std::size_t i) {
    auto& rec = records[i];
    try {
      const auto doc = apply_assignment(spec, rec);
      SimConfig run_cfg = cfg;
      run_cfg.seed = rec.seed;
      run_cfg.log_firings = false;
      const auto trace = simulate_ssa(doc, run_cfg);
      rec.file = rec.run_id + ".csv";
      text::write_file(out_dir / rec.file, write_trace_csv(trace, doc.net));
      rec.status = trace.truncated ? RunStatus::truncated : RunStatus::ok;
      rec.message.clear();
    } catch (const std::exception& e) {
      rec.status = RunStatus::failed;
      rec.file.clear();
      rec.message = e.what();
    }
  });

  std::string manifest = "run_id,status,seed";
  for (const auto& axis : spec.axes) manifest += "," + axis.path;
  manifest += ",file\n";
  for (const auto& rec : records) {
    manifest += rec.run_id + "," + std::string(to_string(rec.status)) + "," + std::to_string(rec.seed);
    for (double v : rec.assignment) manifest += "," + text::format_real(v);
    manifest += "," + rec.file + "\n";
  }
  try {
    text::write_file(out_dir / kManifest, manifest);
  } catch (const IoError& e) {
    throw IoError(std::string("sweep manifest could not be written: ") + e.what());
  }
  return records;
}

MergedResults merge_csv(const fs::path& out_dir) {
  const auto manifest_path = out_dir / kManifest;
  if (!fs::exists(manifest_path)) throw MergeError("no manifest in '" + out_dir.string() + "'");
  const auto lines = text::split_lines(text::read_file(manifest_path));
  if (lines.empty()) throw MergeError("manifest is empty");
  const auto header = text::split_fields(lines[0]);
  if (header.size() < 4 || header[0] != "run_id" || header[1] != "status" || header[2] != "seed" ||
      header.back() != "file")
    throw MergeError("manifest header must be 'run_id,status,seed,<axes>,file'");
  const std::vector<std::string> axes(header.begin() + 3, header.end() - 1);

  struct Entry {
    std::string run_id;
    std::vector<std::string> params;
    std::string file;
  };
  std::vector<Entry> entries;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (text::trim(lines[r]).empty()) continue;
    auto f = text::split_fields(lines[r]);
    if (f.size() != header.size()) throw MergeError("manifest row " + std::to_string(r + 1) + " is malformed");
    if (f.back().empty()) continue;  // failed run, nothing to merge
    entries.push_back({f[0], std::vector<std::string>(f.begin() + 3, f.end() - 1), f.back()});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.run_id < b.run_id; });

  MergedResults out;
  std::vector<std::string> places;
  bool have_places = false;
  std::string rows;
  out.summary = "run_id,place,final,min,max,mean\n";
  for (const auto& e : entries) {
    const auto path = out_dir / e.file;
    if (!fs::exists(path)) throw MergeError("trace for run '" + e.run_id + "' is missing (" + e.file + ")");
    Trace trace;
    try {
      trace = read_trace_csv(text::read_file(path));
    } catch (const ValidationError& err) {
      throw MergeError("trace for run '" + e.run_id + "' is unreadable: " + err.what());
    }
    if (!have_places) {
      places = trace.places;
      have_places = true;
    } else if (trace.places != places) {
      throw MergeError("trace for run '" + e.run_id + "' has different place columns");
    }
    std::string prefix = e.run_id;
    for (const auto& p : e.params) prefix += "," + p;
    for (const auto& row : trace.rows) {
      rows += prefix + "," + text::format_real(row.time);
      for (auto c : row.tokens) rows += "," + std::to_string(c);
      rows += '\n';
    }
    if (trace.rows.empty()) continue;
    for (std::size_t p = 0; p < places.size(); ++p) {
      Tokens lo = trace.rows[0].tokens[p], hi = lo;
      double sum = 0;
      for (const auto& row : trace.rows) {
        lo = std::min(lo, row.tokens[p]);
        hi = std::max(hi, row.tokens[p]);
        sum += static_cast<double>(row.tokens[p]);
      }
      out.summary += e.run_id + "," + places[p] + "," + std::to_string(trace.rows.back().tokens[p]) + "," +
                     std::to_string(lo) + "," + std::to_string(hi) + "," +
                     text::format_real(sum / static_cast<double>(trace.rows.size())) + "\n";
    }
  }
  out.merged = "run_id";
  for (const auto& a : axes) out.merged += "," + a;
  out.merged += ",time";
  for (const auto& p : places) out.merged += "," + p;
  out.merged += "\n" + rows;
  return out;
}

SweepFile parse_sweep_file(std::string_view src, const fs::path& base_dir) {
  SweepFile file;
  std::string model;
  std::vector<SweepAxis> axes;
  const auto lines = text::split_lines(src);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    std::string_view line = lines[r];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto row = r + 1;
    auto fail = [&](const std::string& why) {
      return ParseError("sweep file line " + std::to_string(row) + ": " + why, row, 1);
    };
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    std::uint64_t u;
    double d;
    if (key.starts_with("axis ") || key.starts_with("axis\t")) {
      SweepAxis axis{std::string(text::trim(std::string_view(key).substr(5))), {}};
      for (const auto& item : text::split_fields(value)) {
        if (!text::parse_real(item, d)) throw fail("axis value '" + item + "' is not a number");
        axis.values.push_back(d);
      }
      axes.push_back(std::move(axis));
    } else if (key == "name") {
      file.spec.name = value;
    } else if (key == "model") {
      model = value;
    } else if (key == "replicates") {
      if (!text::parse_uint(value, u) || u < 1) throw fail("replicates must be a positive integer");
      file.spec.replicates = static_cast<int>(u);
    } else if (key == "base_seed") {
      if (!text::parse_uint(value, u)) throw fail("base_seed must be an unsigned integer");
      file.spec.base_seed = u;
    } else if (key == "t_end") {
      if (!text::parse_real(value, d)) throw fail("t_end must be a number");
      file.sim.t_end = d;
    } else if (key == "record_dt") {
      if (!text::parse_real(value, d)) throw fail("record_dt must be a number");
      file.sim.record_dt = d;
    } else if (key == "max_events") {
      if (!text::parse_uint(value, u) || u < 1) throw fail("max_events must be a positive integer");
      file.sim.max_events = u;
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  if (model.empty()) throw ValidationError("sweep file does not name a model");
  fs::path model_path(model);
  if (model_path.is_relative()) model_path = base_dir / model_path;
  file.spec.base = load_document(model_path);
  file.spec.axes = std::move(axes);
  file.sim.validate();
  return file;
}

std::string default_output_dir_name(std::string_view spec_name) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &utc);
  return std::string(spec_name) + "_" + buf;
}

}  // namespace patchnet
