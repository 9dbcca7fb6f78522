#pragma once

// Information layers (vegetation, humidity, ...) bound to patches, and the
// affine rule that turns layer values into per-patch rates.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patchnet/spatial.hpp"

namespace patchnet {

struct PointRecord {
  Point location;
  double value = 0;
};

struct PatchRecord {
  std::string patch_id;
  double value = 0;
};

/// A named layer. Records are either all point-keyed or all id-keyed.
struct InfoLayer {
  std::string name;
  double default_value = 0.0;
  std::variant<std::vector<PointRecord>, std::vector<PatchRecord>> records;

  bool point_keyed() const { return records.index() == 0; }
  std::size_t size() const;
};

enum class Aggregate { mean, sum, max };

Aggregate parse_aggregate(std::string_view name);

struct PatchAttributes {
  /// patch id -> layer name -> value; covers every patch and bound layer.
  std::map<std::string, std::map<std::string, double>> values;
  std::map<std::string, double> layer_defaults;
  std::size_t dropped_points = 0;
  std::vector<std::string> warnings;
};

/// Point records go to the cell containing them; points in no kept cell
/// are dropped and counted. Empty layers are skipped with a warning.
PatchAttributes bind_layers(const PatchGrid& grid, const std::vector<InfoLayer>& layers,
                            Aggregate aggregate);

/// Id-keyed layers only (no geometry available, e.g. a user adjacency file).
PatchAttributes bind_layers(const std::vector<std::string>& patch_ids,
                            const std::vector<InfoLayer>& layers, Aggregate aggregate);

/// rate = slope * layer + intercept, clamped to [min, max].
struct RateRule {
  std::string rate;
  std::string layer;
  double slope = 0;
  double intercept = 0;
  double min = 0;
  double max = 0;
};

using PatchRates = std::map<std::string, std::map<std::string, double>>;

PatchRates derive_rates(const PatchAttributes& attrs, const std::vector<RateRule>& rules);

/// Parses "layer,x,y,value" or "layer,patch_id,value" CSV. A row whose
/// location is "*" (x and y both "*", or patch_id "*") sets the layer default.
std::vector<InfoLayer> parse_layers_csv(std::string_view text);

/// Parses "rate=slope*layer+intercept[min,max]" rules separated by ';'.
std::vector<RateRule> parse_rate_rules(std::string_view text);

}  // namespace patchnet
