#include "patchnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "patchnet/error.hpp"
#include "patchnet/text.hpp"

namespace patchnet {

std::size_t InfoLayer::size() const {
  return std::visit([](const auto& v) { return v.size(); }, records);
}

Aggregate parse_aggregate(std::string_view name) {
  if (name == "mean") return Aggregate::mean;
  if (name == "sum") return Aggregate::sum;
  if (name == "max") return Aggregate::max;
  throw ValidationError("unknown aggregate '" + std::string(name) + "'");
}

namespace {

struct Accumulator {
  double sum = 0;
  double max = -INFINITY;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    max = std::max(max, v);
    ++count;
  }
  double result(Aggregate how) const {
    switch (how) {
      case Aggregate::mean: return sum / static_cast<double>(count);
      case Aggregate::sum: return sum;
      case Aggregate::max: return max;
    }
    return sum;
  }
};

void check_layer_names(const std::vector<InfoLayer>& layers) {
  std::set<std::string> seen;
  for (const auto& l : layers)
    if (!seen.insert(l.name).second) throw IdentifierError("duplicate layer name '" + l.name + "'");
}

PatchAttributes bind_impl(const std::vector<std::string>& ids, const PatchGrid* grid,
                          const std::vector<InfoLayer>& layers, Aggregate aggregate) {
  check_layer_names(layers);
  PatchAttributes out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    index.emplace(ids[i], i);
    out.values[ids[i]];
  }

  for (const auto& layer : layers) {
    if (layer.size() == 0) {
      out.warnings.push_back("layer '" + layer.name + "' has no records and was omitted");
      continue;
    }
    std::vector<Accumulator> acc(ids.size());
    if (layer.point_keyed()) {
      if (!grid)
        throw PreconditionError("point-keyed layer '" + layer.name + "' requires a patch grid");
      for (const auto& rec : std::get<0>(layer.records)) {
        const int col = static_cast<int>(std::floor((rec.location.x - grid->origin.x) / grid->cell_size));
        const int row = static_cast<int>(std::floor((rec.location.y - grid->origin.y) / grid->cell_size));
        if (auto k = grid->find(row, col))
          acc[*k].add(rec.value);
        else
          ++out.dropped_points;
      }
    } else {
      for (const auto& rec : std::get<1>(layer.records)) {
        auto it = index.find(rec.patch_id);
        if (it == index.end())
          throw IdentifierError("layer '" + layer.name + "' references unknown patch '" +
                                rec.patch_id + "'");
        acc[it->second].add(rec.value);
      }
    }
    out.layer_defaults[layer.name] = layer.default_value;
    for (std::size_t i = 0; i < ids.size(); ++i)
      out.values[ids[i]][layer.name] = acc[i].count ? acc[i].result(aggregate) : layer.default_value;
  }
  if (out.dropped_points)
    out.warnings.push_back(std::to_string(out.dropped_points) + " point records fell outside the grid");
  return out;
}

}  // namespace

PatchAttributes bind_layers(const PatchGrid& grid, const std::vector<InfoLayer>& layers,
                            Aggregate aggregate) {
  std::vector<std::string> ids;
  ids.reserve(grid.patches.size());
  for (const auto& p : grid.patches) ids.push_back(p.id);
  return bind_impl(ids, &grid, layers, aggregate);
}

PatchAttributes bind_layers(const std::vector<std::string>& patch_ids,
                            const std::vector<InfoLayer>& layers, Aggregate aggregate) {
  return bind_impl(patch_ids, nullptr, layers, aggregate);
}

PatchRates derive_rates(const PatchAttributes& attrs, const std::vector<RateRule>& rules) {
  for (const auto& r : rules) {
    if (!attrs.layer_defaults.count(r.layer))
      throw IdentifierError("rate rule '" + r.rate + "' references unknown layer '" + r.layer + "'");
    if (!(r.min <= r.max)) throw PreconditionError("rate rule '" + r.rate + "' has min > max");
  }
  PatchRates out;
  for (const auto& [patch, layer_values] : attrs.values) {
    auto& rates = out[patch];
    for (const auto& r : rules) {
      auto it = layer_values.find(r.layer);
      const double x = it != layer_values.end() ? it->second : attrs.layer_defaults.at(r.layer);
      rates[r.rate] = std::clamp(r.slope * x + r.intercept, r.min, r.max);
    }
  }
  return out;
}

std::vector<InfoLayer> parse_layers_csv(std::string_view text) {
  auto lines = text::split_lines(text);
  if (lines.empty()) throw FormatError("layer CSV is empty");
  const std::string header(text::trim(lines[0]));
  bool point_keyed;
  if (header == "layer,x,y,value")
    point_keyed = true;
  else if (header == "layer,patch_id,value")
    point_keyed = false;
  else
    throw FormatError("layer CSV header must be 'layer,x,y,value' or 'layer,patch_id,value'");

  std::vector<InfoLayer> layers;
  std::map<std::string, std::size_t> by_name;
  const std::size_t width = point_keyed ? 4 : 3;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (text::trim(lines[r]).empty()) continue;
    const auto row = r + 1;
    auto f = text::split_fields(lines[r]);
    if (f.size() != width)
      throw ParseError("layer CSV row " + std::to_string(row) + " has " + std::to_string(f.size()) +
                           " fields, expected " + std::to_string(width),
                       row, 1);
    const std::string name(text::trim(f[0]));
    if (name.empty()) throw ParseError("layer CSV row " + std::to_string(row) + " has no layer name", row, 1);
    auto [it, fresh] = by_name.emplace(name, layers.size());
    if (fresh) {
      InfoLayer layer{name, 0.0, {}};
      if (!point_keyed) layer.records = std::vector<PatchRecord>{};
      layers.push_back(std::move(layer));
    }
    auto& layer = layers[it->second];
    double value;
    if (!text::parse_real(f[width - 1], value))
      throw ParseError("layer CSV row " + std::to_string(row) + " has a non-numeric value", row, width);
    if (point_keyed) {
      const auto xs = text::trim(f[1]), ys = text::trim(f[2]);
      if (xs == "*" && ys == "*") {
        layer.default_value = value;
        continue;
      }
      Point p;
      if (!text::parse_real(xs, p.x) || !text::parse_real(ys, p.y))
        throw ParseError("layer CSV row " + std::to_string(row) + " has a bad coordinate", row, 2);
      std::get<0>(layer.records).push_back({p, value});
    } else {
      const std::string id(text::trim(f[1]));
      if (id == "*") {
        layer.default_value = value;
        continue;
      }
      if (id.empty()) throw ParseError("layer CSV row " + std::to_string(row) + " has no patch id", row, 2);
      std::get<1>(layer.records).push_back({id, value});
    }
  }
  return layers;
}

std::vector<RateRule> parse_rate_rules(std::string_view spec) {
  std::vector<RateRule> rules;
  for (const auto& raw : text::split_fields(spec, ';')) {
    const auto item = text::trim(raw);
    if (item.empty()) continue;
    auto bad = [&] {
      return ValidationError("malformed rate rule '" + std::string(item) +
                             "', expected rate=slope*layer+intercept[min,max]");
    };
    const auto eq = item.find('=');
    const auto star = item.find('*');
    const auto lb = item.find('[');
    const auto comma = item.find(',', lb == std::string_view::npos ? 0 : lb);
    const auto rb = item.find(']');
    if (eq == std::string_view::npos || star == std::string_view::npos || lb == std::string_view::npos ||
        comma == std::string_view::npos || rb == std::string_view::npos || !(eq < star && star < lb &&
        lb < comma && comma < rb))
      throw bad();
    RateRule r;
    r.rate = std::string(text::trim(item.substr(0, eq)));
    if (!text::parse_real(item.substr(eq + 1, star - eq - 1), r.slope)) throw bad();
    // layer name runs up to the sign of the intercept
    const auto tail = item.substr(star + 1, lb - star - 1);
    const auto sign = tail.find_first_of("+-");
    if (sign == std::string_view::npos) throw bad();
    r.layer = std::string(text::trim(tail.substr(0, sign)));
    if (!text::parse_real(tail.substr(sign), r.intercept)) throw bad();
    if (!text::parse_real(item.substr(lb + 1, comma - lb - 1), r.min) ||
        !text::parse_real(item.substr(comma + 1, rb - comma - 1), r.max))
      throw bad();
    if (r.rate.empty() || r.layer.empty()) throw bad();
    rules.push_back(std::move(r));
  }
  return rules;
}

}  // namespace patchnet
