#include "patchnet/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"

#include "patchnet/error.hpp"
#include "patchnet/text.hpp"

namespace patchnet {

using nlohmann::json;

// ---------------------------------------------------------------- geometry

double signed_area(const Ring& ring) {
  double twice = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  return twice / 2;
}

double RegionPolygon::area() const {
  double a = std::abs(signed_area(exterior));
  for (const auto& h : holes) a -= std::abs(signed_area(h));
  return a;
}

namespace {

Ring parse_ring(const json& j) {
  if (!j.is_array()) throw FormatError("polygon ring must be an array of positions");
  Ring ring;
  for (const auto& pos : j) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
      throw FormatError("ring position must be [x, y]");
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  if (ring.size() < 4) throw FormatError("polygon ring needs at least 4 positions");
  if (!(ring.front() == ring.back())) throw FormatError("polygon ring is not closed");
  return ring;
}

RegionPolygon parse_polygon(const json& coords) {
  if (!coords.is_array() || coords.empty()) throw FormatError("Polygon has no rings");
  RegionPolygon poly;
  poly.exterior = parse_ring(coords[0]);
  for (std::size_t i = 1; i < coords.size(); ++i) poly.holes.push_back(parse_ring(coords[i]));
  return poly;
}

RegionPolygon from_geometry(const json& geom) {
  if (!geom.is_object() || !geom.contains("type")) throw FormatError("geometry has no type");
  const auto type = geom["type"].get<std::string>();
  if (type == "Polygon") return parse_polygon(geom.at("coordinates"));
  if (type == "MultiPolygon") {
    const auto& parts = geom.at("coordinates");
    if (!parts.is_array() || parts.empty()) throw FormatError("MultiPolygon has no polygons");
    std::optional<RegionPolygon> best;
    for (const auto& part : parts) {
      auto poly = parse_polygon(part);
      if (!best || std::abs(signed_area(poly.exterior)) > std::abs(signed_area(best->exterior)))
        best = std::move(poly);
    }
    return *best;
  }
  throw FormatError("unsupported geometry type '" + type + "'");
}

const json& first_geometry(const json& doc) {
  if (!doc.is_object() || !doc.contains("type")) throw FormatError("GeoJSON object has no type");
  const auto type = doc["type"].get<std::string>();
  if (type == "FeatureCollection") {
    const auto& features = doc.at("features");
    if (!features.is_array() || features.empty())
      throw FormatError("FeatureCollection has no features");
    return first_geometry(features[0]);
  }
  if (type == "Feature") {
    if (!doc.contains("geometry") || doc["geometry"].is_null())
      throw FormatError("Feature has no geometry");
    return doc["geometry"];
  }
  return doc;
}

bool on_segment(Point p, Point a, Point b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), 1.0});
  if (std::abs(cross) > 1e-12 * scale * scale) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

RegionPolygon load_region(std::string_view geojson) {
  json doc;
  try {
    doc = json::parse(geojson);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed GeoJSON: ") + e.what(), 0, 0, e.byte);
  }
  try {
    return from_geometry(first_geometry(doc));
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid GeoJSON structure: ") + e.what());
  }
}

bool point_in_polygon(Point pt, const RegionPolygon& poly) {
  bool inside = false;
  auto scan = [&](const Ring& ring) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const Point a = ring[i];
      const Point b = ring[i + 1];
      if (on_segment(pt, a, b)) return true;
      if ((a.y > pt.y) != (b.y > pt.y)) {
        const double x_cross = a.x + (pt.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (pt.x < x_cross) inside = !inside;
      }
    }
    return false;
  };
  if (scan(poly.exterior)) return true;
  for (const auto& h : poly.holes)
    if (scan(h)) return true;
  return inside;
}

// ---------------------------------------------------------------- grids

std::string patch_id(int row, int col) {
  return "p_" + std::to_string(row) + "_" + std::to_string(col);
}

std::optional<std::size_t> PatchGrid::find(int row, int col) const {
  // patches are sorted by (row, col)
  auto it = std::lower_bound(patches.begin(), patches.end(), std::pair{row, col},
                             [](const Patch& p, const std::pair<int, int>& rc) {
                               return std::pair{p.row, p.col} < rc;
                             });
  if (it != patches.end() && it->row == row && it->col == col)
    return static_cast<std::size_t>(it - patches.begin());
  return std::nullopt;
}

PatchGrid grid_from_region(const RegionPolygon& poly, double cell_size) {
  if (!(cell_size > 0)) throw PreconditionError("cell size must be positive");
  double min_x = poly.exterior[0].x, max_x = min_x;
  double min_y = poly.exterior[0].y, max_y = min_y;
  for (const auto& p : poly.exterior) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  if (!(max_x > min_x) || !(max_y > min_y))
    throw PreconditionError("polygon bounding box is degenerate");

  const int cols = static_cast<int>(std::ceil((max_x - min_x) / cell_size - 1e-9));
  const int rows = static_cast<int>(std::ceil((max_y - min_y) / cell_size - 1e-9));
  PatchGrid grid;
  grid.cell_size = cell_size;
  grid.origin = {min_x, min_y};
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const Point center{min_x + (c + 0.5) * cell_size, min_y + (r + 0.5) * cell_size};
      if (point_in_polygon(center, poly)) grid.patches.push_back({patch_id(r, c), r, c, center});
    }
  if (grid.patches.empty()) throw EmptyGridError("no grid cell center lies inside the region");
  return grid;
}

PatchGrid full_grid(int rows, int cols, double cell_size) {
  PatchGrid grid;
  grid.cell_size = cell_size;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      grid.patches.push_back(
          {patch_id(r, c), r, c, {(c + 0.5) * cell_size, (r + 0.5) * cell_size}});
  return grid;
}

Neighborhood parse_neighborhood(std::string_view name) {
  if (name == "moore") return Neighborhood::moore;
  if (name == "von_neumann" || name == "vonneumann") return Neighborhood::von_neumann;
  throw ValidationError("unknown neighborhood '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- adjacency

Adjacency::Adjacency(std::vector<std::string> nodes,
                     const std::vector<std::pair<std::string, std::string>>& edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  lookup_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) lookup_.emplace(nodes_[i], i);
  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    auto ia = index_of(a);
    auto ib = index_of(b);
    if (!ia) throw IdentifierError("edge endpoint '" + a + "' is not a node");
    if (!ib) throw IdentifierError("edge endpoint '" + b + "' is not a node");
    if (*ia == *ib) continue;
    edges_.emplace_back(std::min(*ia, *ib), std::max(*ia, *ib));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

std::optional<std::size_t> Adjacency::index_of(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool Adjacency::connected(std::string_view a, std::string_view b) const {
  auto ia = index_of(a);
  auto ib = index_of(b);
  if (!ia || !ib || *ia == *ib) return false;
  return std::binary_search(edges_.begin(), edges_.end(),
                            std::pair{std::min(*ia, *ib), std::max(*ia, *ib)});
}

std::size_t Adjacency::degree(std::string_view id) const {
  auto i = index_of(id);
  if (!i) throw IdentifierError("unknown patch '" + std::string(id) + "'");
  return static_cast<std::size_t>(std::count_if(
      edges_.begin(), edges_.end(), [&](const auto& e) { return e.first == *i || e.second == *i; }));
}

Adjacency neighbors(const PatchGrid& grid, Neighborhood mode) {
  if (grid.patches.empty()) throw PreconditionError("grid is empty");
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  nodes.reserve(grid.patches.size());
  // Forward half of each neighborhood; the other half is covered by symmetry.
  static constexpr int kMoore[4][2] = {{0, 1}, {1, -1}, {1, 0}, {1, 1}};
  static constexpr int kVonNeumann[2][2] = {{0, 1}, {1, 0}};
  for (const auto& p : grid.patches) {
    nodes.push_back(p.id);
    auto link = [&](int dr, int dc) {
      if (auto q = grid.find(p.row + dr, p.col + dc)) edges.emplace_back(p.id, grid.patches[*q].id);
    };
    if (mode == Neighborhood::moore)
      for (const auto& d : kMoore) link(d[0], d[1]);
    else
      for (const auto& d : kVonNeumann) link(d[0], d[1]);
  }
  return Adjacency(std::move(nodes), edges);
}

Adjacency load_adjacency_csv(std::string_view text, const std::optional<std::set<std::string>>& known) {
  auto lines = text::split_lines(text);
  while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw FormatError("adjacency CSV is empty");
  auto header = text::split_fields(lines[0]);
  for (auto& f : header) f = std::string(text::trim(f));

  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;

  if (header.size() == 2 && header[0] == "source" && header[1] == "target") {
    if (known) nodes.assign(known->begin(), known->end());
    for (std::size_t r = 1; r < lines.size(); ++r) {
      if (text::trim(lines[r]).empty()) continue;
      auto f = text::split_fields(lines[r]);
      if (f.size() != 2)
        throw ParseError("edge list row " + std::to_string(r + 1) + " must have 2 fields", r + 1, 1);
      std::string a(text::trim(f[0])), b(text::trim(f[1]));
      if (a.empty() || b.empty())
        throw ParseError("edge list row " + std::to_string(r + 1) + " has an empty id", r + 1, 1);
      for (const auto& id : {a, b})
        if (known && !known->count(id))
          throw IdentifierError("edge list row " + std::to_string(r + 1) + " references unknown id '" + id + "'");
      if (!known) {
        nodes.push_back(a);
        nodes.push_back(b);
      }
      edges.emplace_back(std::move(a), std::move(b));
    }
    return Adjacency(std::move(nodes), edges);
  }

  // Matrix form.
  const std::vector<std::string> ids(header.begin() + 1, header.end());
  const std::size_t n = ids.size();
  std::size_t rows = 0;
  std::vector<std::vector<int>> cells;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (text::trim(lines[r]).empty()) continue;
    auto f = text::split_fields(lines[r]);
    if (f.size() != n + 1)
      throw ShapeError("adjacency matrix row " + std::to_string(r + 1) + " has " +
                       std::to_string(f.size() - 1) + " entries, expected " + std::to_string(n));
    if (rows >= n) throw ShapeError("adjacency matrix has more rows than columns");
    if (text::trim(f[0]) != ids[rows])
      throw ShapeError("adjacency matrix row " + std::to_string(r + 1) + " is labelled '" +
                       std::string(text::trim(f[0])) + "', expected '" + ids[rows] + "'");
    std::vector<int> row(n);
    for (std::size_t c = 0; c < n; ++c) {
      auto v = text::trim(f[c + 1]);
      if (v != "0" && v != "1")
        throw ParseError("adjacency matrix entry at row " + std::to_string(r + 1) + " must be 0 or 1",
                         r + 1, c + 2);
      row[c] = v == "1";
    }
    cells.push_back(std::move(row));
    ++rows;
  }
  if (rows != n)
    throw ShapeError("adjacency matrix is not square: " + std::to_string(rows) + " rows, " +
                     std::to_string(n) + " columns");
  {
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw IdentifierError("adjacency matrix repeats an id");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cells[i][j] != cells[j][i]) throw AsymmetryError(ids[i], ids[j]);
      if (cells[i][j]) edges.emplace_back(ids[i], ids[j]);
    }
  return Adjacency(ids, edges);
}

std::string write_adjacency_csv(const Adjacency& adj) {
  const auto& ids = adj.nodes();
  const std::size_t n = ids.size();
  std::vector<std::vector<char>> m(n, std::vector<char>(n, '0'));
  for (const auto& [a, b] : adj.edges()) m[a][b] = m[b][a] = '1';
  std::string out = "id";
  for (const auto& id : ids) out += "," + id;
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out += ids[i];
    for (std::size_t j = 0; j < n; ++j) {
      out += ',';
      out += m[i][j];
    }
    out += '\n';
  }
  return out;
}

std::string write_patch_csv(const PatchGrid& grid) {
  std::string out = "patch_id,row,col,cx,cy\n";
  for (const auto& p : grid.patches)
    out += p.id + "," + std::to_string(p.row) + "," + std::to_string(p.col) + "," +
           text::format_real(p.center.x) + "," + text::format_real(p.center.y) + "\n";
  return out;
}

}  // namespace patchnet
