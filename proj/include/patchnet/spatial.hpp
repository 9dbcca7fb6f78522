#pragma once

// Region geometry, patch grids and patch adjacency.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace patchnet {

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

using Ring = std::vector<Point>;

/// Signed shoelace area of a closed ring (positive when counter-clockwise).
double signed_area(const Ring& ring);

/// One polygon: an exterior ring plus optional holes. Rings are closed.
struct RegionPolygon {
  Ring exterior;
  std::vector<Ring> holes;

  /// |exterior| minus the holes.
  double area() const;
};

/// Parses a GeoJSON Feature, FeatureCollection or bare geometry. The first
/// geometry must be a Polygon or MultiPolygon; for a MultiPolygon the
/// component with the largest area is returned.
RegionPolygon load_region(std::string_view geojson);

/// Even-odd ray casting over every ring. Points on any edge count as inside.
bool point_in_polygon(Point pt, const RegionPolygon& poly);

struct Patch {
  std::string id;  // "p_<row>_<col>"
  int row = 0;
  int col = 0;
  Point center;
};

struct PatchGrid {
  std::vector<Patch> patches;  // row-major from the origin
  double cell_size = 1.0;
  Point origin;

  /// Index into `patches` of the cell at (row, col), if it was kept.
  std::optional<std::size_t> find(int row, int col) const;
};

std::string patch_id(int row, int col);

/// Axis-aligned grid over the bounding box, keeping cells whose center is
/// inside the polygon. Throws EmptyGridError when nothing is kept.
PatchGrid grid_from_region(const RegionPolygon& poly, double cell_size);

/// Full rows x cols grid with unit cells at the origin.
PatchGrid full_grid(int rows, int cols, double cell_size = 1.0);

enum class Neighborhood { moore, von_neumann };

Neighborhood parse_neighborhood(std::string_view name);

/// Undirected, irreflexive patch graph. Nodes are kept sorted ascending;
/// edges are index pairs (i < j) into the node list, sorted.
class Adjacency {
 public:
  Adjacency() = default;
  /// Duplicate nodes collapse; edges are symmetrized; self-loops dropped.
  /// Throws IdentifierError if an edge endpoint is not a node.
  Adjacency(std::vector<std::string> nodes,
            const std::vector<std::pair<std::string, std::string>>& edges);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  bool connected(std::string_view a, std::string_view b) const;
  std::size_t degree(std::string_view id) const;

  friend bool operator==(const Adjacency& a, const Adjacency& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

Adjacency neighbors(const PatchGrid& grid, Neighborhood mode);

/// Reads either a square 0/1 matrix ("id,a,b" header, one labelled row per
/// id) or an edge list ("source,target" header). When `known` is given, edge
/// list ids must belong to it and every known id becomes a node.
Adjacency load_adjacency_csv(std::string_view text,
                             const std::optional<std::set<std::string>>& known = std::nullopt);

/// Matrix form with ids in ascending order and a zero diagonal.
std::string write_adjacency_csv(const Adjacency& adj);

/// "patch_id,row,col,cx,cy" listing of a grid.
std::string write_patch_csv(const PatchGrid& grid);

}  // namespace patchnet
