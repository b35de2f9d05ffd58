#pragma once

// Uniform-grid representation of the local / nonlocal subdomains, the
// coupling interface, and the delta-connectivity machinery built on top.
//
// All geometric predicates are evaluated on a lattice of half cell widths so
// that distances between closed cells and faces are exact up to a single
// final multiplication by h/2.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace janus::geometry {

inline constexpr int kMaxDim = 2;

using Point = std::array<double, kMaxDim>;
/// Integer multi-index of a cell; unused trailing axes are 0.
using CellIndex = std::array<std::int64_t, kMaxDim>;

/// Closed axis-aligned box in physical coordinates. Degenerate boxes
/// (lo == hi on an axis) are allowed and select faces/points.
struct Box {
  Point lo{};
  Point hi{};

  bool contains(const Point& p, int dimension, double tol) const;
};

/// A region is a union of boxes.
using Region = std::vector<Box>;

class GridSpec {
 public:
  /// Validates h > 0, positive extents and that every extent is an integer
  /// multiple of h (1e-9 relative); throws Error(InvalidArgument) otherwise.
  static GridSpec make(int dimension, double h, Point lo, Point hi);

  int dimension() const { return dimension_; }
  double h() const { return h_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  std::int64_t cells_along(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
  std::int64_t total_cells() const;
  double cell_volume() const;
  /// Surface measure of a single cell face: h^(N-1), which is 1 in 1D.
  double face_measure() const;

  bool in_bounds(const CellIndex& c) const;
  Point center(const CellIndex& c) const;
  /// Row-major linear index over the full bounding grid.
  std::int64_t linear(const CellIndex& c) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dimension_ = 1;
  double h_ = 1.0;
  Point lo_{};
  Point hi_{};
  std::array<std::int64_t, kMaxDim> counts_{1, 1};
};

enum class Role { local, nonlocal };
std::string to_string(Role role);

/// Sorted, duplicate-free set of cells of one grid.
class CellSet {
 public:
  CellSet(GridSpec grid, std::vector<CellIndex> cells, Role role);

  const GridSpec& grid() const { return grid_; }
  Role role() const { return role_; }
  std::span<const CellIndex> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const CellIndex& operator[](std::size_t i) const { return cells_[i]; }

  double cell_volume() const { return grid_.cell_volume(); }
  double volume() const { return cell_volume() * static_cast<double>(cells_.size()); }
  std::optional<std::size_t> position(const CellIndex& c) const;
  bool contains(const CellIndex& c) const { return position(c).has_value(); }
  Point center(std::size_t i) const { return grid_.center(cells_[i]); }

  /// Subset restricted to the given positions (kept sorted).
  CellSet subset(std::span<const std::size_t> positions) const;

 private:
  GridSpec grid_;
  std::vector<CellIndex> cells_;
  Role role_;
  std::vector<std::int64_t> lookup_;  // linear grid index -> position, -1 if absent
};

/// Oriented cell face: the face of `cell` orthogonal to `axis` on `side` (-1/+1).
struct Face {
  CellIndex cell{};
  int axis = 0;
  int side = -1;

  friend auto operator<=>(const Face&, const Face&) = default;
};

class Interface {
 public:
  Interface(CellSet local, std::vector<Face> faces);

  const CellSet& local() const { return local_; }
  std::span<const Face> faces() const { return faces_; }
  std::size_t size() const { return faces_.size(); }
  double face_measure() const { return local_.grid().face_measure(); }
  double measure() const { return face_measure() * static_cast<double>(faces_.size()); }
  Point face_center(std::size_t i) const;
  /// Position (within the local CellSet) of the cell owning face i.
  std::size_t owner(std::size_t i) const;

  Interface subset(std::span<const std::size_t> positions) const;

 private:
  CellSet local_;
  std::vector<Face> faces_;
};

// ---------------------------------------------------------------------------
// Half-width lattice boxes used for exact closed-set distance and diameter.

struct LatticeBox {
  std::array<std::int64_t, kMaxDim> lo{};
  std::array<std::int64_t, kMaxDim> hi{};
};

LatticeBox cell_box(const CellIndex& c, int dimension);
LatticeBox face_box(const Face& f, int dimension);
/// Exact distance between two closed boxes (physical units).
double box_distance(const LatticeBox& a, const LatticeBox& b, int dimension, double h);
/// Diameter of the union of two closed boxes (physical units).
double box_pair_diameter(const LatticeBox& a, const LatticeBox& b, int dimension, double h);
/// Exact distance between two closed grid cells.
double cell_distance(const CellIndex& a, const CellIndex& b, int dimension, double h);
/// Diameter of the union of the closed cells of a set.
double closed_diameter(const CellSet& set);

// ---------------------------------------------------------------------------
// Operations

struct DomainPair {
  CellSet local;
  CellSet nonlocal;
};

/// Selects cells whose centers lie in the local / nonlocal regions.
/// Throws EmptyRegion or OverlapError.
DomainPair build_domain(const GridSpec& spec, const Region& local_region,
                        const Region& nonlocal_region);

/// Conservative lower bound on the distance between the closed cell unions:
/// min over center pairs of (center distance - sum of half diagonals), >= 0.
double set_distance(const CellSet& a, const CellSet& b);
double set_distance(const Interface& gamma, const CellSet& b);

struct Connectivity {
  bool connected = false;
  /// Components as lists of positions into the input set, each sorted;
  /// components ordered by their smallest position.
  std::vector<std::vector<std::size_t>> components;
};

/// Cells are joined when their closed-cell distance is < delta (face
/// adjacency when delta == 0).
Connectivity check_delta_connected(const CellSet& d, double delta);

/// Invokes fn(i, j) once for every unordered pair i < j of positions that
/// check_delta_connected would link.
template <typename Fn>
void for_each_delta_edge(const CellSet& d, double delta, Fn&& fn);

struct DeltaTree {
  double delta = 0.0;
  /// Each part is a list of positions into the covered CellSet.
  std::vector<std::vector<std::size_t>> parts;
  std::vector<double> part_volume;
  std::size_t root = 0;
  /// Branch = [branch root, B_1, ..., B_k]; length is k.
  std::vector<std::vector<std::size_t>> branches;
  std::vector<std::optional<std::size_t>> parent;
  std::size_t degree = 0;
  std::size_t max_branch_length = 0;
};

/// Partitions d into blocks of side floor(delta/(2 sqrt N)) snapped to h and
/// grows branches greedily (lowest lexicographic candidate first).
/// Throws NotDeltaConnected or HorizonTooSmall.
DeltaTree build_delta_tree(const CellSet& d, double delta,
                           std::optional<CellIndex> root_hint = std::nullopt);

/// Diameter of a union of parts of a tree (closed cells).
double parts_diameter(const CellSet& d, std::span<const std::vector<std::size_t>> parts);
/// Exact distance between two parts (closed cells).
double part_distance(const CellSet& d, const std::vector<std::size_t>& a,
                     const std::vector<std::size_t>& b);

/// Selects boundary faces of `local` whose centers lie in gamma_region.
/// Throws EmptyInterface.
Interface extract_interface(const CellSet& local, const Region& gamma_region);

/// CSV rows `i[,j],x[,y],role` with a header line.
void write_cells_csv(std::ostream& out, const CellSet& set);

}  // namespace janus::geometry

#include "janus/detail/geometry_inl.hpp"
