#include "janus/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include "janus/error.hpp"
#include "janus/io.hpp"

namespace janus::geometry {

namespace {

constexpr double kGridTol = 1e-9;

double lattice_norm(const std::array<std::int64_t, kMaxDim>& d, int dim, double h) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const auto v = static_cast<double>(d[static_cast<std::size_t>(k)]);
    s += v * v;
  }
  return 0.5 * h * std::sqrt(s);
}

bool lex_less(const CellIndex& a, const CellIndex& b) { return a < b; }

}  // namespace

bool Box::contains(const Point& p, int dimension, double tol) const {
  for (int k = 0; k < dimension; ++k) {
    const auto a = static_cast<std::size_t>(k);
    if (p[a] < lo[a] - tol || p[a] > hi[a] + tol) return false;
  }
  return true;
}

GridSpec GridSpec::make(int dimension, double h, Point lo, Point hi) {
  if (dimension != 1 && dimension != 2) {
    throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidArgument, "cell width h must be positive");
  }
  GridSpec g;
  g.dimension_ = dimension;
  g.h_ = h;
  g.lo_ = lo;
  g.hi_ = hi;
  for (int k = 0; k < kMaxDim; ++k) {
    const auto a = static_cast<std::size_t>(k);
    if (k >= dimension) {
      g.lo_[a] = 0.0;
      g.hi_[a] = 0.0;
      g.counts_[a] = 1;
      continue;
    }
    const double extent = hi[a] - lo[a];
    if (!(extent > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "bounding box must have positive extent on every axis");
    }
    const double ratio = extent / h;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > kGridTol * std::max(1.0, ratio) || rounded < 1.0) {
      std::ostringstream msg;
      msg << "extent " << extent << " on axis " << k << " is not an integer multiple of h=" << h;
      throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    g.counts_[a] = static_cast<std::int64_t>(rounded);
  }
  return g;
}

std::int64_t GridSpec::total_cells() const { return counts_[0] * counts_[1]; }

double GridSpec::cell_volume() const { return dimension_ == 1 ? h_ : h_ * h_; }

double GridSpec::face_measure() const { return dimension_ == 1 ? 1.0 : h_; }

bool GridSpec::in_bounds(const CellIndex& c) const {
  for (int k = 0; k < kMaxDim; ++k) {
    const auto a = static_cast<std::size_t>(k);
    if (c[a] < 0 || c[a] >= counts_[a]) return false;
  }
  return true;
}

Point GridSpec::center(const CellIndex& c) const {
  Point p{};
  for (int k = 0; k < dimension_; ++k) {
    const auto a = static_cast<std::size_t>(k);
    p[a] = lo_[a] + (static_cast<double>(c[a]) + 0.5) * h_;
  }
  return p;
}

std::int64_t GridSpec::linear(const CellIndex& c) const { return c[0] * counts_[1] + c[1]; }

std::string to_string(Role role) { return role == Role::local ? "local" : "nonlocal"; }

CellSet::CellSet(GridSpec grid, std::vector<CellIndex> cells, Role role)
    : grid_(std::move(grid)), cells_(std::move(cells)), role_(role) {
  std::sort(cells_.begin(), cells_.end(), lex_less);
  if (std::adjacent_find(cells_.begin(), cells_.end()) != cells_.end()) {
    throw Error(ErrorCode::InvalidArgument, "CellSet indices must be unique");
  }
  lookup_.assign(static_cast<std::size_t>(grid_.total_cells()), -1);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!grid_.in_bounds(cells_[i])) {
      throw Error(ErrorCode::InvalidArgument, "CellSet index outside grid bounds");
    }
    lookup_[static_cast<std::size_t>(grid_.linear(cells_[i]))] = static_cast<std::int64_t>(i);
  }
}

std::optional<std::size_t> CellSet::position(const CellIndex& c) const {
  if (!grid_.in_bounds(c)) return std::nullopt;
  const auto p = lookup_[static_cast<std::size_t>(grid_.linear(c))];
  if (p < 0) return std::nullopt;
  return static_cast<std::size_t>(p);
}

CellSet CellSet::subset(std::span<const std::size_t> positions) const {
  std::vector<CellIndex> picked;
  picked.reserve(positions.size());
  for (auto p : positions) picked.push_back(cells_.at(p));
  return CellSet(grid_, std::move(picked), role_);
}

Interface::Interface(CellSet local, std::vector<Face> faces)
    : local_(std::move(local)), faces_(std::move(faces)) {
  std::sort(faces_.begin(), faces_.end());
  if (std::adjacent_find(faces_.begin(), faces_.end()) != faces_.end()) {
    throw Error(ErrorCode::InvalidArgument, "interface faces must be unique");
  }
  for (const Face& f : faces_) {
    if (!local_.contains(f.cell)) {
      throw Error(ErrorCode::InvalidArgument, "interface face not owned by a local cell");
    }
    CellIndex nb = f.cell;
    nb[static_cast<std::size_t>(f.axis)] += f.side;
    if (local_.contains(nb)) {
      throw Error(ErrorCode::InvalidArgument, "interface face is interior to the local set");
    }
  }
}

Point Interface::face_center(std::size_t i) const {
  const Face& f = faces_.at(i);
  Point p = local_.grid().center(f.cell);
  p[static_cast<std::size_t>(f.axis)] += 0.5 * f.side * local_.grid().h();
  return p;
}

std::size_t Interface::owner(std::size_t i) const { return *local_.position(faces_.at(i).cell); }

Interface Interface::subset(std::span<const std::size_t> positions) const {
  std::vector<Face> picked;
  picked.reserve(positions.size());
  for (auto p : positions) picked.push_back(faces_.at(p));
  return Interface(local_, std::move(picked));
}

LatticeBox cell_box(const CellIndex& c, int dimension) {
  LatticeBox b;
  for (int k = 0; k < dimension; ++k) {
    const auto a = static_cast<std::size_t>(k);
    b.lo[a] = 2 * c[a];
    b.hi[a] = 2 * c[a] + 2;
  }
  return b;
}

LatticeBox face_box(const Face& f, int dimension) {
  LatticeBox b = cell_box(f.cell, dimension);
  const auto a = static_cast<std::size_t>(f.axis);
  const std::int64_t plane = f.side < 0 ? b.lo[a] : b.hi[a];
  b.lo[a] = plane;
  b.hi[a] = plane;
  return b;
}

double box_distance(const LatticeBox& a, const LatticeBox& b, int dimension, double h) {
  std::array<std::int64_t, kMaxDim> gap{};
  for (int k = 0; k < dimension; ++k) {
    const auto x = static_cast<std::size_t>(k);
    gap[x] = std::max<std::int64_t>({0, b.lo[x] - a.hi[x], a.lo[x] - b.hi[x]});
  }
  return lattice_norm(gap, dimension, h);
}

double box_pair_diameter(const LatticeBox& a, const LatticeBox& b, int dimension, double h) {
  std::array<std::int64_t, kMaxDim> span{};
  for (int k = 0; k < dimension; ++k) {
    const auto x = static_cast<std::size_t>(k);
    span[x] = std::max(a.hi[x], b.hi[x]) - std::min(a.lo[x], b.lo[x]);
  }
  return lattice_norm(span, dimension, h);
}

double cell_distance(const CellIndex& a, const CellIndex& b, int dimension, double h) {
  return box_distance(cell_box(a, dimension), cell_box(b, dimension), dimension, h);
}

double closed_diameter(const CellSet& set) {
  std::vector<std::vector<std::size_t>> all(1);
  all[0].resize(set.size());
  std::iota(all[0].begin(), all[0].end(), std::size_t{0});
  return parts_diameter(set, all);
}

DomainPair build_domain(const GridSpec& spec, const Region& local_region,
                        const Region& nonlocal_region) {
  const double tol = kGridTol * spec.h();
  auto inside = [&](const Region& r, const Point& p) {
    return std::any_of(r.begin(), r.end(),
                       [&](const Box& b) { return b.contains(p, spec.dimension(), tol); });
  };
  std::vector<CellIndex> local, nonlocal;
  std::size_t overlaps = 0;
  for (std::int64_t i = 0; i < spec.cells_along(0); ++i) {
    for (std::int64_t j = 0; j < spec.cells_along(1); ++j) {
      const CellIndex c{i, j};
      const Point p = spec.center(c);
      const bool in_l = inside(local_region, p);
      const bool in_n = inside(nonlocal_region, p);
      if (in_l && in_n) ++overlaps;
      if (in_l) local.push_back(c);
      if (in_n) nonlocal.push_back(c);
    }
  }
  if (overlaps > 0) {
    throw Error(ErrorCode::OverlapError,
                std::to_string(overlaps) + " cell(s) lie in both the local and nonlocal regions");
  }
  if (local.empty()) throw Error(ErrorCode::EmptyRegion, "local region captures no cell");
  if (nonlocal.empty()) throw Error(ErrorCode::EmptyRegion, "nonlocal region captures no cell");
  return {CellSet(spec, std::move(local), Role::local),
          CellSet(spec, std::move(nonlocal), Role::nonlocal)};
}

namespace {

// Center offsets on the half lattice: cell center 2i+1, face center on the
// face plane.
std::array<std::int64_t, kMaxDim> lattice_center(const LatticeBox& b) {
  return {b.lo[0] + b.hi[0], b.lo[1] + b.hi[1]};  // doubled
}

double conservative_distance(std::span<const LatticeBox> a, std::span<const LatticeBox> b,
                             double half_diag_sum, int dim, double h) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : a) {
    const auto cx = lattice_center(x);
    for (const auto& y : b) {
      const auto cy = lattice_center(y);
      std::array<std::int64_t, kMaxDim> d{cx[0] - cy[0], cx[1] - cy[1]};
      // Doubled lattice coordinates: quarter-h units.
      best = std::min(best, 0.5 * lattice_norm(d, dim, h));
    }
  }
  return std::max(0.0, best - half_diag_sum);
}

}  // namespace

double set_distance(const CellSet& a, const CellSet& b) {
  const int dim = a.grid().dimension();
  const double h = a.grid().h();
  std::vector<LatticeBox> ba, bb;
  for (const auto& c : a.cells()) ba.push_back(cell_box(c, dim));
  for (const auto& c : b.cells()) bb.push_back(cell_box(c, dim));
  return conservative_distance(ba, bb, h * std::sqrt(static_cast<double>(dim)), dim, h);
}

double set_distance(const Interface& gamma, const CellSet& b) {
  const int dim = b.grid().dimension();
  const double h = b.grid().h();
  std::vector<LatticeBox> ba, bb;
  for (const auto& f : gamma.faces()) ba.push_back(face_box(f, dim));
  for (const auto& c : b.cells()) bb.push_back(cell_box(c, dim));
  const double half_face = 0.5 * h * std::sqrt(static_cast<double>(dim - 1));
  const double half_cell = 0.5 * h * std::sqrt(static_cast<double>(dim));
  return conservative_distance(ba, bb, half_face + half_cell, dim, h);
}

Connectivity check_delta_connected(const CellSet& d, double delta) {
  if (delta < 0.0) throw Error(ErrorCode::InvalidArgument, "delta must be nonnegative");
  std::vector<std::vector<std::size_t>> adj(d.size());
  for_each_delta_edge(d, delta, [&](std::size_t i, std::size_t j) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  });
  Connectivity out;
  std::vector<bool> seen(d.size(), false);
  for (std::size_t s = 0; s < d.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      comp.push_back(v);
      for (auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          q.push(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.components.push_back(std::move(comp));
  }
  out.connected = out.components.size() == 1;
  return out;
}

double part_distance(const CellSet& d, const std::vector<std::size_t>& a,
                     const std::vector<std::size_t>& b) {
  const int dim = d.grid().dimension();
  double best = std::numeric_limits<double>::infinity();
  for (auto i : a) {
    for (auto j : b) best = std::min(best, cell_distance(d[i], d[j], dim, d.grid().h()));
  }
  return best;
}

double parts_diameter(const CellSet& d, std::span<const std::vector<std::size_t>> parts) {
  const int dim = d.grid().dimension();
  std::vector<LatticeBox> boxes;
  for (const auto& p : parts) {
    for (auto i : p) boxes.push_back(cell_box(d[i], dim));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i; j < boxes.size(); ++j) {
      best = std::max(best, box_pair_diameter(boxes[i], boxes[j], dim, d.grid().h()));
    }
  }
  return best;
}

DeltaTree build_delta_tree(const CellSet& d, double delta, std::optional<CellIndex> root_hint) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "tree horizon must be positive");
  if (d.empty()) throw Error(ErrorCode::InvalidArgument, "cannot build a tree on an empty set");
  if (!check_delta_connected(d, delta).connected) {
    throw Error(ErrorCode::NotDeltaConnected, "set is not delta-connected for delta=" +
                                                  std::to_string(delta));
  }
  const int dim = d.grid().dimension();
  const double h = d.grid().h();
  const double side_limit = delta / (2.0 * std::sqrt(static_cast<double>(dim)));
  const auto block = static_cast<std::int64_t>(std::floor(side_limit / h * (1.0 + 1e-12)));
  if (block < 1) {
    throw Error(ErrorCode::HorizonTooSmall,
                "cell width exceeds delta/(2 sqrt N); refine the grid or enlarge delta");
  }

  // Parts: nonempty blocks, ordered by their lowest lexicographic cell.
  std::vector<std::pair<CellIndex, std::vector<std::size_t>>> blocks;
  {
    std::vector<std::pair<CellIndex, std::size_t>> keyed;
    keyed.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      CellIndex key{};
      for (int k = 0; k < dim; ++k) {
        const auto a = static_cast<std::size_t>(k);
        key[a] = d[i][a] / block;  // indices are nonnegative
      }
      keyed.emplace_back(key, i);
    }
    std::sort(keyed.begin(), keyed.end());
    for (const auto& [key, pos] : keyed) {
      if (blocks.empty() || blocks.back().first != key) blocks.push_back({key, {}});
      blocks.back().second.push_back(pos);
    }
  }
  DeltaTree tree;
  tree.delta = delta;
  for (auto& [key, cells] : blocks) {
    std::sort(cells.begin(), cells.end());
    tree.parts.push_back(std::move(cells));
  }
  std::sort(tree.parts.begin(), tree.parts.end(),
            [&](const auto& a, const auto& b) { return d[a.front()] < d[b.front()]; });
  const std::size_t n_parts = tree.parts.size();
  for (const auto& p : tree.parts) {
    tree.part_volume.push_back(d.cell_volume() * static_cast<double>(p.size()));
  }

  std::size_t root = 0;
  if (root_hint) {
    const auto pos = d.position(*root_hint);
    if (!pos) throw Error(ErrorCode::InvalidArgument, "root hint is not a cell of the set");
    for (std::size_t p = 0; p < n_parts; ++p) {
      if (std::binary_search(tree.parts[p].begin(), tree.parts[p].end(), *pos)) root = p;
    }
  }
  tree.root = root;

  // Part adjacency (distance < delta), computed once.
  std::vector<std::vector<std::size_t>> near(n_parts);
  {
    std::vector<std::size_t> part_of(d.size());
    for (std::size_t p = 0; p < n_parts; ++p) {
      for (auto c : tree.parts[p]) part_of[c] = p;
    }
    std::vector<std::vector<bool>> linked(n_parts, std::vector<bool>(n_parts, false));
    for_each_delta_edge(d, delta, [&](std::size_t i, std::size_t j) {
      const auto a = part_of[i], b = part_of[j];
      if (a != b) linked[a][b] = linked[b][a] = true;
    });
    for (std::size_t a = 0; a < n_parts; ++a) {
      for (std::size_t b = 0; b < n_parts; ++b) {
        if (linked[a][b]) near[a].push_back(b);  // ascending = lexicographic order
      }
    }
  }

  std::vector<bool> used(n_parts, false);
  tree.parent.assign(n_parts, std::nullopt);
  used[root] = true;
  std::vector<std::size_t> order{root};
  std::vector<std::size_t> root_degree(n_parts, 0);
  auto next_candidate = [&](std::size_t from) -> std::optional<std::size_t> {
    for (auto q : near[from]) {
      if (!used[q]) return q;
    }
    return std::nullopt;
  };
  for (std::size_t cursor = 0; cursor < order.size(); ++cursor) {
    const std::size_t r = order[cursor];
    while (auto first = next_candidate(r)) {
      std::vector<std::size_t> branch{r, *first};
      used[*first] = true;
      tree.parent[*first] = r;
      std::size_t cur = *first;
      while (auto nxt = next_candidate(cur)) {
        used[*nxt] = true;
        tree.parent[*nxt] = cur;
        branch.push_back(*nxt);
        cur = *nxt;
      }
      for (std::size_t k = 1; k < branch.size(); ++k) order.push_back(branch[k]);
      ++root_degree[r];
      tree.max_branch_length = std::max(tree.max_branch_length, branch.size() - 1);
      tree.branches.push_back(std::move(branch));
    }
  }
  if (order.size() != n_parts) {
    // Unreachable for delta-connected input; kept as an internal consistency check.
    throw Error(ErrorCode::NotDeltaConnected, "tree construction left parts uncovered");
  }
  tree.degree = *std::max_element(root_degree.begin(), root_degree.end());
  return tree;
}

Interface extract_interface(const CellSet& local, const Region& gamma_region) {
  const GridSpec& grid = local.grid();
  const int dim = grid.dimension();
  const double tol = kGridTol * grid.h();
  std::vector<Face> faces;
  for (const auto& c : local.cells()) {
    for (int axis = 0; axis < dim; ++axis) {
      for (int side : {-1, 1}) {
        CellIndex nb = c;
        nb[static_cast<std::size_t>(axis)] += side;
        if (local.contains(nb)) continue;
        Point p = grid.center(c);
        p[static_cast<std::size_t>(axis)] += 0.5 * side * grid.h();
        const bool hit = std::any_of(gamma_region.begin(), gamma_region.end(),
                                     [&](const Box& b) { return b.contains(p, dim, tol); });
        if (hit) faces.push_back({c, axis, side});
      }
    }
  }
  if (faces.empty()) throw Error(ErrorCode::EmptyInterface, "gamma region selects no boundary face");
  return Interface(local, std::move(faces));
}

void write_cells_csv(std::ostream& out, const CellSet& set) {
  const int dim = set.grid().dimension();
  out << (dim == 1 ? "i,x,role\n" : "i,j,x,y,role\n");
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto& c = set[k];
    const Point p = set.center(k);
    out << c[0] << ',';
    if (dim == 2) out << c[1] << ',';
    out << io::fmt(p[0]) << ',';
    if (dim == 2) out << io::fmt(p[1]) << ',';
    out << to_string(set.role()) << '\n';
  }
}

}  // namespace janus::geometry
