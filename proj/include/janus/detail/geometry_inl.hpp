#pragma once

#include <cmath>
#include <cstdlib>

namespace janus::geometry {

template <typename Fn>
void for_each_delta_edge(const CellSet& d, double delta, Fn&& fn) {
  const GridSpec& grid = d.grid();
  const int dim = grid.dimension();
  const double h = grid.h();
  if (delta <= 0.0) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (int axis = 0; axis < dim; ++axis) {
        CellIndex nb = d[i];
        nb[static_cast<std::size_t>(axis)] += 1;
        if (auto j = d.position(nb)) fn(i, *j);
      }
    }
    return;
  }
  // Closed-cell distance along an axis is (|di| - 1) h, so offsets beyond
  // delta/h + 1 can never qualify.
  const auto reach = static_cast<std::int64_t>(std::ceil(delta / h)) + 1;
  const std::int64_t reach_y = dim > 1 ? reach : 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const CellIndex& c = d[i];
    for (std::int64_t dx = -reach; dx <= reach; ++dx) {
      for (std::int64_t dy = -reach_y; dy <= reach_y; ++dy) {
        if (dx == 0 && dy == 0) continue;
        CellIndex nb{c[0] + dx, c[1] + dy};
        auto j = d.position(nb);
        if (!j || *j <= i) continue;
        if (cell_distance(c, nb, dim, h) < delta) fn(i, *j);
      }
    }
  }
}

}  // namespace janus::geometry
