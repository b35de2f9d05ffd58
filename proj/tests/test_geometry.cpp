#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "janus/error.hpp"
#include "janus/geometry.hpp"
#include "support.hpp"

using namespace janus;
using namespace janus::geometry;
using janus::testing::box1;
using janus::testing::box2;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected janus::Error");
  return ErrorCode::InvalidArgument;
}

CellSet interval_cells(double lo, double hi, double h, double glo, double ghi) {
  const auto g = GridSpec::make(1, h, {glo, 0}, {ghi, 0});
  std::vector<CellIndex> cells;
  for (std::int64_t i = 0; i < g.cells_along(0); ++i) {
    const double x = g.center({i, 0})[0];
    if (x > lo && x < hi) cells.push_back({i, 0});
  }
  return CellSet(g, cells, Role::nonlocal);
}

std::size_t union_find_components(const CellSet& d, double delta) {
  std::vector<std::size_t> parent(d.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      const double dist = cell_distance(d[i], d[j], d.grid().dimension(), d.grid().h());
      const bool linked = delta > 0 ? dist < delta : dist == 0.0 &&
          std::abs(d[i][0] - d[j][0]) + std::abs(d[i][1] - d[j][1]) == 1;
      if (linked) parent[find(i)] = find(j);
    }
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < d.size(); ++i) count += find(i) == i;
  return count;
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK(code_of([] { GridSpec::make(1, 0.3, {0, 0}, {1, 0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { GridSpec::make(1, -1.0, {0, 0}, {1, 0}); }) == ErrorCode::InvalidArgument);
  const auto g = GridSpec::make(2, 0.5, {-1, -1}, {1, 1});
  CHECK(g.total_cells() == 16);
  CHECK(g.cell_volume() == doctest::Approx(0.25));
  CHECK(g.face_measure() == doctest::Approx(0.5));
  CHECK(GridSpec::make(1, 0.25, {0, 0}, {1, 0}).face_measure() == 1.0);
}

TEST_CASE("build_domain counts cells") {
  SUBCASE("1D h=0.25") {
    const auto d = janus::testing::interval_pair(0.25);
    CHECK(d.local.size() == 4);
    CHECK(d.nonlocal.size() == 4);
  }
  SUBCASE("2D h=0.5") {
    const auto g = GridSpec::make(2, 0.5, {-1, -1}, {1, 1});
    const auto d = build_domain(g, {box2(0, 1, 0, 1)}, {box2(-1, 0, 0, 1)});
    CHECK(d.local.size() == 4);
    CHECK(d.nonlocal.size() == 4);
  }
  SUBCASE("overlap") {
    const auto g = GridSpec::make(1, 0.25, {-1, 0}, {2, 0});
    CHECK(code_of([&] { build_domain(g, {box1(0, 1)}, {box1(0.5, 1.5)}); }) == ErrorCode::OverlapError);
  }
  SUBCASE("empty region") {
    const auto g = GridSpec::make(1, 0.25, {-1, 0}, {1, 0});
    CHECK(code_of([&] { build_domain(g, {box1(0, 0.1)}, {box1(-1, 0)}); }) == ErrorCode::EmptyRegion);
  }
  SUBCASE("partition") {
    const auto d = janus::testing::two_squares(0.125);
    for (const auto& c : d.local.cells()) CHECK_FALSE(d.nonlocal.contains(c));
  }
}

TEST_CASE("set_distance") {
  const auto g = GridSpec::make(1, 0.25, {0, 0}, {2, 0});
  const CellSet a(g, {{0, 0}}, Role::local);
  const CellSet b(g, {{6, 0}}, Role::nonlocal);
  const CellSet c(g, {{1, 0}}, Role::nonlocal);
  CHECK(a.center(0)[0] == doctest::Approx(0.125));
  CHECK(b.center(0)[0] == doctest::Approx(1.625));
  CHECK(set_distance(a, b) == doctest::Approx(1.25));
  CHECK(set_distance(a, c) == 0.0);
  CHECK(set_distance(a, a) == 0.0);
}

TEST_CASE("check_delta_connected") {
  const auto d = interval_cells(0, 1, 0.25, 0, 2.5);
  const auto gapped = [&] {
    std::vector<CellIndex> cells;
    for (std::int64_t i = 0; i < 10; ++i) {
      const double x = 0.125 + 0.25 * static_cast<double>(i);
      if (x < 1.0 || x > 1.5) cells.push_back({i, 0});
    }
    return CellSet(d.grid(), cells, Role::nonlocal);
  }();
  CHECK(check_delta_connected(gapped, 0.6).connected);
  const auto split = check_delta_connected(gapped, 0.4);
  CHECK_FALSE(split.connected);
  CHECK(split.components.size() == 2);
  CHECK(check_delta_connected(d, 0.0).connected);

  SUBCASE("monotone in delta and agrees with union-find") {
    for (double delta : {0.0, 0.3, 0.5, 0.51, 0.75, 1.0}) {
      const auto r = check_delta_connected(gapped, delta);
      CHECK(r.components.size() == union_find_components(gapped, delta));
      if (r.connected) CHECK(check_delta_connected(gapped, delta + 0.2).connected);
    }
    const auto sq = janus::testing::two_squares(0.125).nonlocal;
    for (double delta : {0.0, 0.1, 0.3}) {
      CHECK(check_delta_connected(sq, delta).components.size() == union_find_components(sq, delta));
    }
  }
}

TEST_CASE("delta tree") {
  SUBCASE("interval h=1/16, delta=0.5") {
    const auto d = interval_cells(0, 1, 0.0625, 0, 1);
    const auto t = build_delta_tree(d, 0.5);
    for (const auto& p : t.parts) CHECK(parts_diameter(d, std::span(&p, 1)) <= 0.25 + 1e-12);
    CHECK(t.parts.size() == 4);
    CHECK(t.branches.size() == 1);
    CHECK(t.max_branch_length >= 3);
  }
  SUBCASE("single part") {
    const auto d = interval_cells(0, 0.25, 0.0625, 0, 1);
    const auto t = build_delta_tree(d, 1.0);
    CHECK(t.parts.size() == 1);
    CHECK(t.branches.empty());
  }
  SUBCASE("square with large delta") {
    const auto g = GridSpec::make(2, 0.25, {0, 0}, {1, 1});
    std::vector<CellIndex> cells;
    for (std::int64_t i = 0; i < 4; ++i)
      for (std::int64_t j = 0; j < 4; ++j) cells.push_back({i, j});
    const CellSet sq(g, cells, Role::nonlocal);
    CHECK(build_delta_tree(sq, 2.0 * std::sqrt(2.0) * 1.0 + 1e-9).parts.size() == 1);
  }
  SUBCASE("soundness and completeness on two squares") {
    const auto sq = janus::testing::two_squares(0.0625).nonlocal;
    for (double delta : {0.3, 0.5, 0.8}) {
      const auto t = build_delta_tree(sq, delta);
      std::vector<std::size_t> all;
      for (const auto& p : t.parts) {
        CHECK(parts_diameter(sq, std::span(&p, 1)) <= delta / 2 + 1e-12);
        all.insert(all.end(), p.begin(), p.end());
      }
      std::sort(all.begin(), all.end());
      CHECK(all.size() == sq.size());
      CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
      for (const auto& b : t.branches) {
        for (std::size_t k = 0; k + 1 < b.size(); ++k) {
          CHECK(parts_diameter(sq, std::vector<std::vector<std::size_t>>{t.parts[b[k]], t.parts[b[k + 1]]}) < 2 * delta);
        }
      }
    }
  }
  SUBCASE("errors") {
    const auto d = interval_cells(0, 1, 0.25, 0, 1);
    CHECK(code_of([&] { build_delta_tree(d, 0.2); }) == ErrorCode::HorizonTooSmall);
    const auto g = GridSpec::make(1, 0.25, {0, 0}, {3, 0});
    const CellSet far(g, {{0, 0}, {11, 0}}, Role::nonlocal);
    CHECK(code_of([&] { build_delta_tree(far, 1.0); }) == ErrorCode::NotDeltaConnected);
  }
}

TEST_CASE("extract_interface") {
  SUBCASE("1D point") {
    const auto d = janus::testing::interval_pair(0.25);
    const auto gamma = extract_interface(d.local, {box1(0, 0)});
    CHECK(gamma.size() == 1);
    CHECK(gamma.measure() == 1.0);
  }
  SUBCASE("2D left edge") {
    const auto g = GridSpec::make(2, 0.5, {0, 0}, {1, 1});
    const CellSet local(g, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, Role::local);
    const auto gamma = extract_interface(local, {box2(0, 0, 0, 1)});
    CHECK(gamma.size() == 2);
    CHECK(gamma.measure() == doctest::Approx(1.0));
  }
  SUBCASE("off the boundary") {
    const auto d = janus::testing::interval_pair(0.25);
    CHECK(code_of([&] { extract_interface(d.local, {box1(0.5, 0.5)}); }) == ErrorCode::EmptyInterface);
  }
}

TEST_CASE("cells csv") {
  const auto d = janus::testing::interval_pair(0.5);
  std::ostringstream os;
  write_cells_csv(os, d.local);
  CHECK(os.str() == "i,x,role\n2,0.25,local\n3,0.75,local\n");
}
