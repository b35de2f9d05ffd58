#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "janus/analysis.hpp"
#include "janus/error.hpp"
#include "support.hpp"

using namespace janus;
using namespace janus::analysis;
using assembly::Model;
using kernels::KernelSpec;
namespace jt = janus::testing;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

geometry::CellSet line(double h, std::int64_t n, geometry::Role role) {
  const auto g = geometry::GridSpec::make(1, h, {0, 0}, {h * static_cast<double>(n), 0});
  std::vector<geometry::CellIndex> cells;
  for (std::int64_t i = 0; i < n; ++i) cells.push_back({i, 0});
  return {g, cells, role};
}

assembly::Layout local_layout(const geometry::CellSet& c) {
  return {c, geometry::CellSet(c.grid(), {}, geometry::Role::nonlocal)};
}

geometry::DeltaTree equal_chain(std::size_t parts) {
  geometry::DeltaTree t;
  t.delta = 1.0;
  for (std::size_t k = 0; k < parts; ++k) {
    t.parts.push_back({k});
    t.part_volume.push_back(0.25);
    t.parent.push_back(k == 0 ? std::nullopt : std::optional<std::size_t>(k - 1));
  }
  if (parts > 1) {
    std::vector<std::size_t> b(parts);
    for (std::size_t k = 0; k < parts; ++k) b[k] = k;
    t.branches.push_back(b);
    t.max_branch_length = parts - 1;
    t.degree = 1;
  }
  return t;
}

}  // namespace

TEST_CASE("pure nonlocal constant kernel") {
  const auto nl = line(0.125, 8, geometry::Role::nonlocal);
  const assembly::Layout layout(geometry::CellSet(nl.grid(), {}, geometry::Role::local), nl);
  const auto a = assembly::assemble_nonlocal(layout, KernelSpec::indicator(1.0, 1.0));
  CHECK(std::abs(poincare_computed(a) - 2.0) <= 1e-9);
}

TEST_CASE("Neumann interval eigenvalue") {
  const auto loc = line(1.0 / 64, 64, geometry::Role::local);
  const auto a = assembly::assemble_local(local_layout(loc));
  const double lambda = poincare_computed(a);
  CHECK(lambda == doctest::Approx(9.86762276722776).epsilon(1e-10));
  CHECK(std::abs(lambda - kPi2) / kPi2 < 2e-3);

  EigenOptions iterative;
  iterative.dense_limit = 0;
  CHECK(poincare_computed(a, iterative) == doctest::Approx(lambda).epsilon(1e-8));
}

TEST_CASE("sigma_local") {
  const auto loc = line(1.0 / 64, 64, geometry::Role::local);
  const auto full = sigma_local(loc, loc);
  CHECK(full.bound == doctest::Approx(kPi2 / 4));
  CHECK(full.computed == doctest::Approx(9.86762276722776).epsilon(1e-8));

  std::vector<std::size_t> left(32);
  for (std::size_t i = 0; i < 32; ++i) left[i] = i;
  const auto half = sigma_local(loc, loc.subset(left));
  CHECK(half.bound == doctest::Approx(kPi2 / 10));
  CHECK(half.bound <= half.computed);
  CHECK(half.computed <= full.computed + 1e-9);

  const auto sq = jt::two_squares(0.125);
  const auto gamma = geometry::extract_interface(sq.local, {jt::box2(0, 0, 0, 1)});
  const auto tr = sigma_local(sq.local, gamma);
  CHECK(tr.computed > 0.0);
  CHECK(tr.bound == 0.0);

  try {
    sigma_local(loc, geometry::CellSet(loc.grid(), {}, geometry::Role::local));
    FAIL("expected EmptySubset");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySubset);
  }
}

TEST_CASE("branch and tree constants") {
  const auto single = equal_chain(1);
  const std::vector<std::size_t> root_only{0};
  const auto b1 = branch_constant(single, root_only, 1.0);
  CHECK(b1.root == 1.0);
  CHECK(b1.edge.empty());
  CHECK(tree_constant(single, 1.0) == 1.0);

  const auto chain = equal_chain(4);
  const auto b4 = branch_constant(chain, chain.branches[0], 1.0);
  CHECK(b4.root == 15.0);
  CHECK(b4.edge.size() == 3);
  CHECK_THROWS_AS(branch_constant(chain, std::vector<std::size_t>{}, 1.0), Error);

  const auto d = tree_constant_detail(chain, 1.0);
  CHECK(d.alpha == 15.0);
  CHECK(d.gamma == doctest::Approx(28.0));
  CHECK(d.value == doctest::Approx(28.0));
  CHECK(tree_constant(chain, 2.0) == doctest::Approx(15.0));

  const auto nl = jt::interval_pair(0.25).nonlocal;
  const auto built = build_delta_tree(nl, 0.5);
  const auto bd = tree_constant_detail(built, 1.0);
  CHECK(bd.alpha == 15.0);
  CHECK(bd.gamma == doctest::Approx(28.0));
}

TEST_CASE("closed-form cube bound") {
  const auto c = cube_closed_form(1, 1.0, 0.5, 1.0);
  CHECK(c.root == 131072.0);
  CHECK(c.factor == 2.0);
  CHECK(c.value == 262144.0);
  const auto built = build_delta_tree(jt::interval_pair(0.25).nonlocal, 0.5);
  CHECK(tree_constant(built, 1.0) <= c.value);
  CHECK(cube_closed_form(2, 1.0, 2.0, 1.0).factor == doctest::Approx(1.0 / std::numbers::pi));
  CHECK(small_delta_annotation(1, 0.5, 1.0, 2.0) == doctest::Approx(0.5 * std::exp(2.0)));
}

TEST_CASE("tracked bound is sound") {
  for (auto model : {Model::volumetric, Model::mixed}) {
    CAPTURE(assembly::to_string(model));
    double previous = 0.0;
    for (double delta : {0.8, 0.4}) {
      const auto p = jt::make_problem(model, jt::two_squares(0.125), KernelSpec::indicator(1.0, delta),
                                      KernelSpec::indicator(1.0, delta));
      const auto r = tracked_bound(p, 2000);
      CHECK_FALSE(r.degenerate);
      CHECK(r.bound > 0.0);
      CHECK(r.bound <= r.computed);
      CHECK(r.coupling_diameter < 2 * delta);
      CHECK(r.sigma > 0.0);
      if (previous > 0.0) CHECK(r.bound < previous);
      previous = r.bound;
    }
  }
  const auto ip = tracked_bound(jt::eight_cell(), 2000);
  CHECK(ip.tree_alpha == 15.0);
  CHECK(ip.tree_gamma == doctest::Approx(28.0));
  CHECK(ip.a_measure == 0.5);
  CHECK(ip.bound == doctest::Approx(1.0 / 112));
  CHECK(ip.bound == doctest::Approx(std::min({ip.sigma, ip.m_g * ip.a_measure / (2 * ip.tree), 1 / (2 * ip.tree)})));
  CHECK(ip.computed > ip.bound);
}

TEST_CASE("coupling sets beyond the horizon") {
  const auto p = jt::eight_cell();
  const auto tree = build_delta_tree(p.layout.nonlocal(), 0.5);
  CouplingSets far;
  far.a = {p.layout.n_local() - 1};
  far.root_part = 0;
  for (std::size_t k = 0; k < tree.parts.size(); ++k) {
    if (tree.parts[k].front() == 0) far.root_part = k;
  }
  CHECK(coupling_diameter(p, tree, far) >= 1.0);
  try {
    tracked_bound(p, tree, far, 100);
    FAIL("expected HorizonViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HorizonViolation);
  }
}

TEST_CASE("decoupled operator is degenerate") {
  const auto p = jt::make_problem(Model::volumetric, jt::interval_pair(0.25), KernelSpec::indicator(1.0, 0.5),
                                  KernelSpec::indicator(0.0, 0.5));
  try {
    poincare_computed(assembly::assemble(p));
    FAIL("expected DegenerateNullSpace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateNullSpace);
  }
}

TEST_CASE("iterative path detects a decoupled operator") {
  const auto p = jt::make_problem(Model::volumetric, jt::two_squares(0.125), KernelSpec::indicator(1.0, 0.5),
                                  KernelSpec::indicator(0.0, 0.5));
  EigenOptions iterative;
  iterative.dense_limit = 0;
  try {
    poincare_computed(assembly::assemble(p), iterative);
    FAIL("expected DegenerateNullSpace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateNullSpace);
  }
}

TEST_CASE("iterative and dense eigenvalues agree on a coupled instance") {
  const auto op = assembly::assemble(jt::eight_cell(Model::mixed));
  EigenOptions iterative;
  iterative.dense_limit = 0;
  CHECK(poincare_computed(op, iterative) == doctest::Approx(poincare_computed(op)).epsilon(1e-8));
}

TEST_CASE("two-branch tree composition") {
  // R -> A -> B, plus a second branch A -> C, every part of volume 1/4.
  geometry::DeltaTree t;
  t.parts = {{0}, {1}, {2}, {3}};
  t.part_volume = {0.25, 0.25, 0.25, 0.25};
  t.root = 0;
  t.branches = {{0, 1, 2}, {1, 3}};
  t.parent = {std::nullopt, 0, 1, 1};
  const auto d = tree_constant_detail(t, 1.0);
  CHECK(d.alpha == 11.0);
  CHECK(d.gamma == doctest::Approx(20.0));
  CHECK(d.value == doctest::Approx(20.0));
}
