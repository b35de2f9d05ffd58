#include <cmath>
#include <omp.h>

#include "doctest.h"
#include "janus/error.hpp"
#include "janus/particles.hpp"
#include "support.hpp"

using namespace janus;
using namespace janus::particles;
using assembly::Model;
namespace jt = janus::testing;

TEST_CASE("jump chain structure") {
  const auto p = jt::eight_cell();
  const auto a = assembly::assemble(p);
  const auto chain = build_chain(a);
  CHECK(chain.states == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    double out = 0.0;
    for (std::size_t j = 0; j < 8; ++j) {
      if (i == j) continue;
      CHECK(chain.q(i, j) == doctest::Approx(-a.matrix().at(i, j) / a.weights()[i]));
      CHECK(chain.weights[i] * chain.q(i, j) == doctest::Approx(chain.weights[j] * chain.q(j, i)).epsilon(1e-14));
      out += chain.q(i, j);
    }
    CHECK(chain.exit_rate[i] == doctest::Approx(out));
  }
  for (std::size_t i = 0; i < p.layout.n_local(); ++i) {
    bool reaches_nonlocal = false;
    for (std::size_t j = p.layout.n_local(); j < 8; ++j) reaches_nonlocal |= chain.q(i, j) > 0.0;
    CHECK(reaches_nonlocal == (p.layout.center(i)[0] < 1.0));
  }
}

TEST_CASE("pure local chain is birth-death with reflecting ends") {
  const auto g = geometry::GridSpec::make(1, 1.0, {0, 0}, {3, 0});
  const assembly::Layout layout(geometry::CellSet(g, {{0, 0}, {1, 0}, {2, 0}}, geometry::Role::local),
                                geometry::CellSet(g, {}, geometry::Role::nonlocal));
  const auto chain = build_chain(assembly::assemble_local(layout), "local");
  CHECK(chain.q(0, 1) == 1.0);
  CHECK(chain.q(0, 2) == 0.0);
  CHECK(chain.exit_rate[0] == 1.0);
  CHECK(chain.exit_rate[1] == 2.0);
}

TEST_CASE("negative rates are rejected") {
  const auto g = geometry::GridSpec::make(1, 1.0, {0, 0}, {2, 0});
  const assembly::Layout layout(geometry::CellSet(g, {{0, 0}, {1, 0}}, geometry::Role::local),
                                geometry::CellSet(g, {}, geometry::Role::nonlocal));
  const Triplet bad[] = {{0, 0, -1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, -1.0}};
  const assembly::DiscreteOperator op(layout, assembly::Term::local, CsrMatrix::from_triplets(2, bad));
  try {
    build_chain(op);
    FAIL("expected NegativeRate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeRate);
  }
}

TEST_CASE("single cell occupancy") {
  const auto g = geometry::GridSpec::make(1, 1.0, {0, 0}, {1, 0});
  const assembly::Layout layout(geometry::CellSet(g, {{0, 0}}, geometry::Role::local),
                                geometry::CellSet(g, {}, geometry::Role::nonlocal));
  const auto occ = simulate_stationary(build_chain(assembly::assemble_local(layout)), 50, 10.0, 1);
  CHECK(occ.fraction.size() == 1);
  CHECK(occ.fraction[0] == doctest::Approx(1.0));
  CHECK(occ.jumps == 0);
}

TEST_CASE("simulation is deterministic per seed and thread count") {
  const auto chain = build_chain(assembly::assemble(jt::eight_cell()));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = simulate_stationary(chain, 700, 5.0, 42);
  omp_set_num_threads(4);
  const auto b = simulate_stationary(chain, 700, 5.0, 42);
  omp_set_num_threads(saved);
  CHECK(a.fraction == b.fraction);
  CHECK(a.jumps == b.jumps);
  const auto c = simulate_stationary(chain, 700, 5.0, 43);
  CHECK(c.fraction != a.fraction);
  double total = 0.0;
  for (double x : a.fraction) total += x;
  CHECK(total == doctest::Approx(1.0));
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("occupancy approaches the volume-weighted distribution") {
  for (auto model : {Model::volumetric, Model::mixed}) {
    const auto chain = build_chain(assembly::assemble(jt::eight_cell(model)), assembly::to_string(model));
    const auto occ = simulate_stationary(chain, 2000, 50.0, 5, 0);
    CHECK(total_variation(occ.fraction, stationary_distribution(chain)) < 0.02);
  }
  CHECK(total_variation(Vec{1, 0}, Vec{0, 1}) == 1.0);
}

TEST_CASE("source balance") {
  const auto p = jt::eight_cell();
  const auto a = assembly::assemble(p);
  const auto chain = build_chain(a);
  const auto f = assembly::assemble_load(p.layout, jt::balanced_step(p.layout));
  const auto r = solver::solve(a, f);
  CHECK(source_balance_check(chain, f, r) <= 10 * solver::kDefaultTol);
  CHECK(source_balance_check(chain, assembly::assemble_load(p.layout, Vec(8, 0.0)), Vec(8, 0.0)) == 0.0);

  const auto v = jt::random_vector(8, 4);
  double prev = 0.0;
  for (double eps : {1e-4, 1e-3, 1e-2}) {
    Vec u = r.u;
    for (std::size_t i = 0; i < 8; ++i) u[i] += eps * v[i];
    const double d = source_balance_check(chain, f, u);
    CHECK(d > prev);
    if (prev > 0.0) CHECK(d / prev == doctest::Approx(10.0).epsilon(1e-3));
    prev = d;
  }
}
