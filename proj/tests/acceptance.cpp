// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "janus/analysis.hpp"
#include "janus/config.hpp"
#include "janus/error.hpp"
#include "janus/particles.hpp"
#include "janus/solver.hpp"
#include "support.hpp"

namespace {

using namespace janus;
using assembly::Model;
using kernels::KernelSpec;
namespace jt = janus::testing;

constexpr double kTol = solver::kDefaultTol;
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

struct Instance {
  std::string name;
  assembly::Problem problem;
  Vec source;
};

std::vector<Instance> shipped() {
  std::vector<Instance> out;
  for (const char* name : {"interval_pair", "two_squares", "two_squares_mixed", "two_squares_fractional"}) {
    auto built = io::build_problem(io::load_config(jt::config_dir() + "/" + name + ".cfg"));
    out.push_back({name, std::move(built.problem), std::move(built.source)});
  }
  return out;
}

double rel_diff(const Vec& a, const Vec& b) {
  Vec d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return norm2(d) / std::max(norm2(b), 1e-300);
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

geometry::CellSet full_grid(const geometry::GridSpec& g, geometry::Role role) {
  std::vector<geometry::CellIndex> cells;
  for (std::int64_t i = 0; i < g.cells_along(0); ++i) {
    for (std::int64_t j = 0; j < g.cells_along(1); ++j) cells.push_back({i, j});
  }
  return {g, cells, role};
}

assembly::Layout local_only(const geometry::GridSpec& g) {
  return {full_grid(g, geometry::Role::local), geometry::CellSet(g, {}, geometry::Role::nonlocal)};
}

// 1 ---------------------------------------------------------------------------
void null_space(Outcome& o) {
  double worst_row = 0.0, worst_sum = 0.0;
  for (const auto& inst : shipped()) {
    const auto a = assembly::assemble(inst.problem);
    const auto& m = a.matrix();
    const double scale = m.max_abs();
    const Vec a1 = m.multiply(Vec(a.size(), 1.0));
    for (double x : a1) worst_row = std::max(worst_row, std::abs(x) / scale);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto u = jt::random_vector(a.size(), 1000 + s);
      const Vec au = m.multiply(u);
      double sum = 0.0, mag = 0.0;
      for (std::size_t i = 0; i < au.size(); ++i) {
        sum += a.weights()[i] * au[i];
        mag += a.weights()[i] * std::abs(au[i]);
      }
      worst_sum = std::max(worst_sum, std::abs(sum) / std::max(mag, 1e-300));
    }
  }
  o.require(worst_row <= 1e-12, "row sums");
  o.require(worst_sum <= 1e-12, "weighted column sums");
  o.detail << "max |A1|/max|A| " << g6(worst_row);
  o.detail << ", max |w.Au|/(w.|Au|) " << g6(worst_sum);
}

// 2 ---------------------------------------------------------------------------
void oracle(Outcome& o) {
  auto instances = shipped();
  instances.push_back({"eight_cell_mixed", jt::eight_cell(Model::mixed), {}});
  instances.back().source = jt::balanced_step(instances.back().problem.layout);
  double worst = 0.0;
  for (const auto& inst : instances) {
    const auto a = assembly::assemble(inst.problem);
    if (a.size() > solver::kDenseLimit) continue;
    const auto f = assembly::assemble_load(inst.problem.layout, inst.source);
    const double d = rel_diff(solver::solve(a, f).u, solver::dense_oracle(a, f));
    worst = std::max(worst, d);
    o.require(d <= 1e-8, inst.name);
  }
  o.detail << instances.size() << " instances, max relative difference " << g6(worst);
}

// 3 ---------------------------------------------------------------------------
void residuals(Outcome& o) {
  double worst = 0.0;
  for (const auto& inst : shipped()) {
    const auto& p = inst.problem;
    const auto a = assembly::assemble(p);
    const auto f = assembly::assemble_load(p.layout, inst.source);
    const auto r = solver::solve(a, f);
    const auto res = solver::residual_euler_lagrange(a, f, r.u, assembly::to_string(p.model),
                                                     p.gamma ? &*p.gamma : nullptr);
    worst = std::max(worst, res.max());
    o.require(res.max() <= 10 * kTol, inst.name);
    o.require(!assembly::uses_interface(p.model) || res.interface <= 10 * kTol, inst.name + " interface");
  }
  o.detail << "max region residual " << g6(worst) << " (limit " << g6(10 * kTol) << ")";
}

// 4 ---------------------------------------------------------------------------
void compatibility(Outcome& o) {
  const auto p = jt::eight_cell();
  const auto a = assembly::assemble(p);
  bool rejected = false;
  try {
    solver::solve(a, assembly::assemble_load(p.layout, Vec(a.size(), 1.0)));
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::IncompatibleSource;
  }
  o.require(rejected, "f = 1 accepted");
  const auto f = assembly::assemble_load(p.layout, jt::balanced_step(p.layout));
  o.require(solver::check_compatibility(f), "balanced step rejected");
  const auto r = solver::solve(a, f);
  o.require(r.residual <= kTol, "balanced step did not solve");
  o.detail << "f = 1 rejected, balanced step solved in " << r.iterations << " iterations";
}

// 5 ---------------------------------------------------------------------------
void soundness(Outcome& o) {
  struct Run {
    Model model;
    double delta, m_j;
    analysis::PoincareReport report;
    bool failed = false;
  };
  std::vector<Run> runs;
  for (auto m : {Model::volumetric, Model::mixed}) {
    for (double d : {0.3, 0.5, 0.8}) {
      for (double mj : {0.5, 1.0, 2.0}) runs.push_back({m, d, mj, {}});
    }
  }
  const auto n = static_cast<std::ptrdiff_t>(runs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& r = runs[static_cast<std::size_t>(i)];
    try {
      const auto p = jt::make_problem(r.model, jt::two_squares(1.0 / 16), KernelSpec::indicator(r.m_j, r.delta),
                                      KernelSpec::indicator(1.0, r.delta));
      r.report = analysis::tracked_bound(p);
    } catch (const Error&) {
      r.failed = true;
    }
  }
  int sound = 0;
  double min_ratio = INFINITY;
  for (const auto& r : runs) {
    const bool ok = !r.failed && !r.report.degenerate && r.report.bound > 0 && r.report.bound <= r.report.computed;
    sound += ok;
    if (ok) min_ratio = std::min(min_ratio, r.report.computed / r.report.bound);
  }
  o.require(sound == static_cast<int>(runs.size()), "unsound instance");
  o.detail << sound << "/" << runs.size() << " sound, min computed/tracked " << g6(min_ratio);
}

// 6 ---------------------------------------------------------------------------
void convex_local(Outcome& o) {
  const auto sq = local_only(geometry::GridSpec::make(2, 1.0 / 64, {0, 0}, {1, 1}));
  const double sigma_sq = analysis::poincare_computed(assembly::assemble_local(sq));
  const double floor_sq = 0.95 * kPi2 / 2.0;
  o.require(sq.size() == 4096, "square size");
  o.require(sigma_sq >= floor_sq, "square");
  const double sigma_iv = analysis::poincare_computed(assembly::assemble_local(local_only(geometry::GridSpec::make(1, 1.0 / 64, {0, 0}, {1, 0}))));
  const double err = std::abs(sigma_iv - kPi2) / kPi2;
  o.require(err < 2e-3, "interval");
  o.detail << "square (n=4096) " << g6(sigma_sq);
  o.detail << " >= " << g6(floor_sq) << ", interval " << g6(sigma_iv);
  o.detail << " (rel. error " << g6(err) << ")";
}

// 7 ---------------------------------------------------------------------------
void pure_nonlocal(Outcome& o) {
  double worst = 0.0;
  for (int dim : {1, 2}) {
    const double h = dim == 1 ? 1.0 / 32 : 1.0 / 16;
    const auto g = geometry::GridSpec::make(dim, h, {0, 0}, {1, dim == 1 ? 0.0 : 1.0});
    const assembly::Layout layout(geometry::CellSet(g, {}, geometry::Role::local),
                                  full_grid(g, geometry::Role::nonlocal));
    const double c = analysis::poincare_computed(assembly::assemble_nonlocal(layout, KernelSpec::indicator(1.0, 1.0)));
    worst = std::max(worst, std::abs(c - 2.0));
  }
  o.require(worst <= 1e-9, "constant");
  o.detail << "max |lambda - 2| " << g6(worst) << " over 1D and 2D";
}

// 8 ---------------------------------------------------------------------------
void cube_coarseness(Outcome& o) {
  const auto cube = analysis::cube_closed_form(1, 1.0, 0.5, 1.0);
  o.require(cube.value == 262144.0, "closed form");
  for (double h : {0.25, 1.0 / 16}) {
    const auto p = jt::make_problem(Model::volumetric, jt::interval_pair(h), KernelSpec::indicator(1.0, 0.5),
                                    KernelSpec::indicator(1.0, 0.5));
    const auto r = analysis::tracked_bound(p);
    o.require(r.tree <= cube.value, "tree constant above closed form");
    o.require(r.computed > r.bound, "computed not above tracked");
    o.detail << "h=" << g6(h) << ": C(T)=" << g6(r.tree);
    o.detail << " computed " << g6(r.computed);
    o.detail << " > tracked " << g6(r.bound) << "; ";
  }
  o.detail << "closed form " << g6(cube.value);
}

// 9 ---------------------------------------------------------------------------
void stationarity(Outcome& o) {
  const auto p = jt::eight_cell();
  const auto a = assembly::assemble(p);
  const auto chain = particles::build_chain(a);
  const std::size_t walkers = 2000;
  const double horizon = 50.0;
  const auto occ = particles::simulate_stationary(chain, walkers, horizon, 20240611);
  const double tv = particles::total_variation(occ.fraction, particles::stationary_distribution(chain));
  const auto f = assembly::assemble_load(p.layout, jt::balanced_step(p.layout));
  const double balance = particles::source_balance_check(chain, f, solver::solve(a, f));
  o.require(tv < 0.02, "total variation");
  o.require(balance <= 10 * kTol, "source balance");
  o.detail << g6(static_cast<double>(walkers) * horizon) << " particle-time units, TV " << g6(tv);
  o.detail << ", balance " << g6(balance);
}

// 10 --------------------------------------------------------------------------
void uniqueness(Outcome& o) {
  double worst = 0.0;
  for (const auto& inst : shipped()) {
    const auto a = assembly::assemble(inst.problem);
    const auto f = assembly::assemble_load(inst.problem.layout, inst.source);
    solver::SolveOptions x, y;
    x.initial = jt::random_vector(a.size(), 11);
    y.initial = jt::random_vector(a.size(), 12);
    for (auto& v : *y.initial) v = 50.0 * v + 3.0;
    const auto u1 = jt::zero_mean(solver::solve(a, f, x).u, a.weights());
    const auto u2 = jt::zero_mean(solver::solve(a, f, y).u, a.weights());
    const double d = rel_diff(u1, u2);
    worst = std::max(worst, d);
    o.require(d <= 1e-8, inst.name);
  }
  o.detail << "max relative difference " << g6(worst);
}

// 11 --------------------------------------------------------------------------
void gradient(Outcome& o) {
  std::vector<Instance> instances;
  instances.push_back({"volumetric", jt::eight_cell(Model::volumetric), {}});
  instances.push_back({"mixed", jt::eight_cell(Model::mixed), {}});
  for (double s : {0.25, 0.75}) {
    for (auto m : {Model::fractional_volumetric, Model::fractional_mixed}) {
      instances.push_back({assembly::to_string(m) + " s=" + g6(s),
                           jt::make_problem(m, jt::two_squares(0.125), KernelSpec::fractional(1.0, 0.5, s),
                                            KernelSpec::indicator(1.0, 0.5)),
                           {}});
    }
  }
  double worst_central = 0.0, worst_order = 0.0;
  for (auto& inst : instances) {
    const auto& p = inst.problem;
    const auto a = assembly::assemble(p);
    const auto f = assembly::assemble_load(p.layout, jt::balanced_step(p.layout));
    const auto u = jt::random_vector(a.size(), 21);
    const auto v = jt::random_vector(a.size(), 22);
    const Vec au = a.matrix().multiply(u);
    const Vec av = a.matrix().multiply(v);
    double exact = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) exact += (au[i] - f.weights[i] * f.values[i]) * v[i];
    const double curvature = dot(v, av);
    const double e0 = assembly::energy(a, f, u).total();
    std::vector<double> forward_err;
    for (double t : {1e-3, 1e-4, 1e-5}) {
      Vec up = u, um = u;
      for (std::size_t i = 0; i < u.size(); ++i) {
        up[i] += t * v[i];
        um[i] -= t * v[i];
      }
      const double ep = assembly::energy(a, f, up).total();
      const double em = assembly::energy(a, f, um).total();
      const double central = std::abs((ep - em) / (2 * t) - exact) / std::abs(exact);
      worst_central = std::max(worst_central, central);
      o.require(central <= 1e-6, inst.name + " central difference");
      // Forward difference error: t/2 v^T A v.
      const double forward = (ep - e0) / t - exact;
      const double predicted = 0.5 * t * curvature;
      const double order = std::abs(forward - predicted) / std::abs(predicted);
      worst_order = std::max(worst_order, order);
      o.require(order <= 1e-3, inst.name + " second-order term");
      forward_err.push_back(std::abs(forward));
      o.require(central * std::abs(exact) <= std::abs(forward), inst.name + " central not better than forward");
    }
    o.require(forward_err[0] > 5 * forward_err[1] && forward_err[1] > 5 * forward_err[2],
              inst.name + " step convergence");
  }
  o.detail << instances.size() << " instances (incl. fractional s=0.25,0.75), max central error " << g6(worst_central);
  o.detail << ", max second-order term mismatch " << g6(worst_order);
}

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds, 0 = none
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "null space and conservation", 5, null_space},
      {2, "CG matches dense oracle", 30, oracle},
      {3, "Euler-Lagrange residuals", 0, residuals},
      {4, "compatibility gate", 0, compatibility},
      {5, "Poincare soundness sweep", 120, soundness},
      {6, "convex local bound", 0, convex_local},
      {7, "pure-nonlocal constant", 0, pure_nonlocal},
      {8, "closed-form tree coarseness", 0, cube_coarseness},
      {9, "simulator stationarity", 60, stationarity},
      {10, "uniqueness modulo constants", 0, uniqueness},
      {11, "gradient check", 0, gradient},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs > c.time_limit) o.require(false, "time limit");
    failed += !o.pass;
    std::printf("%s %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
