#include "janus/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "janus/analysis.hpp"
#include "janus/io.hpp"
#include "janus/particles.hpp"
#include "janus/solver.hpp"

namespace janus::cli {

namespace fs = std::filesystem;
using io::fmt;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::DegenerateNullSpace:
    case ErrorCode::TooLarge:
    case ErrorCode::NegativeRate:
      return 2;
    default:
      return 1;
  }
}

namespace {

std::ofstream open_out(const RunOptions& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  const auto path = fs::path(o.out_dir) / name;
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  return f;
}

std::string location_header(int dim) { return dim == 1 ? "index,i,x,role" : "index,i,j,x,y,role"; }

void write_location(std::ostream& o, const assembly::Layout& layout, std::size_t k) {
  const int dim = layout.dimension();
  const auto c = layout.cell(k);
  const auto x = layout.center(k);
  o << k << ',' << c[0] << ',';
  if (dim == 2) o << c[1] << ',';
  o << fmt(x[0]) << ',';
  if (dim == 2) o << fmt(x[1]) << ',';
  o << (layout.is_local(k) ? "local" : "nonlocal");
}

assembly::LoadVector load_for(const io::BuiltProblem& b) {
  return assembly::assemble_load(b.problem.layout, b.source);
}

std::string residual_model(assembly::Model m) {
  return assembly::uses_fractional(m) ? (assembly::uses_interface(m) ? "mixed" : "fractional")
                                      : assembly::to_string(m);
}

solver::SolveOptions solve_options(const io::ProblemConfig& c) {
  solver::SolveOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.jacobi = c.jacobi;
  return o;
}

void cmd_solve(const io::ProblemConfig& c, const RunOptions& opt, std::ostream& out) {
  const auto built = io::build_problem(c);
  const auto& p = built.problem;
  const auto op = assembly::assemble(p);
  const auto f = load_for(built);
  if (opt.dump_matrix) {
    auto mtx = open_out(opt, "matrix.mtx");
    io::write_matrix_market(mtx, op.matrix());
  }
  const auto res = solver::solve(op, f, solve_options(c));
  const auto e = assembly::energy(op, f, res.u);
  const auto r = solver::residual_euler_lagrange(op, f, res.u, residual_model(p.model),
                                                 p.gamma ? &*p.gamma : nullptr);
  {
    auto csv = open_out(opt, "solution.csv");
    csv << location_header(p.layout.dimension()) << ",u\n";
    for (std::size_t k = 0; k < res.u.size(); ++k) {
      write_location(csv, p.layout, k);
      csv << ',' << fmt(res.u[k]) << '\n';
    }
  }
  {
    auto csv = open_out(opt, "energy.csv");
    csv << "term,value\n"
        << "local," << fmt(e.local) << "\n"
        << "nonlocal," << fmt(e.nonlocal) << "\n"
        << "coupling," << fmt(e.coupling) << "\n"
        << "source," << fmt(e.source) << "\n"
        << "total," << fmt(e.total()) << "\n";
  }
  out << "model " << assembly::to_string(p.model) << ", n = " << op.size() << " (" << p.layout.n_local()
      << " local, " << p.layout.n_nonlocal() << " nonlocal)\n"
      << "cg iterations " << res.iterations << ", relative residual " << fmt(res.residual) << "\n"
      << "energy: local " << fmt(e.local) << ", nonlocal " << fmt(e.nonlocal) << ", coupling "
      << fmt(e.coupling) << ", source " << fmt(e.source) << ", total " << fmt(e.total()) << "\n"
      << "residuals: local interior " << fmt(r.local_interior) << ", local boundary "
      << fmt(r.local_boundary) << ", interface " << fmt(r.interface) << ", nonlocal "
      << fmt(r.nonlocal) << "\n";
}

struct Instance {
  assembly::Model model;
  double delta;
  double amplitude;
};

int cmd_poincare(const io::ProblemConfig& c, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<Instance> runs;
  const auto models = c.sweep_models.empty() ? std::vector<assembly::Model>{c.model} : c.sweep_models;
  const auto deltas = c.sweep_deltas.empty() ? std::vector<double>{std::nan("")} : c.sweep_deltas;
  const auto amps = c.sweep_amplitudes.empty() ? std::vector<double>{c.j.amplitude} : c.sweep_amplitudes;
  for (auto m : models) {
    for (double d : deltas) {
      for (double a : amps) runs.push_back({m, d, a});
    }
  }
  std::vector<analysis::PoincareReport> reports(runs.size());
  std::vector<io::ProblemConfig> configs(runs.size(), c);
  std::vector<std::optional<Error>> failures(runs.size());
  const auto n = static_cast<std::ptrdiff_t>(runs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto& cfg = configs[i];
    cfg.model = runs[i].model;
    if (!std::isnan(runs[i].delta)) cfg.j.delta = cfg.g.delta = runs[i].delta;
    cfg.j.amplitude = runs[i].amplitude;
    try {
      const auto built = io::build_problem(cfg);
      reports[i] = analysis::tracked_bound(built.problem, cfg.sample_count);
    } catch (const Error& e) {
      failures[i] = e;
    }
  }
  for (const auto& f : failures) {
    if (f) throw *f;
  }

  auto csv = open_out(opt, "poincare.csv");
  csv << "model,delta_J,delta_G,C_J,h,n,computed,tracked,sound,sigma,sigma_estimate,coupling,"
         "tree_constant,tree_alpha,tree_gamma,m_J,m_G,A_measure,A_count,coupling_diameter,parts,"
         "branches,degree,max_branch_length,cube_bound,annotation,degenerate\n";
  bool all_sound = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = reports[i];
    const auto& cfg = configs[i];
    const bool sound = r.bound <= r.computed;
    all_sound = all_sound && sound;
    const auto built_n = [&] {
      const auto g = geometry::GridSpec::make(cfg.dimension, cfg.h, cfg.lo, cfg.hi);
      const auto d = geometry::build_domain(g, cfg.local, cfg.nonlocal);
      return d.local.size() + d.nonlocal.size();
    }();
    csv << r.model << ',' << fmt(cfg.j.delta) << ',' << fmt(cfg.g.delta) << ',' << fmt(cfg.j.amplitude)
        << ',' << fmt(cfg.h) << ',' << built_n << ',' << fmt(r.computed) << ',' << fmt(r.bound) << ','
        << (sound ? 1 : 0) << ',' << fmt(r.sigma) << ',' << fmt(r.sigma_estimate) << ','
        << fmt(r.coupling) << ',' << fmt(r.tree) << ',' << fmt(r.tree_alpha) << ','
        << fmt(r.tree_gamma) << ',' << fmt(r.m_j) << ',' << fmt(r.m_g) << ',' << fmt(r.a_measure)
        << ',' << r.a_count << ',' << fmt(r.coupling_diameter) << ',' << r.parts << ','
        << r.branches << ',' << r.degree << ',' << r.max_branch_length << ',' << fmt(r.cube_bound)
        << ',' << fmt(r.annotation) << ',' << (r.degenerate ? 1 : 0) << '\n';
    out << r.model << " delta=" << fmt(cfg.j.delta) << " C_J=" << fmt(cfg.j.amplitude)
        << ": computed " << fmt(r.computed) << " >= tracked " << fmt(r.bound)
        << (sound ? "" : "  [VIOLATED]") << "\n";
  }
  if (!all_sound) {
    err << "janus poincare: tracked bound exceeds the computed constant\n";
    return 2;
  }
  return 0;
}

void cmd_check_domain(const io::ProblemConfig& c, const RunOptions& opt, std::ostream& out) {
  const auto grid = geometry::GridSpec::make(c.dimension, c.h, c.lo, c.hi);
  const auto d = geometry::build_domain(grid, c.local, c.nonlocal);
  const bool mixed = assembly::uses_interface(c.model);
  std::optional<geometry::Interface> gamma;
  if (mixed) gamma = geometry::extract_interface(d.local, c.gamma);

  struct Row {
    std::string check;
    bool ok;
    std::string detail;
  };
  std::vector<Row> rows;
  const auto vj = kernels::verify_visibility(c.j, c.j.delta, c.dimension, c.sample_count);
  rows.push_back({"(J1)", vj.visible, "m_J = " + fmt(vj.minimum) + " on |z| <= 2 delta_J"});
  const auto vg = kernels::verify_visibility(kernels::CouplingSpec{c.g, {}}, c.g.delta, c.dimension,
                                             c.sample_count);
  rows.push_back({mixed ? "(G2)" : "(G1)", vg.visible, "m_G = " + fmt(vg.minimum) + " on |z| <= 2 delta_G"});
  if (mixed) {
    const double dist = geometry::set_distance(*gamma, d.nonlocal);
    rows.push_back({"(P2)", dist < c.g.delta,
                    "dist(Gamma, nonlocal) = " + fmt(dist) + ", delta_G = " + fmt(c.g.delta)});
  } else {
    const double dist = geometry::set_distance(d.local, d.nonlocal);
    rows.push_back({"(P1)", dist < c.g.delta,
                    "dist(local, nonlocal) = " + fmt(dist) + ", delta_G = " + fmt(c.g.delta)});
  }
  const auto conn = geometry::check_delta_connected(d.nonlocal, c.j.delta);
  rows.push_back({"delta-connected", conn.connected,
                  std::to_string(conn.components.size()) + " component(s) at delta_J = " + fmt(c.j.delta)});

  {
    auto f = open_out(opt, "local_cells.csv");
    geometry::write_cells_csv(f, d.local);
  }
  {
    auto f = open_out(opt, "nonlocal_cells.csv");
    geometry::write_cells_csv(f, d.nonlocal);
  }
  if (gamma) {
    auto f = open_out(opt, "interface.csv");
    f << (c.dimension == 1 ? "face,x,axis,side\n" : "face,x,y,axis,side\n");
    for (std::size_t k = 0; k < gamma->size(); ++k) {
      const auto z = gamma->face_center(k);
      f << k << ',' << fmt(z[0]) << ',';
      if (c.dimension == 2) f << fmt(z[1]) << ',';
      f << gamma->faces()[k].axis << ',' << gamma->faces()[k].side << '\n';
    }
  }
  std::string failed;
  {
    auto f = open_out(opt, "check.csv");
    f << "check,status,detail\n";
    for (const auto& r : rows) {
      f << r.check << ',' << (r.ok ? "pass" : "fail") << ",\"" << r.detail << "\"\n";
      out << r.check << ": " << (r.ok ? "pass" : "FAIL") << " (" << r.detail << ")\n";
      if (!r.ok) failed += (failed.empty() ? "" : "; ") + r.check + " violated: " + r.detail;
    }
  }
  out << "local cells " << d.local.size() << ", nonlocal cells " << d.nonlocal.size();
  if (gamma) out << ", interface faces " << gamma->size();
  out << "\n";
  if (!failed.empty()) throw Error(ErrorCode::ValidationError, failed);
}

void cmd_simulate(const io::ProblemConfig& c, const RunOptions& opt, std::ostream& out) {
  const auto built = io::build_problem(c);
  const auto& p = built.problem;
  const auto op = assembly::assemble(p);
  const auto f = load_for(built);
  const auto chain = particles::build_chain(op, assembly::to_string(p.model));
  const std::uint64_t seed = opt.seed ? *opt.seed : c.seed;
  const auto occ = particles::simulate_stationary(chain, c.particles, c.horizon, seed);
  const auto expected = particles::stationary_distribution(chain);
  const double tv = particles::total_variation(occ.fraction, expected);

  auto csv = open_out(opt, "occupancy.csv");
  csv << "index,occupancy,expected,deviation\n";
  for (std::size_t k = 0; k < occ.fraction.size(); ++k) {
    csv << k << ',' << fmt(occ.fraction[k]) << ',' << fmt(expected[k]) << ','
        << fmt(occ.fraction[k] - expected[k]) << '\n';
  }
  out << "particles " << occ.particles << ", horizon " << fmt(occ.horizon) << ", seed " << seed
      << ", jumps " << occ.jumps << "\n"
      << "total variation to the volume-weighted uniform law " << fmt(tv) << "\n";
  if (solver::check_compatibility(f, c.tol)) {
    const auto res = solver::solve(op, f, solve_options(c));
    out << "source balance discrepancy " << fmt(particles::source_balance_check(chain, f, res)) << "\n";
  } else {
    out << "source is not balanced; skipping the source balance check\n";
  }
}

}  // namespace

int run_config(const std::string& subcommand, const io::ProblemConfig& config,
               const RunOptions& options, std::ostream& out, std::ostream& err) {
  if (subcommand == "poincare") return cmd_poincare(config, options, out, err);
  if (subcommand == "solve") {
    cmd_solve(config, options, out);
  } else if (subcommand == "check-domain") {
    cmd_check_domain(config, options, out);
  } else if (subcommand == "simulate") {
    cmd_simulate(config, options, out);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown subcommand '" + subcommand + "'");
  }
  return 0;
}

int run(const std::string& subcommand, const RunOptions& options, std::ostream& out,
        std::ostream& err) {
  try {
    const auto config = io::load_config(options.config_path);
    return run_config(subcommand, config, options, out, err);
  } catch (const Error& e) {
    err << "janus " << subcommand << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "janus " << subcommand << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace janus::cli
