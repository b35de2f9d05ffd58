#include "janus/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "janus/error.hpp"
#include "janus/solver.hpp"

namespace janus::analysis {

using geometry::CellIndex;
using geometry::CellSet;
using geometry::DeltaTree;
using geometry::LatticeBox;

namespace {

double degenerate_threshold(double scale) { return std::max(1e-12, 1e-10 * scale); }

[[noreturn]] void degenerate(double value) {
  throw Error(ErrorCode::DegenerateNullSpace,
              "second eigenvalue " + std::to_string(value) +
                  " is numerically zero; the operator has more than one null vector");
}

double dense_min(const CsrMatrix& a, const Vec& inv_sqrt_w, const Vec& q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (auto k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      const auto c = a.col_idx()[k];
      b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          a.values()[k] * inv_sqrt_w[r] * inv_sqrt_w[c];
    }
  }
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(q.data(), n);
  v(0) += (q[0] >= 0 ? 1.0 : -1.0) * v.norm();
  const double vv = v.squaredNorm();
  b -= (2.0 / vv) * v * (v.transpose() * b);
  b -= (2.0 / vv) * (b * v) * v.transpose();
  const Eigen::MatrixXd sub = b.bottomRightCorner(n - 1, n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double iterative_min(const CsrMatrix& a, const Vec& inv_sqrt_w, const Vec& q, double tol,
                     double threshold, double scale) {
  const std::size_t n = q.size();
  Vec tmp(n);
  const solver::Apply apply = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] * inv_sqrt_w[i];
    a.multiply(tmp, y);
    for (std::size_t i = 0; i < n; ++i) y[i] *= inv_sqrt_w[i];
  };
  Vec x(n), y(n), bx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    x[i] = std::sin(0.7 * t + 0.3) + 0.5 * std::cos(1.9 * t);
  }
  solver::project(q, x);
  double nx = norm2(x);
  for (auto& e : x) e /= nx;

  double lambda = std::numeric_limits<double>::infinity();
  const std::size_t cg_cap = 20 * n + 100;
  // Residual target at the roundoff floor eps ||B||.
  const double cg_tol = std::max(1e-13, 1e3 * std::numeric_limits<double>::epsilon() * scale);
  for (int it = 0; it < 2000; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    const auto rep = solver::projected_cg(apply, q, x, y, cg_tol, cg_cap);
    if (!rep.converged) {
      // Singular block: the iterate grows along the null vector.
      const double ny = norm2(y);
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
      apply(x, bx);
      if (dot(x, bx) <= threshold) degenerate(dot(x, bx));
      throw Error(ErrorCode::NoConvergence, "inner CG of inverse iteration stalled at residual " +
                                                std::to_string(rep.residual));
    }
    const double ny = norm2(y);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    apply(x, bx);
    const double next = dot(x, bx);
    if (next <= threshold) degenerate(next);
    const bool done = std::abs(next - lambda) <= tol * 1e-3 * next;
    lambda = next;
    if (done) break;
  }
  return lambda;
}

}  // namespace

double constrained_min_eigenvalue(const CsrMatrix& a, std::span<const double> weights,
                                  std::span<const double> constraint, const EigenOptions& opt) {
  const std::size_t n = a.rows();
  if (weights.size() != n || constraint.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "eigenproblem vector sizes");
  }
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "eigenproblem needs at least two unknowns");
  Vec inv_sqrt_w(n), q(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
    inv_sqrt_w[i] = 1.0 / std::sqrt(weights[i]);
    q[i] = constraint[i] * inv_sqrt_w[i];
    scale = std::max(scale, a.at(i, i) / weights[i]);
  }
  if (norm2(q) == 0.0) throw Error(ErrorCode::EmptySubset, "constraint vector is zero");
  const double threshold = degenerate_threshold(scale);
  const double lambda = n <= opt.dense_limit ? dense_min(a, inv_sqrt_w, q)
                                             : iterative_min(a, inv_sqrt_w, q, opt.tol, threshold, scale);
  if (lambda <= threshold) degenerate(lambda);
  return lambda;
}

double poincare_computed(const assembly::DiscreteOperator& a, const EigenOptions& opt) {
  return constrained_min_eigenvalue(a.matrix(), a.weights(), a.weights(), opt);
}

namespace {

CellSet empty_nonlocal(const CellSet& local) {
  return CellSet(local.grid(), {}, geometry::Role::nonlocal);
}

double convex_estimate(const CellSet& local) {
  const double d = geometry::closed_diameter(local);
  return std::numbers::pi * std::numbers::pi / (d * d);
}

}  // namespace

Sigma sigma_local(const CellSet& local, const CellSet& subset, const EigenOptions& opt) {
  if (subset.empty()) throw Error(ErrorCode::EmptySubset, "sigma_local subset is empty");
  const assembly::Layout layout(local, empty_nonlocal(local));
  const auto op = assembly::assemble_local(layout);
  Vec c(local.size(), 0.0);
  for (const auto& cell : subset.cells()) {
    const auto pos = local.position(cell);
    if (!pos) throw Error(ErrorCode::InvalidArgument, "subset cell is not a local cell");
    c[*pos] = local.cell_volume();
  }
  Sigma s;
  s.computed = constrained_min_eigenvalue(op.matrix(), op.weights(), c, opt);
  const double ratio = local.volume() / subset.volume();
  s.bound = convex_estimate(local) / (2.0 * (1.0 + ratio * ratio));
  return s;
}

Sigma sigma_local(const CellSet& local, const geometry::Interface& subset, const EigenOptions& opt) {
  if (subset.size() == 0) throw Error(ErrorCode::EmptySubset, "sigma_local interface is empty");
  const assembly::Layout layout(local, empty_nonlocal(local));
  const auto op = assembly::assemble_local(layout);
  Vec c(local.size(), 0.0);
  for (std::size_t f = 0; f < subset.size(); ++f) {
    const auto pos = local.position(subset.local()[subset.owner(f)]);
    if (!pos) throw Error(ErrorCode::InvalidArgument, "interface owner is not a local cell");
    c[*pos] += subset.face_measure();
  }
  Sigma s;
  s.computed = constrained_min_eigenvalue(op.matrix(), op.weights(), c, opt);
  return s;
}

BranchCoefficients branch_constant(const DeltaTree& tree, std::span<const std::size_t> branch,
                                   double m_j) {
  if (branch.empty()) throw Error(ErrorCode::EmptyBranch, "branch has no parts");
  if (!(m_j > 0.0)) throw Error(ErrorCode::InvalidArgument, "m_J must be positive");
  std::vector<double> vol;
  for (auto p : branch) {
    if (p >= tree.parts.size()) throw Error(ErrorCode::InvalidArgument, "branch part out of range");
    vol.push_back(tree.part_volume[p]);
  }
  const std::size_t len = branch.size() - 1;
  BranchCoefficients out;
  out.root = 0.0;
  for (std::size_t k = 0; k <= len; ++k) out.root += std::ldexp(vol[k], static_cast<int>(k)) / vol[0];
  for (std::size_t i = 1; i <= len; ++i) {
    double s = 0.0;
    for (std::size_t k = i; k <= len; ++k) s += vol[k] / (vol[k - i] * vol[k - i + 1]);
    out.shift.push_back(std::ldexp(1.0, static_cast<int>(i)) / m_j * s);
  }
  for (std::size_t j = 0; j < len; ++j) {
    double s = 0.0;
    for (std::size_t k = j + 1; k <= len; ++k) {
      s += std::ldexp(vol[k], static_cast<int>(k - j)) / (vol[j] * vol[j + 1]);
    }
    out.edge.push_back(s);
  }
  return out;
}

TreeConstant tree_constant_detail(const DeltaTree& tree, double m_j) {
  if (!(m_j > 0.0)) throw Error(ErrorCode::InvalidArgument, "m_J must be positive");
  const auto& vol = tree.part_volume;
  // mult[P]: total multiplier with which the bound for int_P u^2 enters the sum.
  std::vector<double> mult(tree.parts.size(), 1.0);
  for (auto b = tree.branches.rbegin(); b != tree.branches.rend(); ++b) {
    const auto& br = *b;
    for (std::size_t k = 1; k < br.size(); ++k) {
      mult[br[0]] += std::ldexp(vol[br[k]], static_cast<int>(k)) / vol[br[0]] * mult[br[k]];
    }
  }
  TreeConstant out;
  out.alpha = mult[tree.root];
  double beta_max = 0.0;
  for (const auto& br : tree.branches) {
    for (std::size_t j = 0; j + 1 < br.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = j + 1; k < br.size(); ++k) {
        s += mult[br[k]] * std::ldexp(vol[br[k]], static_cast<int>(k - j)) /
             (vol[br[j]] * vol[br[j + 1]]);
      }
      beta_max = std::max(beta_max, s);
    }
  }
  out.gamma = beta_max / (2.0 * m_j);
  out.value = std::max(out.alpha, out.gamma);
  return out;
}

double tree_constant(const DeltaTree& tree, double m_j) { return tree_constant_detail(tree, m_j).value; }

CubeBound cube_closed_form(int dimension, double volume, double delta, double m_j) {
  const double dn = std::pow(delta, dimension);
  const double cn = dimension == 1 ? 2.0 : std::numbers::pi;
  CubeBound out;
  out.root = std::exp2(std::pow(8.0, dimension) * volume / dn + 1.0);
  out.factor = std::exp2(dimension) / (cn * dn * m_j);
  out.value = out.root * std::max(1.0, out.factor);
  return out;
}

double small_delta_annotation(int dimension, double delta, double m_j, double m_g) {
  const double dn = std::pow(delta, dimension);
  return dn * std::exp(1.0 / dn) * std::min(m_j, m_g);
}

namespace {

std::vector<LatticeBox> a_boxes(const assembly::Problem& p, std::span<const std::size_t> a) {
  const int dim = p.layout.dimension();
  std::vector<LatticeBox> out;
  if (assembly::uses_interface(p.model)) {
    for (auto f : a) out.push_back(geometry::face_box(p.gamma->faces()[f], dim));
  } else {
    for (auto i : a) out.push_back(geometry::cell_box(p.layout.local()[i], dim));
  }
  return out;
}

std::vector<LatticeBox> part_boxes(const assembly::Problem& p, const DeltaTree& tree, std::size_t part) {
  std::vector<LatticeBox> out;
  for (auto c : tree.parts.at(part)) {
    out.push_back(geometry::cell_box(p.layout.nonlocal()[c], p.layout.dimension()));
  }
  return out;
}

std::size_t candidate_count(const assembly::Problem& p) {
  if (assembly::uses_interface(p.model)) {
    if (!p.gamma) throw Error(ErrorCode::InvalidArgument, "mixed model requires an interface");
    return p.gamma->size();
  }
  return p.layout.n_local();
}

double union_diameter(std::span<const LatticeBox> boxes, int dim, double h) {
  double d = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i; j < boxes.size(); ++j) {
      d = std::max(d, geometry::box_pair_diameter(boxes[i], boxes[j], dim, h));
    }
  }
  return d;
}

}  // namespace

double coupling_diameter(const assembly::Problem& p, const DeltaTree& tree, const CouplingSets& sets) {
  auto boxes = a_boxes(p, sets.a);
  auto b = part_boxes(p, tree, sets.root_part);
  boxes.insert(boxes.end(), b.begin(), b.end());
  return union_diameter(boxes, p.layout.dimension(), p.layout.grid().h());
}

CellIndex coupling_anchor(const assembly::Problem& p) {
  const int dim = p.layout.dimension();
  const double h = p.layout.grid().h();
  const auto& nl = p.layout.nonlocal();
  if (nl.empty()) throw Error(ErrorCode::EmptyRegion, "nonlocal set is empty");
  const std::size_t count = candidate_count(p);
  std::vector<std::size_t> all(count);
  for (std::size_t i = 0; i < count; ++i) all[i] = i;
  const auto targets = a_boxes(p, all);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_pos = 0;
  for (std::size_t j = 0; j < nl.size(); ++j) {
    const auto bj = geometry::cell_box(nl[j], dim);
    for (const auto& t : targets) {
      const double d = geometry::box_distance(t, bj, dim, h);
      if (d < best) {
        best = d;
        best_pos = j;
      }
    }
  }
  return nl[best_pos];
}

CouplingSets select_coupling_sets(const assembly::Problem& p, const DeltaTree& tree) {
  const int dim = p.layout.dimension();
  const double h = p.layout.grid().h();
  const double limit = 2.0 * p.g.base.delta;
  CouplingSets sets;
  sets.root_part = tree.root;
  std::vector<LatticeBox> chosen = part_boxes(p, tree, tree.root);
  double diam = union_diameter(chosen, dim, h);
  const std::size_t count = candidate_count(p);
  std::vector<std::size_t> all(count);
  for (std::size_t i = 0; i < count; ++i) all[i] = i;
  const auto cands = a_boxes(p, all);

  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < count; ++i) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      d = std::min(d, geometry::box_distance(cands[i], chosen[k], dim, h));
    }
    order.emplace_back(d, i);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [dist, i] : order) {
    if (dist >= limit) break;
    double next = diam;
    for (const auto& b : chosen) next = std::max(next, geometry::box_pair_diameter(cands[i], b, dim, h));
    if (next < limit) {
      diam = next;
      chosen.push_back(cands[i]);
      sets.a.push_back(i);
    }
  }
  if (sets.a.empty()) {
    throw Error(ErrorCode::HorizonViolation,
                "no coupling set A with diam(A u B) < 2 delta_G = " + std::to_string(limit));
  }
  std::sort(sets.a.begin(), sets.a.end());
  return sets;
}

PoincareReport tracked_bound(const assembly::Problem& p, std::size_t sample_count,
                             const EigenOptions& opt) {
  if (assembly::uses_interface(p.model) && !p.gamma) {
    throw Error(ErrorCode::InvalidArgument, "mixed model requires an interface");
  }
  const DeltaTree tree = geometry::build_delta_tree(p.layout.nonlocal(), p.j.delta, coupling_anchor(p));
  return tracked_bound(p, tree, select_coupling_sets(p, tree), sample_count, opt);
}

PoincareReport tracked_bound(const assembly::Problem& p, const DeltaTree& tree,
                             const CouplingSets& sets, std::size_t sample_count,
                             const EigenOptions& opt) {
  const bool mixed = assembly::uses_interface(p.model);
  if (mixed && !p.gamma) throw Error(ErrorCode::InvalidArgument, "mixed model requires an interface");
  if (sets.a.empty()) throw Error(ErrorCode::EmptySubset, "coupling set A is empty");
  if (sets.root_part != tree.root) {
    throw Error(ErrorCode::InvalidArgument, "tree must be rooted at the coupling part B");
  }
  const int dim = p.layout.dimension();
  PoincareReport r;
  r.model = assembly::to_string(p.model);
  r.coupling_diameter = coupling_diameter(p, tree, sets);
  if (!(r.coupling_diameter < 2.0 * p.g.base.delta)) {
    throw Error(ErrorCode::HorizonViolation,
                "diam(A u B) = " + std::to_string(r.coupling_diameter) + " is not below 2 delta_G = " +
                    std::to_string(2.0 * p.g.base.delta));
  }

  r.m_j = kernels::verify_visibility(p.j, p.j.delta, dim, sample_count).minimum;
  r.m_g = kernels::verify_visibility(p.g, p.g.base.delta, dim, sample_count).minimum;
  r.a_count = sets.a.size();

  const auto& local = p.layout.local();
  if (mixed) {
    r.a_measure = p.gamma->face_measure() * static_cast<double>(sets.a.size());
    const auto sigma = sigma_local(local, p.gamma->subset(sets.a), opt);
    r.sigma = sigma.computed;
    r.sigma_estimate = sigma.bound;
  } else {
    const CellSet a = local.subset(sets.a);
    r.a_measure = a.volume();
    const auto sigma = sigma_local(local, a, opt);
    r.sigma = sigma.computed;
    r.sigma_estimate = sigma.bound;
  }
  r.coupling = r.m_g * r.a_measure / 2.0;

  r.parts = tree.parts.size();
  r.branches = tree.branches.size();
  r.degree = tree.degree;
  r.max_branch_length = tree.max_branch_length;
  for (const auto& b : tree.branches) r.branch_lengths.push_back(b.size() - 1);
  if (r.m_j > 0.0) {
    const auto tc = tree_constant_detail(tree, r.m_j);
    r.tree = tc.value;
    r.tree_alpha = tc.alpha;
    r.tree_gamma = tc.gamma;
    r.cube_bound = cube_closed_form(dim, p.layout.nonlocal().volume(), p.j.delta, r.m_j).value;
    const double local_part = mixed ? r.sigma / 2.0 : r.sigma;
    r.bound = std::min({local_part, r.coupling / r.tree, 1.0 / (2.0 * r.tree)});
  }
  r.annotation = small_delta_annotation(dim, std::min(p.j.delta, p.g.base.delta), r.m_j, r.m_g);

  try {
    r.computed = poincare_computed(assembly::assemble(p), opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateNullSpace) throw;
    r.degenerate = true;
    r.computed = 0.0;
  }
  return r;
}

}  // namespace janus::analysis
