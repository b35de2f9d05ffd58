#include "janus/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "janus/error.hpp"

namespace janus::assembly {

using geometry::CellIndex;
using geometry::CellSet;
using geometry::Point;

std::string to_string(Model m) {
  switch (m) {
    case Model::volumetric: return "volumetric";
    case Model::mixed: return "mixed";
    case Model::fractional_volumetric: return "fractional-volumetric";
    case Model::fractional_mixed: return "fractional-mixed";
  }
  return "?";
}

Model model_from_string(const std::string& name) {
  if (name == "volumetric") return Model::volumetric;
  if (name == "mixed") return Model::mixed;
  if (name == "fractional-volumetric") return Model::fractional_volumetric;
  if (name == "fractional-mixed") return Model::fractional_mixed;
  throw Error(ErrorCode::UnknownModel, "unknown model '" + name + "'");
}

bool uses_interface(Model m) { return m == Model::mixed || m == Model::fractional_mixed; }
bool uses_fractional(Model m) {
  return m == Model::fractional_volumetric || m == Model::fractional_mixed;
}

Layout::Layout(CellSet local, CellSet nonlocal)
    : local_(std::move(local)), nonlocal_(std::move(nonlocal)) {
  if (!(local_.grid() == nonlocal_.grid())) {
    throw Error(ErrorCode::InvalidArgument, "local and nonlocal sets must share a grid");
  }
  for (const auto& c : local_.cells()) {
    if (nonlocal_.contains(c)) throw Error(ErrorCode::OverlapError, "cell in both sets");
  }
}

Point Layout::center(std::size_t global) const {
  return is_local(global) ? local_.center(global) : nonlocal_.center(global - n_local());
}

CellIndex Layout::cell(std::size_t global) const {
  return is_local(global) ? local_[global] : nonlocal_[global - n_local()];
}

Vec Layout::weights() const { return Vec(size(), grid().cell_volume()); }

DiscreteOperator::DiscreteOperator(Layout layout)
    : layout_(std::move(layout)),
      weights_(layout_.weights()),
      local_(layout_.size()),
      nonlocal_(layout_.size()),
      coupling_(layout_.size()),
      total_(layout_.size()) {}

DiscreteOperator::DiscreteOperator(Layout layout, Term term, CsrMatrix block)
    : DiscreteOperator(std::move(layout)) {
  if (block.rows() != size()) throw Error(ErrorCode::DimensionMismatch, "block size");
  total_ = block;
  switch (term) {
    case Term::local: local_ = std::move(block); break;
    case Term::nonlocal: nonlocal_ = std::move(block); break;
    case Term::coupling: coupling_ = std::move(block); break;
  }
}

const CsrMatrix& DiscreteOperator::term(Term t) const {
  switch (t) {
    case Term::local: return local_;
    case Term::nonlocal: return nonlocal_;
    case Term::coupling: return coupling_;
  }
  return total_;
}

DiscreteOperator DiscreteOperator::operator+(const DiscreteOperator& other) const {
  if (other.size() != size()) throw Error(ErrorCode::DimensionMismatch, "operator sizes differ");
  DiscreteOperator out(layout_);
  out.local_ = local_ + other.local_;
  out.nonlocal_ = nonlocal_ + other.nonlocal_;
  out.coupling_ = coupling_ + other.coupling_;
  out.total_ = total_ + other.total_;
  return out;
}

Vec LoadVector::weighted() const {
  Vec b(values.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = weights[i] * values[i];
  return b;
}

namespace {

double pow_int(double h, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= h;
  return r;
}

Point lattice_offset(const CellIndex& a, const CellIndex& b, int dim, double h) {
  Point z{};
  for (int k = 0; k < dim; ++k) {
    const auto x = static_cast<std::size_t>(k);
    z[x] = static_cast<double>(a[x] - b[x]) * h;
  }
  return z;
}

/// Visits target positions whose cells lie within `reach` cells of c per axis.
template <typename Fn>
void for_each_near(const CellSet& target, const CellIndex& c, std::int64_t reach, int dim, Fn&& fn) {
  const std::int64_t ry = dim > 1 ? reach : 0;
  for (std::int64_t dx = -reach; dx <= reach; ++dx) {
    for (std::int64_t dy = -ry; dy <= ry; ++dy) {
      if (auto j = target.position(CellIndex{c[0] + dx, c[1] + dy})) fn(*j);
    }
  }
}

std::int64_t reach_for(double radius, double h) {
  return static_cast<std::int64_t>(std::ceil(radius / h)) + 1;
}

using Row = std::vector<std::pair<std::size_t, double>>;

/// Emits rows (already sorted by column) as graph edges in row order.
CsrMatrix rows_to_matrix(std::size_t n, const std::vector<Row>& rows, std::size_t row_offset,
                         std::size_t col_offset) {
  CooBuilder coo(n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [j, w] : rows[i]) coo.add_edge(row_offset + i, col_offset + j, w);
  }
  return CsrMatrix::from_triplets(n, coo.triplets());
}

void sort_row(Row& r) {
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
}

double integrable_edge(const kernels::KernelSpec& j, const CellIndex& a, const CellIndex& b, int dim,
                       double h) {
  // Laplacian weight 2 J h^{2N}: the unordered pair carries J h^{2N} (u_a - u_b)^2
  // of energy, i.e. both orderings of the 1/2-weighted double integral.
  return 2.0 * kernels::eval_kernel(j, lattice_offset(a, b, dim, h), dim) * pow_int(h, 2 * dim);
}

}  // namespace

double fractional_pair_weight(const kernels::KernelSpec& j, const CellIndex& a, const CellIndex& b,
                              int dim, double h) {
  const CellIndex& lo = std::min(a, b);
  const CellIndex& hi = std::max(a, b);
  const Point z = lattice_offset(lo, hi, dim, h);
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) r2 += z[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
  const double vol2 = pow_int(h, 2 * dim);
  if (std::sqrt(r2) >= 2.0 * h) return kernels::eval_kernel(j, z, dim) * vol2;

  constexpr int kSub = 4;
  const int ny = dim > 1 ? kSub : 1;
  const double sub_vol2 = vol2 / pow_int(static_cast<double>(kSub), 2 * dim);
  double acc = 0.0;
  for (int px = 0; px < kSub; ++px) {
    for (int py = 0; py < ny; ++py) {
      for (int qx = 0; qx < kSub; ++qx) {
        for (int qy = 0; qy < ny; ++qy) {
          Point d = z;
          d[0] += static_cast<double>(px - qx) * h / kSub;
          if (dim > 1) d[1] += static_cast<double>(py - qy) * h / kSub;
          acc += kernels::eval_kernel(j, d, dim);
        }
      }
    }
  }
  return acc * sub_vol2;
}

DiscreteOperator assemble_local(const Layout& layout) {
  const CellSet& local = layout.local();
  const int dim = layout.dimension();
  const double h = layout.grid().h();
  // 1/2 sum_faces h^N ((u_i - u_j)/h)^2 = 1/2 h^{N-2} (u_i - u_j)^2.
  const double w = pow_int(h, dim) / (h * h);
  CooBuilder coo(layout.size());
  for (std::size_t i = 0; i < local.size(); ++i) {
    for (int axis = 0; axis < dim; ++axis) {
      CellIndex nb = local[i];
      nb[static_cast<std::size_t>(axis)] += 1;
      if (auto j = local.position(nb)) coo.add_edge(layout.local_index(i), layout.local_index(*j), w);
    }
  }
  return {layout, Term::local, CsrMatrix::from_triplets(layout.size(), coo.triplets())};
}

DiscreteOperator assemble_nonlocal(const Layout& layout, const kernels::KernelSpec& j) {
  j.validate();
  if (!j.integrable()) {
    throw Error(ErrorCode::InvalidArgument, "assemble_nonlocal needs an integrable kernel");
  }
  const CellSet& nl = layout.nonlocal();
  const int dim = layout.dimension();
  const double h = layout.grid().h();
  const auto reach = reach_for(j.support_radius(), h);
  std::vector<Row> rows(nl.size());
  const auto n = static_cast<std::ptrdiff_t>(nl.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Row& row = rows[i];
    for_each_near(nl, nl[i], reach, dim, [&](std::size_t k) {
      if (k <= i) return;
      const double w = integrable_edge(j, nl[i], nl[k], dim, h);
      if (w != 0.0) row.emplace_back(k, w);
    });
    sort_row(row);
  }
  const auto off = layout.nonlocal_index(0);
  return {layout, Term::nonlocal, rows_to_matrix(layout.size(), rows, off, off)};
}

DiscreteOperator assemble_fractional(const Layout& layout, const kernels::KernelSpec& j) {
  if (j.family != kernels::Family::fractional) {
    throw Error(ErrorCode::InvalidArgument, "assemble_fractional needs the fractional family");
  }
  j.validate();
  const CellSet& nl = layout.nonlocal();
  const int dim = layout.dimension();
  const double h = layout.grid().h();
  std::vector<Row> rows(nl.size());
  const auto n = static_cast<std::ptrdiff_t>(nl.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Row& row = rows[i];
    row.reserve(nl.size() - i);
    for (std::size_t k = i + 1; k < nl.size(); ++k) {
      row.emplace_back(k, 2.0 * fractional_pair_weight(j, nl[i], nl[k], dim, h));
    }
  }
  const auto off = layout.nonlocal_index(0);
  return {layout, Term::nonlocal, rows_to_matrix(layout.size(), rows, off, off)};
}

DiscreteOperator assemble_volumetric_coupling(const Layout& layout, const kernels::CouplingSpec& g) {
  g.base.validate();
  const CellSet& loc = layout.local();
  const CellSet& nl = layout.nonlocal();
  const int dim = layout.dimension();
  const double h = layout.grid().h();
  const double vol2 = pow_int(h, 2 * dim);
  const bool prune = g.base.integrable();
  const auto reach = prune ? reach_for(g.base.support_radius(), h) : 0;
  std::vector<Row> rows(loc.size());
  const auto n = static_cast<std::ptrdiff_t>(loc.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Row& row = rows[i];
    auto visit = [&](std::size_t k) {
      // One ordered pair per (x in local, y in nonlocal): weight G h^{2N}.
      const double w = g.eval(i, loc.center(i), nl.center(k), dim) * vol2;
      if (w != 0.0) row.emplace_back(k, w);
    };
    if (prune) {
      for_each_near(nl, loc[i], reach, dim, visit);
    } else {
      for (std::size_t k = 0; k < nl.size(); ++k) visit(k);
    }
    sort_row(row);
  }
  return {layout, Term::coupling,
          rows_to_matrix(layout.size(), rows, layout.local_index(0), layout.nonlocal_index(0))};
}

DiscreteOperator assemble_surface_coupling(const Layout& layout, const geometry::Interface& gamma,
                                           const kernels::CouplingSpec& g) {
  g.base.validate();
  const CellSet& nl = layout.nonlocal();
  const int dim = layout.dimension();
  const double h = layout.grid().h();
  const double scale = gamma.face_measure() * pow_int(h, dim);
  const bool prune = g.base.integrable();
  const auto reach = prune ? reach_for(g.base.support_radius(), h) : 0;
  CooBuilder coo(layout.size());
  for (std::size_t f = 0; f < gamma.size(); ++f) {
    const std::size_t owner = gamma.owner(f);
    const Point z = gamma.face_center(f);
    Row row;
    auto visit = [&](std::size_t k) {
      const double w = g.eval(owner, z, nl.center(k), dim) * scale;
      if (w != 0.0) row.emplace_back(k, w);
    };
    if (prune) {
      for_each_near(nl, gamma.faces()[f].cell, reach, dim, visit);
    } else {
      for (std::size_t k = 0; k < nl.size(); ++k) visit(k);
    }
    sort_row(row);
    for (const auto& [k, w] : row) coo.add_edge(layout.local_index(owner), layout.nonlocal_index(k), w);
  }
  return {layout, Term::coupling, CsrMatrix::from_triplets(layout.size(), coo.triplets())};
}

LoadVector assemble_load(const Layout& layout, std::span<const double> f) {
  if (f.size() != layout.size()) throw Error(ErrorCode::DimensionMismatch, "source size");
  LoadVector out;
  out.values.assign(f.begin(), f.end());
  out.weights = layout.weights();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw Error(ErrorCode::InvalidArgument, "source must be finite");
    out.compatibility_sum += out.weights[i] * f[i];
  }
  return out;
}

double quadratic_form(const CsrMatrix& m, std::span<const double> x) {
  const Vec mx = m.multiply(x);
  return 0.5 * dot(x, mx);
}

EnergyBreakdown energy(const DiscreteOperator& a, const LoadVector& f, std::span<const double> u) {
  if (u.size() != a.size() || f.values.size() != a.size()) {
    throw Error(ErrorCode::DimensionMismatch, "energy: vector sizes do not match the operator");
  }
  EnergyBreakdown e;
  e.local = quadratic_form(a.term(Term::local), u);
  e.nonlocal = quadratic_form(a.term(Term::nonlocal), u);
  e.coupling = quadratic_form(a.term(Term::coupling), u);
  for (std::size_t i = 0; i < u.size(); ++i) e.source += f.weights[i] * f.values[i] * u[i];
  return e;
}

DiscreteOperator assemble(const Problem& p) {
  DiscreteOperator op = assemble_local(p.layout);
  op = op + (uses_fractional(p.model) ? assemble_fractional(p.layout, p.j)
                                      : assemble_nonlocal(p.layout, p.j));
  if (uses_interface(p.model)) {
    if (!p.gamma) throw Error(ErrorCode::InvalidArgument, "mixed model requires an interface");
    op = op + assemble_surface_coupling(p.layout, *p.gamma, p.g);
  } else {
    op = op + assemble_volumetric_coupling(p.layout, p.g);
  }
  return op;
}

namespace serial {

DiscreteOperator assemble_nonlocal(const Layout& layout, const kernels::KernelSpec& j) {
  j.validate();
  const CellSet& nl = layout.nonlocal();
  const int dim = layout.dimension();
  const double h = layout.grid().h();
  CooBuilder coo(layout.size());
  const auto off = layout.nonlocal_index(0);
  for (std::size_t i = 0; i < nl.size(); ++i) {
    for (std::size_t k = i + 1; k < nl.size(); ++k) {
      coo.add_edge(off + i, off + k, integrable_edge(j, nl[i], nl[k], dim, h));
    }
  }
  return {layout, Term::nonlocal, CsrMatrix::from_triplets(layout.size(), coo.triplets())};
}

DiscreteOperator assemble_fractional(const Layout& layout, const kernels::KernelSpec& j) {
  j.validate();
  const CellSet& nl = layout.nonlocal();
  const int dim = layout.dimension();
  const double h = layout.grid().h();
  CooBuilder coo(layout.size());
  const auto off = layout.nonlocal_index(0);
  for (std::size_t i = 0; i < nl.size(); ++i) {
    for (std::size_t k = i + 1; k < nl.size(); ++k) {
      coo.add_edge(off + i, off + k, 2.0 * fractional_pair_weight(j, nl[i], nl[k], dim, h));
    }
  }
  return {layout, Term::nonlocal, CsrMatrix::from_triplets(layout.size(), coo.triplets())};
}

DiscreteOperator assemble_volumetric_coupling(const Layout& layout, const kernels::CouplingSpec& g) {
  const CellSet& loc = layout.local();
  const CellSet& nl = layout.nonlocal();
  const int dim = layout.dimension();
  const double vol2 = pow_int(layout.grid().h(), 2 * dim);
  CooBuilder coo(layout.size());
  for (std::size_t i = 0; i < loc.size(); ++i) {
    for (std::size_t k = 0; k < nl.size(); ++k) {
      coo.add_edge(layout.local_index(i), layout.nonlocal_index(k),
                   g.eval(i, loc.center(i), nl.center(k), dim) * vol2);
    }
  }
  return {layout, Term::coupling, CsrMatrix::from_triplets(layout.size(), coo.triplets())};
}

}  // namespace serial

}  // namespace janus::assembly
