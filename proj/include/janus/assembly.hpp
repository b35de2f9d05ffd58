#pragma once

// Discretization of the coupled local/nonlocal energies into
//
//     E(u) = 1/2 u^T A u - sum_i w_i f_i u_i,   w_i = h^N,
//
// with A a sum of graph-Laplacian blocks (local Dirichlet form, nonlocal J
// form, coupling G form). Unknowns are ordered local cells first, then
// nonlocal cells.

#include <optional>
#include <span>
#include <string>

#include "janus/geometry.hpp"
#include "janus/kernels.hpp"
#include "janus/sparse.hpp"

namespace janus::assembly {

enum class Model { volumetric, mixed, fractional_volumetric, fractional_mixed };

std::string to_string(Model m);
Model model_from_string(const std::string& name);  // throws UnknownModel
bool uses_interface(Model m);
bool uses_fractional(Model m);

/// Global numbering of the two cell sets (either may be empty).
class Layout {
 public:
  Layout(geometry::CellSet local, geometry::CellSet nonlocal);

  const geometry::CellSet& local() const { return local_; }
  const geometry::CellSet& nonlocal() const { return nonlocal_; }
  const geometry::GridSpec& grid() const { return local_.grid(); }
  int dimension() const { return grid().dimension(); }
  std::size_t n_local() const { return local_.size(); }
  std::size_t n_nonlocal() const { return nonlocal_.size(); }
  std::size_t size() const { return n_local() + n_nonlocal(); }
  std::size_t local_index(std::size_t pos) const { return pos; }
  std::size_t nonlocal_index(std::size_t pos) const { return n_local() + pos; }
  bool is_local(std::size_t global) const { return global < n_local(); }
  geometry::Point center(std::size_t global) const;
  geometry::CellIndex cell(std::size_t global) const;
  Vec weights() const;

 private:
  geometry::CellSet local_;
  geometry::CellSet nonlocal_;
};

enum class Term { local, nonlocal, coupling };

class DiscreteOperator {
 public:
  /// Zero operator on the layout.
  explicit DiscreteOperator(Layout layout);
  DiscreteOperator(Layout layout, Term term, CsrMatrix block);

  const Layout& layout() const { return layout_; }
  std::size_t size() const { return layout_.size(); }
  const Vec& weights() const { return weights_; }
  const CsrMatrix& matrix() const { return total_; }
  const CsrMatrix& term(Term t) const;

  /// Term-wise sum; layouts must agree in size.
  DiscreteOperator operator+(const DiscreteOperator& other) const;

 private:
  Layout layout_;
  Vec weights_;
  CsrMatrix local_, nonlocal_, coupling_, total_;
};

struct LoadVector {
  Vec values;   ///< f_i
  Vec weights;  ///< w_i
  double compatibility_sum = 0.0;  ///< sum_i w_i f_i

  /// M f
  Vec weighted() const;
};

struct EnergyBreakdown {
  double local = 0.0;     ///< 1/2 int |grad u|^2
  double nonlocal = 0.0;  ///< 1/2 int int J (u(y)-u(x))^2
  double coupling = 0.0;  ///< 1/2 int int G (u(y)-u(x))^2 (volume or surface)
  double source = 0.0;    ///< int f u

  double total() const { return local + nonlocal + coupling - source; }
};

// Block assemblies -----------------------------------------------------------

DiscreteOperator assemble_local(const Layout& layout);
/// Integrable J only (indicator / truncated-gaussian).
DiscreteOperator assemble_nonlocal(const Layout& layout, const kernels::KernelSpec& j);
/// Fractional J; throws InvalidOrder for s outside (0,1).
DiscreteOperator assemble_fractional(const Layout& layout, const kernels::KernelSpec& j);
DiscreteOperator assemble_volumetric_coupling(const Layout& layout, const kernels::CouplingSpec& g);
DiscreteOperator assemble_surface_coupling(const Layout& layout, const geometry::Interface& gamma,
                                           const kernels::CouplingSpec& g);

/// Cell-pair integral of C/|x-y|^(N+2s) used for fractional edges: center
/// rule for pairs at center distance >= 2h, 4^N-point product midpoint rule
/// per cell otherwise. Symmetric in (a, b) bitwise.
double fractional_pair_weight(const kernels::KernelSpec& j, const geometry::CellIndex& a,
                              const geometry::CellIndex& b, int dimension, double h);

LoadVector assemble_load(const Layout& layout, std::span<const double> f);

/// Throws DimensionMismatch.
EnergyBreakdown energy(const DiscreteOperator& a, const LoadVector& f, std::span<const double> u);

/// 1/2 x^T M x for a single matrix.
double quadratic_form(const CsrMatrix& m, std::span<const double> x);

/// Full problem description for the four shipped models.
struct Problem {
  Model model = Model::volumetric;
  Layout layout;
  kernels::KernelSpec j;
  kernels::CouplingSpec g;
  std::optional<geometry::Interface> gamma;  ///< required for mixed models
};

DiscreteOperator assemble(const Problem& p);

namespace serial {
/// Reference all-pairs assembly without horizon pruning or threading.
DiscreteOperator assemble_nonlocal(const Layout& layout, const kernels::KernelSpec& j);
DiscreteOperator assemble_fractional(const Layout& layout, const kernels::KernelSpec& j);
DiscreteOperator assemble_volumetric_coupling(const Layout& layout, const kernels::CouplingSpec& g);
}  // namespace serial

}  // namespace janus::assembly
