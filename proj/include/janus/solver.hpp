#pragma once

// Minimization of the discrete energy over weighted-zero-mean vectors by
// projected conjugate gradients, Euler-Lagrange residual checks, and a dense
// pseudo-inverse reference.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "janus/assembly.hpp"
#include "janus/geometry.hpp"
#include "janus/sparse.hpp"

namespace janus::solver {

constexpr double kDefaultTol = 1e-10;

struct SolveOptions {
  double tol = kDefaultTol;    ///< relative to ||M f||
  std::size_t max_iter = 0;    ///< 0 selects 20 n
  bool jacobi = false;
  std::optional<Vec> initial;  ///< projected before use; zero when absent
};

struct SolveResult {
  Vec u;
  std::size_t iterations = 0;
  double residual = 0.0;  ///< ||P(A u - M f)|| / ||M f||
  double energy = 0.0;
  double wall_time = 0.0;  ///< seconds
};

/// |sum w f| <= tol (sum w |f| + 1)
bool check_compatibility(const assembly::LoadVector& f, double tol = kDefaultTol);

/// P v = v - (w.v / w.w) w, in place.
void project(std::span<const double> w, std::span<double> v);

/// Throws IncompatibleSource, NoConvergence, DimensionMismatch.
SolveResult solve(const assembly::DiscreteOperator& a, const assembly::LoadVector& f,
                  const SolveOptions& options = {});
SolveResult solve(const assembly::DiscreteOperator& a, const assembly::LoadVector& f, double tol,
                  std::size_t max_iter);

using Apply = std::function<void(std::span<const double>, std::span<double>)>;

struct CgReport {
  std::size_t iterations = 0;
  double residual = 0.0;  ///< final ||P(b - A x)||
  bool converged = false;
};

/// CG for A x = b on the complement of `dir`: b and every iterate are
/// projected, the optional inverse diagonal gives P D^-1 P preconditioning.
/// Stops once the true projected residual is <= abs_tol.
CgReport projected_cg(const Apply& apply, std::span<const double> dir, std::span<const double> b,
                      std::span<double> x, double abs_tol, std::size_t max_iter,
                      std::span<const double> inv_diag = {});

struct RegionResiduals {
  double local_interior = 0.0;
  double local_boundary = 0.0;  ///< local cells on the boundary of the local set, off the interface
  double interface = 0.0;       ///< cells owning interface faces (mixed models)
  double nonlocal = 0.0;

  double max() const;
};

/// Weighted l2 norms of (A u - M f)/w per region, relative to the weighted
/// norm of f (absolute when f == 0). `model` is "volumetric", "mixed",
/// "fractional" or any assembly model name; throws UnknownModel otherwise.
RegionResiduals residual_euler_lagrange(const assembly::DiscreteOperator& a,
                                        const assembly::LoadVector& f, std::span<const double> u,
                                        std::string_view model,
                                        const geometry::Interface* gamma = nullptr);

constexpr std::size_t kDenseLimit = 2000;

/// Pseudo-inverse solution on the weighted-zero-mean subspace. Throws TooLarge.
Vec dense_oracle(const assembly::DiscreteOperator& a, const assembly::LoadVector& f);

}  // namespace janus::solver
