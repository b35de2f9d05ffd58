#pragma once

// Spectral Poincare-Wirtinger constants and the explicit lower bound chain
// (local sigma constant, root coupling term, delta-tree propagation).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "janus/assembly.hpp"
#include "janus/geometry.hpp"
#include "janus/kernels.hpp"
#include "janus/sparse.hpp"

namespace janus::analysis {

struct EigenOptions {
  double tol = 1e-9;  ///< relative accuracy of the eigenvalue
  std::size_t dense_limit = 2000;
};

/// min x^T A x / x^T W x over c^T x = 0, W = diag(weights). Dense for
/// n <= dense_limit, inverse iteration with projected CG beyond.
/// Throws DegenerateNullSpace when the minimum is numerically zero.
double constrained_min_eigenvalue(const CsrMatrix& a, std::span<const double> weights,
                                  std::span<const double> constraint, const EigenOptions& opt = {});

/// Smallest eigenvalue of A x = lambda M x on the weighted-zero-mean subspace.
double poincare_computed(const assembly::DiscreteOperator& a, const EigenOptions& opt = {});

struct Sigma {
  double computed = 0.0;
  double bound = 0.0;  ///< closed-form lower estimate; 0 when none is available
};

/// Local Neumann constant with the mean over `subset` pinned to zero.
/// Throws EmptySubset.
Sigma sigma_local(const geometry::CellSet& local, const geometry::CellSet& subset,
                  const EigenOptions& opt = {});
Sigma sigma_local(const geometry::CellSet& local, const geometry::Interface& subset,
                  const EigenOptions& opt = {});

struct BranchCoefficients {
  double root = 1.0;          ///< sum_k 2^k |B_k| / |B_0|
  std::vector<double> shift;  ///< shift[i-1] = (2^i/m_J) sum_{k>=i} |B_k| / (|B_{k-i}| |B_{k-i+1}|)
  std::vector<double> edge;   ///< edge[j]: coefficient on the pair integral over B_j x B_{j+1}
};

/// `branch` lists part indices [B_0, B_1, ..., B_L]. Throws EmptyBranch.
BranchCoefficients branch_constant(const geometry::DeltaTree& tree,
                                   std::span<const std::size_t> branch, double m_j);

struct TreeConstant {
  double value = 1.0;  ///< max(alpha, gamma)
  double alpha = 1.0;  ///< total coefficient on the root-part integral
  double gamma = 0.0;  ///< coefficient on the full nonlocal double integral
};

/// Composes branch coefficients along the tree: int_{nonlocal} u^2 <=
/// alpha int_B u^2 + gamma int int J (u(x)-u(y))^2 with B the tree root.
TreeConstant tree_constant_detail(const geometry::DeltaTree& tree, double m_j);
double tree_constant(const geometry::DeltaTree& tree, double m_j);

struct CubeBound {
  double root = 0.0;    ///< 2^(8^N |Omega| / delta^N + 1)
  double factor = 0.0;  ///< 2^N / (c_N delta^N m_J), c_1 = 2, c_2 = pi
  double value = 0.0;   ///< root * max(1, factor)
};

CubeBound cube_closed_form(int dimension, double volume, double delta, double m_j);

/// delta^N e^(delta^-N) min(m_J, m_G), reported as an annotation.
double small_delta_annotation(int dimension, double delta, double m_j, double m_g);

/// Coupling sets: A as local positions (volumetric) or interface face
/// indices (mixed), and the root part B of the tree.
struct CouplingSets {
  std::vector<std::size_t> a;
  std::size_t root_part = 0;
};

/// Diameter of the closed union of A and the root part.
double coupling_diameter(const assembly::Problem& p, const geometry::DeltaTree& tree,
                         const CouplingSets& sets);

/// Greedy choice: B is the part holding the nonlocal cell closest to the
/// local set (or interface); A collects the closest local cells (faces)
/// while diam(A u B) < 2 delta_G. Throws HorizonViolation if none fits.
CouplingSets select_coupling_sets(const assembly::Problem& p, const geometry::DeltaTree& tree);

/// Nonlocal cell (as CellIndex) used to root the tree.
geometry::CellIndex coupling_anchor(const assembly::Problem& p);

struct PoincareReport {
  std::string model;
  double computed = 0.0;
  bool degenerate = false;  ///< computed constant is zero (decoupled operator)
  double bound = 0.0;

  double sigma = 0.0;           ///< computed sigma(Omega_l, A) or sigma(Omega_l, Gamma_A)
  double sigma_estimate = 0.0;  ///< closed-form estimate of sigma (0 if none)
  double coupling = 0.0;        ///< m_G |A| / 2 or m_G |Gamma_A| / 2
  double tree = 0.0;            ///< C(T, m_J)
  double tree_alpha = 0.0;
  double tree_gamma = 0.0;
  double m_j = 0.0;
  double m_g = 0.0;
  double a_measure = 0.0;
  std::size_t a_count = 0;
  double coupling_diameter = 0.0;

  std::size_t parts = 0;
  std::size_t branches = 0;
  std::size_t degree = 0;
  std::size_t max_branch_length = 0;
  std::vector<std::size_t> branch_lengths;

  double cube_bound = 0.0;  ///< closed-form single-branch tree constant
  double annotation = 0.0;  ///< small-delta display
};

/// Builds the tree on the nonlocal set (J horizon), selects the coupling sets
/// and assembles the bound together with the computed constant. Mixed models
/// use the interface; fractional models use their J minimum on the 2 delta ball.
PoincareReport tracked_bound(const assembly::Problem& p,
                             std::size_t sample_count = kernels::kDefaultSampleCount,
                             const EigenOptions& opt = {});
/// Same with caller-supplied tree and coupling sets. Throws HorizonViolation
/// if diam(A u B) >= 2 delta_G.
PoincareReport tracked_bound(const assembly::Problem& p, const geometry::DeltaTree& tree,
                             const CouplingSets& sets,
                             std::size_t sample_count = kernels::kDefaultSampleCount,
                             const EigenOptions& opt = {});

}  // namespace janus::analysis
