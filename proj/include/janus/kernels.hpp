#pragma once

// Interaction kernels J (symmetric, on the nonlocal region) and G (coupling,
// on local x nonlocal or interface x nonlocal pairs).

#include <cstddef>
#include <string>
#include <vector>

#include "janus/geometry.hpp"

namespace janus::kernels {

enum class Family { indicator, truncated_gaussian, fractional };

std::string to_string(Family f);
Family family_from_string(const std::string& name);  // throws InvalidArgument

struct KernelSpec {
  Family family = Family::indicator;
  double delta = 1.0;      ///< visibility radius parameter
  double amplitude = 1.0;  ///< C
  double order = 0.5;      ///< s, fractional family only
  double epsilon = 0.0;    ///< singularity cutoff, fractional family only

  static KernelSpec indicator(double amplitude, double delta);
  static KernelSpec truncated_gaussian(double amplitude, double delta);
  static KernelSpec fractional(double amplitude, double delta, double order, double epsilon = 0.0);

  /// Throws InvalidOrder for s outside (0,1), InvalidArgument for delta <= 0,
  /// C < 0 or epsilon < 0.
  void validate() const;
  bool integrable() const { return family != Family::fractional; }
  /// Radius beyond which the kernel vanishes; +inf for the fractional family.
  double support_radius() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// J as a function of |z| in dimension N.
double eval_radial(const KernelSpec& k, double r, int dimension);
/// J(z) for z in R^N; depends on z only through |z|, so J(z) == J(-z) bitwise.
double eval_kernel(const KernelSpec& k, const geometry::Point& z, int dimension);

/// Coupling kernel G(x, y) = a(x) * K(x - y) with K from a KernelSpec family
/// and a(x) >= 0 a piecewise-constant multiplier over the local cells
/// (empty = 1 everywhere). No symmetry between the two arguments is assumed.
struct CouplingSpec {
  KernelSpec base;
  std::vector<double> multiplier;

  double factor(std::size_t local_position) const {
    return multiplier.empty() ? 1.0 : multiplier.at(local_position);
  }
  double min_factor() const;
  double eval(std::size_t local_position, const geometry::Point& x, const geometry::Point& y,
              int dimension) const;
};

struct Visibility {
  bool visible = false;
  double minimum = 0.0;  ///< m_J or m_G
};

/// Deterministic stratified samples of the closed ball |z| <= 2 delta:
/// radii k * 2 delta / (count - 1), k = 0..count-1, angles cycling.
std::vector<geometry::Point> visibility_samples(double delta, std::size_t count, int dimension);

constexpr std::size_t kDefaultSampleCount = 10000;

Visibility verify_visibility(const KernelSpec& k, double delta, int dimension,
                             std::size_t sample_count = kDefaultSampleCount);
Visibility verify_visibility(const CouplingSpec& g, double delta, int dimension,
                             std::size_t sample_count = kDefaultSampleCount);

/// True iff set_distance(...) < delta.
bool verify_proximity(const geometry::CellSet& local, const geometry::CellSet& nonlocal,
                      double delta);
bool verify_proximity(const geometry::Interface& gamma, const geometry::CellSet& nonlocal,
                      double delta);

}  // namespace janus::kernels
