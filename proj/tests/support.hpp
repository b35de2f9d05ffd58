#pragma once

// Small instance builders shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <random>
#include <string>

#include "janus/assembly.hpp"
#include "janus/config.hpp"
#include "janus/geometry.hpp"
#include "janus/kernels.hpp"

namespace janus::testing {

inline geometry::Box box1(double a, double b) { return {{a, 0.0}, {b, 0.0}}; }
inline geometry::Box box2(double a, double b, double c, double d) { return {{a, c}, {b, d}}; }

/// Nonlocal [-1,0], local [0,1] on a 1D grid of width h.
inline geometry::DomainPair interval_pair(double h) {
  const auto g = geometry::GridSpec::make(1, h, {-1.0, 0.0}, {1.0, 0.0});
  return geometry::build_domain(g, {box1(0, 1)}, {box1(-1, 0)});
}

/// Nonlocal [-1,0]x[0,1], local [0,1]x[0,1].
inline geometry::DomainPair two_squares(double h) {
  const auto g = geometry::GridSpec::make(2, h, {-1.0, 0.0}, {1.0, 1.0});
  return geometry::build_domain(g, {box2(0, 1, 0, 1)}, {box2(-1, 0, 0, 1)});
}

inline assembly::Problem make_problem(assembly::Model model, geometry::DomainPair d,
                                      kernels::KernelSpec j, kernels::KernelSpec g) {
  std::optional<geometry::Interface> gamma;
  if (assembly::uses_interface(model)) {
    const int dim = d.local.grid().dimension();
    const geometry::Region at_zero{dim == 1 ? box1(0, 0) : box2(0, 0, 0, 1)};
    gamma = geometry::extract_interface(d.local, at_zero);
  }
  assembly::Layout layout(std::move(d.local), std::move(d.nonlocal));
  return {model, std::move(layout), j, kernels::CouplingSpec{g, {}}, std::move(gamma)};
}

/// The 8-cell 1D reference instance: h = 0.25, J and G indicators C = 1, delta = 0.5.
inline assembly::Problem eight_cell(assembly::Model model = assembly::Model::volumetric) {
  return make_problem(model, interval_pair(0.25), kernels::KernelSpec::indicator(1.0, 0.5),
                      kernels::KernelSpec::indicator(1.0, 0.5));
}

/// +1 on local cells, -|local|/|nonlocal| on nonlocal cells.
inline Vec balanced_step(const assembly::Layout& layout) {
  Vec f(layout.size());
  const double ratio = layout.local().volume() / layout.nonlocal().volume();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = layout.is_local(i) ? 1.0 : -ratio;
  return f;
}

inline Vec random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline Vec zero_mean(Vec v, const Vec& w) {
  double s = 0.0, ws = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += w[i] * v[i];
    ws += w[i];
  }
  for (auto& x : v) x -= s / ws;
  return v;
}

inline std::string config_dir() { return JANUS_SOURCE_DIR "/configs"; }
inline std::string data_dir() { return JANUS_SOURCE_DIR "/tests/data"; }

}  // namespace janus::testing
