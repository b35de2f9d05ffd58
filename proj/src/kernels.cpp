#include "janus/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "janus/error.hpp"

namespace janus::kernels {

std::string to_string(Family f) {
  switch (f) {
    case Family::indicator: return "indicator";
    case Family::truncated_gaussian: return "truncated-gaussian";
    case Family::fractional: return "fractional";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "indicator") return Family::indicator;
  if (name == "truncated-gaussian") return Family::truncated_gaussian;
  if (name == "fractional") return Family::fractional;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel family '" + name + "'");
}

KernelSpec KernelSpec::indicator(double amplitude, double delta) {
  return {Family::indicator, delta, amplitude, 0.5, 0.0};
}

KernelSpec KernelSpec::truncated_gaussian(double amplitude, double delta) {
  return {Family::truncated_gaussian, delta, amplitude, 0.5, 0.0};
}

KernelSpec KernelSpec::fractional(double amplitude, double delta, double order, double epsilon) {
  return {Family::fractional, delta, amplitude, order, epsilon};
}

void KernelSpec::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::InvalidArgument, "kernel delta must be positive");
  }
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw Error(ErrorCode::InvalidArgument, "kernel amplitude C must be nonnegative");
  }
  if (family == Family::fractional) {
    if (!(order > 0.0 && order < 1.0)) {
      throw Error(ErrorCode::InvalidOrder, "s must be in (0,1)");
    }
    if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be nonnegative");
  }
}

double KernelSpec::support_radius() const {
  switch (family) {
    case Family::indicator: return 2.0 * delta;
    case Family::truncated_gaussian: return 4.0 * delta;
    case Family::fractional: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double eval_radial(const KernelSpec& k, double r, int dimension) {
  switch (k.family) {
    case Family::indicator:
      return r <= 2.0 * k.delta ? k.amplitude : 0.0;
    case Family::truncated_gaussian:
      return r <= 4.0 * k.delta ? k.amplitude * std::exp(-(r * r) / (k.delta * k.delta)) : 0.0;
    case Family::fractional: {
      const double rr = std::max(r, k.epsilon);
      return k.amplitude / std::pow(rr, static_cast<double>(dimension) + 2.0 * k.order);
    }
  }
  return 0.0;
}

double eval_kernel(const KernelSpec& k, const geometry::Point& z, int dimension) {
  double s = 0.0;
  for (int a = 0; a < dimension; ++a) s += z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(a)];
  return eval_radial(k, std::sqrt(s), dimension);
}

double CouplingSpec::min_factor() const {
  if (multiplier.empty()) return 1.0;
  return *std::min_element(multiplier.begin(), multiplier.end());
}

double CouplingSpec::eval(std::size_t local_position, const geometry::Point& x,
                          const geometry::Point& y, int dimension) const {
  geometry::Point z{};
  for (int a = 0; a < dimension; ++a) {
    const auto i = static_cast<std::size_t>(a);
    z[i] = x[i] - y[i];
  }
  return factor(local_position) * eval_kernel(base, z, dimension);
}

std::vector<geometry::Point> visibility_samples(double delta, std::size_t count, int dimension) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "sample_count must be >= 1");
  std::vector<geometry::Point> out;
  out.reserve(count);
  const double rmax = 2.0 * delta;
  constexpr std::size_t kAngles = 16;
  for (std::size_t k = 0; k < count; ++k) {
    const double r = count == 1 ? rmax : rmax * static_cast<double>(k) / static_cast<double>(count - 1);
    geometry::Point z{};
    if (dimension == 1) {
      z[0] = (k % 2 == 0) ? r : -r;
    } else {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k % kAngles) / kAngles;
      z[0] = r * std::cos(theta);
      z[1] = r * std::sin(theta);
    }
    out.push_back(z);
  }
  return out;
}

Visibility verify_visibility(const KernelSpec& k, double delta, int dimension,
                             std::size_t sample_count) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : visibility_samples(delta, sample_count, dimension)) {
    m = std::min(m, eval_kernel(k, z, dimension));
  }
  return {m > 0.0, m};
}

Visibility verify_visibility(const CouplingSpec& g, double delta, int dimension,
                             std::size_t sample_count) {
  Visibility v = verify_visibility(g.base, delta, dimension, sample_count);
  v.minimum *= g.min_factor();
  v.visible = v.minimum > 0.0;
  return v;
}

bool verify_proximity(const geometry::CellSet& local, const geometry::CellSet& nonlocal,
                      double delta) {
  return geometry::set_distance(local, nonlocal) < delta;
}

bool verify_proximity(const geometry::Interface& gamma, const geometry::CellSet& nonlocal,
                      double delta) {
  return geometry::set_distance(gamma, nonlocal) < delta;
}

}  // namespace janus::kernels
