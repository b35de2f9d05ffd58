#include "janus/particles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "janus/error.hpp"

namespace janus::particles {

double JumpChain::q(std::size_t i, std::size_t j) const {
  if (i == j) return -exit_rate.at(i);
  for (auto k = row_ptr.at(i); k < row_ptr.at(i + 1); ++k) {
    if (target[k] == j) return rate[k];
  }
  return 0.0;
}

JumpChain build_chain(const assembly::DiscreteOperator& a, const std::string& model) {
  const CsrMatrix& m = a.matrix();
  JumpChain c;
  c.states = a.size();
  c.weights = a.weights();
  c.model = model;
  c.row_ptr.push_back(0);
  c.exit_rate.assign(c.states, 0.0);
  for (std::size_t i = 0; i < c.states; ++i) {
    for (auto k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) {
      const auto j = m.col_idx()[k];
      if (j == i) continue;
      const double r = -m.values()[k] / c.weights[i];
      if (r < 0.0) {
        throw Error(ErrorCode::NegativeRate, "negative jump rate " + std::to_string(r) + " from " +
                                                 std::to_string(i) + " to " + std::to_string(j));
      }
      if (r == 0.0) continue;
      c.target.push_back(j);
      c.rate.push_back(r);
      c.exit_rate[i] += r;
    }
    c.row_ptr.push_back(c.target.size());
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Runs one walker and adds its residence times to occ.
std::uint64_t walk(const JumpChain& c, std::size_t state, double horizon, std::mt19937_64& rng,
                   Vec& occ) {
  std::uint64_t jumps = 0;
  double t = 0.0;
  while (true) {
    const double out = c.exit_rate[state];
    if (out <= 0.0) {
      occ[state] += horizon - t;
      return jumps;
    }
    const double hold = -std::log1p(-unit(rng)) / out;
    if (t + hold >= horizon) {
      occ[state] += horizon - t;
      return jumps;
    }
    occ[state] += hold;
    t += hold;
    double pick = unit(rng) * out;
    auto k = c.row_ptr[state];
    const auto end = c.row_ptr[state + 1];
    while (k + 1 < end && pick >= c.rate[k]) {
      pick -= c.rate[k];
      ++k;
    }
    state = c.target[k];
    ++jumps;
  }
}

}  // namespace

Occupancy simulate_stationary(const JumpChain& chain, std::size_t particles, double horizon,
                              std::uint64_t seed, std::optional<std::size_t> start) {
  if (particles < 1) throw Error(ErrorCode::InvalidArgument, "need at least one particle");
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  if (chain.states == 0) throw Error(ErrorCode::InvalidArgument, "chain has no states");
  if (start && *start >= chain.states) throw Error(ErrorCode::InvalidArgument, "start cell out of range");

  const std::size_t n_blocks = (particles + kParticleBlock - 1) / kParticleBlock;
  std::vector<Vec> block_occ(n_blocks, Vec(chain.states, 0.0));
  std::vector<std::uint64_t> block_jumps(n_blocks, 0);
  const auto nb = static_cast<std::ptrdiff_t>(n_blocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t bb = 0; bb < nb; ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    const std::size_t lo = b * kParticleBlock;
    const std::size_t hi = std::min(particles, lo + kParticleBlock);
    for (std::size_t p = lo; p < hi; ++p) {
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(p)));
      const std::size_t s0 = start ? *start : p % chain.states;
      block_jumps[b] += walk(chain, s0, horizon, rng, block_occ[b]);
    }
  }

  Occupancy out;
  out.particles = particles;
  out.horizon = horizon;
  out.fraction.assign(chain.states, 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (std::size_t i = 0; i < chain.states; ++i) out.fraction[i] += block_occ[b][i];
    out.jumps += block_jumps[b];
  }
  const double total = static_cast<double>(particles) * horizon;
  for (auto& x : out.fraction) x /= total;
  return out;
}

Vec stationary_distribution(const JumpChain& chain) {
  Vec p = chain.weights;
  double s = 0.0;
  for (double w : p) s += w;
  for (auto& x : p) x /= s;
  return p;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "distribution sizes");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double source_balance_check(const JumpChain& chain, const assembly::LoadVector& f,
                            std::span<const double> u) {
  const std::size_t n = chain.states;
  if (u.size() != n || f.values.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "source_balance_check: vector sizes differ");
  }
  // y = Q^T (w o u) + M f
  Vec y(n, 0.0);
  double fnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wu = chain.weights[i] * u[i];
    y[i] -= chain.exit_rate[i] * wu;
    for (auto k = chain.row_ptr[i]; k < chain.row_ptr[i + 1]; ++k) y[chain.target[k]] += chain.rate[k] * wu;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double mf = f.weights[i] * f.values[i];
    y[i] += mf;
    fnorm += mf * mf;
  }
  const double scale = fnorm > 0.0 ? std::sqrt(fnorm) : 1.0;
  return norm2(y) / scale;
}

double source_balance_check(const JumpChain& chain, const assembly::LoadVector& f,
                            const solver::SolveResult& u) {
  return source_balance_check(chain, f, u.u);
}

}  // namespace janus::particles
