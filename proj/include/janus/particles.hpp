#pragma once

// Continuous-time jump chain on the grid cells whose generator is
// Q = -M^-1 A, and an independent-walker simulator for its occupancy.
// Streams: mt19937_64 per particle, seeded by splitmix64 of (seed, index).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "janus/assembly.hpp"
#include "janus/solver.hpp"
#include "janus/sparse.hpp"

namespace janus::particles {

struct JumpChain {
  std::size_t states = 0;
  std::vector<std::size_t> row_ptr;  ///< off-diagonal rates in CSR form
  std::vector<std::size_t> target;
  Vec rate;       ///< Q_ij >= 0, i != j
  Vec exit_rate;  ///< -Q_ii = sum_j Q_ij
  Vec weights;    ///< reversing measure w
  std::string model;

  double q(std::size_t i, std::size_t j) const;
};

/// Throws NegativeRate if an off-diagonal entry of -A is negative.
JumpChain build_chain(const assembly::DiscreteOperator& a, const std::string& model = "volumetric");

struct Occupancy {
  Vec fraction;               ///< time-averaged share of particles per cell
  std::size_t particles = 0;  ///< particle count, identical at every time
  std::uint64_t jumps = 0;
  double horizon = 0.0;
};

constexpr std::size_t kParticleBlock = 256;

std::uint64_t splitmix64(std::uint64_t x);

/// Independent walkers with exponential holding times. Start cells are
/// spread as particle index mod states unless `start` is given. Output is
/// identical for any thread count.
Occupancy simulate_stationary(const JumpChain& chain, std::size_t particles, double horizon,
                              std::uint64_t seed, std::optional<std::size_t> start = std::nullopt);

/// Volume-weighted uniform distribution w / sum w.
Vec stationary_distribution(const JumpChain& chain);
double total_variation(std::span<const double> p, std::span<const double> q);

/// ||Q^T (w o u) + M f|| relative to ||M f|| (absolute when f == 0).
double source_balance_check(const JumpChain& chain, const assembly::LoadVector& f,
                            std::span<const double> u);
double source_balance_check(const JumpChain& chain, const assembly::LoadVector& f,
                            const solver::SolveResult& u);

}  // namespace janus::particles
