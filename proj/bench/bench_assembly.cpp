// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "janus/assembly.hpp"
#include "janus/geometry.hpp"
#include "janus/particles.hpp"

namespace {

using namespace janus;
using assembly::Layout;
using kernels::KernelSpec;

Layout squares(double h) {
  const auto g = geometry::GridSpec::make(2, h, {-1.0, 0.0}, {1.0, 1.0});
  auto d = geometry::build_domain(g, {{{0, 0}, {1, 1}}}, {{{-1, 0}, {0, 1}}});
  return {std::move(d.local), std::move(d.nonlocal)};
}

double h_for(const benchmark::State& s) { return 1.0 / static_cast<double>(s.range(0)); }

void BM_nonlocal_serial(benchmark::State& s) {
  const auto layout = squares(h_for(s));
  const auto j = KernelSpec::indicator(1.0, 0.25);
  for (auto _ : s) benchmark::DoNotOptimize(assembly::serial::assemble_nonlocal(layout, j));
}

void BM_nonlocal_parallel(benchmark::State& s) {
  const auto layout = squares(h_for(s));
  const auto j = KernelSpec::indicator(1.0, 0.25);
  for (auto _ : s) benchmark::DoNotOptimize(assembly::assemble_nonlocal(layout, j));
}

void BM_fractional_serial(benchmark::State& s) {
  const auto layout = squares(h_for(s));
  const auto j = KernelSpec::fractional(1.0, 0.25, 0.5);
  for (auto _ : s) benchmark::DoNotOptimize(assembly::serial::assemble_fractional(layout, j));
}

void BM_fractional_parallel(benchmark::State& s) {
  const auto layout = squares(h_for(s));
  const auto j = KernelSpec::fractional(1.0, 0.25, 0.5);
  for (auto _ : s) benchmark::DoNotOptimize(assembly::assemble_fractional(layout, j));
}

void BM_coupling_serial(benchmark::State& s) {
  const auto layout = squares(h_for(s));
  const kernels::CouplingSpec g{KernelSpec::indicator(1.0, 0.25), {}};
  for (auto _ : s) benchmark::DoNotOptimize(assembly::serial::assemble_volumetric_coupling(layout, g));
}

void BM_coupling_parallel(benchmark::State& s) {
  const auto layout = squares(h_for(s));
  const kernels::CouplingSpec g{KernelSpec::indicator(1.0, 0.25), {}};
  for (auto _ : s) benchmark::DoNotOptimize(assembly::assemble_volumetric_coupling(layout, g));
}

CsrMatrix spmv_matrix(const benchmark::State& s) {
  return assembly::assemble_nonlocal(squares(h_for(s)), KernelSpec::indicator(1.0, 0.25)).matrix();
}

void BM_spmv_serial(benchmark::State& s) {
  const auto a = spmv_matrix(s);
  Vec x(a.rows(), 1.0), y(a.rows());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i % 7);
  for (auto _ : s) {
    serial::multiply(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_spmv_parallel(benchmark::State& s) {
  const auto a = spmv_matrix(s);
  Vec x(a.rows(), 1.0), y(a.rows());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i % 7);
  for (auto _ : s) {
    a.multiply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_walkers(benchmark::State& s) {
  const auto layout = squares(0.125);
  const auto op = assembly::assemble_local(layout) +
                  assembly::assemble_nonlocal(layout, KernelSpec::indicator(1.0, 0.25)) +
                  assembly::assemble_volumetric_coupling(layout, {KernelSpec::indicator(1.0, 0.25), {}});
  const auto chain = particles::build_chain(op);
  for (auto _ : s) {
    benchmark::DoNotOptimize(particles::simulate_stationary(chain, static_cast<std::size_t>(s.range(0)), 10.0, 1));
  }
}

}  // namespace

BENCHMARK(BM_nonlocal_serial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nonlocal_parallel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fractional_serial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fractional_parallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_coupling_serial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_coupling_parallel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spmv_serial)->Arg(32)->Arg(64);
BENCHMARK(BM_spmv_parallel)->Arg(32)->Arg(64);
BENCHMARK(BM_walkers)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
