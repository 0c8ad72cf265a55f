#include <benchmark/benchmark.h>

#include "topoloc/dynamics.hpp"
#include "topoloc/oracle.hpp"
#include "topoloc/qpt.hpp"

namespace {

using namespace topoloc;

CodeLattice lattice_of(int64_t n) { return kitaev_lattice_for(static_cast<std::size_t>(n)); }

void BM_HamiltonianApply(benchmark::State& state) {
  const CodeLattice lat = lattice_of(state.range(0));
  const Hamiltonian h = build_hamiltonian(lat, {0.3});
  std::mt19937_64 rng(1);
  const StateVector in = oracle::random_state(lat.n_qubits(), rng);
  StateVector out(in.size());
  for (auto _ : state) {
    h.apply(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.size()));
}
BENCHMARK(BM_HamiltonianApply)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_GroundState(benchmark::State& state) {
  const CodeLattice lat = lattice_of(state.range(0));
  const Hamiltonian h = build_hamiltonian(lat, {0.3});
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(h, {0.3}, lat).energy);
}
BENCHMARK(BM_GroundState)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_CanonicalSetupBound(benchmark::State& state) {
  const CodeLattice lat = lattice_of(state.range(0));
  const LoopSpec spec = LoopSpec::parse("Lx_h");
  const StateVector gs = ground_state(build_hamiltonian(lat, {0.3}), {0.3}, lat).vector;
  const Region region = Region::make(lat.n_qubits(), lat.loop_support(spec));
  const MeasurementSetup setup = canonical_setup(lat, spec);
  for (auto _ : state) benchmark::DoNotOptimize(setup_bound(gs, region, setup).value);
}
BENCHMARK(BM_CanonicalSetupBound)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_WitnessExpectation(benchmark::State& state) {
  const CodeLattice lat = lattice_of(state.range(0));
  const WitnessOperator w = build_witness(lat, LoopSpec::parse("Lx_h"));
  const StateVector gs = ground_state(build_hamiltonian(lat, {0.3}), {0.3}, lat).vector;
  for (auto _ : state) benchmark::DoNotOptimize(witness_expectation(gs, w).w);
}
BENCHMARK(BM_WitnessExpectation)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_RestrictedLE(benchmark::State& state) {
  const CodeLattice lat = build_kitaev(2, 2);
  const LoopSpec spec = LoopSpec::parse("Lz_h");
  const StateVector gs = ground_state(build_hamiltonian(lat, {0.5}), {0.5}, lat).vector;
  const Region region = Region::make(lat.n_qubits(), lat.loop_support(spec));
  for (auto _ : state) benchmark::DoNotOptimize(restricted_le(gs, region).best.value);
}
BENCHMARK(BM_RestrictedLE)->Unit(benchmark::kMillisecond);

void BM_DephasingStep(benchmark::State& state) {
  const CodeLattice lat = build_kitaev(2, 2);
  const Hamiltonian h = build_hamiltonian(lat, {0.5});
  const StateVector gs = ground_state(h, {0.5}, lat).vector;
  const SupportBasis basis = SupportBasis::full(lat.n_qubits());
  EvolveOptions opts;
  opts.t_end = 0.1;
  opts.record_every = 0.1;
  for (auto _ : state) {
    const EvolveStats s = evolve(DensityMatrix::from_pure(gs, basis), h, {3.0, 1.0}, opts, {});
    benchmark::DoNotOptimize(s.steps);
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_DephasingStep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
