#include <gtest/gtest.h>

#include "gen.hpp"
#include "topoloc/error.hpp"
#include "topoloc/localize.hpp"
#include "topoloc/oracle.hpp"

namespace topoloc {
namespace {

Eigen::MatrixXcd projector(const StateVector& v) {
  const Eigen::Map<const Eigen::VectorXcd> m(v.data(), static_cast<Eigen::Index>(v.size()));
  return m * m.adjoint();
}

StateVector basis_state(std::size_t n, std::uint64_t b) {
  StateVector v(std::size_t{1} << n, 0.0);
  v[b] = 1.0;
  return v;
}

TEST(Negativity, BellStateIsOne) {
  StateVector bell(4, 0.0);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(negativity(projector(bell), 0b01), 1.0, 1e-12);
  EXPECT_NEAR(pure_negativity(bell, 0b01), 1.0, 1e-12);
}

TEST(Negativity, ProductStateIsZero) {
  std::mt19937_64 rng(301);
  const StateVector a = oracle::random_state(1, rng), b = oracle::random_state(2, rng);
  StateVector prod(8);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 4; ++j) prod[i | (j << 1)] = a[i] * b[j];
  }
  EXPECT_NEAR(negativity(projector(prod), 0b001), 0.0, 1e-12);
  EXPECT_NEAR(pure_negativity(prod, 0b001), 0.0, 1e-12);
}

TEST(Negativity, GhzOneToRestIsOne) {
  StateVector ghz(8, 0.0);
  ghz[0] = ghz[7] = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(negativity(projector(ghz), 0b001), 1.0, 1e-12);
  EXPECT_NEAR(negativity(projector(ghz), 0b001, true), 1.0, 1e-12);
}

TEST(Negativity, NormalizedDividesByMinDimensionMinusOne) {
  // Two Bell pairs across a 2:2 split: ||rho^T_A||_1 = 4, so N = 3 and N / (4 - 1) = 1.
  StateVector v(16, 0.0);
  for (std::uint64_t a = 0; a < 4; ++a) v[a | (a << 2)] = 0.5;
  EXPECT_NEAR(negativity(projector(v), 0b0011), 3.0, 1e-12);
  EXPECT_NEAR(negativity(projector(v), 0b0011, true), 1.0, 1e-12);
}

TEST(Negativity, RejectsInvalidStates) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(4, 4);
  EXPECT_THROW(negativity(rho, 0b01), InvalidArgument);  // trace 4
  rho /= 4.0;
  rho(0, 1) = 0.1;
  EXPECT_THROW(negativity(rho, 0b01), InvalidArgument);  // not Hermitian
}

TEST(Negativity, PureMatchesDenseOnRandomStates) {
  std::mt19937_64 rng(302);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const StateVector v = oracle::random_state(n, rng);
    std::uniform_int_distribution<std::uint64_t> mask(1, (std::uint64_t{1} << n) - 2);
    const std::uint64_t a = mask(rng);
    ASSERT_NEAR(pure_negativity(v, a), negativity(projector(v), a), 1e-10);
    ASSERT_NEAR(pure_negativity(v, a, true), negativity(projector(v), a, true), 1e-10);
  }
}

TEST(CanonicalSetup, FigureFourLx) {
  const CodeLattice lat = build_kitaev(3, 3);
  const LoopSpec spec = LoopSpec::parse("Lx_h");
  const Region region = Region::make(18, lat.loop_support(spec));
  EXPECT_EQ(canonical_setup(lat, spec), MeasurementSetup::parse("Z:7,8,9,13,14,15; X:rest", region));
}

TEST(CanonicalSetup, FigureFourLz) {
  const CodeLattice lat = build_kitaev(3, 3);
  const LoopSpec spec = LoopSpec::parse("Lz_h");
  const Region region = Region::make(18, lat.loop_support(spec));
  EXPECT_EQ(canonical_setup(lat, spec), MeasurementSetup::parse("X:10,11,12,16,17,18; Z:rest", region));
}

TEST(CanonicalSetup, PreservesStarOverLoopAtZeroField) {
  // Every outcome of the canonical setup leaves the loop in a state with hub:rest negativity 1.
  for (auto [w, h] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{4, 2}, std::pair{3, 3}}) {
    const CodeLattice lat = build_kitaev(w, h);
    for (auto name : {"Lx_h", "Lz_h", "Lx_v", "Lz_v"}) {
      const LoopSpec spec = LoopSpec::parse(name);
      const GraphEquivalence ge = graph_equivalent(lat, spec);
      const Region region = Region::make(lat.n_qubits(), lat.loop_support(spec), {ge.hub});
      const OutcomeEnsemble ens =
          measure_ensemble(stabilizer_ground_state(lat), region, canonical_setup(lat, spec));
      for (const auto& e : ens.entries) {
        ASSERT_NEAR(negativity(e.rho, region.a_mask()), 1.0, 1e-9) << lat.describe() << " " << name;
      }
    }
  }
}

TEST(CanonicalSetup, ColorRejectsKitaevOnlyQueries) {
  EXPECT_THROW(canonical_setup(build_color(3, 2), LoopSpec::parse("Lx_h")), InvalidArgument);
}

TEST(MeasurementSetup, ParseAndPrint) {
  const Region region = Region::make(6, {0, 1});
  const MeasurementSetup s = MeasurementSetup::parse("Y:3; Z:4,5; X:rest", region);
  EXPECT_EQ(s.axes[2], Axis::Y);
  EXPECT_EQ(s.axes[3], Axis::Z);
  EXPECT_EQ(s.axes[5], Axis::X);
  EXPECT_EQ(MeasurementSetup::parse(s.to_string(), region), s);
  EXPECT_THROW(MeasurementSetup::parse("Z:1", region), InvalidArgument);     // loop qubit
  EXPECT_THROW(MeasurementSetup::parse("Z:3,4", region), InvalidArgument);  // 5, 6 uncovered
}

TEST(MeasureEnsemble, CompleteAtZeroField) {
  const CodeLattice lat = build_kitaev(2, 2);
  const LoopSpec spec = LoopSpec::parse("Lx_h");
  const Region region = Region::make(8, lat.loop_support(spec));
  const OutcomeEnsemble ens = measure_ensemble(stabilizer_ground_state(lat), region, canonical_setup(lat, spec));
  EXPECT_NEAR(ens.total_probability, 1.0, 1e-10);
  for (const auto& e : ens.entries) {
    EXPECT_NEAR(e.rho.trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(negativity(e.rho, region.a_mask()), 1.0, 1e-10);
  }
}

TEST(MeasureEnsemble, ProductStateGivesNoEntanglement) {
  std::mt19937_64 rng(303);
  const Region region = Region::make(8, {2, 3, 5});
  const StateVector zero = basis_state(8, 0);
  for (int trial = 0; trial < 20; ++trial) {
    MeasurementSetup setup = MeasurementSetup::uniform(region, Axis::X);
    std::uniform_int_distribution<int> axis(1, 3);
    for (auto q : region.omega_bar) setup.axes[q] = static_cast<Axis>(axis(rng));
    EXPECT_NEAR(setup_bound(zero, region, setup).value, 0.0, 1e-12);
  }
}

TEST(MeasureEnsemble, MatchesDenseOracle) {
  std::mt19937_64 rng(304);
  const CodeLattice lat = build_kitaev(2, 2);
  const Hamiltonian h = build_hamiltonian(lat, {0.4});
  const StateVector gs = ground_state(h, {0.4}, lat).vector;
  for (auto name : {"Lx_h", "Lz_h"}) {
    const LoopSpec spec = LoopSpec::parse(name);
    const Region region = Region::make(8, lat.loop_support(spec));
    const MeasurementSetup setup = canonical_setup(lat, spec);
    const OutcomeEnsemble ens = measure_ensemble(gs, region, setup);
    const auto ref = oracle::dense_ensemble(oracle::dense_state(gs), region, setup);
    for (const auto& e : ens.entries) {
      ASSERT_NEAR(e.p, ref[e.k].p, 1e-12);
      ASSERT_LT((e.rho - ref[e.k].rho).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_NEAR(bound_from_ensemble(ens).value, oracle::dense_bound(ref, region.a_mask()), 1e-10);
    const Eigen::MatrixXcd rho = oracle::random_density(8, 2, rng);
    const DensityMatrix dm(SupportBasis::full(8), rho);
    EXPECT_NEAR(setup_bound(QuantumState(dm), region, setup).value,
                oracle::dense_bound(oracle::dense_ensemble(rho, region, setup), region.a_mask()), 1e-10);
  }
}

TEST(PreferredSet, EpsilonArithmetic) {
  OutcomeEnsemble ens;
  ens.region = Region::make(8, {0, 1});
  ens.outcome_space = 64;
  PreferredSet k;
  for (std::uint64_t i = 0; i < 48; ++i) k.outcomes.push_back(i);
  k.p_c = 1e-10;
  ens.restriction = k;
  const BoundValue b = bound_from_ensemble(ens);
  EXPECT_EQ(b.kind, BoundKind::E_double_prime);
  EXPECT_NEAR(b.epsilon_m, 1.6e-9, 1e-22);
}

TEST(PreferredSet, ZeroFieldSupportAndMonotoneThreshold) {
  const CodeLattice lat = build_kitaev(2, 2);
  const LoopSpec spec = LoopSpec::parse("Lz_h");
  const Region region = Region::make(8, lat.loop_support(spec));
  const MeasurementSetup setup = canonical_setup(lat, spec);
  const PreferredSet k0 = build_preferred_set(lat, region, setup, 1e-10, {0.0});
  const auto p = outcome_probabilities(stabilizer_ground_state(lat), region, setup);
  std::vector<std::uint64_t> support;
  for (std::uint64_t k = 0; k < p.size(); ++k) {
    if (p[k] > 1e-12) support.push_back(k);
  }
  EXPECT_EQ(k0.outcomes, support);

  const PreferredSet loose = build_preferred_set(lat, region, setup);
  const PreferredSet tight = build_preferred_set(lat, region, setup, 1e-6);
  for (auto k : tight.outcomes) EXPECT_TRUE(loose.contains(k));
  EXPECT_THROW(build_preferred_set(lat, region, setup, 1e-10, {0.2}), InvalidArgument);
}

TEST(PreferredSet, SecondaryBoundWithinBudget) {
  for (auto [w, h] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const CodeLattice lat = build_kitaev(w, h);
    for (auto name : {"Lx_h", "Lz_h"}) {
      const LoopSpec spec = LoopSpec::parse(name);
      const Region region = Region::make(lat.n_qubits(), lat.loop_support(spec));
      const MeasurementSetup setup = canonical_setup(lat, spec);
      const PreferredSet k = build_preferred_set(lat, region, setup);
      for (double g : {0.1, 0.35, 0.8, 1.6}) {
        const StateVector gs = ground_state(build_hamiltonian(lat, {g}), {g}, lat).vector;
        const BoundValue e1 = setup_bound(gs, region, setup);
        const BoundValue e2 = setup_bound(gs, region, setup, &k);
        EXPECT_LE(e2.value, e1.value + 1e-12);
        EXPECT_LE(e1.value - e2.value, e2.epsilon_m + 1e-12);
        EXPECT_LT(e2.epsilon_m, 1e-6);
      }
    }
  }
}

TEST(Rle, TwoByTwoZeroFieldIsOne) {
  const CodeLattice lat = build_kitaev(2, 2);
  const Region region = Region::make(8, lat.loop_support(LoopSpec::parse("Lx_h")));
  const RleResult r = restricted_le(stabilizer_ground_state(lat), region);
  EXPECT_EQ(r.setups_evaluated, 729u);
  EXPECT_NEAR(r.best.value, 1.0, 1e-10);
}

TEST(Rle, DominatesCanonicalAndRespectsLimit) {
  const CodeLattice lat = build_kitaev(2, 2);
  for (auto name : {"Lx_h", "Lz_h"}) {
    const LoopSpec spec = LoopSpec::parse(name);
    const Region region = Region::make(8, lat.loop_support(spec));
    const StateVector gs = ground_state(build_hamiltonian(lat, {0.5}), {0.5}, lat).vector;
    EXPECT_GE(restricted_le(gs, region).best.value + 1e-12, setup_bound(gs, region, canonical_setup(lat, spec)).value);
    RleOptions tight;
    tight.max_measured = 5;
    EXPECT_THROW(restricted_le(gs, region, tight), LimitExceeded);
  }
}

TEST(Le, ProductStateIsZero) {
  const Region region = Region::make(5, {0, 1});
  LeOptions o;
  o.random_starts = 4;
  EXPECT_NEAR(localizable_entanglement(basis_state(5, 0b10110), region, o).best.value, 0.0, 1e-12);
}

TEST(Le, GeneralBasisMatchesDenseOracle) {
  std::mt19937_64 rng(305);
  std::uniform_real_distribution<double> angle(0.0, 3.14159);
  const Region region = Region::make(6, {1, 4});
  for (int trial = 0; trial < 30; ++trial) {
    const StateVector psi = oracle::random_state(6, rng);
    std::vector<QubitBasis> b(region.omega_bar.size());
    for (auto& x : b) x = {angle(rng), 2.0 * angle(rng)};
    EXPECT_NEAR(general_setup_bound(psi, region, b),
                oracle::dense_bound(oracle::dense_ensemble(oracle::dense_state(psi), region, b), region.a_mask()),
                1e-10);
  }
}

TEST(Le, PauliAnglesReproduceSetups) {
  std::mt19937_64 rng(306);
  const Region region = Region::make(5, {0, 2});
  const StateVector psi = oracle::random_state(5, rng);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
    const MeasurementSetup s = MeasurementSetup::uniform(region, a);
    std::vector<QubitBasis> b(region.omega_bar.size(), QubitBasis::from_axis(a));
    EXPECT_NEAR(general_setup_bound(psi, region, b), setup_bound(psi, region, s).value, 1e-10);
  }
}

TEST(Le, AtLeastRle) {
  const CodeLattice lat = build_kitaev(2, 2);
  const Region region = Region::make(8, lat.loop_support(LoopSpec::parse("Lz_h")));
  const StateVector gs = ground_state(build_hamiltonian(lat, {0.5}), {0.5}, lat).vector;
  const RleResult rle = restricted_le(gs, region);
  LeOptions o;
  o.random_starts = 8;
  const LeResult le = localizable_entanglement(gs, region, o, &rle);
  EXPECT_GE(le.best.value, rle.best.value - 1e-12);
}

TEST(Region, Invariants) {
  const Region r = Region::make(6, {4, 1}, {1});
  EXPECT_EQ(r.omega_bar, (std::vector<std::size_t>{0, 2, 3, 5}));
  EXPECT_THROW(Region::make(6, {1, 2}, {3}), InvalidArgument);     // A outside Omega
  EXPECT_THROW(Region::make(6, {1, 2}, {1, 2}), InvalidArgument);  // B empty
  EXPECT_THROW(Region::make(6, {1, 1}), InvalidArgument);
  EXPECT_EQ(bipartitions_of_size(Region::make(6, {0, 1, 2, 3}), 2).size(), 6u);
}

}  // namespace
}  // namespace topoloc
