#include <gtest/gtest.h>

#include "gen.hpp"
#include "topoloc/error.hpp"
#include "topoloc/oracle.hpp"
#include "topoloc/qpt.hpp"
#include "topoloc/witness.hpp"

namespace topoloc {
namespace {

struct TableRow {
  std::size_t n;
  const char* loop;
  std::vector<std::string> generators;
};

const std::vector<TableRow>& table_one() {
  static const std::vector<TableRow> rows = {
      {8, "Lx_h", {"V3V4", "P2"}},
      {12, "Lx_h", {"V4V5V6", "P2P3", "P3"}},
      {16, "Lx_h", {"V5V6V7V8", "P2P3P4", "P3P4", "P4"}},
      {18, "Lx_h", {"V7V8V9", "P5P6", "P6"}},
      {20, "Lx_h", {"V6V7V8V9V10", "P2P3P4P5", "P3P4P5", "P4P5", "P5"}},
      {8, "Lz_h", {"P1P2", "V4"}},
      {12, "Lz_h", {"P1P2P3", "V5V6", "V6"}},
      {16, "Lz_h", {"P1P2P3P4", "V6V7V8", "V7V8", "V8"}},
      {18, "Lz_h", {"P4P5P6", "V8V9", "V9"}},
      {20, "Lz_h", {"P1P2P3P4P5", "V7V8V9V10", "V8V9V10", "V9V10", "V10"}},
  };
  return rows;
}

TEST(BuildWitness, MatchesTableOne) {
  for (const auto& row : table_one()) {
    const CodeLattice lat = kitaev_lattice_for(row.n);
    const LoopSpec spec = LoopSpec::parse(row.loop);
    const WitnessOperator w = build_witness(lat, spec);
    EXPECT_EQ(w.labels(), row.generators) << "N=" << row.n << " " << row.loop;
    EXPECT_EQ(w.generators().size(), lat.loop_support(spec).size());
    for (std::size_t j = 0; j < row.generators.size(); ++j) {
      EXPECT_EQ(w.generators()[j], stabilizer_product(lat, row.generators[j]));
    }
  }
}

TEST(BuildWitness, GeneralRuleBeyondTable) {
  for (auto [a, b] : {std::pair{2, 3}, std::pair{2, 4}, std::pair{2, 5}}) {
    const CodeLattice lat = build_kitaev(a, b);
    for (auto name : {"Lx_h", "Lz_h"}) {
      const WitnessOperator w = build_witness(lat, LoopSpec::parse(name));
      EXPECT_TRUE(check_witness_conditions(w.region(), w.generators()).ok());
      const WitnessValue v = witness_expectation(stabilizer_ground_state(lat), w);
      EXPECT_NEAR(v.w, -0.5, 1e-10);
    }
  }
}

TEST(WitnessConditions, DependentGeneratorFailsConditionB) {
  const CodeLattice lat = build_kitaev(2, 2);
  const LoopSpec spec = LoopSpec::parse("Lx_h");
  const WitnessOperator good = build_witness(lat, spec);
  std::vector<PauliString> gens = good.generators();
  gens[1] = gens[0];
  const WitnessCheck c = check_witness_conditions(good.region(), gens);
  EXPECT_TRUE(c.a_ok);
  EXPECT_FALSE(c.b_ok);
  try {
    WitnessOperator bad(good.region(), gens);
    FAIL() << "dependent generators accepted";
  } catch (const InvariantViolation& e) {
    EXPECT_NE(std::string(e.what()).find("condition (b)"), std::string::npos);
  }
}

TEST(WitnessConditions, MixedAxesOffLoopFailConditionA) {
  const Region region = Region::make(3, {0, 1});
  const std::vector<PauliString> gens = {PauliString::parse("X1 Z2 X3", 3), PauliString::parse("Z1 X2 Z3", 3)};
  const WitnessCheck c = check_witness_conditions(region, gens);
  EXPECT_FALSE(c.a_ok);
}

TEST(WitnessValue, PiecewiseBound) {
  EXPECT_DOUBLE_EQ(witness_bound(0.3).bound, 0.0);
  EXPECT_DOUBLE_EQ(witness_bound(0.0).bound, 0.0);
  EXPECT_DOUBLE_EQ(witness_bound(-0.5).bound, 1.0);
  EXPECT_DOUBLE_EQ(witness_bound(-0.2).bound, 0.4);
}

TEST(WitnessValue, ZeroFieldTableWitnessesGiveOne) {
  for (const auto& row : table_one()) {
    if (row.n > 18) continue;
    const CodeLattice lat = kitaev_lattice_for(row.n);
    const WitnessValue v = witness_expectation(stabilizer_ground_state(lat), build_witness(lat, LoopSpec::parse(row.loop)));
    EXPECT_NEAR(v.w, -0.5, 1e-10);
    EXPECT_NEAR(v.bound, 1.0, 1e-10);
  }
}

TEST(WitnessValue, MatrixFreeMatchesDense) {
  std::mt19937_64 rng(401);
  const CodeLattice lat = build_kitaev(2, 2);
  for (auto name : {"Lx_h", "Lz_h"}) {
    const WitnessOperator w = build_witness(lat, LoopSpec::parse(name));
    const Eigen::MatrixXcd op = oracle::dense_witness_operator(w);
    const SparseOperator assembled = w.assemble();
    for (int i = 0; i < 20; ++i) {
      const StateVector psi = oracle::random_state(8, rng);
      EXPECT_NEAR(witness_expectation(psi, w).w, oracle::dense_witness(oracle::dense_state(psi), op), 1e-10);
      StateVector out(psi.size());
      assembled.multiply(psi, out);
      Complex e = 0.0;
      for (std::size_t k = 0; k < psi.size(); ++k) e += std::conj(psi[k]) * out[k];
      EXPECT_NEAR(e.real(), witness_expectation(psi, w).w, 1e-10);
    }
  }
}

TEST(WitnessValue, BelowCanonicalBound) {
  for (auto [a, b] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const CodeLattice lat = build_kitaev(a, b);
    for (auto name : {"Lx_h", "Lz_h"}) {
      const LoopSpec spec = LoopSpec::parse(name);
      const WitnessOperator w = build_witness(lat, spec);
      for (double g : {0.1, 0.3, 0.6, 1.2}) {
        const StateVector gs = ground_state(build_hamiltonian(lat, {g}), {g}, lat).vector;
        const double e = setup_bound(gs, w.region(), canonical_setup(lat, spec)).value;
        EXPECT_LE(witness_expectation(gs, w).bound, e + 1e-9) << name << " g=" << g;
      }
    }
  }
}

TEST(Decomposition, PureAndMixedResiduals) {
  const CodeLattice lat = build_kitaev(2, 2);
  for (auto name : {"Lx_h", "Lz_h"}) {
    const LoopSpec spec = LoopSpec::parse(name);
    const WitnessOperator w = build_witness(lat, spec);
    const MeasurementSetup setup = canonical_setup(lat, spec);
    EXPECT_LT(verify_decomposition(stabilizer_ground_state(lat), w, setup).residual, 1e-12);
    const StateVector gs = ground_state(build_hamiltonian(lat, {0.5}), {0.5}, lat).vector;
    EXPECT_LT(verify_decomposition(gs, w, setup).residual, 1e-9);
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(8);
    const DecompositionReport r = verify_decomposition(mixed, w, setup);
    EXPECT_LT(r.residual, 1e-12);
    // Tr[W] / 2^N: only the identity term survives.
    EXPECT_NEAR(r.w, 0.5 - std::pow(0.5, static_cast<double>(w.generators().size())), 1e-12);
  }
}

TEST(StarGraph, ClosedFormIndices) {
  const StarPtReport r = verify_star_pt_bound(3);
  EXPECT_EQ(r.z_indices, (std::vector<std::size_t>{0, 4, 3, 7}));
  EXPECT_TRUE(r.passed);
}

TEST(StarGraph, AllSizesPass) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const StarPtReport r = verify_star_pt_bound(n, 7);
    EXPECT_TRUE(r.passed) << "n=" << n;
    EXPECT_NEAR(r.d_norm, 1.0, 1e-12);
    EXPECT_NEAR(r.hub_negativity, 1.0, 1e-10);
    EXPECT_LT(r.bound_violation, 1e-10);
  }
  EXPECT_THROW(verify_star_pt_bound(1), InvalidArgument);
  EXPECT_THROW(verify_star_pt_bound(7), InvalidArgument);
}

TEST(StarGraph, SingularValueSet) {
  // (f, h) = (2, 1): {|h|, |h - f|, |h - f/2|} = {1, 1, 0} -> {0, 1}.
  EXPECT_EQ(verify_star_pt_bound(4).d_singular_values.size(), 2u);
}

}  // namespace
}  // namespace topoloc
