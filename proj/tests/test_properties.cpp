#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gen.hpp"
#include "topoloc/codes.hpp"
#include "topoloc/localize.hpp"
#include "topoloc/qpt.hpp"
#include "topoloc/spectrum.hpp"
#include "topoloc/witness.hpp"

namespace topoloc {
namespace {

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

std::uint64_t random_mask(std::size_t bits, std::mt19937_64& rng) {
  // Proper non-empty subset so both sides of the cut exist.
  std::uniform_int_distribution<std::uint64_t> d(1, (std::uint64_t{1} << bits) - 2);
  return d(rng);
}

Region random_region(std::size_t n, std::size_t omega_size, std::mt19937_64& rng) {
  const auto omega = test::random_subset(n, omega_size, rng);
  std::uniform_int_distribution<std::size_t> pick(0, omega_size - 1);
  return Region::make(n, omega, {omega[pick(rng)]});
}

MeasurementSetup random_setup(const Region& region, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> axis(1, 3);
  MeasurementSetup s = MeasurementSetup::uniform(region, Axis::Z);
  for (std::size_t q : region.omega_bar) s.axes[q] = static_cast<Axis>(axis(rng));
  return s;
}

TEST(NegativityProperty, PartialTransposeIsInvolutiveAndTracePreserving) {
  std::mt19937_64 rng(601);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const Eigen::MatrixXcd rho = oracle::random_density(n, 1 + trial % 4, rng);
    const std::uint64_t mask = random_mask(n, rng);
    const Eigen::MatrixXcd pt = partial_transpose(rho, mask);
    ASSERT_NEAR(std::abs(pt.trace() - rho.trace()), 0.0, 1e-12);
    ASSERT_LT((partial_transpose(pt, mask) - rho).cwiseAbs().maxCoeff(), 1e-14);
    ASSERT_LT((pt - pt.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    ASSERT_GE(negativity(rho, mask), -1e-12);
  }
}

TEST(NegativityProperty, InvariantUnderLocalPauliConjugation) {
  std::mt19937_64 rng(602);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const Eigen::MatrixXcd rho = oracle::random_density(n, 2, rng);
    const Eigen::MatrixXcd u = test::dense_of(test::random_pauli(n, rng));
    const std::uint64_t mask = random_mask(n, rng);
    ASSERT_NEAR(negativity(u * rho * u.adjoint(), mask), negativity(rho, mask), 1e-10);
  }
}

TEST(NegativityProperty, PureMatchesDenseAndIsSymmetric) {
  std::mt19937_64 rng(603);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const StateVector psi = oracle::random_state(n, rng);
    const std::uint64_t mask = random_mask(n, rng);
    const std::uint64_t complement = ((std::uint64_t{1} << n) - 1) ^ mask;
    const Eigen::MatrixXcd rho = oracle::dense_state(psi);
    for (bool normalized : {false, true}) {
      const double fast = pure_negativity(psi, mask, normalized);
      ASSERT_NEAR(fast, negativity(rho, mask, normalized), 1e-10);
      ASSERT_NEAR(fast, pure_negativity(psi, complement, normalized), 1e-10);
    }
  }
}

TEST(EnsembleProperty, ProbabilitiesSumToOneAndBoundMatchesOracle) {
  std::mt19937_64 rng(604);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + trial % 3;
    const Region region = random_region(n, 2 + trial % 2, rng);
    const MeasurementSetup setup = random_setup(region, rng);
    const StateVector psi = oracle::random_state(n, rng);
    const auto probs = outcome_probabilities(psi, region, setup);
    ASSERT_EQ(probs.size(), std::size_t{1} << region.omega_bar.size());
    ASSERT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-12);
    const double fast = setup_bound(psi, region, setup).value;
    const auto ens = oracle::dense_ensemble(oracle::dense_state(psi), region, setup);
    ASSERT_NEAR(fast, oracle::dense_bound(ens, region.a_mask()), 1e-10);
    ASSERT_GE(fast, -1e-12);
  }
}

TEST(EnsembleProperty, MixedStatesMatchOracle) {
  std::mt19937_64 rng(605);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4;
    const Region region = random_region(n, 2, rng);
    const MeasurementSetup setup = random_setup(region, rng);
    const Eigen::MatrixXcd rho = oracle::random_density(n, 3, rng);
    const DensityMatrix dm(SupportBasis::full(n), rho);
    const double fast = setup_bound(dm, region, setup).value;
    ASSERT_NEAR(fast, oracle::dense_bound(oracle::dense_ensemble(rho, region, setup), region.a_mask()), 1e-10);
  }
}

TEST(WitnessProperty, LowerBoundsCanonicalSetupOnRandomStates) {
  std::mt19937_64 rng(606);
  const CodeLattice lat = build_kitaev(2, 2);
  for (auto name : {"Lx_h", "Lz_h"}) {
    const LoopSpec spec = LoopSpec::parse(name);
    const WitnessOperator w = build_witness(lat, spec);
    const MeasurementSetup setup = canonical_setup(lat, spec);
    for (int trial = 0; trial < 25; ++trial) {
      // Mix the code state with noise so the witness value spans its range.
      const StateVector noise = oracle::random_state(lat.n_qubits(), rng);
      StateVector psi = stabilizer_ground_state(lat);
      const double a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::sqrt(1 - a) * psi[i] + std::sqrt(a) * noise[i];
      const double nrm = norm(psi);
      for (auto& x : psi) x /= nrm;
      const double e = setup_bound(psi, w.region(), setup).value;
      ASSERT_LE(witness_expectation(psi, w).bound, e + 1e-9) << name << " trial " << trial;
      ASSERT_LT(verify_decomposition(psi, w, setup).residual, 1e-10);
    }
  }
}

TEST(GraphProperty, GeneratorsStabilizeGraphState) {
  std::mt19937_64 rng(607);
  std::bernoulli_distribution edge(0.4);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g;
    g.n = 2 + trial % 6;
    g.adjacency.assign(g.n, {});
    for (std::size_t a = 0; a < g.n; ++a) {
      for (std::size_t b = a + 1; b < g.n; ++b) {
        if (edge(rng)) {
          g.adjacency[a].push_back(b);
          g.adjacency[b].push_back(a);
        }
      }
    }
    for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
    const StateVector psi = graph_state(g);
    ASSERT_NEAR(norm(psi), 1.0, 1e-12);
    for (const PauliString& s : graph_generators(g)) {
      const StateVector out = apply_pauli(s, psi);
      ASSERT_NEAR(inner(psi, out).real(), 1.0, 1e-12);
    }
  }
}

TEST(HamiltonianProperty, ApplyIsHermitian) {
  std::mt19937_64 rng(608);
  std::uniform_real_distribution<double> field(0.0, 2.0);
  for (const CodeLattice& lat : {build_kitaev(2, 2), build_kitaev(3, 2), build_color(3, 2)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Hamiltonian h = build_hamiltonian(lat, {field(rng)});
      const StateVector u = oracle::random_state(lat.n_qubits(), rng), v = oracle::random_state(lat.n_qubits(), rng);
      StateVector hu(u.size()), hv(v.size());
      h.apply(u, hu);
      h.apply(v, hv);
      ASSERT_LT(std::abs(inner(u, hv) - inner(hu, v)), 1e-11);
    }
  }
}

TEST(ScalingProperty, RandomPowerLawsRoundTrip) {
  std::mt19937_64 rng(609);
  std::uniform_real_distribution<double> amp(0.1, 2.0), expo(0.2, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = amp(rng), nu = expo(rng), g_c = 0.3 + 0.1 * trial / 50.0;
    std::vector<std::pair<double, double>> pts;
    for (double n : {8.0, 12.0, 16.0, 18.0, 20.0}) pts.emplace_back(n, g_c + a * std::pow(n, -nu));
    const ScalingFit fit = fit_scaling(pts, g_c);
    ASSERT_NEAR(fit.amplitude, a, 1e-9 * a);
    ASSERT_NEAR(fit.exponent, nu, 1e-9);
  }
}

TEST(PeakProperty, AffineInvariance) {
  std::mt19937_64 rng(610);
  std::uniform_real_distribution<double> centre(0.3, 0.7), scale(0.2, 5.0), shift(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double c = centre(rng);
    std::vector<double> g, e, t;
    for (int i = 0; i <= 200; ++i) {
      g.push_back(0.005 * i);
      e.push_back(std::tanh((g.back() - c) / 0.07));
    }
    const double a = scale(rng) * (trial % 2 ? -1.0 : 1.0), b = shift(rng);
    for (double v : e) t.push_back(a * v + b);
    ASSERT_NEAR(derivative_peak(g, t).g_m, derivative_peak(g, e).g_m, 1e-10);
    ASSERT_NEAR(derivative_peak(g, e).g_m, c, 3e-3);
  }
}

}  // namespace
}  // namespace topoloc
