#pragma once

#include <Eigen/Dense>
#include <random>
#include <utility>
#include <vector>

#include "topoloc/localize.hpp"
#include "topoloc/pauli.hpp"
#include "topoloc/state.hpp"
#include "topoloc/witness.hpp"

namespace topoloc::oracle {

/// Dense reference paths. Exponential in N and meant for N <= 12; every
/// function builds full 2^N matrices and shares no code with the fast paths.

Eigen::MatrixXcd dense_pauli(const PauliString& p, std::size_t max_qubits = 12);
Eigen::MatrixXcd dense_state(const QuantumState& s, std::size_t max_qubits = 12);

/// Tr_{Omega-bar} of a full density matrix; bit t of the result index is omega[t].
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, const Region& region);

struct DenseOutcome {
  double p = 0.0;
  Eigen::MatrixXcd rho;  // normalized; empty when p == 0
};

/// Every outcome k of the setup: Pi_k = prod_q (I + (-1)^{k_q} sigma_q) / 2.
std::vector<DenseOutcome> dense_ensemble(const Eigen::MatrixXcd& rho, const Region& region,
                                         const MeasurementSetup& setup);
/// Outcomes restricted to a general product basis (rows of U per measured qubit).
std::vector<DenseOutcome> dense_ensemble(const Eigen::MatrixXcd& rho, const Region& region,
                                         std::span<const QubitBasis> angles);

double dense_bound(const std::vector<DenseOutcome>& ens, std::uint64_t a_mask, bool normalized = false);

/// Tr[rho W] with W = I/2 - prod_j (I + s_j)/2 built from dense Pauli matrices.
double dense_witness(const Eigen::MatrixXcd& rho, const WitnessOperator& w);
Eigen::MatrixXcd dense_witness_operator(const WitnessOperator& w);
double dense_witness(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op);

StateVector random_state(std::size_t n_qubits, std::mt19937_64& rng);
/// Random mixed state of the given rank on the full space.
Eigen::MatrixXcd random_density(std::size_t n_qubits, std::size_t rank, std::mt19937_64& rng);

}  // namespace topoloc::oracle
