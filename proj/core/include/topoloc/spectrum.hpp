#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "topoloc/codes.hpp"
#include "topoloc/pauli.hpp"
#include "topoloc/state.hpp"

namespace topoloc {

struct FieldParams {
  double g = 0.0;  // h / J with J = 1
};

/// Field-perturbed code Hamiltonian as a Pauli sum. Kitaev:
///   H = -sum_p S_p - sum_v S_v - g sum_i Z_i
/// Color:
///   H = -sum_p (S^x_p + S^z_p) - g sum_i X_i
class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(PauliSum terms);

  std::size_t n_qubits() const { return terms_.n_qubits(); }
  const PauliSum& terms() const { return terms_; }
  /// Distinct nonzero X masks of the off-diagonal terms.
  const std::vector<std::uint64_t>& flip_masks() const { return flip_masks_; }

  /// Matrix-free product on the full 2^N space.
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  SparseOperator to_sparse(std::size_t max_qubits = kDefaultMaxDenseQubits) const;
  Eigen::MatrixXd to_dense(std::size_t max_qubits = 12) const;

 private:
  PauliSum terms_;
  std::vector<std::uint64_t> flip_masks_;
};

Hamiltonian build_hamiltonian(const CodeLattice& lat, FieldParams params);

/// A real Hamiltonian restricted to a support basis it leaves invariant.
/// Row i couples to target[i] of every flip group with weight value[i].
class SectorHamiltonian {
 public:
  struct Flip {
    std::vector<std::uint32_t> target;
    std::vector<double> value;
  };

  SectorHamiltonian(const Hamiltonian& h, SupportBasis basis);

  const SupportBasis& basis() const { return basis_; }
  std::size_t dimension() const { return basis_.size(); }
  const std::vector<double>& diagonal() const { return diag_; }
  const std::vector<Flip>& flips() const { return flips_; }

  void apply(std::span<const double> in, std::span<double> out) const;
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  Eigen::MatrixXd to_dense() const;

 private:
  SupportBasis basis_;
  std::vector<double> diag_;
  std::vector<Flip> flips_;
};

struct SolverOptions {
  std::size_t krylov_dimension = 60;
  std::size_t max_restarts = 200;
  double residual_tolerance = 1e-9;
  double gap_tolerance = 1e-10;
  std::size_t max_sector_dimension = std::size_t{1} << 20;
  std::size_t max_qubits = kDefaultMaxDenseQubits;
};

struct GroundStateResult {
  double energy = 0.0;
  StateVector vector;  // full 2^N amplitudes, real up to a global sign
  double residual = 0.0;
  bool degenerate = false;
  double gap = 0.0;  // estimate of E_1 - E_0 inside the sector; 0 when degenerate
  std::size_t iterations = 0;
  std::size_t sector_dimension = 0;
};

/// Lowest eigenvector. g = 0 returns the stabilizer construction with
/// degenerate = true. For g > 0 Lanczos with full reorthogonalization runs
/// inside the sector spanned by the g -> 0+ state and the off-diagonal
/// flips of H; the Hamiltonian conserves that sector.
GroundStateResult ground_state(const Hamiltonian& h, FieldParams params, const CodeLattice& lat,
                               const SolverOptions& options = {});

/// Lanczos on an arbitrary sector operator from a given start vector.
GroundStateResult lanczos_ground_state(const SectorHamiltonian& h, std::span<const double> start,
                                       const SolverOptions& options = {});

/// All eigenvalues of the full Hamiltonian, ascending. Oracle for N <= 12.
Eigen::VectorXd dense_spectrum(const Hamiltonian& h, std::size_t max_qubits = 12);

}  // namespace topoloc
