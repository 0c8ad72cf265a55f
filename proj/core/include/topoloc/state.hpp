#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "topoloc/pauli.hpp"

namespace topoloc {

/// Sorted set of computational-basis indices. States and operators that
/// never leave this set are stored on it instead of the full 2^N space.
class SupportBasis {
 public:
  SupportBasis() = default;

  static SupportBasis full(std::size_t n_qubits, std::size_t max_qubits = kDefaultMaxDenseQubits);
  /// Smallest set containing every seed and closed under XOR with every mask:
  /// the union of cosets seed + span(masks).
  static SupportBasis closure(std::size_t n_qubits, std::span<const std::uint64_t> seeds,
                              std::span<const std::uint64_t> masks, std::size_t max_size);
  /// Indices where |amplitude| exceeds tol.
  static std::vector<std::uint64_t> support_of(std::span<const Complex> v, double tol = 0.0);

  std::size_t n_qubits() const { return n_; }
  std::size_t size() const { return states_.size(); }
  std::uint64_t state(std::size_t i) const { return states_[i]; }
  const std::vector<std::uint64_t>& states() const { return states_; }
  std::optional<std::size_t> find(std::uint64_t b) const;
  std::size_t index_of(std::uint64_t b) const;  // throws when absent

  /// Scatter a compact vector back to 2^N entries.
  StateVector expand(std::span<const Complex> compact) const;
  /// Gather the entries of a full vector; throws if mass lies outside.
  StateVector restrict(std::span<const Complex> full, double tol = 1e-12) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> states_;
  bool contiguous_ = false;  // states_[i] == i
};

/// Density matrix whose nonzero entries lie in basis x basis.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(SupportBasis basis, Eigen::MatrixXcd rho);

  static DensityMatrix from_pure(std::span<const Complex> psi, SupportBasis basis);
  /// I / 2^N on the full space.
  static DensityMatrix maximally_mixed(std::size_t n_qubits, std::size_t max_qubits = 12);

  std::size_t n_qubits() const { return basis_.n_qubits(); }
  const SupportBasis& basis() const { return basis_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Eigen::MatrixXcd& matrix() { return rho_; }

  double trace() const;
  double purity() const;
  /// max |rho - rho^dagger| entrywise.
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Zeroes entries with magnitude below eps; returns how many were dropped.
  std::size_t threshold(double eps);
  void normalize_trace();

  Complex expectation(const PauliString& p) const;
  /// Full 2^N x 2^N matrix; for oracles.
  Eigen::MatrixXcd to_dense(std::size_t max_qubits = 12) const;

 private:
  SupportBasis basis_;
  Eigen::MatrixXcd rho_;
};

using QuantumState = std::variant<StateVector, DensityMatrix>;

std::size_t state_qubits(const QuantumState& s);
std::size_t qubits_of_length(std::size_t length);
double norm(std::span<const Complex> v);

}  // namespace topoloc
