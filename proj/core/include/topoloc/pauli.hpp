#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topoloc {

using Complex = std::complex<double>;
using StateVector = std::vector<Complex>;

/// Hard limit of the bitmask representation.
inline constexpr std::size_t kMaxPauliQubits = 64;
/// Default cap for anything that materializes 2^N-sized objects.
inline constexpr std::size_t kDefaultMaxDenseQubits = 20;

enum class Axis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char axis_char(Axis a);
Axis axis_from_char(char c);

/// Exact power of i. Phases never go through floating point.
class Phase {
 public:
  constexpr Phase() = default;
  static constexpr Phase i_pow(int k) { return Phase(((k % 4) + 4) % 4); }
  static constexpr Phase one() { return Phase(0); }
  static constexpr Phase minus_one() { return Phase(2); }
  static constexpr Phase i() { return Phase(1); }
  static constexpr Phase minus_i() { return Phase(3); }

  constexpr int power() const { return k_; }
  constexpr bool is_real() const { return (k_ & 1) == 0; }
  Complex value() const;
  std::string to_string() const;

  constexpr Phase operator*(Phase o) const { return i_pow(k_ + o.k_); }
  constexpr bool operator==(const Phase&) const = default;

 private:
  constexpr explicit Phase(int k) : k_(k) {}
  int k_ = 0;
};

/// Signed tensor product of single-qubit Pauli factors.
///
/// Stored in symplectic form: bit q of x_mask is set for X or Y on qubit q,
/// bit q of z_mask for Z or Y. The operator is
///   sign * prod_q sigma_q
/// with Y the ordinary Pauli-Y matrix, so Y = i X Z on a single qubit.
///
/// Qubit q corresponds to bit q of a computational-basis index.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n_qubits);

  static PauliString from_factors(std::size_t n_qubits,
                                  std::initializer_list<std::pair<std::size_t, Axis>> factors,
                                  int sign = +1);
  /// Same axis on every listed qubit.
  static PauliString uniform(std::size_t n_qubits, Axis axis, std::span<const std::size_t> support,
                             int sign = +1);
  /// Parses the text form, e.g. "+X1 Z4 Z7" (1-based labels). A bare "+" or
  /// "+I" is the identity.
  static PauliString parse(std::string_view text, std::size_t n_qubits);

  std::size_t n_qubits() const { return n_; }
  int sign() const { return sign_; }
  void set_sign(int s);
  Axis at(std::size_t q) const;
  void set(std::size_t q, Axis a);

  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  std::size_t y_count() const;
  std::size_t weight() const;
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  std::vector<std::size_t> support() const;

  /// Factors on `qubits` only; the sign is kept.
  PauliString restricted(std::span<const std::size_t> qubits) const;
  /// Factors outside `qubits`; sign reset to +1.
  PauliString without(std::span<const std::size_t> qubits) const;

  /// Text form with 1-based qubit labels.
  std::string to_string() const;

  /// Amplitude of P|b> on |b ^ x_mask>, i.e. P|b> = amplitude(b) |b ^ x_mask>.
  Complex amplitude(std::uint64_t basis_index) const;

  bool operator==(const PauliString&) const = default;

 private:
  std::size_t n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int sign_ = +1;
};

/// a * b = phase * value. value carries sign(a) * sign(b); phase collects the
/// powers of i from single-qubit multiplication.
struct PauliProduct {
  PauliString value;
  Phase phase;
};

PauliProduct pauli_product(const PauliString& a, const PauliString& b);
std::size_t anticommuting_sites(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

/// out = P in, matrix-free. in and out must not alias.
void apply_pauli(const PauliString& p, std::span<const Complex> in, std::span<Complex> out);
StateVector apply_pauli(const PauliString& p, std::span<const Complex> in);
/// <v|P|v>.
Complex pauli_expectation(const PauliString& p, std::span<const Complex> v);

/// Compressed-sparse-row operator on a 2^N dimensional space.
class SparseOperator {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    Complex value;
  };

  SparseOperator() = default;
  /// Duplicate (row, col) pairs are summed; exact zeros are dropped.
  static SparseOperator from_triplets(std::size_t dimension, std::vector<Triplet> triplets);

  std::size_t dimension() const { return dim_; }
  std::size_t nonzeros() const { return values_.size(); }
  bool hermitian() const { return hermitian_; }
  bool real() const { return real_; }

  Complex at(std::size_t row, std::size_t col) const;
  void multiply(std::span<const Complex> in, std::span<Complex> out) const;
  /// Requires real().
  void multiply_real(std::span<const double> in, std::span<double> out) const;

  const std::vector<std::size_t>& row_offsets() const { return row_ptr_; }
  const std::vector<std::size_t>& columns() const { return cols_; }
  const std::vector<Complex>& values() const { return values_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<Complex> values_;
  std::vector<double> real_values_;
  bool hermitian_ = false;
  bool real_ = false;
};

SparseOperator to_sparse(const PauliString& p, std::size_t max_qubits = kDefaultMaxDenseQubits);

/// Real linear combination of Pauli strings. Carrier for Hamiltonians and
/// witnesses; application is matrix-free.
class PauliSum {
 public:
  struct Term {
    double coefficient;
    PauliString op;
  };

  PauliSum() = default;
  explicit PauliSum(std::size_t n_qubits) : n_(n_qubits) {}

  void add(double coefficient, PauliString op);
  std::size_t n_qubits() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// True when every term is a real matrix (even number of Y factors).
  bool is_real() const;

  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  /// Requires is_real().
  void apply_real(std::span<const double> in, std::span<double> out) const;
  Complex expectation(std::span<const Complex> v) const;

  SparseOperator to_sparse(std::size_t max_qubits = kDefaultMaxDenseQubits) const;

 private:
  std::size_t n_ = 0;
  std::vector<Term> terms_;
};

/// Throws LimitExceeded when 2^n would exceed the configured cap.
std::size_t checked_dimension(std::size_t n_qubits, std::size_t max_qubits = kDefaultMaxDenseQubits);

}  // namespace topoloc
