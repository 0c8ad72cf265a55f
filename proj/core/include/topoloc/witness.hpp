#pragma once

#include <string>
#include <vector>

#include "topoloc/codes.hpp"
#include "topoloc/localize.hpp"
#include "topoloc/state.hpp"

namespace topoloc {

/// Result of checking the two membership conditions for a generator set.
struct WitnessCheck {
  bool a_ok = false;  // Omega-bar factors commute qubit-wise
  bool b_ok = false;  // Omega factors: |Omega| independent commuting generators of a GME state
  std::string failure;
  bool ok() const { return a_ok && b_ok; }
};

WitnessCheck check_witness_conditions(const Region& region, const std::vector<PauliString>& generators);

/// W = I/2 - prod_j (I + s_j)/2 for a loop region.
class WitnessOperator {
 public:
  /// Checks both conditions and throws InvariantViolation naming the failed one.
  WitnessOperator(Region region, std::vector<PauliString> generators, std::vector<std::string> labels = {});

  const Region& region() const { return region_; }
  const std::vector<PauliString>& generators() const { return generators_; }
  /// Stabilizer-product labels such as "V7V8V9" when known.
  const std::vector<std::string>& labels() const { return labels_; }
  /// The loop qubit shared by s_2..s_m; the hub of the star over Omega.
  std::size_t hub() const { return hub_; }

  /// Signed subset products prod_{j in S} s_j for every S, indexed by the bitmask S.
  const std::vector<PauliString>& subset_products() const { return products_; }
  /// Expansion of W into 2^m Pauli terms (identity included).
  PauliSum expanded() const;
  SparseOperator assemble(std::size_t max_qubits = kDefaultMaxDenseQubits) const;

 private:
  Region region_;
  std::vector<PauliString> generators_;
  std::vector<std::string> labels_;
  std::vector<PauliString> products_;
  std::size_t hub_ = 0;
};

/// Product of stabilizers written as concatenated labels, e.g. "P5P6" or "V7V8V9".
PauliString stabilizer_product(const CodeLattice& lat, std::string_view labels);

/// Kitaev witness for L^x_h or L^z_h. L^x_h: s_1 is the vertex row just
/// past the loop; s_2..s_m are suffix products of the plaquettes the loop
/// crosses, starting from the second column. L^z_h is the dual with
/// plaquettes and vertices exchanged.
WitnessOperator build_witness(const CodeLattice& lat, const LoopSpec& spec);

struct WitnessValue {
  double w = 0.0;
  double bound = 0.0;  // max(-2w, 0)
};

WitnessValue witness_bound(double w);
/// Matrix-free Tr[W rho] via the subset-product expansion.
WitnessValue witness_expectation(const QuantumState& state, const WitnessOperator& w);

struct DecompositionReport {
  double w = 0.0;
  double reconstructed = 0.0;  // sum_k p_k Tr[rho^k W^k]
  double residual = 0.0;
};

/// Compares w with its per-outcome decomposition under a setup that measures
/// every Omega-bar factor of every s_j along its own axis. Signs eta_j come
/// from the outcome bits, never from floating point.
DecompositionReport verify_decomposition(const QuantumState& state, const WitnessOperator& w,
                                         const MeasurementSetup& setup);

struct StarPtReport {
  std::size_t n_omega = 0;
  std::vector<std::size_t> z_indices;     // the four Z_l of the closed form
  double formula_error = 0.0;             // closed form vs dense partial transpose
  std::vector<double> d_singular_values;  // distinct values, ascending
  double d_norm = 0.0;
  double tightness_error = 0.0;  // max |N(rho_F) - (-2w)| over the test family
  double bound_violation = 0.0;  // max (-2w - N(rho)) over random states, clipped at 0
  double hub_negativity = 0.0;
  bool passed = false;
};

/// Star-graph checks with the hub as part A: closed-form partial transpose,
/// norm and singular values of D = (h - f/2) I + f rho^{T_A} at (f, h) = (2, 1),
/// tightness of E = -2w, and hub:rest negativity 1.
StarPtReport verify_star_pt_bound(std::size_t n_omega, std::uint64_t seed = 0);

}  // namespace topoloc
