#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topoloc/codes.hpp"
#include "topoloc/spectrum.hpp"
#include "topoloc/state.hpp"

namespace topoloc {

enum class BoundKind { LE, RLE, E_prime, E_double_prime, E_witness };
std::string to_string(BoundKind k);

/// Target loop Omega, its complement, and the bipartition A:B of Omega.
/// Bit t of a reduced index refers to omega[t]; bit t of an outcome index
/// refers to omega_bar[t].
struct Region {
  std::size_t n_qubits = 0;
  std::vector<std::size_t> omega;
  std::vector<std::size_t> omega_bar;
  std::vector<std::size_t> part_a;

  /// part_a defaults to {omega[0]} (the 1:rest split).
  static Region make(std::size_t n_qubits, std::vector<std::size_t> omega, std::vector<std::size_t> part_a = {});
  /// Bitmask over reduced indices selecting A.
  std::uint64_t a_mask() const;
  Region with_part_a(std::vector<std::size_t> a) const;
};

/// Every inequivalent-by-label choice of an m-qubit A within Omega, in
/// lexicographic order of positions.
std::vector<std::vector<std::size_t>> bipartitions_of_size(const Region& region, std::size_t m);

/// rho^{T_A} where A is selected by a_mask over a_bits-qubit indices.
Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& rho, std::uint64_t a_mask);
/// ||rho^{T_A}||_1 - 1, optionally divided by d - 1 with d = min(dim A, dim B).
double negativity(const Eigen::MatrixXcd& rho, std::uint64_t a_mask, bool normalized = false);
/// Same quantity for the pure state amps / ||amps|| through its Schmidt
/// coefficients. amps need not be normalized.
double pure_negativity(std::span<const Complex> amps, std::uint64_t a_mask, bool normalized = false);

/// Pauli axis per qubit: I on Omega, X/Y/Z on Omega-bar.
struct MeasurementSetup {
  std::vector<Axis> axes;

  static MeasurementSetup uniform(const Region& region, Axis axis);
  /// "Z:7,8,9,13,14,15; X:rest" with 1-based labels. "rest" covers every
  /// remaining Omega-bar qubit.
  static MeasurementSetup parse(std::string_view text, const Region& region);
  std::string to_string() const;
  void validate(const Region& region) const;
  bool operator==(const MeasurementSetup&) const = default;
};

/// Canonical Pauli setup derived from the graph-state picture.
MeasurementSetup canonical_setup(const CodeLattice& lat, const LoopSpec& spec);

struct PreferredSet {
  std::vector<std::uint64_t> outcomes;  // sorted
  double p_c = 1e-10;
  std::vector<double> calibration;

  bool contains(std::uint64_t k) const;
  std::size_t size() const { return outcomes.size(); }
};

struct Outcome {
  std::uint64_t k = 0;
  double p = 0.0;
  Eigen::MatrixXcd rho;  // normalized reduced state on Omega
};

struct OutcomeEnsemble {
  Region region;
  MeasurementSetup setup;
  std::vector<Outcome> entries;
  double total_probability = 0.0;
  std::size_t outcome_space = 0;  // 2^|Omega-bar|
  std::optional<PreferredSet> restriction;
};

struct BoundValue {
  BoundKind kind = BoundKind::E_prime;
  double value = 0.0;
  double epsilon_m = 0.0;
  std::optional<MeasurementSetup> setup;
  double probability_mass = 1.0;
};

struct MeasureOptions {
  /// Outcomes below this probability are skipped in full ensembles.
  double skip_probability = 1e-14;
  /// Allowed deficit of sum p_k in a full ensemble.
  double completeness_tolerance = 1e-10;
  bool normalized = false;
  /// Cap on 2^|Omega-bar| * 4^|Omega| entries for density-matrix contraction.
  std::size_t max_contraction_entries = std::size_t{1} << 26;
};

/// Post-measurement ensemble. Pure states are rotated and sliced per
/// outcome; density matrices are contracted on their support.
OutcomeEnsemble measure_ensemble(const QuantumState& state, const Region& region, const MeasurementSetup& setup,
                                 const PreferredSet* restrict = nullptr, const MeasureOptions& options = {});

/// p_k for every k in [0, 2^|Omega-bar|).
std::vector<double> outcome_probabilities(const QuantumState& state, const Region& region,
                                          const MeasurementSetup& setup, const MeasureOptions& options = {});

/// sum_k p_k E(rho^k). A restricted ensemble yields E'' with epsilon_m.
BoundValue bound_from_ensemble(const OutcomeEnsemble& ens, bool normalized = false);

/// Streaming equivalent of bound_from_ensemble(measure_ensemble(...)) that
/// never stores the per-outcome states.
BoundValue setup_bound(const QuantumState& state, const Region& region, const MeasurementSetup& setup,
                       const PreferredSet* restrict = nullptr, const MeasureOptions& options = {});

/// Union over calibration states of {k : p_k > p_c}.
PreferredSet build_preferred_set(const std::vector<const QuantumState*>& calibration_states,
                                 const std::vector<double>& calibration_g, const Region& region,
                                 const MeasurementSetup& setup, double p_c);
/// Same, computing the calibration ground states of lat at each g.
PreferredSet build_preferred_set(const CodeLattice& lat, const Region& region, const MeasurementSetup& setup,
                                 double p_c = 1e-10, const std::vector<double>& calibration_g = {0.0, 0.2},
                                 const SolverOptions& solver = {});

struct RleOptions {
  std::size_t max_measured = 12;
  bool normalized = false;
  std::size_t keep_top = 8;
  MeasureOptions measure;
};

struct RleResult {
  BoundValue best;
  std::vector<std::pair<double, MeasurementSetup>> top;  // descending value
  std::size_t setups_evaluated = 0;
};

/// Exhaustive maximum over the 3^|Omega-bar| Pauli setups.
RleResult restricted_le(const QuantumState& state, const Region& region, const RleOptions& options = {});

/// Rank-1 projective basis {U^dagger|0>, U^dagger|1>} with
/// U = [[cos(t/2), e^{-i phi} sin(t/2)], [-e^{i phi} sin(t/2), cos(t/2)]].
struct QubitBasis {
  double theta = 0.0;
  double phi = 0.0;
  static QubitBasis from_axis(Axis a);
};

/// Average entanglement for a general product measurement; angles are
/// listed per Omega-bar qubit.
double general_setup_bound(const StateVector& psi, const Region& region, std::span<const QubitBasis> angles,
                           bool normalized = false);

struct LeOptions {
  std::size_t max_measured = 10;
  std::size_t pauli_seeds = 8;
  std::size_t random_starts = 64;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  std::size_t max_evaluations_per_start = 4000;
  double initial_step = 0.35;
  bool normalized = false;
  std::size_t workers = 1;
};

struct LeResult {
  BoundValue best;
  std::vector<QubitBasis> angles;
  double optimizer_value = 0.0;  // best value reached by the local searches alone
  std::size_t evaluations = 0;
  std::size_t starts = 0;
};

/// Nelder-Mead multistart over (theta_i, phi_i). Seeds: the top Pauli setups
/// of rle (computed here when absent) plus random starts. The result is at
/// least the RLE value, which is attained inside the search space.
LeResult localizable_entanglement(const StateVector& psi, const Region& region, const LeOptions& options = {},
                                  const RleResult* rle = nullptr);

}  // namespace topoloc
