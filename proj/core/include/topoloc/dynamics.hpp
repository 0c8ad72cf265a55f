#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "topoloc/localize.hpp"
#include "topoloc/spectrum.hpp"
#include "topoloc/state.hpp"
#include "topoloc/witness.hpp"

namespace topoloc {

/// Zero-temperature Ohmic-family bath.
struct BathParams {
  double s = 1.0;        // Ohmicity
  double omega_c = 1.0;  // cutoff frequency
  void validate() const;
};

/// gamma(t) = omega_c (1 + (omega_c t)^2)^{-s/2} sin(s atan(omega_c t)) Gamma(s).
double dephasing_rate(double t, const BathParams& bath);

struct EvolveOptions {
  double t_end = 50.0;
  double dt = 1e-3;
  double record_every = 0.1;
  double threshold = 1e-8;
  /// Allowed |Tr rho - 1| accumulated per unit time before renormalization.
  double trace_drift_tolerance = 1e-8;
  double hermiticity_tolerance = 1e-10;
  double positivity_floor = -1e-5;
  /// Every n-th record gets an eigenvalue check; 0 disables.
  std::size_t positivity_every = 50;
  std::size_t max_support = 4096;
  /// Replaces gamma(t) when set.
  std::optional<double> forced_rate;
};

struct TrajectoryPoint {
  double t = 0.0;
  double gamma = 0.0;
  double trace = 1.0;  // before renormalization
  double purity = 1.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 0.0;  // NaN when not checked at this point
};

struct EvolveStats {
  std::size_t steps = 0;
  std::size_t records = 0;
  double max_trace_drift_rate = 0.0;
  double max_hermiticity = 0.0;
  double min_eigenvalue = 0.0;
  std::size_t dropped_entries = 0;
};

using TrajectoryObserver = std::function<void(const TrajectoryPoint&, const DensityMatrix&)>;

/// RK4 integration of
///   d rho/dt = -i[H, rho] + gamma(t) sum_i (Z_i rho Z_i - rho)
/// on the support basis of rho0, which H and the dephasing must preserve.
/// The observer sees t = 0 and every record_every afterwards; after each
/// record the state is thresholded and renormalized.
EvolveStats evolve(DensityMatrix rho0, const Hamiltonian& h, const BathParams& bath, const EvolveOptions& options,
                   const TrajectoryObserver& observer);

/// Trajectory row with the observables of a loop.
struct TrajectoryRow {
  TrajectoryPoint point;
  double e_dprime = 0.0;
  double eps_m = 0.0;
  double e_w = 0.0;
  bool has_witness = false;
};

struct TrajectoryConfig {
  double g = 0.1;
  BathParams bath;
  EvolveOptions evolve;
  double p_c = 1e-10;
  std::vector<double> calibration_g{0.0, 0.2};
  std::optional<MeasurementSetup> setup;  // canonical when absent
  std::vector<std::size_t> part_a;        // witness hub when empty and a witness exists, else omega[0]
  bool normalized = false;
  SolverOptions solver;
};

/// Ground state at g, then dephasing dynamics with E'' and E^w recorded on
/// the loop region.
std::vector<TrajectoryRow> run_trajectory(const CodeLattice& lat, const LoopSpec& spec, const TrajectoryConfig& config,
                                          EvolveStats* stats = nullptr);

enum class EctKind { non_markovian_trough, markovian_crossing };
std::string to_string(EctKind k);

struct EctResult {
  double tau = 0.0;
  double e_c = 0.0;
  EctKind kind = EctKind::non_markovian_trough;
};

/// E_c = value at the first local minimum; tau = first time the series
/// reaches it. tolerance absorbs sampling noise in the comparisons.
EctResult collapse_time_trough(std::span<const double> t, std::span<const double> e, double tolerance = 1e-9);
/// First crossing of e_c, by bisection on f (linear interpolation between
/// the bracketing samples when f is empty).
EctResult collapse_time_crossing(std::span<const double> t, std::span<const double> e, double e_c,
                                 const std::function<double(double)>& f = {});

}  // namespace topoloc
