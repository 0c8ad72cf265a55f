#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topoloc/codes.hpp"
#include "topoloc/localize.hpp"
#include "topoloc/spectrum.hpp"
#include "topoloc/witness.hpp"

namespace topoloc {

/// Published critical fields.
struct CriticalConstants {
  static constexpr double kitaev = 0.328474;
  static constexpr double color = 0.385;
};
double critical_point(CodeKind kind);

/// lo, lo+step, ..., hi (inclusive up to rounding).
std::vector<double> uniform_grid(double lo, double hi, double step);
/// Union of base with a finer uniform grid on [lo, hi], sorted, deduplicated.
std::vector<double> refine_grid(std::vector<double> base, double lo, double hi, double step);
/// [0, 2] step 0.02 refined to 0.005 on [0.2, 0.5].
std::vector<double> default_grid();

/// Kitaev lattice used for each system size of the scaling study:
/// 8 -> 2x2, 12 -> 3x2, 16 -> 4x2, 18 -> 3x3, 20 -> 5x2.
CodeLattice kitaev_lattice_for(std::size_t n_qubits);

struct SweepOptions {
  bool le = false;
  bool rle = false;
  bool e_prime = true;
  bool e_dprime = true;
  bool witness = true;
  bool normalized = false;
  std::vector<std::size_t> part_a;  // defaults to the witness hub, else omega[0]
  std::optional<MeasurementSetup> setup;
  double p_c = 1e-10;
  std::vector<double> calibration_g{0.0, 0.2};
  RleOptions rle_options;
  LeOptions le_options;
  SolverOptions solver;
  std::size_t workers = 1;
  double hierarchy_tolerance = 1e-9;
};

struct SweepPoint {
  double g = 0.0;
  double energy = 0.0;
  std::optional<double> le, rle, e_prime, e_dprime, eps_m, w, e_w;
  std::optional<MeasurementSetup> rle_setup;
};

struct SweepRecord {
  std::string lattice;
  LoopSpec spec;
  Region region;
  MeasurementSetup setup;
  std::optional<PreferredSet> preferred;
  std::vector<std::string> witness_labels;
  std::vector<SweepPoint> points;
  /// Inline hierarchy checks that failed, one message each.
  std::vector<std::string> violations;

  std::vector<double> grid() const;
  /// Values of one bound; throws if any point lacks it.
  std::vector<double> series(BoundKind kind) const;
};

/// Ground state and requested bounds at every g. Points run in parallel;
/// the record order follows the grid.
SweepRecord sweep(const CodeLattice& lat, const LoopSpec& spec, const std::vector<double>& grid,
                  const SweepOptions& options = {});

/// Hierarchy violations of a single point (LE >= RLE >= E' >= E'', E' >= E^w).
std::vector<std::string> hierarchy_violations(const SweepPoint& p, double tolerance);

struct PeakResult {
  double g_m = 0.0;
  double height = 0.0;
  std::size_t index = 0;  // grid index of the largest |dE/dg|
};

/// |dE/dg| by three-point central differences on a non-uniform grid;
/// g_m from the parabola through the largest value and its neighbours.
/// Throws when the maximum sits at the edge of the grid, or when the grid
/// spacing around it exceeds max_spacing.
PeakResult derivative_peak(std::span<const double> g, std::span<const double> e, double max_spacing = 0.01);
/// |dE/dg| at interior grid points (index i corresponds to g[i + 1]).
std::vector<double> abs_derivative(std::span<const double> g, std::span<const double> e);

/// Leading part of the series with E > 0; used for witness series that vanish past some g.
std::size_t positive_prefix(std::span<const double> e);

struct ScalingFit {
  double g_c = 0.0;
  std::vector<std::pair<double, double>> points;  // (N, g_m)
  double amplitude = 0.0;                         // alpha or beta
  double exponent = 0.0;                          // nu or delta
  double residual = 0.0;                          // RMS of the log-log residuals
  bool valid() const { return exponent > 0.0; }
};

/// Least squares of ln|g_m - g_c| against ln N: slope -exponent, intercept ln amplitude.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, double g_c);

}  // namespace topoloc
