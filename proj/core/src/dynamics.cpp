#include "topoloc/dynamics.hpp"

#include <Eigen/Sparse>
#include <bit>
#include <cmath>
#include <limits>

#include "topoloc/error.hpp"

namespace topoloc {

void BathParams::validate() const {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("Ohmicity s must be positive");
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw InvalidArgument("cutoff omega_c must be positive");
}

double dephasing_rate(double t, const BathParams& bath) {
  bath.validate();
  if (t < 0.0) throw InvalidArgument("dephasing rate needs t >= 0");
  const double x = bath.omega_c * t;
  return bath.omega_c * std::pow(1.0 + x * x, -bath.s / 2.0) * std::sin(bath.s * std::atan(x)) * std::tgamma(bath.s);
}

EvolveStats evolve(DensityMatrix rho0, const Hamiltonian& h, const BathParams& bath, const EvolveOptions& options,
                   const TrajectoryObserver& observer) {
  bath.validate();
  if (!(options.dt > 0.0) || !(options.t_end >= 0.0) || !(options.record_every >= options.dt)) {
    throw InvalidArgument("time grid needs dt > 0, t_end >= 0 and record_every >= dt");
  }
  const std::size_t d = rho0.basis().size();
  if (d > options.max_support) {
    throw LimitExceeded("density matrix support of " + std::to_string(d) + " states exceeds the cap of " +
                        std::to_string(options.max_support));
  }
  if (h.n_qubits() != rho0.n_qubits()) throw InvalidArgument("Hamiltonian and state disagree on N");
  const auto stride = static_cast<std::size_t>(std::llround(options.record_every / options.dt));
  const auto n_steps = static_cast<std::size_t>(std::llround(options.t_end / options.dt));
  if (std::abs(static_cast<double>(stride) * options.dt - options.record_every) > 1e-9 * options.record_every) {
    throw InvalidArgument("record_every must be a multiple of dt");
  }

  const SectorHamiltonian sector(h, rho0.basis());
  const auto D = static_cast<Eigen::Index>(d);
  std::vector<Eigen::Triplet<Complex>> trip;
  for (std::size_t i = 0; i < d; ++i) {
    trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), sector.diagonal()[i]);
    for (const auto& f : sector.flips()) {
      if (f.value[i] != 0.0) trip.emplace_back(static_cast<Eigen::Index>(i), f.target[i], f.value[i]);
    }
  }
  Eigen::SparseMatrix<Complex> hs(D, D);
  hs.setFromTriplets(trip.begin(), trip.end());
  Eigen::MatrixXcd deph(D, D);
  for (Eigen::Index j = 0; j < D; ++j) {
    for (Eigen::Index i = 0; i < D; ++i) {
      deph(i, j) = 2.0 * std::popcount(rho0.basis().state(static_cast<std::size_t>(i)) ^
                                       rho0.basis().state(static_cast<std::size_t>(j)));
    }
  }
  auto rate = [&](double t) { return options.forced_rate ? *options.forced_rate : dephasing_rate(t, bath); };
  const Complex minus_i(0.0, -1.0);
  auto rhs = [&](double t, const Eigen::MatrixXcd& r, Eigen::MatrixXcd& out) {
    out.noalias() = hs * r;
    out.noalias() -= r * hs;
    out *= minus_i;
    out.array() -= rate(t) * (deph.array() * r.array());
  };

  DensityMatrix state = std::move(rho0);
  Eigen::MatrixXcd& rho = state.matrix();
  Eigen::MatrixXcd k1(D, D), k2(D, D), k3(D, D), k4(D, D), tmp(D, D);
  EvolveStats stats;
  stats.min_eigenvalue = std::numeric_limits<double>::infinity();

  auto record = [&](std::size_t step) {
    const double t = static_cast<double>(step) * options.dt;
    TrajectoryPoint p;
    p.t = t;
    p.gamma = rate(t);
    p.trace = state.trace();
    p.hermiticity = state.hermiticity_error();
    const double elapsed = step == 0 ? 0.0 : options.record_every;
    if (elapsed > 0.0) {
      const double drift = std::abs(p.trace - 1.0) / elapsed;
      stats.max_trace_drift_rate = std::max(stats.max_trace_drift_rate, drift);
      if (drift > options.trace_drift_tolerance) {
        throw InvariantViolation("trace drift " + std::to_string(drift) + " per unit time at t=" + std::to_string(t));
      }
    }
    stats.max_hermiticity = std::max(stats.max_hermiticity, p.hermiticity);
    if (p.hermiticity > options.hermiticity_tolerance) {
      throw InvariantViolation("density matrix lost Hermiticity at t=" + std::to_string(t));
    }
    stats.dropped_entries += state.threshold(options.threshold);
    state.normalize_trace();
    p.purity = state.purity();
    p.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    if (options.positivity_every > 0 && stats.records % options.positivity_every == 0) {
      p.min_eigenvalue = state.min_eigenvalue();
      stats.min_eigenvalue = std::min(stats.min_eigenvalue, p.min_eigenvalue);
      if (p.min_eigenvalue < options.positivity_floor) {
        throw InvariantViolation("negative eigenvalue " + std::to_string(p.min_eigenvalue) + " at t=" +
                                 std::to_string(t) + "; reduce dt");
      }
    }
    ++stats.records;
    if (observer) observer(p, state);
  };

  record(0);
  const double dt = options.dt;
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double t = static_cast<double>(step - 1) * dt;
    rhs(t, rho, k1);
    tmp = rho + (0.5 * dt) * k1;
    rhs(t + 0.5 * dt, tmp, k2);
    tmp = rho + (0.5 * dt) * k2;
    rhs(t + 0.5 * dt, tmp, k3);
    tmp = rho + dt * k3;
    rhs(t + dt, tmp, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    ++stats.steps;
    if (step % stride == 0) record(step);
  }
  if (!std::isfinite(stats.min_eigenvalue)) stats.min_eigenvalue = 0.0;
  return stats;
}

std::vector<TrajectoryRow> run_trajectory(const CodeLattice& lat, const LoopSpec& spec, const TrajectoryConfig& config,
                                          EvolveStats* stats) {
  const Hamiltonian h = build_hamiltonian(lat, {config.g});
  const GroundStateResult gs = ground_state(h, {config.g}, lat, config.solver);
  const StateVector seed = perturbative_ground_state(lat, config.solver.max_qubits);
  const auto support = SupportBasis::support_of(seed, 1e-14);
  SupportBasis basis = SupportBasis::closure(lat.n_qubits(), support, h.flip_masks(), config.evolve.max_support);
  DensityMatrix rho0 = DensityMatrix::from_pure(gs.vector, basis);

  Region region = Region::make(lat.n_qubits(), lat.loop_support(spec));
  std::optional<WitnessOperator> witness;
  if (lat.kind() == CodeKind::kitaev) witness.emplace(build_witness(lat, spec));
  if (!config.part_a.empty()) {
    region = region.with_part_a(config.part_a);
  } else if (witness) {
    region = region.with_part_a({witness->hub()});
  }
  const MeasurementSetup setup = config.setup ? *config.setup : canonical_setup(lat, spec);
  const PreferredSet k = build_preferred_set(lat, region, setup, config.p_c, config.calibration_g, config.solver);

  MeasureOptions mo;
  mo.normalized = config.normalized;
  std::vector<TrajectoryRow> rows;
  auto observer = [&](const TrajectoryPoint& p, const DensityMatrix& rho) {
    TrajectoryRow row;
    row.point = p;
    const QuantumState s = rho;
    const BoundValue b = setup_bound(s, region, setup, &k, mo);
    row.e_dprime = b.value;
    row.eps_m = b.epsilon_m;
    if (witness) {
      row.e_w = witness_expectation(s, *witness).bound;
      row.has_witness = true;
    }
    rows.push_back(row);
  };
  const EvolveStats st = evolve(std::move(rho0), h, config.bath, config.evolve, observer);
  if (stats) *stats = st;
  return rows;
}

std::string to_string(EctKind k) {
  return k == EctKind::non_markovian_trough ? "non_markovian_trough" : "markovian_crossing";
}

EctResult collapse_time_trough(std::span<const double> t, std::span<const double> e, double tolerance) {
  if (t.size() != e.size() || t.size() < 3) throw InvalidArgument("trough search needs at least 3 samples");
  bool decreased = false;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (e[i + 1] < e[i] - tolerance) decreased = true;
    if (decreased && e[i + 1] > e[i] + tolerance) {
      EctResult r;
      r.kind = EctKind::non_markovian_trough;
      r.e_c = e[i];
      for (std::size_t j = 0; j <= i; ++j) {
        if (e[j] <= r.e_c + tolerance) {
          r.tau = t[j];
          break;
        }
      }
      return r;
    }
  }
  throw InvalidArgument("series has no trough");
}

EctResult collapse_time_crossing(std::span<const double> t, std::span<const double> e, double e_c,
                                 const std::function<double(double)>& f) {
  if (t.size() != e.size() || t.empty()) throw InvalidArgument("crossing search needs matching nonempty series");
  EctResult r;
  r.kind = EctKind::markovian_crossing;
  r.e_c = e_c;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j] > e_c) continue;
    if (j == 0) {
      r.tau = t[0];
      return r;
    }
    double lo = t[j - 1], hi = t[j];
    const double elo = e[j - 1], ehi = e[j];
    auto value = [&](double x) {
      if (f) return f(x);
      const double u = (x - t[j - 1]) / (t[j] - t[j - 1]);
      return elo + u * (ehi - elo);
    };
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (value(mid) > e_c ? lo : hi) = mid;
    }
    r.tau = hi;
    return r;
  }
  throw InvalidArgument("series never reaches the level " + std::to_string(e_c));
}

}  // namespace topoloc
