// Acceptance run: one PASS / FAIL / SKIP line per criterion.
// Usage: topoloc_acceptance [criterion numbers...]   (all when none given)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "topoloc/dynamics.hpp"
#include "topoloc/error.hpp"
#include "topoloc/oracle.hpp"
#include "topoloc/qpt.hpp"

using namespace topoloc;

namespace {

enum class Status { pass, fail, skip };

struct Verdict {
  Status status = Status::pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

StateVector ground(const CodeLattice& lat, double g) {
  return ground_state(build_hamiltonian(lat, {g}), {g}, lat).vector;
}

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Shared by criteria 2, 3 and 4.
const std::map<std::string, SweepRecord>& small_kitaev_sweeps() {
  static const std::map<std::string, SweepRecord> records = [] {
    std::map<std::string, SweepRecord> out;
    const CodeLattice lat = build_kitaev(2, 2);
    SweepOptions o;
    o.le = o.rle = true;
    o.workers = workers();
    for (auto name : {"Lx_h", "Lz_h"}) out.emplace(name, sweep(lat, LoopSpec::parse(name), uniform_grid(0.0, 2.0, 0.02), o));
    return out;
  }();
  return records;
}

Verdict zero_field_anchor() {
  double worst = 0.0;
  for (std::size_t n : {8, 12, 16, 18}) {
    const CodeLattice lat = kitaev_lattice_for(n);
    for (auto name : {"Lx_h", "Lz_h"}) {
      SweepOptions o;
      const SweepPoint p = sweep(lat, LoopSpec::parse(name), {0.0}, o).points.front();
      for (double v : {*p.e_prime, *p.e_dprime, *p.e_w}) worst = std::max(worst, std::abs(v - 1.0));
    }
  }
  return {worst <= 1e-8 ? Status::pass : Status::fail, "max |E - 1| over E', E'', E^w = " + fmt(worst)};
}

Verdict hierarchy_small() {
  std::size_t violations = 0, points = 0;
  std::string first;
  for (const auto& [name, rec] : small_kitaev_sweeps()) {
    points += rec.points.size();
    for (const auto& p : rec.points) {
      for (const auto& v : hierarchy_violations(p, 1e-9)) {
        if (first.empty()) first = name + ": " + v;
        ++violations;
      }
    }
  }
  std::string detail = std::to_string(points) + " points, " + std::to_string(violations) + " violations";
  if (!first.empty()) detail += " (first: " + first + ")";
  return {violations == 0 ? Status::pass : Status::fail, detail};
}

Verdict le_equals_rle() {
  std::string detail;
  bool ok = true;
  for (const auto& [name, rec] : small_kitaev_sweeps()) {
    double worst = 0.0, at = 0.0;
    for (const auto& p : rec.points) {
      const double d = std::abs(*p.le - *p.rle);
      if (d > worst) worst = d, at = p.g;
    }
    ok = ok && worst < 1e-6;
    detail += name + " max|LE-RLE| = " + fmt(worst) + " at g=" + fmt(at) + "; ";
  }
  return {ok ? Status::pass : Status::fail, detail};
}

Verdict canonical_split() {
  const auto& recs = small_kitaev_sweeps();
  const auto& x = recs.at("Lx_h");
  const auto& z = recs.at("Lz_h");
  const double x_gap = max_abs(x.series(BoundKind::RLE), x.series(BoundKind::E_prime));
  double z_gap = 0.0;
  for (const auto& p : z.points) z_gap = std::max(z_gap, *p.rle - *p.e_prime);
  const bool ok = x_gap < 1e-8 && z_gap > 1e-3;
  return {ok ? Status::pass : Status::fail,
          "Lx_h max|RLE-E'| = " + fmt(x_gap) + "; Lz_h max(RLE-E') = " + fmt(z_gap)};
}

Verdict preferred_set_budget() {
  struct Case {
    CodeLattice lat;
    const char* loop;
  };
  std::vector<Case> cases;
  for (auto [a, b] : {std::pair{2, 2}, std::pair{3, 2}}) {
    for (auto name : {"Lx_h", "Lz_h", "Lx_v", "Lz_v"}) cases.push_back({build_kitaev(a, b), name});
  }
  for (auto name : {"Lx_h_r", "Lz_h_r"}) cases.push_back({build_color(3, 2), name});
  double worst_eps = 0.0, worst_excess = -1.0;
  std::size_t points = 0;
  for (const auto& c : cases) {
    SweepOptions o;
    o.witness = c.lat.kind() == CodeKind::kitaev;
    o.workers = workers();
    const SweepRecord rec = sweep(c.lat, LoopSpec::parse(c.loop), uniform_grid(0.0, 2.0, 0.02), o);
    for (const auto& p : rec.points) {
      worst_eps = std::max(worst_eps, *p.eps_m);
      worst_excess = std::max(worst_excess, std::abs(*p.e_prime - *p.e_dprime) - *p.eps_m);
      ++points;
    }
  }
  const bool ok = worst_eps < 1e-6 && worst_excess <= 1e-12;
  return {ok ? Status::pass : Status::fail, std::to_string(cases.size()) + " configurations, " +
                                                std::to_string(points) + " points; max eps_m = " + fmt(worst_eps) +
                                                ", max(|E'-E''| - eps_m) = " + fmt(worst_excess)};
}

Verdict qpt_scaling() {
  const double g_c = CriticalConstants::kitaev;
  const auto grid = refine_grid(uniform_grid(0.0, 2.0, 0.02), 0.2, 0.5, 0.005);
  std::vector<std::pair<double, double>> dprime, witness;
  for (std::size_t n : {8, 12, 16, 18, 20}) {
    SweepOptions o;
    o.e_prime = false;
    o.workers = workers();
    const SweepRecord rec = sweep(kitaev_lattice_for(n), LoopSpec::parse("Lx_h"), grid, o);
    const auto g = rec.grid();
    dprime.emplace_back(n, derivative_peak(g, rec.series(BoundKind::E_double_prime)).g_m);
    const auto ew = rec.series(BoundKind::E_witness);
    const std::size_t used = positive_prefix(ew);
    witness.emplace_back(n, derivative_peak(std::span(g).first(used), std::span<const double>(ew).first(used)).g_m);
  }
  bool monotone = true;
  for (std::size_t i = 0; i < 4; ++i) {
    monotone = monotone && dprime[i].second > g_c;
    if (i > 0) monotone = monotone && dprime[i].second < dprime[i - 1].second;
  }
  const ScalingFit fd = fit_scaling(dprime, g_c);
  const ScalingFit fw = fit_scaling(witness, g_c);
  const bool nu_ok = std::abs(fd.exponent - 0.588) <= 0.08 && std::abs(fd.amplitude - 0.386) <= 0.06;
  const bool delta_ok = std::abs(fw.exponent - 0.655) <= 0.08 && std::abs(fw.amplitude - 0.448) <= 0.06;
  std::string detail = "g_m(E'') =";
  for (const auto& [n, gm] : dprime) detail += " " + fmt(gm);
  detail += "; N<=18 monotone " + std::string(monotone ? "yes" : "no") + "; nu = " + fmt(fd.exponent) +
            ", alpha = " + fmt(fd.amplitude) + "; delta = " + fmt(fw.exponent) + ", beta = " + fmt(fw.amplitude);
  return {monotone && nu_ok && delta_ok ? Status::pass : Status::fail, detail};
}

Verdict color_code() {
  const CodeLattice lat = build_color(3, 2);
  const LoopSpec spec = LoopSpec::parse("Lx_h_r");
  SweepOptions o;
  o.le = o.rle = true;
  o.witness = false;
  o.workers = workers();
  const SweepRecord rec = sweep(lat, spec, uniform_grid(0.0, 2.0, 0.1), o);
  std::size_t violations = 0;
  double worst = 0.0;
  for (const auto& p : rec.points) {
    violations += hierarchy_violations(p, 1e-9).size();
    worst = std::max(worst, std::abs(*p.le - *p.rle));
  }
  std::string detail = "1:rest " + std::to_string(rec.points.size()) + " points, " + std::to_string(violations) +
                       " hierarchy violations, max|LE-RLE| = " + fmt(worst);

  // 2:rest with normalized negativity: the first field past 1 with a gap above 1e-3 settles it.
  const Region region = rec.region.with_part_a({rec.region.omega[0], rec.region.omega[2]});
  double gap = 0.0, gap_g = 0.0;
  for (double g : {1.2, 1.6, 2.0}) {
    const StateVector gs = ground(lat, g);
    RleOptions ro;
    ro.normalized = true;
    const RleResult rle = restricted_le(gs, region, ro);
    LeOptions lo;
    lo.normalized = true;
    lo.workers = workers();
    const LeResult le = localizable_entanglement(gs, region, lo, &rle);
    if (le.best.value - rle.best.value > gap) gap = le.best.value - rle.best.value, gap_g = g;
    if (gap > 1e-3) break;
  }
  detail += "; 2:rest max(LE-RLE) = " + fmt(gap) + " at g=" + fmt(gap_g);
  const bool ok = violations == 0 && worst < 1e-6 && gap > 1e-3;
  return {ok ? Status::pass : Status::fail, detail};
}

std::pair<std::vector<double>, std::vector<double>> column(const std::vector<TrajectoryRow>& rows, bool witness) {
  std::vector<double> t, e;
  for (const auto& r : rows) {
    t.push_back(r.point.t);
    e.push_back(witness ? r.e_w : r.e_dprime);
  }
  return {t, e};
}

TrajectoryConfig trajectory(double g, double s, double dt) {
  TrajectoryConfig c;
  c.g = g;
  c.bath = {s, 1.0};
  c.evolve.t_end = 50.0;
  c.evolve.dt = dt;
  return c;
}

Verdict dynamics_levels() {
  const CodeLattice lat = build_kitaev(2, 2);
  const LoopSpec spec = LoopSpec::parse("Lz_h");
  double e_c = 0.0, at = 0.0;
  std::string aborted;
  for (double g : uniform_grid(0.05, 2.0, 0.05)) {
    try {
      const auto [t, e] = column(run_trajectory(lat, spec, trajectory(g, 3.0, 1e-3)), false);
      const EctResult r = collapse_time_trough(t, e);
      if (r.e_c > e_c) e_c = r.e_c, at = g;
    } catch (const InvariantViolation&) {
      aborted += (aborted.empty() ? "" : ",") + fmt(g);
    }
  }
  const bool ok = std::abs(e_c - 0.14) <= 0.02;
  std::string detail = "2x2 L^z_h E_c^3 = " + fmt(e_c) + " (max first-trough E'' over g, at g=" + fmt(at) + ")";
  if (!aborted.empty()) detail += "; positivity loss aborted g=" + aborted;
  detail += "; 3x3 skipped: 2^18 support exceeds the density-matrix cap of 4096 states";
  return {ok ? Status::pass : Status::fail, detail};
}

Verdict rate_sign_law() {
  bool ok = true;
  std::string detail;
  for (double s : {0.5, 1.0, 2.0, 2.5, 3.0, 4.0}) {
    double lo = 0.0;
    for (int i = 0; i <= 100000; ++i) lo = std::min(lo, dephasing_rate(1e-3 * i, {s, 1.0}));
    const bool expect_negative = s > 2.0;
    ok = ok && (expect_negative ? lo < 0.0 : lo >= 0.0);
    detail += "s=" + fmt(s) + " min " + fmt(lo) + "; ";
  }
  return {ok ? Status::pass : Status::fail, detail};
}

struct DynamicsRun {
  double g, s;
  std::vector<TrajectoryRow> rows;
  EvolveStats stats;
};

// Shared by criteria 10 and 11.
const std::vector<DynamicsRun>& small_dynamics(double dt) {
  static std::map<double, std::vector<DynamicsRun>> cache;
  auto it = cache.find(dt);
  if (it != cache.end()) return it->second;
  std::vector<DynamicsRun> runs;
  const CodeLattice lat = build_kitaev(2, 2);
  for (double s : {1.0, 3.0}) {
    for (double g : {0.1, 0.8}) {
      DynamicsRun r{g, s, {}, {}};
      r.rows = run_trajectory(lat, LoopSpec::parse("Lx_h"), trajectory(g, s, dt), &r.stats);
      runs.push_back(std::move(r));
    }
  }
  return cache.emplace(dt, std::move(runs)).first->second;
}

Verdict trajectory_sanity() {
  const auto& coarse = small_dynamics(1e-3);
  const auto& fine = small_dynamics(5e-4);
  double drift = 0.0, herm = 0.0, shift = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    drift = std::max({drift, coarse[i].stats.max_trace_drift_rate, fine[i].stats.max_trace_drift_rate});
    herm = std::max({herm, coarse[i].stats.max_hermiticity, fine[i].stats.max_hermiticity});
    for (bool w : {false, true}) shift = std::max(shift, max_abs(column(coarse[i].rows, w).second, column(fine[i].rows, w).second));
  }
  const bool ok = drift <= 1e-8 && herm <= 1e-10 && shift <= 1e-6;
  return {ok ? Status::pass : Status::fail, "trace drift/unit time " + fmt(drift) + ", hermiticity " + fmt(herm) +
                                                ", dt-halving shift of E''/E^w " + fmt(shift)};
}

const DynamicsRun& find_run(const std::vector<DynamicsRun>& runs, double g, double s) {
  for (const auto& r : runs) {
    if (r.g == g && r.s == s) return r;
  }
  throw std::logic_error("missing dynamics run");
}

// Collapse-revival cycles: a revival is a rise above level after touching zero.
std::size_t revivals(const std::vector<double>& e, double level, std::size_t from) {
  std::size_t n = 0;
  bool collapsed = false;
  for (std::size_t i = from; i < e.size(); ++i) {
    if (e[i] <= 0.0) collapsed = true;
    if (collapsed && e[i] > level) ++n, collapsed = false;
  }
  return n;
}

Verdict phase_distinguishing() {
  const auto& runs = small_dynamics(1e-3);
  // (a) Markovian runs never rise.
  double rise = 0.0;
  for (double g : {0.1, 0.8}) {
    for (bool w : {false, true}) {
      const auto e = column(find_run(runs, g, 1.0).rows, w).second;
      for (std::size_t i = 1; i < e.size(); ++i) rise = std::max(rise, e[i] - e[i - 1]);
    }
  }
  const bool a = rise <= 1e-6;

  // (b) Post-trough swing of E'' on the window after the g = 0.8 trough.
  const auto [t, hi] = column(find_run(runs, 0.8, 3.0).rows, false);
  const auto lo = column(find_run(runs, 0.1, 3.0).rows, false).second;
  const EctResult trough = collapse_time_trough(t, hi);
  const std::size_t start = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), trough.tau) - t.begin());
  auto swing = [&](const std::vector<double>& e) {
    const auto [mn, mx] = std::minmax_element(e.begin() + static_cast<std::ptrdiff_t>(start), e.end());
    return *mx - *mn;
  };
  const double swing_hi = swing(hi), swing_lo = swing(lo);
  const bool b = swing_hi > swing_lo;

  // (c) Witness collapse-revival cycles.
  const auto w_hi = column(find_run(runs, 0.8, 3.0).rows, true).second;
  const auto w_lo = column(find_run(runs, 0.1, 3.0).rows, true).second;
  const std::size_t cycles_hi = revivals(w_hi, 1e-6, 0);
  const auto first_zero = std::find_if(w_lo.begin(), w_lo.end(), [](double v) { return v <= 0.0; });
  const std::size_t cycles_lo =
      first_zero == w_lo.end() ? 0 : revivals(w_lo, 1e-6, static_cast<std::size_t>(first_zero - w_lo.begin()));
  const bool c = cycles_hi >= 2 && cycles_lo == 0;

  const std::string detail = "(a) max rise " + fmt(rise) + (a ? " ok" : " FAIL") + "; (b) post-trough swing g=0.8 " +
                             fmt(swing_hi) + " vs g=0.1 " + fmt(swing_lo) + (b ? " ok" : " FAIL") +
                             "; (c) E^w revivals g=0.8 " + std::to_string(cycles_hi) + ", g=0.1 " +
                             std::to_string(cycles_lo) + (first_zero == w_lo.end() ? " (never reaches 0)" : "") +
                             (c ? " ok" : " FAIL");
  return {a && b && c ? Status::pass : Status::fail, detail};
}

Verdict appendix_regression() {
  bool stars = true;
  for (std::size_t n = 2; n <= 6; ++n) stars = stars && verify_star_pt_bound(n).passed;
  double worst = 0.0;
  std::mt19937_64 rng(1201);
  for (auto [a, b] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const CodeLattice lat = build_kitaev(a, b);
    for (auto name : {"Lx_h", "Lz_h"}) {
      const LoopSpec spec = LoopSpec::parse(name);
      const WitnessOperator w = build_witness(lat, spec);
      const MeasurementSetup setup = canonical_setup(lat, spec);
      for (double g : {0.0, 0.3, 1.0}) worst = std::max(worst, verify_decomposition(ground(lat, g), w, setup).residual);
      if (lat.n_qubits() == 8) {
        worst = std::max(worst, verify_decomposition(DensityMatrix::maximally_mixed(8), w, setup).residual);
        for (int i = 0; i < 5; ++i) {
          const DensityMatrix rho(SupportBasis::full(8), oracle::random_density(8, 1 + i, rng));
          worst = std::max(worst, verify_decomposition(rho, w, setup).residual);
        }
      } else {
        // Mixed state at N = 12: a dephased ground state from the dynamics.
        TrajectoryConfig tc = trajectory(0.3, 3.0, 1e-3);
        tc.evolve.t_end = 1.0;
        const StateVector psi = ground(lat, 0.3);
        const Hamiltonian h = build_hamiltonian(lat, {0.3});
        const SupportBasis basis = SupportBasis::closure(lat.n_qubits(), SupportBasis::support_of(psi, 1e-14),
                                                         h.flip_masks(), 4096);
        std::optional<DensityMatrix> last;
        evolve(DensityMatrix::from_pure(psi, basis), h, tc.bath, tc.evolve,
               [&](const TrajectoryPoint&, const DensityMatrix& rho) { last = rho; });
        worst = std::max(worst, verify_decomposition(*last, w, setup).residual);
      }
    }
  }
  return {stars && worst <= 1e-9 ? Status::pass : Status::fail,
          std::string("star graph n=2..6 ") + (stars ? "passed" : "FAILED") + "; max decomposition residual " +
              fmt(worst)};
}

Verdict oracle_equivalence() {
  std::mt19937_64 rng(1301);
  const CodeLattice lat = build_kitaev(2, 2);
  const std::size_t n = lat.n_qubits();
  std::uniform_real_distribution<double> field(0.0, 2.0);
  std::uniform_int_distribution<int> axis(1, 3);
  double h_err = 0.0, e_err = 0.0, w_err = 0.0;
  const LoopSpec specs[] = {LoopSpec::parse("Lx_h"), LoopSpec::parse("Lz_h")};
  const WitnessOperator ws[] = {build_witness(lat, specs[0]), build_witness(lat, specs[1])};
  const Eigen::MatrixXcd ops[] = {oracle::dense_witness_operator(ws[0]), oracle::dense_witness_operator(ws[1])};
  for (int i = 0; i < 100; ++i) {
    const StateVector psi = oracle::random_state(n, rng);
    const Eigen::MatrixXcd rho = oracle::dense_state(psi);
    const Eigen::Map<const Eigen::VectorXcd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));

    const Hamiltonian h = build_hamiltonian(lat, {field(rng)});
    StateVector out(psi.size());
    h.apply(psi, out);
    const Eigen::VectorXcd ref = h.to_dense().cast<Complex>() * v;
    for (std::size_t k = 0; k < out.size(); ++k) h_err = std::max(h_err, std::abs(out[k] - ref(static_cast<Eigen::Index>(k))));

    const WitnessOperator& w = ws[i % 2];
    MeasurementSetup setup = MeasurementSetup::uniform(w.region(), Axis::Z);
    for (std::size_t q : w.region().omega_bar) setup.axes[q] = static_cast<Axis>(axis(rng));
    const double fast = setup_bound(psi, w.region(), setup).value;
    e_err = std::max(e_err, std::abs(fast - oracle::dense_bound(oracle::dense_ensemble(rho, w.region(), setup),
                                                                w.region().a_mask())));

    w_err = std::max(w_err, std::abs(witness_expectation(psi, w).w - oracle::dense_witness(rho, ops[i % 2])));
  }
  const bool ok = h_err <= 1e-10 && e_err <= 1e-10 && w_err <= 1e-10;
  return {ok ? Status::pass : Status::fail, "100 states per path; max error H " + fmt(h_err) + ", ensemble " +
                                                fmt(e_err) + ", witness " + fmt(w_err)};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "zero-field anchor", zero_field_anchor},
      {2, "bound hierarchy, N=8", hierarchy_small},
      {3, "LE = RLE, N=8", le_equals_rle},
      {4, "canonical setup optimal on L^x_h only", canonical_split},
      {5, "E'' within eps_m of E'", preferred_set_budget},
      {6, "QPT peaks and finite-size scaling", qpt_scaling},
      {7, "color code N=12", color_code},
      {8, "non-Markovian collapse level", dynamics_levels},
      {9, "dephasing rate sign law", rate_sign_law},
      {10, "trajectory sanity", trajectory_sanity},
      {11, "phase-distinguishing dynamics", phase_distinguishing},
      {12, "star graph and decomposition regression", appendix_regression},
      {13, "matrix-free vs dense oracles", oracle_equivalence},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {Status::fail, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = v.status == Status::pass ? "PASS" : v.status == Status::fail ? "FAIL" : "SKIP";
    if (v.status == Status::fail) ++failures;
    std::printf("[%s] criterion %2d  %-42s %s  (%.1fs)\n", tag, c.id, c.title, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
