#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "topoloc/error.hpp"
#include "topoloc/oracle.hpp"
#include "topoloc/parallel.hpp"
#include "topoloc/qpt.hpp"

namespace topoloc::cli {

namespace {

struct Counter {
  SuiteResult& r;
  double worst = 0.0;
  void expect(bool ok, const std::string& what) {
    ++r.checks;
    if (!ok) {
      ++r.failures;
      if (r.detail.empty()) r.detail = what;
    }
  }
  void close(double err, double tol, const std::string& what) {
    worst = std::max(worst, err);
    std::ostringstream os;
    os << what << ": error " << err << " > " << tol;
    expect(err <= tol, os.str());
  }
};

SuiteResult timed(const std::string& name, const std::function<void(Counter&)>& body) {
  SuiteResult r;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  Counter c{r};
  try {
    body(c);
  } catch (const std::exception& e) {
    ++r.failures;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = r.failures == 0;
  if (r.passed && r.detail.empty()) {
    std::ostringstream os;
    os << "max error " << c.worst;
    r.detail = os.str();
  }
  return r;
}

Eigen::VectorXcd as_eigen(const StateVector& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void hamiltonian_suite(Counter& c) {
  std::mt19937_64 rng(11);
  for (auto lat : {build_kitaev(2, 2)}) {
    const Hamiltonian h = build_hamiltonian(lat, {0.37});
    const Eigen::MatrixXd dense = h.to_dense();
    for (int i = 0; i < 100; ++i) {
      const StateVector v = oracle::random_state(lat.n_qubits(), rng);
      StateVector out(v.size());
      h.apply(v, out);
      const Eigen::VectorXcd ref = dense.cast<Complex>() * as_eigen(v);
      c.close((as_eigen(out) - ref).cwiseAbs().maxCoeff(), 1e-10, "H apply vs dense");
    }
  }
}

void ensemble_suite(Counter& c) {
  std::mt19937_64 rng(12);
  const CodeLattice lat = build_kitaev(2, 2);
  for (auto name : {"Lx_h", "Lz_h"}) {
    const LoopSpec spec = LoopSpec::parse(name);
    const Region region = Region::make(lat.n_qubits(), lat.loop_support(spec));
    const MeasurementSetup setup = canonical_setup(lat, spec);
    for (int i = 0; i < 50; ++i) {
      const Eigen::MatrixXcd rho = oracle::random_density(lat.n_qubits(), 3, rng);
      const DensityMatrix dm(SupportBasis::full(lat.n_qubits()), rho);
      const double fast = setup_bound(QuantumState(dm), region, setup).value;
      const double ref = oracle::dense_bound(oracle::dense_ensemble(rho, region, setup), region.a_mask());
      c.close(std::abs(fast - ref), 1e-10, std::string("density contraction ") + name);

      const StateVector psi = oracle::random_state(lat.n_qubits(), rng);
      const double pure = setup_bound(QuantumState(psi), region, setup).value;
      const double pure_ref =
          oracle::dense_bound(oracle::dense_ensemble(oracle::dense_state(psi), region, setup), region.a_mask());
      c.close(std::abs(pure - pure_ref), 1e-10, std::string("pure slicing ") + name);
    }
  }
}

void witness_suite(Counter& c) {
  std::mt19937_64 rng(13);
  const CodeLattice lat = build_kitaev(2, 2);
  for (auto name : {"Lx_h", "Lz_h"}) {
    const WitnessOperator w = build_witness(lat, LoopSpec::parse(name));
    const Eigen::MatrixXcd op = oracle::dense_witness_operator(w);
    for (int i = 0; i < 50; ++i) {
      const StateVector psi = oracle::random_state(lat.n_qubits(), rng);
      c.close(std::abs(witness_expectation(psi, w).w - oracle::dense_witness(oracle::dense_state(psi), op)), 1e-10,
              std::string("pure witness ") + name);
      const Eigen::MatrixXcd rho = oracle::random_density(lat.n_qubits(), 4, rng);
      const DensityMatrix dm(SupportBasis::full(lat.n_qubits()), rho);
      c.close(std::abs(witness_expectation(dm, w).w - oracle::dense_witness(rho, op)), 1e-10,
              std::string("mixed witness ") + name);
    }
  }
}

/// Table I: the L^x_h and L^z_h generators on the five reference lattices.
const std::vector<std::tuple<std::size_t, std::string, std::vector<std::string>>>& table_one() {
  static const std::vector<std::tuple<std::size_t, std::string, std::vector<std::string>>> t = {
      {8, "Lx_h", {"V3V4", "P2"}},
      {12, "Lx_h", {"V4V5V6", "P2P3", "P3"}},
      {16, "Lx_h", {"V5V6V7V8", "P2P3P4", "P3P4", "P4"}},
      {18, "Lx_h", {"V7V8V9", "P5P6", "P6"}},
      {20, "Lx_h", {"V6V7V8V9V10", "P2P3P4P5", "P3P4P5", "P4P5", "P5"}},
      {8, "Lz_h", {"P1P2", "V4"}},
      {12, "Lz_h", {"P1P2P3", "V5V6", "V6"}},
      {16, "Lz_h", {"P1P2P3P4", "V6V7V8", "V7V8", "V8"}},
      {18, "Lz_h", {"P4P5P6", "V8V9", "V9"}},
      {20, "Lz_h", {"P1P2P3P4P5", "V7V8V9V10", "V8V9V10", "V9V10", "V10"}},
  };
  return t;
}

void construction_suite(Counter& c, bool inject_fault) {
  for (const auto& [n, name, labels] : table_one()) {
    const CodeLattice lat = kitaev_lattice_for(n);
    const LoopSpec spec = LoopSpec::parse(name);
    const WitnessOperator built = build_witness(lat, spec);
    c.expect(built.labels() == labels, "N=" + std::to_string(n) + " " + name + " generators differ from the table");
    std::vector<std::string> fixture = labels;
    if (inject_fault && n == 8 && name == "Lx_h") fixture[1] = fixture[0];  // s_2 := s_1
    std::vector<PauliString> gens;
    for (const auto& l : fixture) gens.push_back(stabilizer_product(lat, l));
    const Region region = Region::make(lat.n_qubits(), lat.loop_support(spec), {built.hub()});
    try {
      WitnessOperator w(region, gens, fixture);
      c.expect(true, "");
    } catch (const InvariantViolation& e) {
      c.expect(false, "N=" + std::to_string(n) + " " + name + ": " + e.what());
    }
  }
}

void star_suite(Counter& c) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const StarPtReport r = verify_star_pt_bound(n, 21);
    c.worst = std::max({c.worst, r.formula_error, r.tightness_error});
    c.expect(r.passed, "star graph checks failed at n=" + std::to_string(n));
  }
}

void decomposition_suite(Counter& c) {
  for (auto [w, h] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const CodeLattice lat = build_kitaev(w, h);
    for (auto name : {"Lx_h", "Lz_h"}) {
      const LoopSpec spec = LoopSpec::parse(name);
      const WitnessOperator wit = build_witness(lat, spec);
      const Region region = wit.region();
      const MeasurementSetup setup = canonical_setup(lat, spec);
      for (double g : {0.1, 0.6}) {
        const auto gs = ground_state(build_hamiltonian(lat, {g}), {g}, lat);
        c.close(verify_decomposition(gs.vector, wit, setup).residual, 1e-9, std::string("pure ") + name);
        // Mixed: ground state mixed with a dephased copy.
        DensityMatrix rho = DensityMatrix::from_pure(gs.vector, SupportBasis::full(lat.n_qubits()));
        Eigen::MatrixXcd& m = rho.matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j) m(i, j) *= 0.7;
          }
        }
        c.close(verify_decomposition(rho, wit, setup).residual, 1e-9, std::string("mixed ") + name);
      }
      (void)region;
    }
  }
}

void anchor_suite(Counter& c, std::size_t workers) {
  for (std::size_t n : {8, 12, 16, 18}) {
    const CodeLattice lat = kitaev_lattice_for(n);
    for (auto name : {"Lx_h", "Lz_h"}) {
      SweepOptions o;
      o.workers = workers;
      const SweepRecord rec = sweep(lat, LoopSpec::parse(name), {0.0}, o);
      const auto& p = rec.points.front();
      const double err = std::max({std::abs(*p.e_prime - 1.0), std::abs(*p.e_dprime - 1.0), std::abs(*p.e_w - 1.0)});
      c.close(err, 1e-8, "g=0 anchor N=" + std::to_string(n) + " " + name);
    }
  }
}

void hierarchy_suite(Counter& c, bool full, std::size_t workers) {
  const CodeLattice lat = build_kitaev(2, 2);
  for (auto name : {"Lx_h", "Lz_h"}) {
    SweepOptions o;
    o.rle = true;
    o.le = full;
    o.workers = workers;
    const SweepRecord rec = sweep(lat, LoopSpec::parse(name), uniform_grid(0.0, 2.0, 0.1), o);
    for (const auto& p : rec.points) {
      const auto v = hierarchy_violations(p, 1e-9);
      c.expect(v.empty(), v.empty() ? "" : v.front());
    }
  }
}

}  // namespace

std::vector<SuiteResult> run_validation(const ValidateOptions& options) {
  const std::size_t workers = resolve_workers(options.workers);
  std::vector<SuiteResult> out;
  out.push_back(timed("hamiltonian-dense", hamiltonian_suite));
  out.push_back(timed("ensemble-dense", ensemble_suite));
  out.push_back(timed("witness-dense", witness_suite));
  out.push_back(timed("witness-construction", [&](Counter& c) { construction_suite(c, options.inject_fault); }));
  out.push_back(timed("star-graph-bound", star_suite));
  out.push_back(timed("witness-decomposition", decomposition_suite));
  out.push_back(timed("g0-anchor", [&](Counter& c) { anchor_suite(c, workers); }));
  out.push_back(timed(options.full ? "hierarchy-le" : "hierarchy-rle",
                      [&](Counter& c) { hierarchy_suite(c, options.full, workers); }));
  return out;
}

}  // namespace topoloc::cli
