#include "topoloc/qpt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "topoloc/error.hpp"
#include "topoloc/parallel.hpp"

namespace topoloc {

namespace {

template <class E>
[[noreturn]] void rethrow_at(const E& e, double g) {
  std::ostringstream os;
  os << "at g=" << g << ": " << e.what();
  throw E(os.str());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

double critical_point(CodeKind kind) {
  return kind == CodeKind::kitaev ? CriticalConstants::kitaev : CriticalConstants::color;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InvalidArgument("uniform grid needs step > 0 and hi >= lo");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

std::vector<double> refine_grid(std::vector<double> base, double lo, double hi, double step) {
  for (double g : uniform_grid(lo, hi, step)) base.push_back(g);
  std::sort(base.begin(), base.end());
  std::vector<double> out;
  for (double g : base) {
    if (out.empty() || g - out.back() > 1e-9) out.push_back(g);
  }
  return out;
}

std::vector<double> default_grid() { return refine_grid(uniform_grid(0.0, 2.0, 0.02), 0.2, 0.5, 0.005); }

CodeLattice kitaev_lattice_for(std::size_t n_qubits) {
  switch (n_qubits) {
    case 8: return build_kitaev(2, 2);
    case 12: return build_kitaev(3, 2);
    case 16: return build_kitaev(4, 2);
    case 18: return build_kitaev(3, 3);
    case 20: return build_kitaev(5, 2);
    default: throw InvalidArgument("no kitaev lattice registered for N=" + std::to_string(n_qubits));
  }
}

std::vector<double> SweepRecord::grid() const {
  std::vector<double> g;
  for (const auto& p : points) g.push_back(p.g);
  return g;
}

std::vector<double> SweepRecord::series(BoundKind kind) const {
  std::vector<double> out;
  for (const auto& p : points) {
    const std::optional<double>* v = nullptr;
    switch (kind) {
      case BoundKind::LE: v = &p.le; break;
      case BoundKind::RLE: v = &p.rle; break;
      case BoundKind::E_prime: v = &p.e_prime; break;
      case BoundKind::E_double_prime: v = &p.e_dprime; break;
      case BoundKind::E_witness: v = &p.e_w; break;
    }
    if (!v->has_value()) throw InvalidArgument("sweep did not compute " + to_string(kind));
    out.push_back(**v);
  }
  return out;
}

std::vector<std::string> hierarchy_violations(const SweepPoint& p, double tol) {
  std::vector<std::string> out;
  auto check = [&](const std::optional<double>& hi, const std::optional<double>& lo, const char* what) {
    if (hi && lo && *hi < *lo - tol) {
      out.push_back("g=" + fmt(p.g) + ": " + what + " violated (" + fmt(*hi) + " < " + fmt(*lo) + ")");
    }
  };
  check(p.le, p.rle, "LE >= RLE");
  check(p.rle, p.e_prime, "RLE >= E'");
  check(p.e_prime, p.e_dprime, "E' >= E''");
  check(p.e_prime, p.e_w, "E' >= E^w");
  if (!p.e_prime) {
    check(p.rle, p.e_w, "RLE >= E^w");
    check(p.le, p.e_w, "LE >= E^w");
  }
  if (!p.rle) check(p.le, p.e_prime, "LE >= E'");
  return out;
}

SweepRecord sweep(const CodeLattice& lat, const LoopSpec& spec, const std::vector<double>& grid,
                  const SweepOptions& options) {
  if (grid.empty()) throw InvalidArgument("empty g grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw InvalidArgument("g grid must be non-negative");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument("g grid must be strictly increasing");
  }
  SweepRecord rec;
  rec.lattice = lat.describe();
  rec.spec = spec;
  rec.region = Region::make(lat.n_qubits(), lat.loop_support(spec));
  std::optional<WitnessOperator> witness;
  if (options.witness) {
    witness.emplace(build_witness(lat, spec));
    rec.witness_labels = witness->labels();
  }
  if (!options.part_a.empty()) {
    rec.region = rec.region.with_part_a(options.part_a);
  } else if (witness) {
    rec.region = rec.region.with_part_a({witness->hub()});
  }
  const std::size_t m = rec.region.omega_bar.size();
  if (options.rle && m > options.rle_options.max_measured) {
    throw LimitExceeded("RLE is infeasible: " + std::to_string(m) + " measured qubits exceed the limit of " +
                        std::to_string(options.rle_options.max_measured));
  }
  if (options.le && m > options.le_options.max_measured) {
    throw LimitExceeded("LE is infeasible: " + std::to_string(m) + " measured qubits exceed the limit of " +
                        std::to_string(options.le_options.max_measured));
  }
  if (options.e_prime || options.e_dprime) {
    rec.setup = options.setup ? *options.setup : canonical_setup(lat, spec);
    rec.setup.validate(rec.region);
  }
  if (options.e_dprime) {
    rec.preferred = build_preferred_set(lat, rec.region, rec.setup, options.p_c, options.calibration_g, options.solver);
  }

  rec.points.resize(grid.size());
  parallel_for(grid.size(), options.workers, [&](std::size_t i) {
    const double g = grid[i];
    try {
      SweepPoint& p = rec.points[i];
      p.g = g;
      const Hamiltonian h = build_hamiltonian(lat, {g});
      const GroundStateResult gs = ground_state(h, {g}, lat, options.solver);
      p.energy = gs.energy;
      const QuantumState state = gs.vector;
      MeasureOptions mo;
      mo.normalized = options.normalized;
      if (options.e_prime) p.e_prime = setup_bound(state, rec.region, rec.setup, nullptr, mo).value;
      if (options.e_dprime) {
        const BoundValue b = setup_bound(state, rec.region, rec.setup, &*rec.preferred, mo);
        p.e_dprime = b.value;
        p.eps_m = b.epsilon_m;
      }
      if (witness) {
        const WitnessValue wv = witness_expectation(state, *witness);
        p.w = wv.w;
        p.e_w = wv.bound;
      }
      if (options.rle || options.le) {
        RleOptions ro = options.rle_options;
        ro.normalized = options.normalized;
        ro.keep_top = std::max(ro.keep_top, options.le_options.pauli_seeds);
        ro.max_measured = std::max(ro.max_measured, m);
        const RleResult rle = restricted_le(state, rec.region, ro);
        if (options.rle) {
          p.rle = rle.best.value;
          p.rle_setup = rle.best.setup;
        }
        if (options.le) {
          LeOptions lo = options.le_options;
          lo.normalized = options.normalized;
          lo.workers = 1;
          p.le = localizable_entanglement(gs.vector, rec.region, lo, &rle).best.value;
        }
      }
    } catch (const InvalidArgument& e) {
      rethrow_at(e, g);
    } catch (const LimitExceeded& e) {
      rethrow_at(e, g);
    } catch (const ConvergenceError& e) {
      rethrow_at(e, g);
    } catch (const InvariantViolation& e) {
      rethrow_at(e, g);
    }
  });
  for (const auto& p : rec.points) {
    for (auto& v : hierarchy_violations(p, options.hierarchy_tolerance)) rec.violations.push_back(std::move(v));
  }
  return rec;
}

std::vector<double> abs_derivative(std::span<const double> g, std::span<const double> e) {
  if (g.size() != e.size() || g.size() < 3) throw InvalidArgument("derivative needs at least 3 matching samples");
  std::vector<double> d(g.size() - 2);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double hm = g[i] - g[i - 1], hp = g[i + 1] - g[i];
    if (!(hm > 0.0) || !(hp > 0.0)) throw InvalidArgument("grid must be strictly increasing");
    const double v = (hm * hm * e[i + 1] - hp * hp * e[i - 1] + (hp * hp - hm * hm) * e[i]) / (hm * hp * (hm + hp));
    d[i - 1] = std::abs(v);
  }
  return d;
}

PeakResult derivative_peak(std::span<const double> g, std::span<const double> e, double max_spacing) {
  const std::vector<double> d = abs_derivative(g, e);
  const auto j = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
  if (j == 0 || j + 1 == d.size()) {
    throw InvalidArgument("derivative peak at the grid boundary (g=" + fmt(g[j + 1]) + "); widen the grid");
  }
  const double xa = g[j], xb = g[j + 1], xc = g[j + 2];
  const double ya = d[j - 1], yb = d[j], yc = d[j + 1];
  if (xb - xa > max_spacing + 1e-12 || xc - xb > max_spacing + 1e-12) {
    throw InvalidArgument("grid spacing near the peak at g=" + fmt(xb) + " exceeds " + fmt(max_spacing));
  }
  const double num = (xb - xa) * (xb - xa) * (yb - yc) - (xb - xc) * (xb - xc) * (yb - ya);
  const double den = (xb - xa) * (yb - yc) - (xb - xc) * (yb - ya);
  PeakResult r;
  r.index = j + 1;
  r.g_m = den == 0.0 ? xb : xb - 0.5 * num / den;
  // Parabola value at the vertex through Lagrange form.
  const double x = r.g_m;
  r.height = ya * (x - xb) * (x - xc) / ((xa - xb) * (xa - xc)) + yb * (x - xa) * (x - xc) / ((xb - xa) * (xb - xc)) +
             yc * (x - xa) * (x - xb) / ((xc - xa) * (xc - xb));
  return r;
}

std::size_t positive_prefix(std::span<const double> e) {
  std::size_t n = 0;
  while (n < e.size() && e[n] > 0.0) ++n;
  return n;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, double g_c) {
  if (points.size() < 3) throw InvalidArgument("scaling fit needs at least 3 system sizes");
  std::vector<double> x, y;
  for (const auto& [n, gm] : points) {
    if (!(n > 0.0)) throw InvalidArgument("system size must be positive");
    if (!(gm - g_c > 0.0)) {
      throw InvalidArgument("g_m(" + fmt(n) + ") = " + fmt(gm) + " does not exceed g_c = " + fmt(g_c));
    }
    x.push_back(std::log(n));
    y.push_back(std::log(gm - g_c));
  }
  const auto k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / k;
    my += y[i] / k;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("scaling fit needs distinct system sizes");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  ScalingFit fit;
  fit.g_c = g_c;
  fit.points = points;
  fit.exponent = -slope;
  fit.amplitude = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / k);
  return fit;
}

}  // namespace topoloc
