#include "topoloc/witness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "topoloc/error.hpp"

namespace topoloc {

namespace {

/// Factors of p on omega, relabelled to qubits 0..|omega|-1, sign +1.
PauliString local_part(const PauliString& p, const std::vector<std::size_t>& omega) {
  PauliString out(omega.size());
  for (std::size_t t = 0; t < omega.size(); ++t) out.set(t, p.at(omega[t]));
  return out;
}

/// Symplectic row over m <= 16 qubits: x bits low, z bits high.
std::uint32_t symplectic(const PauliString& p) {
  return static_cast<std::uint32_t>(p.x_mask()) | (static_cast<std::uint32_t>(p.z_mask()) << 16);
}

std::size_t gf2_rank(std::vector<std::uint32_t> rows) {
  std::size_t rank = 0;
  for (int bit = 31; bit >= 0; --bit) {
    const std::uint32_t b = std::uint32_t{1} << bit;
    auto it = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                           [b](std::uint32_t r) { return r & b; });
    if (it == rows.end()) continue;
    std::swap(*it, rows[rank]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != rank && (rows[i] & b)) rows[i] ^= rows[rank];
    }
    ++rank;
  }
  return rank;
}

/// p = coefficient * op with op carrying sign +1.
struct ScaledPauli {
  PauliString op;
  Complex coefficient{1.0, 0.0};
};

ScaledPauli multiply(const ScaledPauli& a, const PauliString& b) {
  const PauliProduct r = pauli_product(a.op, b);
  ScaledPauli out;
  out.coefficient = a.coefficient * r.phase.value() * static_cast<double>(r.value.sign());
  out.op = r.value;
  out.op.set_sign(+1);
  return out;
}

/// Tr[P rho] for a dense rho on P's qubits.
Complex dense_expectation(const PauliString& p, const Eigen::MatrixXcd& rho) {
  Complex acc = 0.0;
  const auto d = static_cast<std::uint64_t>(rho.rows());
  for (std::uint64_t b = 0; b < d; ++b) {
    const std::uint64_t a = b ^ p.x_mask();
    acc += p.amplitude(a) * rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return acc;
}

}  // namespace

WitnessCheck check_witness_conditions(const Region& region, const std::vector<PauliString>& generators) {
  WitnessCheck c;
  for (const auto& g : generators) {
    if (g.n_qubits() != region.n_qubits) {
      c.failure = "generator acts on a different number of qubits";
      return c;
    }
  }
  c.a_ok = true;
  for (std::size_t j = 0; j < generators.size() && c.a_ok; ++j) {
    for (std::size_t k = j + 1; k < generators.size() && c.a_ok; ++k) {
      for (auto q : region.omega_bar) {
        const Axis a = generators[j].at(q), b = generators[k].at(q);
        if (a != Axis::I && b != Axis::I && a != b) {
          c.a_ok = false;
          c.failure = "condition (a): s" + std::to_string(j + 1) + " and s" + std::to_string(k + 1) +
                      " carry different Paulis on qubit " + std::to_string(q + 1);
          break;
        }
      }
    }
  }

  const std::size_t m = region.omega.size();
  auto fail_b = [&](std::string why) {
    c.b_ok = false;
    if (c.failure.empty()) c.failure = "condition (b): " + why;
    return c;
  };
  if (m > 16) return fail_b("region too large to certify");
  if (generators.size() != m) {
    return fail_b(std::to_string(generators.size()) + " generators for a region of " + std::to_string(m) + " qubits");
  }
  std::vector<PauliString> local;
  std::vector<std::uint32_t> rows;
  for (const auto& g : generators) {
    local.push_back(local_part(g, region.omega));
    rows.push_back(symplectic(local.back()));
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      if (!commutes(local[j], local[k])) {
        return fail_b("restrictions of s" + std::to_string(j + 1) + " and s" + std::to_string(k + 1) +
                      " to the region anticommute");
      }
    }
  }
  if (gf2_rank(rows) != m) return fail_b("restrictions to the region are not independent");
  // Entropy across A:B of a stabilizer state is rank(G|_B) - |B|.
  for (std::uint32_t b = 1; b + 1 < (std::uint32_t{1} << m); ++b) {
    const std::uint32_t cols = b | (b << 16);
    std::vector<std::uint32_t> restricted;
    for (auto r : rows) restricted.push_back(r & cols);
    if (gf2_rank(restricted) <= static_cast<std::size_t>(std::popcount(b))) {
      return fail_b("restricted state is not genuinely multipartite entangled");
    }
  }
  c.b_ok = true;
  return c;
}

WitnessOperator::WitnessOperator(Region region, std::vector<PauliString> generators, std::vector<std::string> labels)
    : region_(std::move(region)), generators_(std::move(generators)), labels_(std::move(labels)) {
  const WitnessCheck check = check_witness_conditions(region_, generators_);
  if (!check.ok()) throw InvariantViolation("witness generators rejected: " + check.failure);
  const std::size_t m = generators_.size();
  if (m >= 20) throw LimitExceeded("witness expansion too large");

  products_.assign(std::size_t{1} << m, PauliString(region_.n_qubits));
  for (std::size_t s = 1; s < products_.size(); ++s) {
    const auto j = static_cast<std::size_t>(std::countr_zero(s));
    const PauliProduct r = pauli_product(products_[s & (s - 1)], generators_[j]);
    if (!r.phase.is_real()) throw InvariantViolation("witness generators do not commute");
    PauliString v = r.value;
    v.set_sign(v.sign() * (r.phase == Phase::minus_one() ? -1 : 1));
    products_[s] = v;
  }

  // Hub: the region qubit shared by every s_j with j >= 2.
  std::vector<std::size_t> common = region_.omega;
  for (std::size_t j = 1; j < m; ++j) {
    std::vector<std::size_t> keep;
    for (auto q : common) {
      if (generators_[j].at(q) != Axis::I) keep.push_back(q);
    }
    common = std::move(keep);
  }
  if (common.empty()) throw InvariantViolation("witness generators share no hub qubit");
  hub_ = common.front();
}

PauliSum WitnessOperator::expanded() const {
  PauliSum sum(region_.n_qubits);
  const double c = std::ldexp(1.0, -static_cast<int>(generators_.size()));
  sum.add(0.5 - c, products_[0]);
  for (std::size_t s = 1; s < products_.size(); ++s) sum.add(-c, products_[s]);
  return sum;
}

SparseOperator WitnessOperator::assemble(std::size_t max_qubits) const { return expanded().to_sparse(max_qubits); }

PauliString stabilizer_product(const CodeLattice& lat, std::string_view labels) {
  PauliString out(lat.n_qubits());
  std::size_t i = 0;
  if (labels.empty()) throw InvalidArgument("empty stabilizer product");
  while (i < labels.size()) {
    std::size_t j = i + 1;
    while (j < labels.size() && labels[j] >= '0' && labels[j] <= '9') ++j;
    const PauliString s = named_stabilizer(lat, labels.substr(i, j - i));
    const PauliProduct r = pauli_product(out, s);
    if (r.phase != Phase::one()) throw InvalidArgument("stabilizer product is not Hermitian with sign +1");
    out = r.value;
    i = j;
  }
  return out;
}

WitnessOperator build_witness(const CodeLattice& lat, const LoopSpec& spec) {
  if (lat.kind() != CodeKind::kitaev) throw InvalidArgument("witnesses are defined for the kitaev code only");
  lat.validate_spec(spec);
  const std::size_t nph = lat.width(), npv = lat.height();
  auto label = [&](char kind, std::size_t r, std::size_t c) {
    return std::string(1, kind) + std::to_string((r % npv) * nph + (c % nph) + 1);
  };
  const bool horizontal = spec.direction == Direction::h;
  const bool x_loop = spec.op == Axis::X;
  // The chain of crossed stabilizers runs along the loop; the closing
  // product covers the neighbouring row (column) of the dual type.
  const char chain = x_loop ? 'P' : 'V';
  const char closing = x_loop ? 'V' : 'P';
  const std::size_t rx = (npv - 1) / 2, rz = (rx + 1) % npv;
  const std::size_t cx = (nph - 1) / 2, cz = nph - 1;
  const std::size_t length = horizontal ? nph : npv;

  std::vector<std::string> labels;
  std::string s1;
  for (std::size_t t = 0; t < length; ++t) {
    if (horizontal) {
      s1 += x_loop ? label(closing, rx + 1, t) : label(closing, rz + npv - 1, t);
    } else {
      s1 += x_loop ? label(closing, t, cx + 1) : label(closing, t, cz + nph - 1);
    }
  }
  labels.push_back(s1);
  for (std::size_t a = 1; a < length; ++a) {
    std::string s;
    for (std::size_t t = a; t < length; ++t) {
      if (horizontal) {
        s += label(chain, x_loop ? rx : rz, t);
      } else {
        s += label(chain, t, x_loop ? cx : cz);
      }
    }
    labels.push_back(s);
  }
  std::vector<PauliString> gens;
  for (const auto& l : labels) gens.push_back(stabilizer_product(lat, l));
  return WitnessOperator(Region::make(lat.n_qubits(), lat.loop_support(spec)), std::move(gens), std::move(labels));
}

WitnessValue witness_bound(double w) { return {w, std::max(-2.0 * w, 0.0)}; }

WitnessValue witness_expectation(const QuantumState& state, const WitnessOperator& w) {
  if (state_qubits(state) != w.region().n_qubits) throw InvalidArgument("state and witness disagree on N");
  const auto& products = w.subset_products();
  double sum = 0.0;
  for (const auto& p : products) {
    Complex e;
    if (const auto* psi = std::get_if<StateVector>(&state)) {
      e = pauli_expectation(p, *psi);
    } else {
      e = std::get<DensityMatrix>(state).expectation(p);
    }
    sum += e.real();
  }
  return witness_bound(0.5 - sum / static_cast<double>(products.size()));
}

DecompositionReport verify_decomposition(const QuantumState& state, const WitnessOperator& w,
                                         const MeasurementSetup& setup) {
  const Region& region = w.region();
  const auto& gens = w.generators();
  const std::size_t m = gens.size();
  // Outcome bits of each generator's measured factors, and its sign.
  std::vector<std::uint64_t> outcome_mask(m, 0);
  std::vector<ScaledPauli> locals(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t t = 0; t < region.omega_bar.size(); ++t) {
      const auto q = region.omega_bar[t];
      const Axis a = gens[j].at(q);
      if (a == Axis::I) continue;
      if (setup.axes.size() != region.n_qubits || setup.axes[q] != a) {
        throw InvalidArgument("setup does not measure s" + std::to_string(j + 1) + " along its factor on qubit " +
                              std::to_string(q + 1));
      }
      outcome_mask[j] |= std::uint64_t{1} << t;
    }
    locals[j].op = local_part(gens[j], region.omega);
    locals[j].coefficient = static_cast<double>(gens[j].sign());
  }
  std::vector<ScaledPauli> prod(std::size_t{1} << m);
  prod[0].op = PauliString(region.omega.size());
  for (std::size_t s = 1; s < prod.size(); ++s) {
    const auto j = static_cast<std::size_t>(std::countr_zero(s));
    prod[s] = multiply(prod[s & (s - 1)], locals[j].op);
  }
  std::vector<double> sign_of(m);
  for (std::size_t j = 0; j < m; ++j) sign_of[j] = locals[j].coefficient.real();

  MeasureOptions mo;
  mo.skip_probability = 0.0;
  const OutcomeEnsemble ens = measure_ensemble(state, region, setup, nullptr, mo);
  const double scale = std::ldexp(1.0, -static_cast<int>(m));
  double recon = 0.0;
  for (const auto& e : ens.entries) {
    std::vector<double> eta(m);
    for (std::size_t j = 0; j < m; ++j) {
      eta[j] = sign_of[j] * ((std::popcount(e.k & outcome_mask[j]) & 1) ? -1.0 : 1.0);
    }
    Complex acc = 0.0;
    for (std::size_t s = 0; s < prod.size(); ++s) {
      double sign = 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        if ((s >> j) & 1) sign *= eta[j];
      }
      acc += sign * prod[s].coefficient * dense_expectation(prod[s].op, e.rho);
    }
    recon += e.p * (0.5 - scale * acc.real());
  }
  DecompositionReport r;
  r.w = witness_expectation(state, w).w;
  r.reconstructed = recon;
  r.residual = std::abs(r.w - recon);
  return r;
}

StarPtReport verify_star_pt_bound(std::size_t n, std::uint64_t seed) {
  if (n < 2 || n > 6) throw InvalidArgument("star check supports 2 to 6 nodes");
  StarPtReport rep;
  rep.n_omega = n;
  const std::size_t hub = n - 1;  // most significant bit, l_1 in the multi-index
  Graph g;
  g.n = n;
  g.adjacency.assign(n, {});
  for (std::size_t leaf = 0; leaf < hub; ++leaf) {
    g.adjacency[hub].push_back(leaf);
    g.adjacency[leaf].push_back(hub);
  }
  const StateVector psi = graph_state(g);
  const auto d = static_cast<Eigen::Index>(psi.size());
  const Eigen::Map<const Eigen::VectorXcd> v(psi.data(), d);
  const Eigen::MatrixXcd rho = v * v.adjoint();
  const std::uint64_t a_mask = std::uint64_t{1} << hub;
  const Eigen::MatrixXcd pt = partial_transpose(rho, a_mask);

  const std::uint64_t top = std::uint64_t{1} << (n - 1);
  rep.z_indices = {0, top, top - 1, 2 * top - 1};
  Eigen::MatrixXcd closed = Eigen::MatrixXcd::Zero(d, d);
  const double weights[4] = {0.5, 0.5, 0.5, -0.5};
  for (int t = 0; t < 4; ++t) {
    const std::uint64_t l = rep.z_indices[static_cast<std::size_t>(t)];
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        const int parity = std::popcount(static_cast<std::uint64_t>(a) & l) + std::popcount(static_cast<std::uint64_t>(b) & l);
        closed(a, b) += weights[t] * ((parity & 1) ? -1.0 : 1.0) * rho(a, b);
      }
    }
  }
  rep.formula_error = (closed - pt).cwiseAbs().maxCoeff();

  auto singular_values = [&](double f, double h) {
    Eigen::MatrixXcd dm = (h - f / 2.0) * Eigen::MatrixXcd::Identity(d, d) + f * pt;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dm);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      const double s = svd.singularValues()(i);
      if (std::none_of(out.begin(), out.end(), [&](double x) { return std::abs(x - s) < 1e-9; })) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  // rho^{T_A} has spectrum {1/2, -1/2} plus a null space once there are more than two nodes.
  auto predicted = [&](double f, double h) {
    std::vector<double> out;
    std::vector<double> candidates{std::abs(h), std::abs(h - f)};
    if (n > 2) candidates.push_back(std::abs(h - f / 2.0));
    for (double s : candidates) {
      if (std::none_of(out.begin(), out.end(), [&](double x) { return std::abs(x - s) < 1e-9; })) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  double sv_error = 0.0;
  for (auto [f, h] : {std::pair{2.0, 1.0}, std::pair{0.7, 0.4}, std::pair{1.3, -0.2}}) {
    const auto got = singular_values(f, h), want = predicted(f, h);
    if (got.size() != want.size()) {
      sv_error = 1.0;
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i) sv_error = std::max(sv_error, std::abs(got[i] - want[i]));
  }
  rep.d_singular_values = singular_values(2.0, 1.0);
  rep.d_norm = rep.d_singular_values.back();

  // rho_F = F |G><G| + (1-F) Z_hub |G><G| Z_hub has w = 1/2 - F.
  Eigen::VectorXcd zv = v;
  for (Eigen::Index a = 0; a < d; ++a) {
    if (static_cast<std::uint64_t>(a) & a_mask) zv(a) = -zv(a);
  }
  const Eigen::MatrixXcd rho_z = zv * zv.adjoint();
  for (double f : {0.55, 0.7, 0.85, 1.0}) {
    const Eigen::MatrixXcd rf = f * rho + (1.0 - f) * rho_z;
    const double w = 0.5 - f;
    rep.tightness_error = std::max(rep.tightness_error, std::abs(negativity(rf, a_mask) - (-2.0 * w)));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXcd r(d);
    for (Eigen::Index a = 0; a < d; ++a) r(a) = Complex(gauss(rng), gauss(rng));
    // Bias half the samples toward |G> so that w < 0 is exercised.
    if (trial % 2 == 0) r = r * 0.3 + v * std::sqrt(static_cast<double>(d));
    r.normalize();
    const Eigen::MatrixXcd rr = r * r.adjoint();
    const double w = 0.5 - std::norm(v.dot(r));
    rep.bound_violation = std::max(rep.bound_violation, -2.0 * w - negativity(rr, a_mask));
  }
  rep.bound_violation = std::max(rep.bound_violation, 0.0);
  rep.hub_negativity = negativity(rho, a_mask);
  rep.passed = rep.formula_error < 1e-12 && sv_error < 1e-10 && std::abs(rep.d_norm - 1.0) < 1e-12 &&
               rep.tightness_error < 1e-10 && rep.bound_violation < 1e-10 && std::abs(rep.hub_negativity - 1.0) < 1e-10;
  return rep;
}

}  // namespace topoloc
