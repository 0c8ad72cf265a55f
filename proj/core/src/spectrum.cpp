#include "topoloc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "topoloc/error.hpp"

namespace topoloc {

Hamiltonian::Hamiltonian(PauliSum terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_.terms()) {
    const std::uint64_t x = t.op.x_mask();
    if (x != 0 && std::find(flip_masks_.begin(), flip_masks_.end(), x) == flip_masks_.end()) {
      flip_masks_.push_back(x);
    }
  }
}

void Hamiltonian::apply(std::span<const Complex> in, std::span<Complex> out) const { terms_.apply(in, out); }

SparseOperator Hamiltonian::to_sparse(std::size_t max_qubits) const { return terms_.to_sparse(max_qubits); }

Eigen::MatrixXd Hamiltonian::to_dense(std::size_t max_qubits) const {
  if (!terms_.is_real()) throw InvalidArgument("dense real matrix requested for a complex Hamiltonian");
  const std::size_t dim = checked_dimension(n_qubits(), max_qubits);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [c, op] : terms_.terms()) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      m(static_cast<Eigen::Index>(b ^ op.x_mask()), static_cast<Eigen::Index>(b)) += c * op.amplitude(b).real();
    }
  }
  return m;
}

Hamiltonian build_hamiltonian(const CodeLattice& lat, FieldParams params) {
  if (!(params.g >= 0.0) || !std::isfinite(params.g)) {
    throw InvalidArgument("field strength g must be finite and non-negative");
  }
  const std::size_t n = lat.n_qubits();
  PauliSum sum(n);
  for (const auto& s : stabilizer_generators(lat)) sum.add(-1.0, s);
  if (params.g != 0.0) {
    const Axis field = lat.kind() == CodeKind::kitaev ? Axis::Z : Axis::X;
    for (std::size_t q = 0; q < n; ++q) sum.add(-params.g, PauliString::from_factors(n, {{q, field}}));
  }
  return Hamiltonian(std::move(sum));
}

SectorHamiltonian::SectorHamiltonian(const Hamiltonian& h, SupportBasis basis) : basis_(std::move(basis)) {
  const std::size_t d = basis_.size();
  if (d > std::numeric_limits<std::uint32_t>::max()) throw LimitExceeded("sector too large");
  diag_.assign(d, 0.0);
  std::map<std::uint64_t, std::size_t> group;
  for (const auto& [c, op] : h.terms().terms()) {
    const std::uint64_t x = op.x_mask();
    if (x == 0) {
      for (std::size_t i = 0; i < d; ++i) diag_[i] += c * op.amplitude(basis_.state(i)).real();
      continue;
    }
    auto [it, inserted] = group.emplace(x, flips_.size());
    if (inserted) {
      Flip f;
      f.target.resize(d);
      f.value.assign(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        auto j = basis_.find(basis_.state(i) ^ x);
        if (!j) throw InvalidArgument("Hamiltonian does not preserve the requested sector");
        f.target[i] = static_cast<std::uint32_t>(*j);
      }
      flips_.push_back(std::move(f));
    }
    Flip& f = flips_[it->second];
    for (std::size_t i = 0; i < d; ++i) {
      const Complex a = c * op.amplitude(basis_.state(i) ^ x);
      if (a.imag() != 0.0) throw InvalidArgument("sector Hamiltonian must be real");
      f.value[i] += a.real();
    }
  }
}

void SectorHamiltonian::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t d = diag_.size();
  for (std::size_t i = 0; i < d; ++i) out[i] = diag_[i] * in[i];
  for (const auto& f : flips_) {
    for (std::size_t i = 0; i < d; ++i) out[i] += f.value[i] * in[f.target[i]];
  }
}

void SectorHamiltonian::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t d = diag_.size();
  for (std::size_t i = 0; i < d; ++i) out[i] = diag_[i] * in[i];
  for (const auto& f : flips_) {
    for (std::size_t i = 0; i < d; ++i) out[i] += f.value[i] * in[f.target[i]];
  }
}

Eigen::MatrixXd SectorHamiltonian::to_dense() const {
  const auto d = static_cast<Eigen::Index>(diag_.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = diag_[static_cast<std::size_t>(i)];
  for (const auto& f : flips_) {
    for (Eigen::Index i = 0; i < d; ++i) m(i, f.target[static_cast<std::size_t>(i)]) += f.value[static_cast<std::size_t>(i)];
  }
  return m;
}

GroundStateResult lanczos_ground_state(const SectorHamiltonian& h, std::span<const double> start,
                                       const SolverOptions& options) {
  const std::size_t d = h.dimension();
  if (start.size() != d) throw InvalidArgument("start vector does not match the sector dimension");
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(start.data(), static_cast<Eigen::Index>(d));
  if (v.norm() == 0.0) throw InvalidArgument("Lanczos start vector is zero");
  v.normalize();
  const Eigen::VectorXd reference = v;

  const std::size_t m_max = std::max<std::size_t>(2, std::min(options.krylov_dimension, d));
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m_max));
  Eigen::VectorXd w(static_cast<Eigen::Index>(d));

  GroundStateResult result;
  result.sector_dimension = d;
  result.gap = std::numeric_limits<double>::infinity();
  bool first_cycle = true;

  for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
    std::vector<double> alpha, beta;
    basis.col(0) = v;
    std::size_t m = 0;
    bool invariant = false;
    for (std::size_t j = 0; j < m_max; ++j) {
      h.apply(std::span<const double>(basis.col(static_cast<Eigen::Index>(j)).data(), d),
              std::span<double>(w.data(), d));
      ++result.iterations;
      alpha.push_back(basis.col(static_cast<Eigen::Index>(j)).dot(w));
      const auto cols = static_cast<Eigen::Index>(j + 1);
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd coeff = basis.leftCols(cols).transpose() * w;
        w.noalias() -= basis.leftCols(cols) * coeff;
      }
      m = j + 1;
      const double b = w.norm();
      if (b < 1e-12 * std::max(1.0, std::abs(alpha.back()))) {
        invariant = true;
        break;
      }
      if (j + 1 == m_max) break;
      beta.push_back(b);
      basis.col(static_cast<Eigen::Index>(j + 1)) = w / b;
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
      if (i + 1 < m) {
        t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
        t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    if (first_cycle && m >= 2) result.gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    first_cycle = false;

    Eigen::VectorXd x = basis.leftCols(static_cast<Eigen::Index>(m)) * y;
    x.normalize();
    h.apply(std::span<const double>(x.data(), d), std::span<double>(w.data(), d));
    const double energy = x.dot(w);
    const double residual = (w - energy * x).norm();
    v = x;
    result.energy = energy;
    result.residual = residual;
    if (residual <= options.residual_tolerance || invariant) break;
  }
  if (result.residual > options.residual_tolerance) {
    throw ConvergenceError("Lanczos stalled at residual " + std::to_string(result.residual) + " after " +
                           std::to_string(result.iterations) + " matrix products");
  }
  if (v.dot(reference) < 0.0) v = -v;
  result.vector.resize(d);
  for (std::size_t i = 0; i < d; ++i) result.vector[i] = v(static_cast<Eigen::Index>(i));
  return result;
}

GroundStateResult ground_state(const Hamiltonian& h, FieldParams params, const CodeLattice& lat,
                               const SolverOptions& options) {
  if (h.n_qubits() != lat.n_qubits()) throw InvalidArgument("Hamiltonian and lattice disagree on N");
  if (!(params.g >= 0.0)) throw InvalidArgument("field strength g must be non-negative");
  StateVector seed = perturbative_ground_state(lat, options.max_qubits);

  if (params.g == 0.0) {
    GroundStateResult r;
    StateVector hv(seed.size());
    h.apply(seed, hv);
    Complex e = 0.0;
    for (std::size_t i = 0; i < seed.size(); ++i) e += std::conj(seed[i]) * hv[i];
    double res = 0.0;
    for (std::size_t i = 0; i < seed.size(); ++i) res += std::norm(hv[i] - e.real() * seed[i]);
    r.energy = e.real();
    r.residual = std::sqrt(res);
    r.degenerate = true;
    r.gap = 0.0;
    r.vector = std::move(seed);
    r.sector_dimension = SupportBasis::support_of(r.vector, 1e-14).size();
    return r;
  }

  const auto support = SupportBasis::support_of(seed, 1e-14);
  SupportBasis basis =
      SupportBasis::closure(lat.n_qubits(), support, h.flip_masks(), options.max_sector_dimension);
  SectorHamiltonian sector(h, basis);
  StateVector compact = basis.restrict(seed);
  std::vector<double> start(compact.size());
  for (std::size_t i = 0; i < compact.size(); ++i) start[i] = compact[i].real();

  GroundStateResult r = lanczos_ground_state(sector, start, options);
  if (r.gap < options.gap_tolerance) {
    throw ConvergenceError("ground state at g=" + std::to_string(params.g) + " is numerically degenerate (gap " +
                           std::to_string(r.gap) + ")");
  }
  r.vector = basis.expand(r.vector);
  return r;
}

Eigen::VectorXd dense_spectrum(const Hamiltonian& h, std::size_t max_qubits) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.to_dense(max_qubits), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace topoloc
