#include "topoloc/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "topoloc/error.hpp"

namespace topoloc {

std::size_t qubits_of_length(std::size_t length) {
  if (length == 0 || !std::has_single_bit(length)) {
    throw InvalidArgument("state length " + std::to_string(length) + " is not a power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(length));
}

double norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return std::sqrt(s);
}

std::size_t state_qubits(const QuantumState& s) {
  if (const auto* v = std::get_if<StateVector>(&s)) return qubits_of_length(v->size());
  return std::get<DensityMatrix>(s).n_qubits();
}

SupportBasis SupportBasis::full(std::size_t n_qubits, std::size_t max_qubits) {
  SupportBasis b;
  b.n_ = n_qubits;
  b.states_.resize(checked_dimension(n_qubits, max_qubits));
  for (std::size_t i = 0; i < b.states_.size(); ++i) b.states_[i] = i;
  b.contiguous_ = true;
  return b;
}

SupportBasis SupportBasis::closure(std::size_t n_qubits, std::span<const std::uint64_t> seeds,
                                   std::span<const std::uint64_t> masks, std::size_t max_size) {
  // Reduced row echelon basis of span(masks), pivot = highest set bit.
  std::vector<std::uint64_t> basis;
  for (std::uint64_t m : masks) {
    for (std::uint64_t b : basis) {
      if (m & (std::uint64_t{1} << (63 - std::countl_zero(b)))) m ^= b;
    }
    if (m == 0) continue;
    const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(m));
    for (auto& b : basis) {
      if (b & top) b ^= m;
    }
    basis.push_back(m);
  }
  auto reduce = [&](std::uint64_t v) {
    for (std::uint64_t b : basis) {
      if (v & (std::uint64_t{1} << (63 - std::countl_zero(b)))) v ^= b;
    }
    return v;
  };
  std::vector<std::uint64_t> cosets;
  for (std::uint64_t s : seeds) cosets.push_back(reduce(s));
  std::sort(cosets.begin(), cosets.end());
  cosets.erase(std::unique(cosets.begin(), cosets.end()), cosets.end());

  if (basis.size() >= 63) throw LimitExceeded("support closure is astronomically large");
  const std::size_t span_size = std::size_t{1} << basis.size();
  if (cosets.size() > max_size / span_size) {
    throw LimitExceeded("support closure has " + std::to_string(cosets.size()) + " x " + std::to_string(span_size) +
                        " states, above the cap of " + std::to_string(max_size));
  }
  SupportBasis out;
  out.n_ = n_qubits;
  out.states_.reserve(cosets.size() * span_size);
  for (std::uint64_t c : cosets) {
    for (std::size_t e = 0; e < span_size; ++e) {
      std::uint64_t v = c;
      for (std::size_t t = 0; t < basis.size(); ++t) {
        if ((e >> t) & 1) v ^= basis[t];
      }
      out.states_.push_back(v);
    }
  }
  std::sort(out.states_.begin(), out.states_.end());
  out.contiguous_ = out.states_.size() == (std::size_t{1} << n_qubits);
  return out;
}

std::vector<std::uint64_t> SupportBasis::support_of(std::span<const Complex> v, double tol) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > tol) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> SupportBasis::find(std::uint64_t b) const {
  if (contiguous_) {
    if (b < states_.size()) return static_cast<std::size_t>(b);
    return std::nullopt;
  }
  auto it = std::lower_bound(states_.begin(), states_.end(), b);
  if (it == states_.end() || *it != b) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::size_t SupportBasis::index_of(std::uint64_t b) const {
  auto i = find(b);
  if (!i) throw InvariantViolation("basis state " + std::to_string(b) + " is outside the support");
  return *i;
}

StateVector SupportBasis::expand(std::span<const Complex> compact) const {
  if (compact.size() != states_.size()) throw InvalidArgument("compact vector length mismatch");
  StateVector full(std::size_t{1} << n_, Complex(0.0));
  for (std::size_t i = 0; i < states_.size(); ++i) full[states_[i]] = compact[i];
  return full;
}

StateVector SupportBasis::restrict(std::span<const Complex> full, double tol) const {
  if (full.size() != (std::size_t{1} << n_)) throw InvalidArgument("full vector length mismatch");
  StateVector out(states_.size());
  double kept = 0.0, total = 0.0;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    out[i] = full[states_[i]];
    kept += std::norm(out[i]);
  }
  for (const auto& a : full) total += std::norm(a);
  if (total - kept > tol) throw InvariantViolation("state has weight outside the support basis");
  return out;
}

DensityMatrix::DensityMatrix(SupportBasis basis, Eigen::MatrixXcd rho) : basis_(std::move(basis)), rho_(std::move(rho)) {
  if (rho_.rows() != static_cast<Eigen::Index>(basis_.size()) || rho_.cols() != rho_.rows()) {
    throw InvalidArgument("density matrix shape does not match its basis");
  }
}

DensityMatrix DensityMatrix::from_pure(std::span<const Complex> psi, SupportBasis basis) {
  StateVector c = basis.restrict(psi);
  Eigen::Map<const Eigen::VectorXcd> v(c.data(), static_cast<Eigen::Index>(c.size()));
  Eigen::MatrixXcd rho = v * v.adjoint();
  return DensityMatrix(std::move(basis), std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_qubits, std::size_t max_qubits) {
  SupportBasis b = SupportBasis::full(n_qubits, max_qubits);
  const auto d = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix(std::move(b), std::move(rho));
}

double DensityMatrix::trace() const { return rho_.trace().real(); }

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ab|^2 for Hermitian rho.
  return rho_.cwiseAbs2().sum();
}

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::size_t DensityMatrix::threshold(double eps) {
  std::size_t dropped = 0;
  for (Eigen::Index j = 0; j < rho_.cols(); ++j) {
    for (Eigen::Index i = 0; i < rho_.rows(); ++i) {
      if (rho_(i, j) != Complex(0.0) && std::abs(rho_(i, j)) < eps) {
        rho_(i, j) = 0.0;
        ++dropped;
      }
    }
  }
  return dropped;
}

void DensityMatrix::normalize_trace() {
  const double t = trace();
  if (t <= 0.0) throw InvariantViolation("density matrix has non-positive trace");
  rho_ /= t;
}

Complex DensityMatrix::expectation(const PauliString& p) const {
  if (p.n_qubits() != n_qubits()) throw InvalidArgument("Pauli string acts on a different qubit count");
  // <b|P rho|b> = amp(b^x) rho_{b^x, b} since P|a> = amp(a)|a^x>.
  Complex acc = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const std::uint64_t b = basis_.state(i);
    auto j = basis_.find(b ^ p.x_mask());
    if (!j) continue;
    acc += p.amplitude(b ^ p.x_mask()) * rho_(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i));
  }
  return acc;
}

Eigen::MatrixXcd DensityMatrix::to_dense(std::size_t max_qubits) const {
  const auto d = static_cast<Eigen::Index>(checked_dimension(n_qubits(), max_qubits));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      out(static_cast<Eigen::Index>(basis_.state(i)), static_cast<Eigen::Index>(basis_.state(j))) =
          rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

}  // namespace topoloc
