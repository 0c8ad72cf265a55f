#include "topoloc/oracle.hpp"

#include <cmath>
#include <functional>

#include "topoloc/error.hpp"

namespace topoloc::oracle {

namespace {

Eigen::Matrix2cd sigma(Axis a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case Axis::X: m << 0, 1, 1, 0; break;
    case Axis::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case Axis::Z: m << 1, 0, 0, -1; break;
    default: m.setIdentity();
  }
  return m;
}

/// Kronecker product over all qubits; qubit q is bit q of the index.
Eigen::MatrixXcd kron_all(const std::vector<Eigen::Matrix2cd>& local) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
  for (std::size_t q = local.size(); q-- > 0;) {
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        next.block<2, 2>(2 * i, 2 * j) = out(i, j) * local[q];
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Outcome k projects each measured qubit onto a rank-one projector P = v v^dagger, so the
/// unnormalized conditional state is Phi^dagger rho Phi with Phi = (embedding of Omega) x (product of v).
std::vector<DenseOutcome> ensemble_from(const Eigen::MatrixXcd& rho, const Region& region,
                                        const std::function<Eigen::Matrix2cd(std::size_t t, int bit)>& projector) {
  const std::size_t m = region.omega_bar.size();
  if (m > 16) throw LimitExceeded("dense ensemble limited to 16 measured qubits");
  const auto dim = static_cast<std::uint64_t>(rho.rows());
  const auto d_omega = static_cast<Eigen::Index>(std::size_t{1} << region.omega.size());
  std::vector<DenseOutcome> out(std::size_t{1} << m);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::vector<Eigen::Vector2cd> vs(m);
    for (std::size_t t = 0; t < m; ++t) {
      const Eigen::Matrix2cd p = projector(t, static_cast<int>((k >> t) & 1));
      const Eigen::Index c = p.col(0).norm() >= p.col(1).norm() ? 0 : 1;
      vs[t] = p.col(c).normalized();
    }
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), d_omega);
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
      Complex amp = 1.0;
      for (std::size_t t = 0; t < m; ++t) amp *= vs[t]((idx >> region.omega_bar[t]) & 1);
      Eigen::Index col = 0;
      for (std::size_t t = 0; t < region.omega.size(); ++t) {
        col |= static_cast<Eigen::Index>((idx >> region.omega[t]) & 1) << t;
      }
      phi(static_cast<Eigen::Index>(idx), col) = amp;
    }
    const Eigen::MatrixXcd r = phi.adjoint() * rho * phi;
    const double p = r.trace().real();
    out[k].p = p;
    if (p > 0.0) out[k].rho = r / p;
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd dense_pauli(const PauliString& p, std::size_t max_qubits) {
  checked_dimension(p.n_qubits(), max_qubits);
  std::vector<Eigen::Matrix2cd> local(p.n_qubits());
  for (std::size_t q = 0; q < p.n_qubits(); ++q) local[q] = sigma(p.at(q));
  return static_cast<double>(p.sign()) * kron_all(local);
}

Eigen::MatrixXcd dense_state(const QuantumState& s, std::size_t max_qubits) {
  if (const auto* psi = std::get_if<StateVector>(&s)) {
    checked_dimension(qubits_of_length(psi->size()), max_qubits);
    Eigen::Map<const Eigen::VectorXcd> v(psi->data(), static_cast<Eigen::Index>(psi->size()));
    return v * v.adjoint();
  }
  return std::get<DensityMatrix>(s).to_dense(max_qubits);
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, const Region& region) {
  const std::size_t n = region.n_qubits;
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << region.omega.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  std::uint64_t bar_mask = 0;
  for (auto q : region.omega_bar) bar_mask |= std::uint64_t{1} << q;
  auto reduce = [&](std::uint64_t i) {
    Eigen::Index l = 0;
    for (std::size_t t = 0; t < region.omega.size(); ++t) l |= static_cast<Eigen::Index>((i >> region.omega[t]) & 1) << t;
    return l;
  };
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t i = 0; i < dim; ++i) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      if ((i & bar_mask) != (j & bar_mask)) continue;
      out(reduce(i), reduce(j)) += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

std::vector<DenseOutcome> dense_ensemble(const Eigen::MatrixXcd& rho, const Region& region,
                                         const MeasurementSetup& setup) {
  return ensemble_from(rho, region, [&](std::size_t t, int bit) -> Eigen::Matrix2cd {
    const double s = bit ? -1.0 : 1.0;
    return 0.5 * (Eigen::Matrix2cd::Identity() + s * sigma(setup.axes[region.omega_bar[t]]));
  });
}

std::vector<DenseOutcome> dense_ensemble(const Eigen::MatrixXcd& rho, const Region& region,
                                         std::span<const QubitBasis> angles) {
  if (angles.size() != region.omega_bar.size()) throw InvalidArgument("one basis per measured qubit");
  return ensemble_from(rho, region, [&](std::size_t t, int bit) -> Eigen::Matrix2cd {
    const double c = std::cos(angles[t].theta / 2.0), s = std::sin(angles[t].theta / 2.0);
    const Complex e = std::polar(1.0, angles[t].phi);
    Eigen::Matrix2cd u;
    u << c, std::conj(e) * s, -e * s, c;
    // Basis vector U^dagger |bit>.
    const Eigen::Vector2cd v = u.adjoint().col(bit);
    return v * v.adjoint();
  });
}

double dense_bound(const std::vector<DenseOutcome>& ens, std::uint64_t a_mask, bool normalized) {
  double e = 0.0;
  for (const auto& o : ens) {
    if (o.p > 0.0) e += o.p * negativity(o.rho, a_mask, normalized);
  }
  return e;
}

Eigen::MatrixXcd dense_witness_operator(const WitnessOperator& w) {
  const auto d = static_cast<Eigen::Index>(checked_dimension(w.generators().front().n_qubits(), 16));
  Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(d, d);
  for (const auto& s : w.generators()) {
    prod = prod * (0.5 * (Eigen::MatrixXcd::Identity(d, d) + dense_pauli(s, 16)));
  }
  return 0.5 * Eigen::MatrixXcd::Identity(d, d) - prod;
}

double dense_witness(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op) {
  return (rho.transpose().cwiseProduct(op)).sum().real();
}

double dense_witness(const Eigen::MatrixXcd& rho, const WitnessOperator& w) {
  return dense_witness(rho, dense_witness_operator(w));
}

StateVector random_state(std::size_t n_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  StateVector v(checked_dimension(n_qubits, 16));
  double norm2 = 0.0;
  for (auto& a : v) {
    a = Complex(nd(rng), nd(rng));
    norm2 += std::norm(a);
  }
  for (auto& a : v) a /= std::sqrt(norm2);
  return v;
}

Eigen::MatrixXcd random_density(std::size_t n_qubits, std::size_t rank, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(checked_dimension(n_qubits, 12));
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd g(d, static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(nd(rng), nd(rng));
  }
  Eigen::MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace topoloc::oracle
