#include "topoloc/localize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "topoloc/error.hpp"
#include "topoloc/parallel.hpp"

namespace topoloc {

namespace {

constexpr std::size_t kMaxRegionQubits = 12;
constexpr std::size_t kMaxMeasuredQubits = 40;

std::uint64_t pext(std::uint64_t v, std::uint64_t mask) {
  std::uint64_t out = 0;
  int t = 0;
  while (mask) {
    const std::uint64_t low = mask & (~mask + 1);
    if (v & low) out |= std::uint64_t{1} << t;
    ++t;
    mask &= mask - 1;
  }
  return out;
}

/// Full-index offsets for every outcome k and every reduced index l.
struct SliceTables {
  std::vector<std::uint64_t> bar;
  std::vector<std::uint64_t> om;

  explicit SliceTables(const Region& r) {
    if (r.omega_bar.size() > 30) throw LimitExceeded("too many measured qubits to enumerate outcomes");
    bar.assign(std::size_t{1} << r.omega_bar.size(), 0);
    for (std::size_t k = 1; k < bar.size(); ++k) {
      bar[k] = bar[k & (k - 1)] | (std::uint64_t{1} << r.omega_bar[static_cast<std::size_t>(std::countr_zero(k))]);
    }
    om.assign(std::size_t{1} << r.omega.size(), 0);
    for (std::size_t l = 1; l < om.size(); ++l) {
      om[l] = om[l & (l - 1)] | (std::uint64_t{1} << r.omega[static_cast<std::size_t>(std::countr_zero(l))]);
    }
  }
};

/// Negativity of a pure reduced state through its Schmidt coefficients.
class SchmidtNegativity {
 public:
  SchmidtNegativity(std::size_t n_bits, std::uint64_t a_mask, bool normalized)
      : dim_(std::size_t{1} << n_bits), normalized_(normalized) {
    const std::uint64_t full = dim_ - 1;
    const auto na = static_cast<std::size_t>(std::popcount(a_mask & full));
    if (na == 0 || na == n_bits) throw InvalidArgument("bipartition must leave both sides nonempty");
    da_ = std::size_t{1} << na;
    db_ = dim_ / da_;
    la_.resize(dim_);
    lb_.resize(dim_);
    for (std::size_t l = 0; l < dim_; ++l) {
      la_[l] = static_cast<std::uint32_t>(pext(l, a_mask));
      lb_[l] = static_cast<std::uint32_t>(pext(l, full & ~a_mask));
    }
    m_.resize(static_cast<Eigen::Index>(da_), static_cast<Eigen::Index>(db_));
  }

  /// amps has dim_ entries with squared norm p > 0.
  double operator()(const Complex* amps, double p) {
    double value = 0.0;
    if (da_ == 2 || db_ == 2) {
      // Two Schmidt values: (s1 + s2)^2 - 1 = 2 sqrt(det G) for normalized G.
      const bool a_small = da_ == 2;
      const std::size_t len = a_small ? db_ : da_;
      row0_.assign(len, 0.0);
      row1_.assign(len, 0.0);
      for (std::size_t l = 0; l < dim_; ++l) {
        if (a_small) {
          (la_[l] ? row1_ : row0_)[lb_[l]] = amps[l];
        } else {
          (lb_[l] ? row1_ : row0_)[la_[l]] = amps[l];
        }
      }
      // det G = |u|^2 |v - (u.v / |u|^2) u|^2 with u the row of larger norm. The explicit
      // residual keeps det accurate near zero, where g00 g11 - |g01|^2 cancels.
      double n0 = 0.0, n1 = 0.0;
      for (std::size_t c = 0; c < len; ++c) n0 += std::norm(row0_[c]), n1 += std::norm(row1_[c]);
      const auto& u = n0 >= n1 ? row0_ : row1_;
      const auto& v = n0 >= n1 ? row1_ : row0_;
      const double nu = std::max(n0, n1);
      double det = 0.0;
      if (nu > 0.0) {
        Complex uv = 0.0;
        for (std::size_t c = 0; c < len; ++c) uv += std::conj(u[c]) * v[c];
        const Complex k = uv / nu;
        double r = 0.0;
        for (std::size_t c = 0; c < len; ++c) r += std::norm(v[c] - k * u[c]);
        det = nu * r;
      }
      value = 2.0 * std::sqrt(std::max(det, 0.0)) / p;
    } else {
      for (std::size_t l = 0; l < dim_; ++l) m_(la_[l], lb_[l]) = amps[l];
      const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(da_ <= db_ ? Eigen::MatrixXcd(m_) : Eigen::MatrixXcd(m_.adjoint()));
      const double s = svd.singularValues().sum();
      value = s * s / p - 1.0;
      if (normalized_) value /= static_cast<double>(std::min(da_, db_) - 1);
    }
    return std::max(value, 0.0);
  }

 private:
  std::size_t dim_;
  std::size_t da_ = 0, db_ = 0;
  bool normalized_;
  std::vector<std::uint32_t> la_, lb_;
  std::vector<Complex> row0_, row1_;
  Eigen::MatrixXcd m_;
};

struct Accumulated {
  double weighted = 0.0;
  double kept = 0.0;
  double total = 0.0;
};

/// Sums p_k E(rho^k) over outcomes of an already rotated pure state.
Accumulated accumulate_pure(const Complex* rotated, const SliceTables& tables, SchmidtNegativity& neg,
                            const PreferredSet* restrict, double skip, std::vector<Complex>& slice) {
  Accumulated acc;
  const std::size_t dim = tables.om.size();
  slice.resize(dim);
  auto visit = [&](std::uint64_t k) {
    const std::uint64_t base = tables.bar[k];
    double p = 0.0;
    for (std::size_t l = 0; l < dim; ++l) {
      slice[l] = rotated[base | tables.om[l]];
      p += std::norm(slice[l]);
    }
    acc.total += p;
    if (p <= 0.0 || (!restrict && p < skip)) return;
    acc.kept += p;
    acc.weighted += p * neg(slice.data(), p);
  };
  if (restrict) {
    for (auto k : restrict->outcomes) {
      if (k >= tables.bar.size()) throw InvalidArgument("preferred outcome index out of range");
      visit(k);
    }
  } else {
    for (std::uint64_t k = 0; k < tables.bar.size(); ++k) visit(k);
  }
  return acc;
}

using Unitary2 = std::array<Complex, 4>;  // row major

Unitary2 unitary_of(QubitBasis b) {
  const double c = std::cos(b.theta / 2.0), s = std::sin(b.theta / 2.0);
  const Complex e = std::polar(1.0, b.phi);
  return {Complex(c), std::conj(e) * s, -e * s, Complex(c)};
}

Unitary2 unitary_of(Axis a) {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (a) {
    case Axis::X:
      return {Complex(r), Complex(r), Complex(r), Complex(-r)};
    case Axis::Y:
      return {Complex(r), Complex(0.0, -r), Complex(r), Complex(0.0, r)};
    default:
      return {Complex(1.0), Complex(0.0), Complex(0.0), Complex(1.0)};
  }
}

void rotate_qubit(std::span<Complex> v, std::size_t q, const Unitary2& u) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & bit) continue;
    const Complex a = v[i], b = v[i | bit];
    v[i] = u[0] * a + u[1] * b;
    v[i | bit] = u[2] * a + u[3] * b;
  }
}

const StateVector& checked_pure(const StateVector& psi, const Region& region) {
  if (qubits_of_length(psi.size()) != region.n_qubits) throw InvalidArgument("state and region disagree on N");
  return psi;
}

StateVector rotated_copy(const StateVector& psi, const Region& region, const MeasurementSetup& setup) {
  StateVector v = psi;
  for (auto q : region.omega_bar) {
    if (setup.axes[q] != Axis::Z) rotate_qubit(v, q, unitary_of(setup.axes[q]));
  }
  return v;
}

/// Unnormalized reduced states of every outcome of a density matrix, stored
/// as G[kz][l][l'][kxy].
class DensityContraction {
 public:
  DensityContraction(const DensityMatrix& dm, const Region& region, const MeasurementSetup& setup,
                     std::size_t max_entries)
      : n_omega_(region.omega.size()) {
    std::uint64_t zmask = 0, xymask = 0, ymask = 0;
    for (std::size_t t = 0; t < region.omega_bar.size(); ++t) {
      const auto q = region.omega_bar[t];
      const std::uint64_t bit = std::uint64_t{1} << q;
      if (setup.axes[q] == Axis::Z) {
        zmask |= bit;
        kz_mask_ |= std::uint64_t{1} << t;
      } else {
        xymask |= bit;
        kxy_mask_ |= std::uint64_t{1} << t;
        if (setup.axes[q] == Axis::Y) ymask |= bit;
      }
    }
    const auto nz = static_cast<std::size_t>(std::popcount(zmask));
    const auto nxy = static_cast<std::size_t>(std::popcount(xymask));
    const std::size_t m = region.omega_bar.size();
    if (m + 2 * n_omega_ >= 63 || (std::size_t{1} << (m + 2 * n_omega_)) > max_entries) {
      throw LimitExceeded("density-matrix contraction exceeds the configured entry cap");
    }
    l_dim_ = std::size_t{1} << n_omega_;
    xy_dim_ = std::size_t{1} << nxy;
    g_.assign((std::size_t{1} << nz) * l_dim_ * l_dim_ * xy_dim_, Complex(0.0));

    const auto& basis = dm.basis();
    const std::size_t d = basis.size();
    std::vector<std::uint64_t> zi(d), xyi(d), li(d);
    std::vector<int> yi(d);
    for (std::size_t i = 0; i < d; ++i) {
      const std::uint64_t s = basis.state(i);
      zi[i] = pext(s, zmask);
      xyi[i] = pext(s, xymask);
      std::uint64_t l = 0;
      for (std::size_t t = 0; t < n_omega_; ++t) l |= ((s >> region.omega[t]) & 1) << t;
      li[i] = l;
      yi[i] = std::popcount(s & ymask);
    }
    const auto& rho = dm.matrix();
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        if (zi[i] != zi[j]) continue;
        const Complex r = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (r == Complex(0.0)) continue;
        // phase (-i)^{y(a)} i^{y(b)} with a = row, b = column.
        const Complex ph = ipow[((yi[j] - yi[i]) % 4 + 4) % 4];
        g_[index(zi[i], li[i], li[j], xyi[i] ^ xyi[j])] += ph * r;
      }
    }
    const double scale = std::ldexp(1.0, -static_cast<int>(nxy));
    for (std::size_t base = 0; base < g_.size(); base += xy_dim_) {
      Complex* blk = g_.data() + base;
      for (std::size_t h = 1; h < xy_dim_; h <<= 1) {
        for (std::size_t i = 0; i < xy_dim_; i += h << 1) {
          for (std::size_t j = i; j < i + h; ++j) {
            const Complex a = blk[j], b = blk[j + h];
            blk[j] = a + b;
            blk[j + h] = a - b;
          }
        }
      }
      for (std::size_t i = 0; i < xy_dim_; ++i) blk[i] *= scale;
    }
  }

  /// Unnormalized reduced state for outcome k.
  Eigen::MatrixXcd reduced(std::uint64_t k) const {
    const std::uint64_t kz = pext(k, kz_mask_), kxy = pext(k, kxy_mask_);
    const auto L = static_cast<Eigen::Index>(l_dim_);
    Eigen::MatrixXcd r(L, L);
    for (std::size_t l = 0; l < l_dim_; ++l) {
      for (std::size_t lp = 0; lp < l_dim_; ++lp) {
        r(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(lp)) = g_[index(kz, l, lp, kxy)];
      }
    }
    return r;
  }

  double probability(std::uint64_t k) const {
    const std::uint64_t kz = pext(k, kz_mask_), kxy = pext(k, kxy_mask_);
    double p = 0.0;
    for (std::size_t l = 0; l < l_dim_; ++l) p += g_[index(kz, l, l, kxy)].real();
    return p;
  }

 private:
  std::size_t index(std::uint64_t kz, std::uint64_t l, std::uint64_t lp, std::uint64_t d) const {
    return ((static_cast<std::size_t>(kz) * l_dim_ + l) * l_dim_ + lp) * xy_dim_ + d;
  }

  std::size_t n_omega_;
  std::size_t l_dim_ = 0, xy_dim_ = 0;
  std::uint64_t kz_mask_ = 0, kxy_mask_ = 0;
  std::vector<Complex> g_;
};

void check_region_state(const QuantumState& state, const Region& region, const MeasurementSetup& setup) {
  if (state_qubits(state) != region.n_qubits) throw InvalidArgument("state and region disagree on N");
  setup.validate(region);
}

void check_completeness(double total, const MeasureOptions& options) {
  if (std::abs(1.0 - total) > options.completeness_tolerance) {
    throw InvariantViolation("outcome probabilities sum to " + std::to_string(total) + " instead of 1");
  }
}

double epsilon_for(const PreferredSet& k, std::size_t outcome_space) {
  return static_cast<double>(outcome_space - std::min(outcome_space, k.size())) * k.p_c;
}

}  // namespace

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::LE: return "LE";
    case BoundKind::RLE: return "RLE";
    case BoundKind::E_prime: return "E_prime";
    case BoundKind::E_double_prime: return "E_dprime";
    case BoundKind::E_witness: return "E_w";
  }
  return "?";
}

Region Region::make(std::size_t n_qubits, std::vector<std::size_t> omega, std::vector<std::size_t> part_a) {
  if (n_qubits == 0 || n_qubits > kMaxPauliQubits) throw InvalidArgument("invalid qubit count for a region");
  if (omega.size() < 2) throw InvalidArgument("region needs at least two qubits");
  if (omega.size() > kMaxRegionQubits) throw LimitExceeded("region is larger than 12 qubits");
  std::set<std::size_t> seen;
  for (auto q : omega) {
    if (q >= n_qubits) throw InvalidArgument("region qubit " + std::to_string(q + 1) + " out of range");
    if (!seen.insert(q).second) throw InvalidArgument("region qubit " + std::to_string(q + 1) + " repeated");
  }
  Region r;
  r.n_qubits = n_qubits;
  r.omega = std::move(omega);
  for (std::size_t q = 0; q < n_qubits; ++q) {
    if (!seen.count(q)) r.omega_bar.push_back(q);
  }
  if (r.omega_bar.size() > kMaxMeasuredQubits) throw LimitExceeded("too many measured qubits");
  return r.with_part_a(part_a.empty() ? std::vector<std::size_t>{r.omega[0]} : std::move(part_a));
}

Region Region::with_part_a(std::vector<std::size_t> a) const {
  if (a.empty() || a.size() >= omega.size()) throw InvalidArgument("part A must be a nonempty proper subset of omega");
  std::set<std::size_t> s(a.begin(), a.end());
  if (s.size() != a.size()) throw InvalidArgument("part A repeats a qubit");
  for (auto q : a) {
    if (std::find(omega.begin(), omega.end(), q) == omega.end()) {
      throw InvalidArgument("part A qubit " + std::to_string(q + 1) + " is not in omega");
    }
  }
  Region r = *this;
  r.part_a = std::vector<std::size_t>(s.begin(), s.end());
  return r;
}

std::uint64_t Region::a_mask() const {
  std::uint64_t m = 0;
  for (std::size_t t = 0; t < omega.size(); ++t) {
    if (std::find(part_a.begin(), part_a.end(), omega[t]) != part_a.end()) m |= std::uint64_t{1} << t;
  }
  return m;
}

std::vector<std::vector<std::size_t>> bipartitions_of_size(const Region& region, std::size_t m) {
  const std::size_t n = region.omega.size();
  if (m == 0 || m >= n) throw InvalidArgument("part size must lie strictly between 0 and |omega|");
  std::vector<std::vector<std::size_t>> out;
  for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << n); ++sel) {
    if (static_cast<std::size_t>(std::popcount(sel)) != m) continue;
    std::vector<std::size_t> a;
    for (std::size_t t = 0; t < n; ++t) {
      if ((sel >> t) & 1) a.push_back(region.omega[t]);
    }
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& rho, std::uint64_t a_mask) {
  const auto d = static_cast<std::uint64_t>(rho.rows());
  if (rho.cols() != rho.rows() || !std::has_single_bit(d)) throw InvalidArgument("partial transpose needs a 2^n square matrix");
  Eigen::MatrixXcd out(rho.rows(), rho.cols());
  for (std::uint64_t j = 0; j < d; ++j) {
    for (std::uint64_t i = 0; i < d; ++i) {
      const std::uint64_t ip = (i & ~a_mask) | (j & a_mask);
      const std::uint64_t jp = (j & ~a_mask) | (i & a_mask);
      out(static_cast<Eigen::Index>(ip), static_cast<Eigen::Index>(jp)) =
          rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

double negativity(const Eigen::MatrixXcd& rho, std::uint64_t a_mask, bool normalized) {
  const auto d = static_cast<std::uint64_t>(rho.rows());
  if (rho.cols() != rho.rows() || d < 4 || !std::has_single_bit(d)) {
    throw InvalidArgument("negativity needs a 2^n x 2^n matrix with n >= 2");
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(d));
  a_mask &= d - 1;
  const auto na = static_cast<std::size_t>(std::popcount(a_mask));
  if (na == 0 || na == n) throw InvalidArgument("bipartition must leave both sides nonempty");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8) throw InvalidArgument("negativity input is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-8) throw InvalidArgument("negativity input does not have unit trace");
  Eigen::MatrixXcd pt = partial_transpose(rho, a_mask);
  pt = 0.5 * (pt + pt.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pt, Eigen::EigenvaluesOnly);
  double value = es.eigenvalues().cwiseAbs().sum() - 1.0;
  if (normalized) value /= static_cast<double>((std::size_t{1} << std::min(na, n - na)) - 1);
  return std::max(value, 0.0);
}

double pure_negativity(std::span<const Complex> amps, std::uint64_t a_mask, bool normalized) {
  const std::size_t n = qubits_of_length(amps.size());
  double p = 0.0;
  for (const auto& a : amps) p += std::norm(a);
  if (p <= 0.0) throw InvalidArgument("zero vector has no negativity");
  SchmidtNegativity neg(n, a_mask, normalized);
  return neg(amps.data(), p);
}

MeasurementSetup MeasurementSetup::uniform(const Region& region, Axis axis) {
  if (axis == Axis::I) throw InvalidArgument("measurement axis must be X, Y or Z");
  MeasurementSetup s;
  s.axes.assign(region.n_qubits, Axis::I);
  for (auto q : region.omega_bar) s.axes[q] = axis;
  return s;
}

MeasurementSetup MeasurementSetup::parse(std::string_view text, const Region& region) {
  MeasurementSetup s;
  s.axes.assign(region.n_qubits, Axis::I);
  std::optional<Axis> rest;
  std::string buf(text);
  std::stringstream groups(buf);
  std::string group;
  auto trim = [](std::string v) {
    const auto b = v.find_first_not_of(" \t");
    if (b == std::string::npos) return std::string();
    const auto e = v.find_last_not_of(" \t");
    return v.substr(b, e - b + 1);
  };
  while (std::getline(groups, group, ';')) {
    group = trim(group);
    if (group.empty()) continue;
    const auto colon = group.find(':');
    if (colon == std::string::npos) throw InvalidArgument("setup group '" + group + "' lacks ':'");
    const std::string axis_text = trim(group.substr(0, colon));
    if (axis_text.size() != 1) throw InvalidArgument("setup axis '" + axis_text + "' is not X, Y or Z");
    const Axis axis = axis_from_char(axis_text[0]);
    if (axis == Axis::I) throw InvalidArgument("setup axis must be X, Y or Z");
    const std::string list = trim(group.substr(colon + 1));
    if (list == "rest") {
      if (rest) throw InvalidArgument("'rest' used twice in setup");
      rest = axis;
      continue;
    }
    std::stringstream items(list);
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      std::size_t pos = 0;
      long label = 0;
      try {
        label = std::stol(item, &pos);
      } catch (const std::exception&) {
        throw InvalidArgument("setup label '" + item + "' is not a number");
      }
      if (pos != item.size() || label < 1 || static_cast<std::size_t>(label) > region.n_qubits) {
        throw InvalidArgument("setup label '" + item + "' out of range");
      }
      const auto q = static_cast<std::size_t>(label - 1);
      if (std::find(region.omega.begin(), region.omega.end(), q) != region.omega.end()) {
        throw InvalidArgument("setup assigns qubit " + item + " inside the target region");
      }
      if (s.axes[q] != Axis::I) throw InvalidArgument("setup assigns qubit " + item + " twice");
      s.axes[q] = axis;
    }
  }
  for (auto q : region.omega_bar) {
    if (s.axes[q] == Axis::I) {
      if (!rest) throw InvalidArgument("setup leaves qubit " + std::to_string(q + 1) + " unassigned");
      s.axes[q] = *rest;
    }
  }
  return s;
}

std::string MeasurementSetup::to_string() const {
  std::string out;
  for (Axis a : {Axis::Z, Axis::X, Axis::Y}) {
    std::string list;
    for (std::size_t q = 0; q < axes.size(); ++q) {
      if (axes[q] != a) continue;
      if (!list.empty()) list += ',';
      list += std::to_string(q + 1);
    }
    if (list.empty()) continue;
    if (!out.empty()) out += "; ";
    out += std::string(1, axis_char(a)) + ":" + list;
  }
  return out;
}

void MeasurementSetup::validate(const Region& region) const {
  if (axes.size() != region.n_qubits) throw InvalidArgument("setup covers a different number of qubits");
  for (auto q : region.omega) {
    if (axes[q] != Axis::I) throw InvalidArgument("setup measures target qubit " + std::to_string(q + 1));
  }
  for (auto q : region.omega_bar) {
    if (axes[q] == Axis::I) throw InvalidArgument("setup leaves qubit " + std::to_string(q + 1) + " unmeasured");
  }
}

MeasurementSetup canonical_setup(const CodeLattice& lat, const LoopSpec& spec) {
  lat.validate_spec(spec);
  const auto loop = lat.loop_support(spec);
  const std::set<std::size_t> on_loop(loop.begin(), loop.end());
  MeasurementSetup s;
  s.axes.assign(lat.n_qubits(), Axis::I);

  std::set<std::size_t> special;
  Axis special_axis = Axis::Z, other_axis = Axis::X;
  if (lat.kind() == CodeKind::kitaev) {
    const bool x_loop = spec.op == Axis::X;
    const auto& stabs = x_loop ? lat.plaquettes() : lat.vertices();
    for (auto idx : lat.crossed_stabilizers(spec)) {
      for (auto q : stabs[idx].qubits) special.insert(q);
    }
    special_axis = x_loop ? Axis::Z : Axis::X;
    other_axis = x_loop ? Axis::X : Axis::Z;
  } else {
    // Both loop types share a support. The field along x makes the g -> 0+
    // state an X-loop eigenstate, so edge neighbours are measured in Z.
    for (const auto& e : lat.edges()) {
      if (on_loop.count(e[0])) special.insert(e[1]);
      if (on_loop.count(e[1])) special.insert(e[0]);
    }
    special_axis = Axis::Z;
    other_axis = Axis::X;
  }
  for (std::size_t q = 0; q < lat.n_qubits(); ++q) {
    if (on_loop.count(q)) continue;
    s.axes[q] = special.count(q) ? special_axis : other_axis;
  }
  return s;
}

bool PreferredSet::contains(std::uint64_t k) const { return std::binary_search(outcomes.begin(), outcomes.end(), k); }

OutcomeEnsemble measure_ensemble(const QuantumState& state, const Region& region, const MeasurementSetup& setup,
                                 const PreferredSet* restrict, const MeasureOptions& options) {
  check_region_state(state, region, setup);
  OutcomeEnsemble ens;
  ens.region = region;
  ens.setup = setup;
  ens.outcome_space = std::size_t{1} << region.omega_bar.size();
  if (restrict) ens.restriction = *restrict;
  const auto L = static_cast<Eigen::Index>(std::size_t{1} << region.omega.size());

  std::vector<std::uint64_t> ks;
  if (restrict) {
    ks = restrict->outcomes;
  } else {
    ks.resize(ens.outcome_space);
    for (std::size_t k = 0; k < ks.size(); ++k) ks[k] = k;
  }
  double all = 0.0;
  auto keep = [&](std::uint64_t k, Eigen::MatrixXcd rho) {
    const double p = rho.trace().real();
    all += p;
    if (p <= 0.0 || (!restrict && p < options.skip_probability)) return;
    ens.entries.push_back({k, p, rho / p});
    ens.total_probability += p;
  };

  if (const auto* psi = std::get_if<StateVector>(&state)) {
    const SliceTables tables(region);
    const StateVector v = rotated_copy(*psi, region, setup);
    for (auto k : ks) {
      if (k >= ens.outcome_space) throw InvalidArgument("preferred outcome index out of range");
      Eigen::VectorXcd a(L);
      for (Eigen::Index l = 0; l < L; ++l) a(l) = v[tables.bar[k] | tables.om[static_cast<std::size_t>(l)]];
      keep(k, a * a.adjoint());
    }
  } else {
    const DensityContraction c(std::get<DensityMatrix>(state), region, setup, options.max_contraction_entries);
    for (auto k : ks) {
      if (k >= ens.outcome_space) throw InvalidArgument("preferred outcome index out of range");
      keep(k, c.reduced(k));
    }
  }
  if (!restrict) check_completeness(all, options);
  return ens;
}

std::vector<double> outcome_probabilities(const QuantumState& state, const Region& region,
                                          const MeasurementSetup& setup, const MeasureOptions& options) {
  check_region_state(state, region, setup);
  const std::size_t space = std::size_t{1} << region.omega_bar.size();
  std::vector<double> p(space, 0.0);
  if (const auto* psi = std::get_if<StateVector>(&state)) {
    const SliceTables tables(region);
    const StateVector v = rotated_copy(*psi, region, setup);
    for (std::size_t k = 0; k < space; ++k) {
      for (auto off : tables.om) p[k] += std::norm(v[tables.bar[k] | off]);
    }
  } else {
    const DensityContraction c(std::get<DensityMatrix>(state), region, setup, options.max_contraction_entries);
    for (std::size_t k = 0; k < space; ++k) p[k] = c.probability(k);
  }
  return p;
}

BoundValue bound_from_ensemble(const OutcomeEnsemble& ens, bool normalized) {
  BoundValue b;
  b.setup = ens.setup;
  const std::uint64_t a = ens.region.a_mask();
  for (const auto& e : ens.entries) b.value += e.p * negativity(e.rho, a, normalized);
  b.probability_mass = ens.total_probability;
  if (ens.restriction) {
    b.kind = BoundKind::E_double_prime;
    b.epsilon_m = epsilon_for(*ens.restriction, ens.outcome_space);
  } else {
    b.kind = BoundKind::E_prime;
  }
  return b;
}

BoundValue setup_bound(const QuantumState& state, const Region& region, const MeasurementSetup& setup,
                       const PreferredSet* restrict, const MeasureOptions& options) {
  check_region_state(state, region, setup);
  BoundValue b;
  b.kind = restrict ? BoundKind::E_double_prime : BoundKind::E_prime;
  b.setup = setup;
  const std::size_t space = std::size_t{1} << region.omega_bar.size();
  if (restrict) b.epsilon_m = epsilon_for(*restrict, space);

  if (const auto* psi = std::get_if<StateVector>(&state)) {
    const SliceTables tables(region);
    SchmidtNegativity neg(region.omega.size(), region.a_mask(), options.normalized);
    const StateVector v = rotated_copy(*psi, region, setup);
    std::vector<Complex> slice;
    const Accumulated acc = accumulate_pure(v.data(), tables, neg, restrict, options.skip_probability, slice);
    if (!restrict) check_completeness(acc.total, options);
    b.value = acc.weighted;
    b.probability_mass = acc.kept;
    return b;
  }
  const DensityContraction c(std::get<DensityMatrix>(state), region, setup, options.max_contraction_entries);
  const std::uint64_t a = region.a_mask();
  double all = 0.0, kept = 0.0, value = 0.0;
  auto visit = [&](std::uint64_t k) {
    Eigen::MatrixXcd r = c.reduced(k);
    const double p = r.trace().real();
    all += p;
    if (p <= 0.0 || (!restrict && p < options.skip_probability)) return;
    kept += p;
    value += p * negativity(r / p, a, options.normalized);
  };
  if (restrict) {
    for (auto k : restrict->outcomes) {
      if (k >= space) throw InvalidArgument("preferred outcome index out of range");
      visit(k);
    }
  } else {
    for (std::uint64_t k = 0; k < space; ++k) visit(k);
    check_completeness(all, options);
  }
  b.value = value;
  b.probability_mass = kept;
  return b;
}

PreferredSet build_preferred_set(const std::vector<const QuantumState*>& calibration_states,
                                 const std::vector<double>& calibration_g, const Region& region,
                                 const MeasurementSetup& setup, double p_c) {
  if (!(p_c > 0.0)) throw InvalidArgument("p_c must be positive");
  if (calibration_states.empty()) throw InvalidArgument("preferred set needs at least one calibration state");
  std::set<std::uint64_t> k;
  for (const auto* s : calibration_states) {
    const auto p = outcome_probabilities(*s, region, setup);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > p_c) k.insert(i);
    }
  }
  if (k.empty()) throw InvariantViolation("preferred set is empty; the measurement setup is broken");
  PreferredSet out;
  out.outcomes.assign(k.begin(), k.end());
  out.p_c = p_c;
  out.calibration = calibration_g;
  return out;
}

PreferredSet build_preferred_set(const CodeLattice& lat, const Region& region, const MeasurementSetup& setup,
                                 double p_c, const std::vector<double>& calibration_g, const SolverOptions& solver) {
  if (std::find(calibration_g.begin(), calibration_g.end(), 0.0) == calibration_g.end()) {
    throw InvalidArgument("calibration points must include g = 0");
  }
  std::vector<QuantumState> states;
  states.reserve(calibration_g.size());
  for (double g : calibration_g) {
    const Hamiltonian h = build_hamiltonian(lat, {g});
    states.emplace_back(ground_state(h, {g}, lat, solver).vector);
  }
  std::vector<const QuantumState*> ptrs;
  for (const auto& s : states) ptrs.push_back(&s);
  return build_preferred_set(ptrs, calibration_g, region, setup, p_c);
}

RleResult restricted_le(const QuantumState& state, const Region& region, const RleOptions& options) {
  if (state_qubits(state) != region.n_qubits) throw InvalidArgument("state and region disagree on N");
  const std::size_t m = region.omega_bar.size();
  if (m > options.max_measured) {
    throw LimitExceeded("RLE over " + std::to_string(m) + " measured qubits exceeds the exhaustive limit of " +
                        std::to_string(options.max_measured));
  }
  RleResult result;
  result.best.kind = BoundKind::RLE;
  result.best.value = -1.0;
  const std::size_t keep = std::max<std::size_t>(1, options.keep_top);
  MeasurementSetup current = MeasurementSetup::uniform(region, Axis::Z);

  auto offer = [&](double value) {
    ++result.setups_evaluated;
    if (value > result.best.value) {
      result.best.value = value;
      result.best.setup = current;
    }
    if (result.top.size() < keep || value > result.top.back().first) {
      auto pos = std::upper_bound(result.top.begin(), result.top.end(), value,
                                  [](double v, const auto& e) { return v > e.first; });
      result.top.insert(pos, {value, current});
      if (result.top.size() > keep) result.top.pop_back();
    }
  };
  static constexpr Axis kOrder[3] = {Axis::Z, Axis::X, Axis::Y};

  if (const auto* psi = std::get_if<StateVector>(&state)) {
    const SliceTables tables(region);
    SchmidtNegativity neg(region.omega.size(), region.a_mask(), options.normalized);
    std::vector<StateVector> buffers(m + 1);
    std::vector<const StateVector*> level(m + 1, nullptr);
    level[0] = psi;
    std::vector<Complex> slice;
    auto dfs = [&](auto&& self, std::size_t t) -> void {
      if (t == m) {
        const Accumulated acc =
            accumulate_pure(level[m]->data(), tables, neg, nullptr, options.measure.skip_probability, slice);
        check_completeness(acc.total, options.measure);
        offer(acc.weighted);
        return;
      }
      const std::size_t q = region.omega_bar[t];
      for (Axis a : kOrder) {
        current.axes[q] = a;
        if (a == Axis::Z) {
          level[t + 1] = level[t];
        } else {
          buffers[t + 1] = *level[t];
          rotate_qubit(buffers[t + 1], q, unitary_of(a));
          level[t + 1] = &buffers[t + 1];
        }
        self(self, t + 1);
      }
      current.axes[q] = Axis::Z;
    };
    dfs(dfs, 0);
  } else {
    MeasureOptions mo = options.measure;
    mo.normalized = options.normalized;
    const std::size_t total = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(m)) + 0.5);
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      for (std::size_t t = m; t-- > 0;) {
        current.axes[region.omega_bar[t]] = kOrder[c % 3];
        c /= 3;
      }
      offer(setup_bound(state, region, current, nullptr, mo).value);
    }
  }
  result.best.value = std::max(result.best.value, 0.0);
  return result;
}

QubitBasis QubitBasis::from_axis(Axis a) {
  switch (a) {
    case Axis::X: return {std::numbers::pi / 2, 0.0};
    case Axis::Y: return {std::numbers::pi / 2, std::numbers::pi / 2};
    case Axis::Z: return {0.0, 0.0};
    default: throw InvalidArgument("measurement axis must be X, Y or Z");
  }
}

namespace {

class GeneralEvaluator {
 public:
  GeneralEvaluator(const StateVector& psi, const Region& region, bool normalized)
      : psi_(psi), region_(region), tables_(region), neg_(region.omega.size(), region.a_mask(), normalized) {}

  double operator()(std::span<const QubitBasis> angles) {
    work_ = psi_;
    for (std::size_t t = 0; t < region_.omega_bar.size(); ++t) {
      const auto& b = angles[t];
      if (b.theta == 0.0 && b.phi == 0.0) continue;
      rotate_qubit(work_, region_.omega_bar[t], unitary_of(b));
    }
    return accumulate_pure(work_.data(), tables_, neg_, nullptr, 0.0, slice_).weighted;
  }

 private:
  const StateVector& psi_;
  const Region& region_;
  SliceTables tables_;
  SchmidtNegativity neg_;
  StateVector work_;
  std::vector<Complex> slice_;
};

struct NmOutcome {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Nelder-Mead maximization with restarts from the incumbent.
template <class F>
NmOutcome nelder_mead_max(F&& f, std::vector<double> x0, double step, double tol, std::size_t max_eval) {
  const std::size_t n = x0.size();
  NmOutcome out;
  out.x = x0;
  out.value = f(x0);
  out.evaluations = 1;
  if (n == 0) return out;

  for (int restart = 0; restart < 4 && out.evaluations < max_eval; ++restart) {
    const double before = out.value;
    std::vector<std::vector<double>> pts(n + 1, out.x);
    std::vector<double> val(n + 1);
    val[0] = out.value;
    for (std::size_t i = 0; i < n; ++i) {
      pts[i + 1][i] += step;
      val[i + 1] = f(pts[i + 1]);
      ++out.evaluations;
    }
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (out.evaluations < max_eval) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] > val[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
      if (val[best] - val[worst] <= tol) break;
      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);
      }
      for (std::size_t d = 0; d < n; ++d) xr[d] = centroid[d] + (centroid[d] - pts[worst][d]);
      const double fr = f(xr);
      ++out.evaluations;
      if (fr > val[best]) {
        for (std::size_t d = 0; d < n; ++d) xe[d] = centroid[d] + 2.0 * (centroid[d] - pts[worst][d]);
        const double fe = f(xe);
        ++out.evaluations;
        if (fe > fr) {
          pts[worst] = xe;
          val[worst] = fe;
        } else {
          pts[worst] = xr;
          val[worst] = fr;
        }
        continue;
      }
      if (fr > val[second]) {
        pts[worst] = xr;
        val[worst] = fr;
        continue;
      }
      const bool outside = fr > val[worst];
      for (std::size_t d = 0; d < n; ++d) {
        xc[d] = outside ? centroid[d] + 0.5 * (xr[d] - centroid[d]) : centroid[d] + 0.5 * (pts[worst][d] - centroid[d]);
      }
      const double fc = f(xc);
      ++out.evaluations;
      if (fc > (outside ? fr : val[worst])) {
        pts[worst] = xc;
        val[worst] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
        val[i] = f(pts[i]);
        ++out.evaluations;
      }
    }
    const auto it = std::max_element(val.begin(), val.end());
    if (*it > out.value) {
      out.value = *it;
      out.x = pts[static_cast<std::size_t>(it - val.begin())];
    }
    if (out.value - before <= tol) break;
  }
  return out;
}

std::vector<QubitBasis> to_angles(std::span<const double> x) {
  std::vector<QubitBasis> a(x.size() / 2);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = {x[2 * i], x[2 * i + 1]};
  return a;
}

}  // namespace

double general_setup_bound(const StateVector& psi, const Region& region, std::span<const QubitBasis> angles,
                           bool normalized) {
  checked_pure(psi, region);
  if (angles.size() != region.omega_bar.size()) throw InvalidArgument("one basis per measured qubit is required");
  GeneralEvaluator eval(psi, region, normalized);
  return eval(angles);
}

LeResult localizable_entanglement(const StateVector& psi, const Region& region, const LeOptions& options,
                                  const RleResult* rle) {
  checked_pure(psi, region);
  const std::size_t m = region.omega_bar.size();
  if (m > options.max_measured) {
    throw LimitExceeded("LE over " + std::to_string(m) + " measured qubits exceeds the optimization limit of " +
                        std::to_string(options.max_measured));
  }
  RleResult own;
  if (!rle) {
    RleOptions ro;
    ro.max_measured = std::max(options.max_measured, m);
    ro.normalized = options.normalized;
    ro.keep_top = std::max<std::size_t>(1, options.pauli_seeds);
    own = restricted_le(psi, region, ro);
    rle = &own;
  }

  std::vector<std::vector<double>> starts;
  for (std::size_t i = 0; i < std::min(options.pauli_seeds, rle->top.size()); ++i) {
    std::vector<double> x;
    for (auto q : region.omega_bar) {
      const auto b = QubitBasis::from_axis(rle->top[i].second.axes[q]);
      x.push_back(b.theta);
      x.push_back(b.phi);
    }
    starts.push_back(std::move(x));
  }
  for (std::size_t i = 0; i < options.random_starts; ++i) {
    std::seed_seq seq{options.seed, static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> theta(0.0, std::numbers::pi), phi(0.0, 2.0 * std::numbers::pi);
    std::vector<double> x;
    for (std::size_t t = 0; t < m; ++t) {
      x.push_back(theta(rng));
      x.push_back(phi(rng));
    }
    starts.push_back(std::move(x));
  }

  std::vector<NmOutcome> runs(starts.size());
  parallel_for(starts.size(), options.workers, [&](std::size_t i) {
    GeneralEvaluator eval(psi, region, options.normalized);
    auto f = [&](const std::vector<double>& x) { return eval(to_angles(x)); };
    runs[i] = nelder_mead_max(f, starts[i], options.initial_step, options.tolerance, options.max_evaluations_per_start);
  });

  LeResult out;
  out.starts = runs.size();
  out.best.kind = BoundKind::LE;
  out.optimizer_value = -1.0;
  std::size_t best = runs.size();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out.evaluations += runs[i].evaluations;
    if (runs[i].value > out.optimizer_value) {
      out.optimizer_value = runs[i].value;
      best = i;
    }
  }
  if (best < runs.size() && out.optimizer_value > rle->best.value) {
    out.best.value = out.optimizer_value;
    out.angles = to_angles(runs[best].x);
  } else {
    out.best.value = rle->best.value;
    out.best.setup = rle->best.setup;
    for (auto q : region.omega_bar) out.angles.push_back(QubitBasis::from_axis(rle->best.setup->axes[q]));
  }
  out.optimizer_value = std::max(out.optimizer_value, 0.0);
  return out;
}

}  // namespace topoloc
