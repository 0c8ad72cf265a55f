#include "topoloc/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>
#include <sstream>

#include "topoloc/error.hpp"

namespace topoloc {

namespace {

std::uint64_t bit(std::size_t q) { return std::uint64_t{1} << q; }

int parity(std::uint64_t v) { return std::popcount(v) & 1; }

void require_same_size(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw InvalidArgument("Pauli strings act on different qubit counts: " +
                          std::to_string(a.n_qubits()) + " vs " + std::to_string(b.n_qubits()));
  }
}

}  // namespace

char axis_char(Axis a) {
  switch (a) {
    case Axis::I: return 'I';
    case Axis::X: return 'X';
    case Axis::Y: return 'Y';
    case Axis::Z: return 'Z';
  }
  return '?';
}

Axis axis_from_char(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'I': return Axis::I;
    case 'X': return Axis::X;
    case 'Y': return Axis::Y;
    case 'Z': return Axis::Z;
    default: throw InvalidArgument(std::string("not a Pauli axis: '") + c + "'");
  }
}

Complex Phase::value() const {
  switch (k_) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::string Phase::to_string() const {
  static constexpr const char* names[] = {"+1", "+i", "-1", "-i"};
  return names[k_];
}

PauliString::PauliString(std::size_t n_qubits) : n_(n_qubits) {
  if (n_qubits > kMaxPauliQubits) {
    throw LimitExceeded("Pauli strings support at most 64 qubits, got " + std::to_string(n_qubits));
  }
}

PauliString PauliString::from_factors(std::size_t n_qubits,
                                      std::initializer_list<std::pair<std::size_t, Axis>> factors,
                                      int sign) {
  PauliString p(n_qubits);
  p.set_sign(sign);
  for (const auto& [q, a] : factors) p.set(q, a);
  return p;
}

PauliString PauliString::uniform(std::size_t n_qubits, Axis axis, std::span<const std::size_t> support,
                                 int sign) {
  PauliString p(n_qubits);
  p.set_sign(sign);
  for (std::size_t q : support) p.set(q, axis);
  return p;
}

PauliString PauliString::parse(std::string_view text, std::size_t n_qubits) {
  PauliString p(n_qubits);
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    p.sign_ = text[pos] == '-' ? -1 : +1;
    ++pos;
  }
  while (true) {
    skip_ws();
    if (pos >= text.size()) break;
    Axis a = axis_from_char(text[pos++]);
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) {
      if (a == Axis::I) continue;
      throw InvalidArgument("missing qubit label after axis in '" + std::string(text) + "'");
    }
    std::size_t label = std::stoul(std::string(text.substr(start, pos - start)));
    if (label == 0 || label > n_qubits) {
      throw InvalidArgument("qubit label " + std::to_string(label) + " out of range 1.." +
                            std::to_string(n_qubits));
    }
    if (p.at(label - 1) != Axis::I) {
      throw InvalidArgument("qubit label " + std::to_string(label) + " repeated");
    }
    p.set(label - 1, a);
  }
  return p;
}

void PauliString::set_sign(int s) {
  if (s != 1 && s != -1) throw InvalidArgument("Pauli sign must be +1 or -1");
  sign_ = s;
}

Axis PauliString::at(std::size_t q) const {
  if (q >= n_) throw InvalidArgument("qubit index " + std::to_string(q) + " out of range");
  const bool x = (x_ >> q) & 1;
  const bool z = (z_ >> q) & 1;
  if (x && z) return Axis::Y;
  if (x) return Axis::X;
  if (z) return Axis::Z;
  return Axis::I;
}

void PauliString::set(std::size_t q, Axis a) {
  if (q >= n_) throw InvalidArgument("qubit index " + std::to_string(q) + " out of range");
  x_ &= ~bit(q);
  z_ &= ~bit(q);
  if (a == Axis::X || a == Axis::Y) x_ |= bit(q);
  if (a == Axis::Z || a == Axis::Y) z_ |= bit(q);
}

std::size_t PauliString::y_count() const { return static_cast<std::size_t>(std::popcount(x_ & z_)); }

std::size_t PauliString::weight() const { return static_cast<std::size_t>(std::popcount(x_ | z_)); }

std::vector<std::size_t> PauliString::support() const {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < n_; ++q) {
    if (((x_ | z_) >> q) & 1) out.push_back(q);
  }
  return out;
}

PauliString PauliString::restricted(std::span<const std::size_t> qubits) const {
  PauliString p(n_);
  p.sign_ = sign_;
  for (std::size_t q : qubits) p.set(q, at(q));
  return p;
}

PauliString PauliString::without(std::span<const std::size_t> qubits) const {
  PauliString p = *this;
  p.sign_ = +1;
  for (std::size_t q : qubits) p.set(q, Axis::I);
  return p;
}

std::string PauliString::to_string() const {
  std::ostringstream os;
  os << (sign_ < 0 ? '-' : '+');
  bool first = true;
  for (std::size_t q = 0; q < n_; ++q) {
    Axis a = at(q);
    if (a == Axis::I) continue;
    if (!first) os << ' ';
    os << axis_char(a) << (q + 1);
    first = false;
  }
  return os.str();
}

Complex PauliString::amplitude(std::uint64_t basis_index) const {
  // P = sign * i^{#Y} * X^x Z^z
  int k = static_cast<int>(y_count()) + (parity(basis_index & z_) ? 2 : 0) + (sign_ < 0 ? 2 : 0);
  return Phase::i_pow(k).value();
}

PauliProduct pauli_product(const PauliString& a, const PauliString& b) {
  require_same_size(a, b);
  PauliString c(a.n_qubits());
  c.set_sign(a.sign() * b.sign());
  const std::uint64_t xc = a.x_mask() ^ b.x_mask();
  const std::uint64_t zc = a.z_mask() ^ b.z_mask();
  for (std::size_t q = 0; q < a.n_qubits(); ++q) {
    const bool x = (xc >> q) & 1;
    const bool z = (zc >> q) & 1;
    c.set(q, x ? (z ? Axis::Y : Axis::X) : (z ? Axis::Z : Axis::I));
  }
  // a b = s_a s_b i^{ya + yb} X^xa Z^za X^xb Z^zb, and Z^za X^xb = (-1)^{|za & xb|} X^xb Z^za.
  const int k = static_cast<int>(a.y_count() + b.y_count()) +
                2 * std::popcount(a.z_mask() & b.x_mask()) - static_cast<int>(c.y_count());
  return {c, Phase::i_pow(k)};
}

std::size_t anticommuting_sites(const PauliString& a, const PauliString& b) {
  require_same_size(a, b);
  std::size_t count = 0;
  for (std::size_t q = 0; q < a.n_qubits(); ++q) {
    Axis pa = a.at(q), pb = b.at(q);
    if (pa != Axis::I && pb != Axis::I && pa != pb) ++count;
  }
  return count;
}

bool commutes(const PauliString& a, const PauliString& b) { return anticommuting_sites(a, b) % 2 == 0; }

std::size_t checked_dimension(std::size_t n_qubits, std::size_t max_qubits) {
  if (n_qubits > max_qubits) {
    throw LimitExceeded("2^" + std::to_string(n_qubits) + " exceeds the configured maximum of 2^" +
                        std::to_string(max_qubits));
  }
  return std::size_t{1} << n_qubits;
}

void apply_pauli(const PauliString& p, std::span<const Complex> in, std::span<Complex> out) {
  const std::size_t dim = std::size_t{1} << p.n_qubits();
  if (in.size() != dim || out.size() != dim) {
    throw InvalidArgument("state length " + std::to_string(in.size()) + " does not match 2^" +
                          std::to_string(p.n_qubits()));
  }
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  const Complex base = p.amplitude(0);
  const Complex flipped = -base;
  for (std::uint64_t b = 0; b < dim; ++b) {
    out[b ^ x] = (parity(b & z) ? flipped : base) * in[b];
  }
}

StateVector apply_pauli(const PauliString& p, std::span<const Complex> in) {
  StateVector out(in.size());
  apply_pauli(p, in, out);
  return out;
}

Complex pauli_expectation(const PauliString& p, std::span<const Complex> v) {
  const std::size_t dim = std::size_t{1} << p.n_qubits();
  if (v.size() != dim) throw InvalidArgument("state length does not match Pauli string");
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  Complex acc = 0.0;
  for (std::uint64_t b = 0; b < dim; ++b) {
    Complex term = std::conj(v[b ^ x]) * v[b];
    acc += parity(b & z) ? -term : term;
  }
  return acc * p.amplitude(0);
}

SparseOperator SparseOperator::from_triplets(std::size_t dimension, std::vector<Triplet> triplets) {
  if (dimension == 0 || !std::has_single_bit(dimension)) {
    throw InvalidArgument("sparse operator dimension must be a power of two");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseOperator op;
  op.dim_ = dimension;
  op.row_ptr_.assign(dimension + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    const auto& t = triplets[i];
    if (t.row >= dimension || t.col >= dimension) throw InvalidArgument("triplet out of range");
    Complex sum = 0.0;
    std::size_t j = i;
    while (j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col) sum += triplets[j++].value;
    if (sum != Complex(0.0)) {
      op.cols_.push_back(t.col);
      op.values_.push_back(sum);
      ++op.row_ptr_[t.row + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < dimension; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];

  op.real_ = std::all_of(op.values_.begin(), op.values_.end(), [](Complex v) { return v.imag() == 0.0; });
  if (op.real_) {
    op.real_values_.reserve(op.values_.size());
    for (Complex v : op.values_) op.real_values_.push_back(v.real());
  }
  op.hermitian_ = true;
  for (std::size_t r = 0; r < dimension && op.hermitian_; ++r) {
    for (std::size_t k = op.row_ptr_[r]; k < op.row_ptr_[r + 1]; ++k) {
      if (std::abs(op.values_[k] - std::conj(op.at(op.cols_[k], r))) > 1e-12) {
        op.hermitian_ = false;
        break;
      }
    }
  }
  return op;
}

Complex SparseOperator::at(std::size_t row, std::size_t col) const {
  if (row >= dim_ || col >= dim_) throw InvalidArgument("index out of range");
  auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseOperator::multiply(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != dim_ || out.size() != dim_) throw InvalidArgument("vector length mismatch");
  for (std::size_t r = 0; r < dim_; ++r) {
    Complex acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * in[cols_[k]];
    out[r] = acc;
  }
}

void SparseOperator::multiply_real(std::span<const double> in, std::span<double> out) const {
  if (!real_) throw InvalidArgument("operator has complex entries");
  if (in.size() != dim_ || out.size() != dim_) throw InvalidArgument("vector length mismatch");
  for (std::size_t r = 0; r < dim_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += real_values_[k] * in[cols_[k]];
    out[r] = acc;
  }
}

SparseOperator to_sparse(const PauliString& p, std::size_t max_qubits) {
  const std::size_t dim = checked_dimension(p.n_qubits(), max_qubits);
  std::vector<SparseOperator::Triplet> triplets;
  triplets.reserve(dim);
  for (std::uint64_t b = 0; b < dim; ++b) triplets.push_back({b ^ p.x_mask(), b, p.amplitude(b)});
  return SparseOperator::from_triplets(dim, std::move(triplets));
}

void PauliSum::add(double coefficient, PauliString op) {
  if (op.n_qubits() != n_) throw InvalidArgument("term acts on a different number of qubits");
  terms_.push_back({coefficient, std::move(op)});
}

bool PauliSum::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.op.y_count() % 2 == 0; });
}

void PauliSum::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t dim = std::size_t{1} << n_;
  if (in.size() != dim || out.size() != dim) throw InvalidArgument("vector length mismatch");
  std::fill(out.begin(), out.end(), Complex(0.0));
  for (const auto& [c, op] : terms_) {
    const std::uint64_t x = op.x_mask(), z = op.z_mask();
    const Complex base = c * op.amplitude(0);
    for (std::uint64_t b = 0; b < dim; ++b) out[b ^ x] += (parity(b & z) ? -base : base) * in[b];
  }
}

void PauliSum::apply_real(std::span<const double> in, std::span<double> out) const {
  if (!is_real()) throw InvalidArgument("Pauli sum has complex terms");
  const std::size_t dim = std::size_t{1} << n_;
  if (in.size() != dim || out.size() != dim) throw InvalidArgument("vector length mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& [c, op] : terms_) {
    const std::uint64_t x = op.x_mask(), z = op.z_mask();
    const double base = c * op.amplitude(0).real();
    for (std::uint64_t b = 0; b < dim; ++b) out[b ^ x] += (parity(b & z) ? -base : base) * in[b];
  }
}

Complex PauliSum::expectation(std::span<const Complex> v) const {
  Complex acc = 0.0;
  for (const auto& [c, op] : terms_) acc += c * pauli_expectation(op, v);
  return acc;
}

SparseOperator PauliSum::to_sparse(std::size_t max_qubits) const {
  const std::size_t dim = checked_dimension(n_, max_qubits);
  std::vector<SparseOperator::Triplet> triplets;
  triplets.reserve(dim * std::min<std::size_t>(terms_.size(), 8));
  for (const auto& [c, op] : terms_) {
    for (std::uint64_t b = 0; b < dim; ++b) triplets.push_back({b ^ op.x_mask(), b, c * op.amplitude(b)});
  }
  return SparseOperator::from_triplets(dim, std::move(triplets));
}

}  // namespace topoloc
