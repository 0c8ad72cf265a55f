#include "topoloc/codes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "topoloc/error.hpp"

namespace topoloc {

namespace {

std::size_t wrap(long long v, std::size_t m) {
  const long long mm = static_cast<long long>(m);
  return static_cast<std::size_t>(((v % mm) + mm) % mm);
}

// Kitaev edge indices.
struct KitaevIndex {
  std::size_t nph, npv;
  std::size_t h(long long r, long long c) const { return wrap(r, npv) * 2 * nph + wrap(c, nph); }
  std::size_t v(long long r, long long c) const { return wrap(r, npv) * 2 * nph + nph + wrap(c, nph); }
  std::size_t row_x() const { return (npv - 1) / 2; }
  std::size_t row_z() const { return (row_x() + 1) % npv; }
  std::size_t col_x() const { return (nph - 1) / 2; }
  std::size_t col_z() const { return nph - 1; }
};

// Color-code triangle indices.
struct ColorIndex {
  std::size_t cols, rows;
  std::pair<std::size_t, std::size_t> canon(long long i, long long j) const {
    const long long R = static_cast<long long>(rows);
    long long k = j >= 0 ? j / R : -((-j + R - 1) / R);
    j -= k * R;
    i += k * R / 2;
    return {wrap(i, cols), static_cast<std::size_t>(j)};
  }
  std::size_t up(long long i, long long j) const {
    auto [a, b] = canon(i, j);
    return 2 * (b * cols + a);
  }
  std::size_t down(long long i, long long j) const { return up(i, j) + 1; }
  Color color(long long i, long long j) const { return static_cast<Color>(wrap(i - j, 3)); }
};

Stabilizer make_stabilizer(std::vector<std::size_t> qs, std::optional<Color> color = std::nullopt) {
  std::sort(qs.begin(), qs.end());
  return {std::move(qs), color};
}

PauliString stabilizer_string(std::size_t n, const Stabilizer& s, Axis axis) {
  return PauliString::uniform(n, axis, s.qubits);
}

void project_plus(StateVector& v, const PauliString& s) {
  StateVector sv = apply_pauli(s, v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (v[i] + sv[i]);
}

void normalize(StateVector& v) {
  double norm = 0.0;
  for (const auto& a : v) norm += std::norm(a);
  if (norm <= 0.0) throw InvariantViolation("stabilizer projection annihilated the state");
  const double s = 1.0 / std::sqrt(norm);
  for (auto& a : v) a *= s;
}

struct Bits {
  std::uint64_t x = 0, z = 0;
};

// Indices of a maximal GF(2)-independent subset, first occurrence wins.
std::vector<std::size_t> independent_rows(const std::vector<PauliString>& rows) {
  std::vector<Bits> basis;
  std::vector<int> pivot;  // bit position in the 128-bit (x,z) word
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Bits b{rows[r].x_mask(), rows[r].z_mask()};
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const int p = pivot[k];
      const bool set = p < 64 ? ((b.x >> p) & 1) : ((b.z >> (p - 64)) & 1);
      if (set) {
        b.x ^= basis[k].x;
        b.z ^= basis[k].z;
      }
    }
    if (b.x == 0 && b.z == 0) continue;
    const int p = b.x ? std::countr_zero(b.x) : 64 + std::countr_zero(b.z);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const bool set = p < 64 ? ((basis[k].x >> p) & 1) : ((basis[k].z >> (p - 64)) & 1);
      if (set) {
        basis[k].x ^= b.x;
        basis[k].z ^= b.z;
      }
    }
    basis.push_back(b);
    pivot.push_back(p);
    keep.push_back(r);
  }
  return keep;
}

PauliString multiply_real(const PauliString& a, const PauliString& b) {
  PauliProduct prod = pauli_product(a, b);
  if (!prod.phase.is_real()) throw InvariantViolation("product of commuting stabilizers is not Hermitian");
  PauliString out = prod.value;
  if (prod.phase == Phase::minus_one()) out.set_sign(-out.sign());
  return out;
}

// Tries to bring rows into graph form X_a prod Z_{N(a)}. Returns false when
// the X block is singular or the Z block is not a simple graph.
bool to_graph_form(std::vector<PauliString> rows, std::size_t n, Graph& graph, std::vector<int>& signs) {
  std::vector<PauliString> by_qubit(n);
  std::vector<bool> used(rows.size(), false);
  for (std::size_t q = 0; q < n; ++q) {
    std::size_t piv = rows.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!used[r] && ((rows[r].x_mask() >> q) & 1)) {
        piv = r;
        break;
      }
    }
    if (piv == rows.size()) return false;
    used[piv] = true;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != piv && ((rows[r].x_mask() >> q) & 1)) rows[r] = multiply_real(rows[r], rows[piv]);
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::uint64_t x = rows[r].x_mask();
    if (std::popcount(x) != 1) return false;
    by_qubit[static_cast<std::size_t>(std::countr_zero(x))] = rows[r];
  }
  graph = Graph{n, std::vector<std::vector<std::size_t>>(n)};
  signs.assign(n, 1);
  for (std::size_t a = 0; a < n; ++a) {
    const std::uint64_t z = by_qubit[a].z_mask();
    if ((z >> a) & 1) return false;
    for (std::size_t b = 0; b < n; ++b) {
      if (((z >> b) & 1) != ((by_qubit[b].z_mask() >> a) & 1)) return false;
      if ((z >> b) & 1) graph.adjacency[a].push_back(b);
    }
    signs[a] = by_qubit[a].sign();
  }
  return true;
}

std::optional<std::size_t> star_hub(const Graph& g, const std::vector<std::size_t>& omega) {
  const std::set<std::size_t> in(omega.begin(), omega.end());
  auto degree = [&](std::size_t a) {
    std::size_t d = 0;
    for (std::size_t b : g.adjacency[a]) d += in.count(b);
    return d;
  };
  const std::size_t m = omega.size();
  if (m == 2) {
    if (g.has_edge(omega[0], omega[1])) return std::max(omega[0], omega[1]);
    return std::nullopt;
  }
  std::optional<std::size_t> hub;
  for (std::size_t a : omega) {
    const std::size_t d = degree(a);
    if (d == m - 1) {
      if (hub) return std::nullopt;
      hub = a;
    } else if (d != 1) {
      return std::nullopt;
    }
  }
  return hub;
}

}  // namespace

std::string to_string(CodeKind k) { return k == CodeKind::kitaev ? "kitaev" : "color"; }
std::string to_string(Direction d) { return d == Direction::h ? "h" : "v"; }
std::string to_string(Color c) {
  static constexpr const char* names[] = {"r", "g", "b"};
  return names[static_cast<int>(c)];
}

CodeKind code_kind_from_string(std::string_view s) {
  if (s == "kitaev") return CodeKind::kitaev;
  if (s == "color") return CodeKind::color;
  throw InvalidArgument("unknown model '" + std::string(s) + "' (expected kitaev or color)");
}

Direction direction_from_string(std::string_view s) {
  if (s == "h") return Direction::h;
  if (s == "v") return Direction::v;
  throw InvalidArgument("unknown loop direction '" + std::string(s) + "'");
}

Color color_from_string(std::string_view s) {
  if (s == "r") return Color::r;
  if (s == "g") return Color::g;
  if (s == "b") return Color::b;
  throw InvalidArgument("unknown color '" + std::string(s) + "'");
}

std::string LoopSpec::to_string() const {
  std::string out = "L";
  out += op == Axis::X ? 'x' : 'z';
  out += '_';
  out += topoloc::to_string(direction);
  if (color) out += "_" + topoloc::to_string(*color);
  return out;
}

LoopSpec LoopSpec::parse(std::string_view text) {
  // Lx_h, Lz_v, Lx_h_r
  if (text.size() < 4 || text[0] != 'L' || text[2] != '_') {
    throw InvalidArgument("malformed loop '" + std::string(text) + "' (expected e.g. Lx_h or Lx_h_r)");
  }
  LoopSpec spec;
  if (text[1] == 'x') {
    spec.op = Axis::X;
  } else if (text[1] == 'z') {
    spec.op = Axis::Z;
  } else {
    throw InvalidArgument("loop operator must be x or z in '" + std::string(text) + "'");
  }
  spec.direction = direction_from_string(text.substr(3, 1));
  if (text.size() > 4) {
    if (text.size() != 6 || text[4] != '_') throw InvalidArgument("malformed loop '" + std::string(text) + "'");
    spec.color = color_from_string(text.substr(5, 1));
  }
  return spec;
}

void CodeLattice::validate_spec(const LoopSpec& spec) const {
  if (spec.op != Axis::X && spec.op != Axis::Z) throw InvalidArgument("loop operator must be X or Z");
  if (kind_ == CodeKind::kitaev && spec.color) {
    throw InvalidArgument("kitaev loops carry no color");
  }
  if (kind_ == CodeKind::color && !spec.color) {
    throw InvalidArgument("color-code loops need a color");
  }
}

std::vector<std::size_t> CodeLattice::loop_support(const LoopSpec& spec) const {
  validate_spec(spec);
  std::vector<std::size_t> out;
  if (kind_ == CodeKind::kitaev) {
    const KitaevIndex k{width_, height_};
    if (spec.direction == Direction::h) {
      for (std::size_t c = 0; c < width_; ++c) {
        out.push_back(spec.op == Axis::X ? k.v(k.row_x(), c) : k.h(k.row_z(), c));
      }
    } else {
      for (std::size_t r = 0; r < height_; ++r) {
        out.push_back(spec.op == Axis::X ? k.h(r, k.col_x()) : k.v(r, k.col_z()));
      }
    }
    return out;
  }
  const ColorIndex ci{width_, height_};
  const long long c0 = static_cast<int>(*spec.color);
  if (spec.direction == Direction::h) {
    for (long long t = 0; t < static_cast<long long>(width_ / 3); ++t) {
      const long long i = c0 + 3 * t;
      out.push_back(ci.up(i, 0));
      out.push_back(ci.down(i, 0));
      out.push_back(ci.down(i + 1, 0));
      out.push_back(ci.up(i + 2, 0));
    }
  } else {
    for (long long t = 0; t < static_cast<long long>(height_ / 2); ++t) {
      const long long i = c0 - t, j = 2 * t;
      out.push_back(ci.down(i - 1, j));
      out.push_back(ci.up(i - 1, j + 1));
    }
  }
  return out;
}

std::vector<std::size_t> CodeLattice::crossed_stabilizers(const LoopSpec& spec) const {
  const auto support = loop_support(spec);
  const auto& pool = (kind_ == CodeKind::kitaev && spec.op == Axis::Z) ? vertices_ : plaquettes_;
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    for (std::size_t q : support) {
      if (std::binary_search(pool[s].qubits.begin(), pool[s].qubits.end(), q)) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

std::vector<std::array<std::size_t, 2>> CodeLattice::edges() const { return edges_; }

std::vector<std::array<double, 2>> CodeLattice::coordinates() const { return coords_; }

std::string CodeLattice::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << ' ' << width_ << 'x' << height_ << " (N=" << n_ << ')';
  return os.str();
}

CodeLattice build_kitaev(std::size_t nph, std::size_t npv) {
  if (nph < 2 || npv < 2) {
    throw InvalidArgument("kitaev lattice needs at least 2 plaquettes per direction, got " +
                          std::to_string(nph) + "x" + std::to_string(npv));
  }
  if (2 * nph * npv > kMaxPauliQubits) throw LimitExceeded("kitaev lattice exceeds 64 qubits");
  CodeLattice lat;
  lat.kind_ = CodeKind::kitaev;
  lat.width_ = nph;
  lat.height_ = npv;
  lat.n_ = 2 * nph * npv;
  const KitaevIndex k{nph, npv};
  for (std::size_t r = 0; r < npv; ++r) {
    for (std::size_t c = 0; c < nph; ++c) {
      const long long R = static_cast<long long>(r), C = static_cast<long long>(c);
      lat.plaquettes_.push_back(make_stabilizer({k.h(R, C), k.h(R + 1, C), k.v(R, C), k.v(R, C + 1)}));
      lat.vertices_.push_back(make_stabilizer({k.h(R, C), k.h(R, C - 1), k.v(R, C), k.v(R - 1, C)}));
    }
  }
  lat.coords_.resize(lat.n_);
  for (std::size_t r = 0; r < npv; ++r) {
    for (std::size_t c = 0; c < nph; ++c) {
      lat.coords_[k.h(r, c)] = {c + 0.5, static_cast<double>(r)};
      lat.coords_[k.v(r, c)] = {static_cast<double>(c), r + 0.5};
    }
  }
  std::set<std::array<std::size_t, 2>> edges;
  for (const auto& v : lat.vertices_) {
    for (std::size_t a = 0; a < v.qubits.size(); ++a) {
      for (std::size_t b = a + 1; b < v.qubits.size(); ++b) edges.insert({v.qubits[a], v.qubits[b]});
    }
  }
  lat.edges_.assign(edges.begin(), edges.end());
  return lat;
}

CodeLattice build_color(std::size_t cols, std::size_t rows) {
  if (cols < 3 || rows < 2 || cols % 3 != 0 || rows % 2 != 0) {
    throw InvalidArgument("color lattice " + std::to_string(cols) + "x" + std::to_string(rows) +
                          " is not 3-colorable on the torus (cols must be a multiple of 3, rows even)");
  }
  if (2 * cols * rows > kMaxPauliQubits) throw LimitExceeded("color lattice exceeds 64 qubits");
  CodeLattice lat;
  lat.kind_ = CodeKind::color;
  lat.width_ = cols;
  lat.height_ = rows;
  lat.n_ = 2 * cols * rows;
  const ColorIndex ci{cols, rows};
  for (long long j = 0; j < static_cast<long long>(rows); ++j) {
    for (long long i = 0; i < static_cast<long long>(cols); ++i) {
      lat.plaquettes_.push_back(make_stabilizer({ci.up(i, j), ci.up(i - 1, j), ci.up(i, j - 1),
                                                 ci.down(i - 1, j), ci.down(i, j - 1), ci.down(i - 1, j - 1)},
                                                ci.color(i, j)));
    }
  }
  lat.coords_.resize(lat.n_);
  const double s3 = std::sqrt(3.0) / 2.0;
  auto center = [&](double i, double j) { return std::array<double, 2>{i + 0.5 * j, s3 * j}; };
  std::set<std::array<std::size_t, 2>> edges;
  for (long long j = 0; j < static_cast<long long>(rows); ++j) {
    for (long long i = 0; i < static_cast<long long>(cols); ++i) {
      auto a = center(i, j), b = center(i + 1, j), c = center(i, j + 1), d = center(i + 1, j + 1);
      lat.coords_[ci.up(i, j)] = {(a[0] + b[0] + c[0]) / 3, (a[1] + b[1] + c[1]) / 3};
      lat.coords_[ci.down(i, j)] = {(b[0] + c[0] + d[0]) / 3, (b[1] + c[1] + d[1]) / 3};
      const std::size_t u = ci.up(i, j);
      for (std::size_t w : {ci.down(i, j), ci.down(i - 1, j), ci.down(i, j - 1)}) {
        edges.insert({std::min(u, w), std::max(u, w)});
      }
    }
  }
  lat.edges_.assign(edges.begin(), edges.end());
  return lat;
}

std::vector<PauliString> stabilizer_generators(const CodeLattice& lat) {
  std::vector<PauliString> out;
  const std::size_t n = lat.n_qubits();
  for (const auto& p : lat.plaquettes()) out.push_back(stabilizer_string(n, p, Axis::Z));
  if (lat.kind() == CodeKind::kitaev) {
    for (const auto& v : lat.vertices()) out.push_back(stabilizer_string(n, v, Axis::X));
  } else {
    for (const auto& p : lat.plaquettes()) out.push_back(stabilizer_string(n, p, Axis::X));
  }
  return out;
}

PauliString loop_operator(const CodeLattice& lat, const LoopSpec& spec) {
  return PauliString::uniform(lat.n_qubits(), spec.op, lat.loop_support(spec));
}

PauliString named_stabilizer(const CodeLattice& lat, std::string_view label) {
  if (label.size() < 2 || (label[0] != 'P' && label[0] != 'V')) {
    throw InvalidArgument("stabilizer label must look like P3 or V7, got '" + std::string(label) + "'");
  }
  if (lat.kind() != CodeKind::kitaev) throw InvalidArgument("named stabilizers exist only on the kitaev lattice");
  const std::size_t idx = std::stoul(std::string(label.substr(1)));
  const auto& pool = label[0] == 'P' ? lat.plaquettes() : lat.vertices();
  if (idx == 0 || idx > pool.size()) throw InvalidArgument("stabilizer label out of range: " + std::string(label));
  return stabilizer_string(lat.n_qubits(), pool[idx - 1], label[0] == 'P' ? Axis::Z : Axis::X);
}

StateVector stabilizer_ground_state(const CodeLattice& lat, Sector sector, std::size_t max_qubits) {
  for (int e : sector.exponents) {
    if (e != 0 && e != 1) throw InvalidArgument("sector exponents must be 0 or 1");
  }
  const std::size_t n = lat.n_qubits();
  StateVector v(checked_dimension(n, max_qubits), Complex(0.0));
  v[0] = 1.0;
  std::vector<LoopSpec> loops;
  if (lat.kind() == CodeKind::kitaev) {
    if (sector.exponents[2] || sector.exponents[3]) throw InvalidArgument("kitaev sectors take two exponents");
    for (const auto& s : lat.vertices()) project_plus(v, stabilizer_string(n, s, Axis::X));
    loops = {{Axis::X, Direction::h, std::nullopt}, {Axis::X, Direction::v, std::nullopt}};
  } else {
    for (const auto& s : lat.plaquettes()) project_plus(v, stabilizer_string(n, s, Axis::X));
    loops = {{Axis::X, Direction::h, Color::r},
             {Axis::X, Direction::h, Color::g},
             {Axis::X, Direction::v, Color::r},
             {Axis::X, Direction::v, Color::g}};
  }
  for (std::size_t i = 0; i < loops.size(); ++i) {
    if (sector.exponents[i]) v = apply_pauli(loop_operator(lat, loops[i]), v);
  }
  normalize(v);
  return v;
}

StateVector perturbative_ground_state(const CodeLattice& lat, std::size_t max_qubits) {
  if (lat.kind() == CodeKind::kitaev) return stabilizer_ground_state(lat, {}, max_qubits);
  const std::size_t n = lat.n_qubits();
  StateVector v(checked_dimension(n, max_qubits), Complex(1.0));
  for (const auto& s : lat.plaquettes()) project_plus(v, stabilizer_string(n, s, Axis::Z));
  normalize(v);
  return v;
}

bool Graph::has_edge(std::size_t a, std::size_t b) const {
  return std::binary_search(adjacency.at(a).begin(), adjacency.at(a).end(), b);
}

std::size_t Graph::edge_count() const {
  std::size_t d = 0;
  for (const auto& nb : adjacency) d += nb.size();
  return d / 2;
}

std::vector<PauliString> graph_generators(const Graph& g) {
  std::vector<PauliString> out;
  for (std::size_t a = 0; a < g.n; ++a) {
    PauliString p(g.n);
    p.set(a, Axis::X);
    for (std::size_t b : g.adjacency[a]) p.set(b, Axis::Z);
    out.push_back(p);
  }
  return out;
}

StateVector graph_state(const Graph& g, std::size_t max_qubits) {
  const std::size_t dim = checked_dimension(g.n, max_qubits);
  StateVector v(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::uint64_t b = 0; b < dim; ++b) {
    int parity = 0;
    for (std::size_t a = 0; a < g.n; ++a) {
      if (!((b >> a) & 1)) continue;
      for (std::size_t c : g.adjacency[a]) {
        if (c > a && ((b >> c) & 1)) parity ^= 1;
      }
    }
    v[b] = parity ? -amp : amp;
  }
  return v;
}

PauliString hadamard_conjugate(const PauliString& p, const std::vector<std::size_t>& qubits) {
  PauliString out = p;
  for (std::size_t q : qubits) {
    const Axis a = p.at(q);
    if (a == Axis::X) out.set(q, Axis::Z);
    if (a == Axis::Z) out.set(q, Axis::X);
    if (a == Axis::Y) out.set_sign(-out.sign());
  }
  return out;
}

void apply_hadamards(StateVector& v, const std::vector<std::size_t>& qubits) {
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t q : qubits) {
    const std::uint64_t m = std::uint64_t{1} << q;
    for (std::uint64_t b = 0; b < v.size(); ++b) {
      if (b & m) continue;
      const Complex a0 = v[b], a1 = v[b | m];
      v[b] = s * (a0 + a1);
      v[b | m] = s * (a0 - a1);
    }
  }
}

GraphEquivalence graph_equivalent(const CodeLattice& lat, const LoopSpec& omega_spec) {
  if (lat.kind() != CodeKind::kitaev) {
    throw InvalidArgument("graph equivalence is implemented for the kitaev lattice only");
  }
  const std::size_t n = lat.n_qubits();
  const auto omega = lat.loop_support(omega_spec);

  // Full stabilizer group of the default sector: S_p, S_v and the two Z loops.
  std::vector<PauliString> all = stabilizer_generators(lat);
  all.push_back(loop_operator(lat, {Axis::Z, Direction::h, std::nullopt}));
  all.push_back(loop_operator(lat, {Axis::Z, Direction::v, std::nullopt}));
  std::vector<PauliString> group;
  for (std::size_t i : independent_rows(all)) group.push_back(all[i]);
  if (group.size() != n) throw InvariantViolation("stabilizer group of the ground state is not maximal");

  // The state is a uniform superposition over the code C spanned by the
  // vertex X-masks. Hadamards on the complement of an information set of C
  // give a graph state, so enumerate information sets.
  std::vector<std::uint64_t> code_rows;
  for (const auto& p : group) {
    if (p.z_mask() == 0) code_rows.push_back(p.x_mask());
  }
  const std::size_t k = code_rows.size();

  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  std::size_t tried = 0;
  constexpr std::size_t kMaxTrials = 2'000'000;
  while (true) {
    if (++tried > kMaxTrials) break;
    // Columns of C restricted to pick must be independent.
    std::vector<std::uint64_t> rows;
    for (std::uint64_t r : code_rows) {
      std::uint64_t proj = 0;
      for (std::size_t t = 0; t < k; ++t) proj |= ((r >> pick[t]) & 1) << t;
      rows.push_back(proj);
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < k && rank < k; ++col) {
      std::size_t sel = rank;
      while (sel < k && !((rows[sel] >> col) & 1)) ++sel;
      if (sel == k) continue;
      std::swap(rows[rank], rows[sel]);
      for (std::size_t r = 0; r < k; ++r) {
        if (r != rank && ((rows[r] >> col) & 1)) rows[r] ^= rows[rank];
      }
      ++rank;
    }
    if (rank == k) {
      std::vector<std::size_t> controls;
      for (std::size_t q = 0; q < n; ++q) {
        if (std::find(pick.begin(), pick.end(), q) == pick.end()) controls.push_back(q);
      }
      std::vector<PauliString> transformed;
      for (const auto& p : group) transformed.push_back(hadamard_conjugate(p, controls));
      GraphEquivalence eq;
      if (to_graph_form(transformed, n, eq.graph, eq.signs)) {
        if (auto hub = star_hub(eq.graph, omega)) {
          eq.controls = std::move(controls);
          eq.omega = omega;
          eq.hub = *hub;
          return eq;
        }
      }
    }
    // next k-combination of [0, n)
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  throw InvalidArgument("no Hadamard control set yields a star graph over " + omega_spec.to_string() + " on " +
                        lat.describe());
}

}  // namespace topoloc
