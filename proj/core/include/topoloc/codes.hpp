#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "topoloc/pauli.hpp"

namespace topoloc {

enum class CodeKind { kitaev, color };
enum class Direction { h, v };
enum class Color { r = 0, g = 1, b = 2 };

std::string to_string(CodeKind k);
std::string to_string(Direction d);
std::string to_string(Color c);
CodeKind code_kind_from_string(std::string_view s);
Direction direction_from_string(std::string_view s);
Color color_from_string(std::string_view s);

struct LoopSpec {
  Axis op = Axis::X;  // X or Z
  Direction direction = Direction::h;
  std::optional<Color> color;

  std::string to_string() const;  // e.g. "Lx_h", "Lx_h_r"
  static LoopSpec parse(std::string_view text);
};

struct Stabilizer {
  std::vector<std::size_t> qubits;  // sorted
  std::optional<Color> color;
};

/// Periodic lattice geometry.
///
/// Kitaev (nph x npv plaquettes): qubits sit on edges, numbered row by row.
/// Row r holds the nph horizontal edges h(r,c) = r*2*nph + c followed by the
/// nph vertical edges v(r,c) = r*2*nph + nph + c. h(r,c) joins vertices (r,c)
/// and (r,c+1); v(r,c) joins (r,c) and (r+1,c). Plaquette (r,c) is bounded by
/// h(r,c), h(r+1,c), v(r,c), v(r,c+1). Plaquette and vertex (r,c) have index
/// r*nph + c.
///
/// Color (cols x rows hexagons): hexagon centers form a triangular lattice in
/// axial coordinates (i,j), identified under (i,j) ~ (i+cols,j) ~
/// (i-rows/2,j+rows). Hexagon (i,j) has color (i-j) mod 3. Qubits are the
/// triangles of the center lattice: up(i,j) = {(i,j),(i+1,j),(i,j+1)} gets
/// index 2*(j*cols+i), down(i,j) = {(i+1,j),(i,j+1),(i+1,j+1)} the next one.
class CodeLattice {
 public:
  CodeKind kind() const { return kind_; }
  std::size_t n_qubits() const { return n_; }
  std::size_t width() const { return width_; }    // nph or cols
  std::size_t height() const { return height_; }  // npv or rows

  /// Kitaev: Z-type plaquettes. Color: hexagons (both Z- and X-type).
  const std::vector<Stabilizer>& plaquettes() const { return plaquettes_; }
  /// Kitaev only: X-type vertices.
  const std::vector<Stabilizer>& vertices() const { return vertices_; }

  /// Ordered qubit list of the loop used for spec.
  std::vector<std::size_t> loop_support(const LoopSpec& spec) const;
  /// Plaquettes (Lx) or vertices (Lz) a Kitaev loop passes through; color
  /// code: plaquettes that share qubits with the loop.
  std::vector<std::size_t> crossed_stabilizers(const LoopSpec& spec) const;

  /// Qubit pairs joined by a lattice edge. Kitaev: qubits sharing a vertex;
  /// color: hexagonal lattice edges.
  std::vector<std::array<std::size_t, 2>> edges() const;
  /// 2D drawing coordinates, one pair per qubit.
  std::vector<std::array<double, 2>> coordinates() const;
  std::string describe() const;

  void validate_spec(const LoopSpec& spec) const;

 private:
  friend CodeLattice build_kitaev(std::size_t, std::size_t);
  friend CodeLattice build_color(std::size_t, std::size_t);

  CodeKind kind_ = CodeKind::kitaev;
  std::size_t n_ = 0;
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Stabilizer> plaquettes_;
  std::vector<Stabilizer> vertices_;
  std::vector<std::array<double, 2>> coords_;
  std::vector<std::array<std::size_t, 2>> edges_;
};

CodeLattice build_kitaev(std::size_t nph, std::size_t npv);
CodeLattice build_color(std::size_t cols, std::size_t rows);

/// Kitaev: plaquettes (Z) then vertices (X). Color: Z-type hexagons then
/// X-type hexagons.
std::vector<PauliString> stabilizer_generators(const CodeLattice& lat);
PauliString loop_operator(const CodeLattice& lat, const LoopSpec& spec);

/// Plaquette / vertex operator by 1-based label as written in tables ("P5", "V7").
PauliString named_stabilizer(const CodeLattice& lat, std::string_view label);

/// Loop exponents: kitaev (a, b) applies (Lx_h)^a (Lx_v)^b; color
/// (a1, a2, b1, b2) applies (Lx_h_r)^a1 (Lx_h_g)^a2 (Lx_v_r)^b1 (Lx_v_g)^b2.
struct Sector {
  std::array<int, 4> exponents{0, 0, 0, 0};
};

/// prod_S (I+S_X)/2 |0...0> for the X-type generators, loop operators applied
/// afterwards, normalized once at the end.
StateVector stabilizer_ground_state(const CodeLattice& lat, Sector sector = {},
                                    std::size_t max_qubits = kDefaultMaxDenseQubits);

/// Limit g -> 0+ of the field-perturbed ground state. Kitaev: the default
/// sector. Color (field along x): prod_p (I+S^z_p)/2 |+...+>.
StateVector perturbative_ground_state(const CodeLattice& lat,
                                      std::size_t max_qubits = kDefaultMaxDenseQubits);

struct Graph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> adjacency;  // sorted neighbour lists

  bool has_edge(std::size_t a, std::size_t b) const;
  std::size_t edge_count() const;
};

/// Stabilizer generators of the graph state: X_a prod_{b ~ a} Z_b.
std::vector<PauliString> graph_generators(const Graph& g);
/// prod_{(a,b)} CZ_ab |+...+>.
StateVector graph_state(const Graph& g, std::size_t max_qubits = kDefaultMaxDenseQubits);

struct GraphEquivalence {
  std::vector<std::size_t> controls;  // S_c: qubits receiving a Hadamard
  Graph graph;
  std::vector<std::size_t> omega;
  std::size_t hub = 0;
  /// Signs of the graph generators; the transformed stabilizer state is the
  /// graph state with Z on every qubit whose generator sign is -1.
  std::vector<int> signs;
};

/// Searches qubit sets S_c such that Hadamards on S_c map the stabilizer
/// group of the default ground state to a graph-state group whose induced
/// subgraph on the loop is a connected star.
GraphEquivalence graph_equivalent(const CodeLattice& lat, const LoopSpec& omega);

/// Hadamard conjugation on the given qubits; signs follow H Y H = -Y.
PauliString hadamard_conjugate(const PauliString& p, const std::vector<std::size_t>& qubits);
/// In-place Hadamards on a state vector.
void apply_hadamards(StateVector& v, const std::vector<std::size_t>& qubits);

}  // namespace topoloc
