#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "topoloc/oracle.hpp"
#include "topoloc/pauli.hpp"

namespace topoloc::test {

// Hand-rolled generators for the property tests. Every test seeds its own
// engine so failures reproduce from the test name alone.

inline PauliString random_pauli(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> axis(0, 3), sign(0, 1);
  PauliString p(n);
  for (std::size_t q = 0; q < n; ++q) p.set(q, static_cast<Axis>(axis(rng)));
  p.set_sign(sign(rng) ? -1 : +1);
  return p;
}

inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

inline std::vector<double> random_series(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> out(n);
  for (auto& x : out) x = nd(rng);
  return out;
}

inline Eigen::MatrixXcd dense_of(const PauliString& p) { return oracle::dense_pauli(p); }

}  // namespace topoloc::test
