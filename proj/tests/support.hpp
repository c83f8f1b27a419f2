// Small random generators shared by the unit tests.
#pragma once

#include <random>

#include "dhsys/exact.hpp"

namespace dhsys::test {

inline Rat random_rat(std::mt19937_64& rng, long bound) {
  long num = static_cast<long>(rng() % (2 * bound + 1)) - bound;
  long den = 1 + static_cast<long>(rng() % 4);
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline GRat random_grat(std::mt19937_64& rng, long bound) {
  return GRat(random_rat(rng, bound), rng() % 2 ? random_rat(rng, bound) : Rat(0));
}

inline Vec random_vec(std::mt19937_64& rng, std::size_t n, long bound) {
  Vec out(n);
  for (auto& x : out) x = GRat(Rat(static_cast<long>(rng() % (2 * bound + 1)) - bound));
  return out;
}

inline Mat random_mat(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long bound) {
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = GRat(Rat(static_cast<long>(rng() % (2 * bound + 1)) - bound));
  return m;
}

/// Unimodular integer matrix: a product of random elementary operations.
inline Mat random_invertible(std::mt19937_64& rng, std::size_t n) {
  Mat m = Mat::identity(n);
  if (n < 2) return m;
  for (std::size_t k = 0; k < 3 * n; ++k) {
    std::size_t i = rng() % n, j = rng() % n;
    if (i == j) continue;
    GRat f(static_cast<long>(rng() % 5) - 2);
    for (std::size_t c = 0; c < n; ++c) m(i, c) += f * m(j, c);
  }
  return m;
}

inline Subspace random_subspace(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  Subspace s = Subspace::zero(n);
  while (s.dim() < dim) s = sum(s, Subspace::span(n, {random_vec(rng, n, 3)}));
  return s;
}

}  // namespace dhsys::test
