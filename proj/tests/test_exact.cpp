#include <doctest.h>

#include <random>

#include "dhsys/exact.hpp"
#include "support.hpp"

using namespace dhsys;

namespace {

Vec v(std::initializer_list<long> xs) {
  Vec out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

Mat jordan3() {
  Mat n(3, 3);
  n(0, 1) = 1;
  n(1, 2) = 1;
  return n;
}

}  // namespace

TEST_CASE("scalar parsing round trips") {
  for (const char* s : {"0", "3", "-7", "2/3", "-5/12", "i", "-i", "2i", "1/2-3/4i", "-1+i", "3/5i"}) {
    GRat z = parse_grat(s);
    CHECK(to_string(z) == s);
    CHECK(parse_grat(to_string(z)) == z);
  }
  CHECK(parse_rat("4/6") == Rat(2, 3));
  CHECK(parse_grat("+2") == GRat(2));
  CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rat("x"), ParseError);
  CHECK_THROWS_AS(parse_grat("1+"), ParseError);
}

TEST_CASE("random scalars round trip through text") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    GRat z = test::random_grat(rng, 40);
    CHECK(parse_grat(to_string(z)) == z);
  }
}

TEST_CASE("Gaussian arithmetic") {
  GRat a(Rat(1), Rat(2)), b(Rat(3), Rat(-1));
  CHECK(a * b == GRat(Rat(5), Rat(5)));
  CHECK((a / b) * b == a);
  CHECK(GRat::i() * GRat::i() == GRat(-1));
  CHECK(grat_pow(GRat::i(), 3) == -GRat::i());
  CHECK(rat_pow(Rat(2), -3) == Rat(1, 8));
}

TEST_CASE("span canonicalises") {
  Subspace s = Subspace::span(2, {v({1, 0}), v({2, 0})});
  CHECK(s.dim() == 1);
  CHECK(s.basis().row(0) == v({1, 0}));
  CHECK(Subspace::span(3, {}).is_zero());
  Subspace t = Subspace::span(3, {v({1, 1, 0}), v({0, 1, 1})});
  CHECK(t.dim() == 2);
  CHECK(rank(Mat::from_rows({v({1, 1, 0}), v({0, 1, 1})}, 3)) == 2);
  CHECK_THROWS_AS(Subspace::span(2, {v({1, 0, 0})}), DimensionError);
}

TEST_CASE("same subspace from different generators is bitwise equal") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    Subspace a = test::random_subspace(rng, 5, k % 6);
    std::vector<Vec> mixed;
    auto b = a.basis_vectors();
    for (std::size_t i = 0; i < b.size(); ++i) {
      Vec x = b[i];
      for (std::size_t j = 0; j < b.size(); ++j)
        if (j > i) x = x + GRat(static_cast<long>(rng() % 5)) * b[j];
      mixed.push_back(x);
    }
    CHECK(Subspace::span(5, mixed) == a);
  }
}

TEST_CASE("lattice operations") {
  CHECK(intersect(Subspace::span(2, {v({1, 0})}), Subspace::span(2, {v({0, 1})})).is_zero());
  // Nx in span{e1} forces x3 = 0.
  CHECK(preimage(jordan3(), Subspace::span(3, {v({1, 0, 0})})) ==
        Subspace::span(3, {v({1, 0, 0}), v({0, 1, 0})}));
  CHECK(image(jordan3(), Subspace::full(3)) == Subspace::span(3, {v({1, 0, 0}), v({0, 1, 0})}));
  CHECK_THROWS_AS(sum(Subspace::full(2), Subspace::full(3)), DimensionError);

  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    std::size_t n = 1 + rng() % 6;
    Subspace a = test::random_subspace(rng, n, rng() % (n + 1));
    Subspace b = test::random_subspace(rng, n, rng() % (n + 1));
    Subspace c = sum(a, test::random_subspace(rng, n, rng() % (n + 1)));
    CHECK(sum(a, a) == a);
    CHECK(a.dim() + b.dim() == sum(a, b).dim() + intersect(a, b).dim());
    CHECK(sum(a, intersect(b, c)) == intersect(sum(a, b), c));
    Mat m = test::random_mat(rng, n, n, 3);
    CHECK(a.contains(image(m, preimage(m, a))));
    CHECK(preimage(m, image(m, a)).contains(a));
  }
}

TEST_CASE("conjugation of complex subspaces") {
  Subspace line = Subspace::span(2, {Vec{GRat(1), GRat::i()}});
  CHECK(!line.is_conj_stable());
  CHECK(intersect(line, line.conj()).is_zero());
  CHECK(Subspace::span(2, {v({1, 2})}).is_conj_stable());
}

TEST_CASE("quotient maps") {
  Subspace all = Subspace::full(3);
  CHECK(quotient_map(all, Subspace::zero(3)).dim() == 3);
  CHECK(quotient_map(all, all).dim() == 0);
  CHECK(quotient_map(Subspace::full(2), Subspace::zero(2)).dim() == 2);
  CHECK_THROWS(quotient_map(Subspace::span(3, {v({1, 0, 0})}), Subspace::span(3, {v({0, 1, 0})})));

  Subspace b = Subspace::span(3, {v({1, 0, 0})});
  QuotientMap q(all, b);
  CHECK(q.dim() == 2);
  CHECK(vec_is_zero(q.coords(v({5, 0, 0}))));
  Mat induced = q.induced(jordan3());
  // N on V/span{e1} is again a single nilpotent Jordan block of size 2.
  CHECK(rank(induced) == 1);
  CHECK((induced * induced).is_zero());
  for (std::size_t j = 0; j < q.dim(); ++j) CHECK(q.coords(q.lifts()[j]) == unit_vec(2, j));
}

TEST_CASE("solving, inverses and exponentials") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    Mat m = test::random_mat(rng, 4, 4, 4);
    auto inv = inverse(m);
    if (determinant(m).is_zero()) {
      CHECK(!inv);
      continue;
    }
    REQUIRE(inv);
    CHECK(m * *inv == Mat::identity(4));
    Vec b = test::random_vec(rng, 4, 4);
    auto x = solve(m, b);
    REQUIRE(x);
    CHECK(m * *x == b);
  }
  Mat n = jordan3();
  Mat e = exp_nilpotent(n);
  CHECK(e(0, 2) == GRat(Rat(1, 2)));
  CHECK(exp_nilpotent(-n) * e == Mat::identity(3));
  CHECK(is_nilpotent(n));
  CHECK_THROWS_AS(exp_nilpotent(Mat::identity(2)), std::domain_error);
  CHECK(max_entry_norm2(Mat::diagonal({GRat(Rat(1), Rat(2)), GRat(-1)})) == Rat(5));
}
