#include <doctest.h>

#include <random>

#include "dhsys/hodge.hpp"
#include "support.hpp"

using namespace dhsys;

namespace {

Vec v(std::initializer_list<GRat> xs) { return Vec(xs); }

GRat gi(long re, long im) { return GRat(Rat(re), Rat(im)); }

// Hodge-Tate-like: W_0 = span{e1}, W_2 = V, F^1 = span{e2 + z e1}.
IncFiltration ht_weight() {
  return IncFiltration::from_map(2, {{0, Subspace::span(2, {v({1, 0})})}, {2, Subspace::full(2)}});
}
DecFiltration ht_hodge(const GRat& z) {
  return DecFiltration::from_map(2, {{0, Subspace::full(2)}, {1, Subspace::span(2, {v({z, 1})})}});
}

// P1: F(y)^1 = span{e2 + i y e1}, F^0 = V, weight 1; form with Q(e2, e1) = 1.
DecFiltration p1_hodge(const Rat& y) {
  return DecFiltration::from_map(2, {{0, Subspace::full(2)}, {1, Subspace::span(2, {v({GRat(Rat(0), y), 1})})}});
}
GradedForm p1_form() {
  Mat g(2, 2);
  g(1, 0) = 1;
  g(0, 1) = -1;
  return {1, g};
}

// A split mixed Hodge structure with prescribed real grading, plus the
// expected answer for F = exp(i delta0) F_split.
struct KnownMhs {
  IncFiltration w;
  DecFiltration f;
  Grading s_prime;
  Mat delta;
  DecFiltration f_split;
};

KnownMhs random_mhs(std::mt19937_64& rng, std::size_t max_dim) {
  const std::size_t n = 1 + rng() % max_dim;
  Mat basis = test::random_invertible(rng, n);
  std::vector<int> weights;
  std::map<Bidegree, std::vector<Vec>> pieces;
  std::size_t at = 0;
  while (at < n) {
    int w = static_cast<int>(rng() % 4) - 1;
    std::size_t left = n - at;
    // weight w: either a real (p,p) vector or a conjugate pair of lines.
    if (w % 2 == 0 && (left == 1 || rng() % 2)) {
      pieces[{w / 2, w / 2}].push_back(basis.col(at));
      weights.push_back(w);
      at += 1;
      continue;
    }
    if (left < 2) {
      w = 0;
      pieces[{0, 0}].push_back(basis.col(at));
      weights.push_back(w);
      at += 1;
      continue;
    }
    int p = w / 2 + 1 + static_cast<int>(rng() % 2);
    if (w % 2 != 0) p = (w + 1) / 2 + static_cast<int>(rng() % 2);
    int q = w - p;
    Vec a = basis.col(at), b = basis.col(at + 1);
    pieces[{p, q}].push_back(a + GRat::i() * b);
    pieces[{q, p}].push_back(a - GRat::i() * b);
    weights.push_back(w);
    weights.push_back(w);
    at += 2;
  }
  Grading s = Grading::from_basis(basis, weights);
  std::map<Bidegree, Subspace> bigrading;
  for (const auto& [pq, vs] : pieces) bigrading[pq] = Subspace::span(n, vs);
  int pmin = 100, pmax = -100;
  for (const auto& [pq, sub] : bigrading) {
    pmin = std::min(pmin, pq.first);
    pmax = std::max(pmax, pq.first);
  }
  std::map<int, Subspace> fsteps;
  for (int p = pmin; p <= pmax; ++p) {
    Subspace acc = Subspace::zero(n);
    for (const auto& [pq, sub] : bigrading)
      if (pq.first >= p) acc = sum(acc, sub);
    fsteps[p] = acc;
  }
  DecFiltration f_split = DecFiltration::from_map(n, fsteps);
  Mat delta(n, n);
  for (const auto& [d, m] : bigraded_components(bigrading, test::random_mat(rng, n, n, 2)))
    if (d.first < 0 && d.second < 0) delta += m;
  DecFiltration f = f_split.transformed(exp_nilpotent(GRat::i() * delta));
  return {weight_filtration_of(s), f, s, delta, f_split};
}

}  // namespace

TEST_CASE("pure Hodge structures") {
  CHECK(is_pure_hs(1, 0, DecFiltration::trivial(1, 0)));
  DecFiltration line = DecFiltration::from_map(2, {{0, Subspace::full(2)}, {1, Subspace::span(2, {v({1, GRat::i()})})}});
  CHECK(is_pure_hs(2, 1, line));
  DecFiltration real_line = DecFiltration::from_map(2, {{0, Subspace::full(2)}, {1, Subspace::span(2, {v({1, 0})})}});
  CHECK(!is_pure_hs(2, 1, real_line));
  CHECK(!is_pure_hs(1, 1, DecFiltration::trivial(1, 0)));
}

TEST_CASE("mixed Hodge structures") {
  CHECK(is_mhs(IncFiltration::pure(1, 0), DecFiltration::trivial(1, 0)).ok);
  for (GRat z : {GRat(0), gi(3, -2), GRat(Rat(1, 2), Rat(5, 7))}) CHECK(is_mhs(ht_weight(), ht_hodge(z)).ok);
  DecFiltration bad = DecFiltration::from_map(2, {{0, Subspace::full(2)}, {1, Subspace::span(2, {v({1, 0})})}});
  MhsReport r = is_mhs(ht_weight(), bad);
  CHECK(!r.ok);
  // Both graded pieces degenerate; the report names the first one.
  CHECK(r.weight == 0);
  CHECK(!is_pure_hs(1, 2, induced_on_graded(bad, ht_weight(), 2)));
}

TEST_CASE("delta splitting anchors") {
  DeltaSplitting pure = delta_splitting(IncFiltration::pure(2, 1), p1_hodge(Rat(1)));
  CHECK(pure.delta.is_zero());
  CHECK(pure.s_prime == Grading::pure(2, 1));

  const Rat x(3, 2), y(-4, 5);
  DeltaSplitting ht = delta_splitting(ht_weight(), ht_hodge(GRat(x, y)));
  CHECK(ht.s_prime.part(2) == Subspace::span(2, {v({GRat(x), 1})}));
  CHECK(ht.s_prime.part(0) == Subspace::span(2, {v({1, 0})}));
  Mat expect(2, 2);
  expect(0, 1) = GRat(y);
  CHECK(ht.delta == expect);
  CHECK(ht.delta_components.size() == 1);
  CHECK(ht.delta_components.count({-1, -1}) == 1);

  // Direct sum of two structures: delta is block diagonal.
  DecFiltration f2 = ht_hodge(GRat(x, y));
  IncFiltration w2 = ht_weight();
  std::map<int, Subspace> wsteps, fsteps;
  auto lift = [](const Subspace& a, const Subspace& b) {
    std::vector<Vec> vs;
    for (auto x : a.basis_vectors()) vs.push_back(Vec{x[0], x[1], 0, 0});
    for (auto x : b.basis_vectors()) vs.push_back(Vec{0, 0, x[0], x[1]});
    return Subspace::span(4, vs);
  };
  for (int k = -1; k <= 2; ++k) wsteps[k] = lift(w2.step(k), w2.step(k));
  for (int p = 0; p <= 2; ++p) fsteps[p] = lift(f2.step(p), ht_hodge(GRat(1, 3)).step(p));
  DeltaSplitting sum2 = delta_splitting(IncFiltration::from_map(4, wsteps), DecFiltration::from_map(4, fsteps));
  Mat d = sum2.delta;
  CHECK(d.block(0, 2, 2, 2).is_zero());
  CHECK(d.block(2, 0, 2, 2).is_zero());
  CHECK(d.block(0, 0, 2, 2) == expect);
  CHECK(d(2, 3) == GRat(3));
}

TEST_CASE("delta splitting recovers a planted splitting") {
  std::mt19937_64 rng(17);
  int nonzero = 0;
  for (int k = 0; k < 60; ++k) {
    KnownMhs m = random_mhs(rng, 6);
    REQUIRE(is_mhs(m.w, m.f).ok);
    DeltaSplitting d = delta_splitting(m.w, m.f);
    CHECK(d.delta == m.delta);
    CHECK(d.s_prime == m.s_prime);
    CHECK(d.f_split == m.f_split);
    nonzero += m.delta.is_zero() ? 0 : 1;
    // Equivariance under real unipotent automorphisms of W.
    const std::size_t n = m.w.ambient_dim();
    Mat x = test::random_mat(rng, n, n, 2);
    Mat u = m.s_prime.component(x, -1) + m.s_prime.component(x, -2);
    Mat g = exp_nilpotent(u);
    DeltaSplitting moved = delta_splitting(m.w, m.f.transformed(g));
    CHECK(moved.delta == g * d.delta * exp_nilpotent(-u));
    CHECK(moved.s_prime == d.s_prime.transformed(g));
  }
  CHECK(nonzero > 5);
}

TEST_CASE("canonical splitting") {
  ZeroOnlyZeta zero;
  Grading pure = canonical_splitting(IncFiltration::pure(2, 1), p1_hodge(Rat(2)), zero);
  CHECK(pure == Grading::pure(2, 1));
  DeltaSplitting real_ht = delta_splitting(ht_weight(), ht_hodge(GRat(5)));
  CHECK(canonical_splitting(real_ht, zero) == real_ht.s_prime);
  CHECK_THROWS_AS(canonical_splitting(ht_weight(), ht_hodge(gi(1, 1)), zero), ZetaRejected);

  TableZeta table = TableZeta::parse("# zeta for a delta of type (-1,-1)\n0 d(-1,-1)\n");
  DeltaSplitting ht = delta_splitting(ht_weight(), ht_hodge(gi(1, 1)));
  CHECK(canonical_splitting(ht, table) == ht.s_prime);
  TableZeta other = TableZeta::parse("1/2 d(-1,-2)\n1 [d(-1,-2),d(-2,-1)]\n");
  CHECK(!other.zeta(ht));
  CHECK_THROWS_AS(TableZeta::parse("1 d(-1,"), ParseError);
  CHECK_THROWS_AS(TableZeta::parse("1"), ParseError);
}

TEST_CASE("polarization anchors") {
  Mat one(1, 1);
  one(0, 0) = 1;
  CHECK(verify_polarization({0, one}, DecFiltration::trivial(1, 0)).ok);
  CHECK(verify_polarization(p1_form(), p1_hodge(Rat(1))).ok);
  PolarizationReport neg = verify_polarization(p1_form(), p1_hodge(Rat(-1)));
  CHECK(!neg.ok);
  CHECK(neg.detail.find("positive") != std::string::npos);

  CHECK(construct_polarization(2, DecFiltration::trivial(1, 1)).gram == one);
  DecFiltration line = DecFiltration::from_map(2, {{0, Subspace::full(2)}, {1, Subspace::span(2, {v({1, GRat::i()})})}});
  GradedForm f = construct_polarization(1, line);
  CHECK(f.gram.transpose() == -f.gram);
  CHECK(!f.gram(0, 1).is_zero());
  CHECK(verify_polarization(f, line).ok);
  // Flipping the sign breaks positivity.
  CHECK(!verify_polarization({1, -f.gram}, line).ok);
}

TEST_CASE("constructed polarizations verify on random pure structures") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 60; ++k) {
    KnownMhs m = random_mhs(rng, 8);
    for (int w : m.w.jumps()) {
      DecFiltration g = induced_on_graded(m.f, m.w, w);
      GradedForm form = construct_polarization(w, g);
      CHECK(verify_polarization(form, g).ok);
    }
  }
}
