#include <doctest.h>

#include <random>

#include "dhsys/deligne.hpp"
#include "support.hpp"

using namespace dhsys;

namespace {

Mat nil2() {
  Mat n(2, 2);
  n(0, 1) = 1;
  return n;
}

Grading diag_grading(const std::vector<int>& weights) {
  return Grading::from_basis(Mat::identity(weights.size()), weights);
}

// The standard two-dimensional system: W pure of weight 1, N e2 = e1.
DeligneSystem p1() { return {IncFiltration::pure(2, 1), {nil2()}, diag_grading({0, 2}), Field::Rat}; }

// W_0 = span{e1}, W_2 = V, N e2 = e1: N lowers W by two, so its tau_0 part vanishes.
DeligneSystem lowering() {
  return {weight_filtration_of(diag_grading({0, 2})), {nil2()}, diag_grading({0, 2}), Field::Rat};
}

// Exterior product of two one-variable systems (coordinates e_i (x) f_j).
DeligneSystem product(const DeligneSystem& a, const DeligneSystem& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  Grading wa = splitting_of(a.w), wb = splitting_of(b.w);
  std::vector<Vec> cols;
  std::vector<int> ww, aw;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      cols.push_back(vectorize(Mat::from_cols({wa.basis().col(i)}, na) * Mat::from_rows({wb.basis().col(j)}, nb)));
      ww.push_back(wa.basis_weights()[i] + wb.basis_weights()[j]);
    }
  Mat wbasis = Mat::from_cols(cols, na * nb);
  Mat abasis = kron(a.alpha.basis(), b.alpha.basis());
  for (int x : a.alpha.basis_weights())
    for (int y : b.alpha.basis_weights()) aw.push_back(x + y);
  return {weight_filtration_of(Grading::from_basis(wbasis, ww)),
          {kron(a.n[0], Mat::identity(nb)), kron(Mat::identity(na), b.n[0])},
          Grading::from_basis(abasis, aw),
          Field::Rat};
}

DeligneSystem transported(const DeligneSystem& s, const Mat& g) {
  Mat gi = *inverse(g);
  DeligneSystem out = s;
  out.w = s.w.transformed(g);
  for (auto& n : out.n) n = g * n * gi;
  out.alpha = s.alpha.transformed(g);
  return out;
}

}  // namespace

TEST_CASE("validation anchors") {
  ValidationReport rep = validate(p1());
  CHECK(rep.ok());
  REQUIRE(rep.tower.size() == 2);
  CHECK(rep.tower[1] == weight_filtration_of(diag_grading({0, 2})));

  DeligneSystem flat = p1();
  flat.alpha = Grading::pure(2, 1);
  ValidationReport bad = validate(flat);
  CHECK(!bad.ok());
  CHECK(bad.find("(a)")->ok);
  CHECK(bad.find("(b)")->ok);
  CHECK(!bad.find("(e)")->ok);

  DeligneSystem zero{IncFiltration::pure(0, 0), {Mat(0, 0)}, Grading(0, {}), Field::Rat};
  CHECK(validate(zero).ok());

  DeligneSystem not_nil = p1();
  not_nil.n[0] = Mat::identity(2);
  ValidationReport r = validate(not_nil);
  CHECK(!r.find("(a)")->ok);
  CHECK(r.find("(b)")->witness.find("not checked") != std::string::npos);

  DeligneSystem complex_op = p1();
  complex_op.n[0] = GRat::i() * nil2();
  CHECK(!validate(complex_op).find("(a)")->ok);
  complex_op.field = Field::Gauss;
  CHECK(validate(complex_op).ok());

  CHECK(validate(lowering()).ok());
}

TEST_CASE("tau_pair anchors") {
  DeligneSystem s = p1();
  CHECK(tau_pair(s.w, s.n[0], s.alpha) == Grading::pure(2, 1));

  Mat j3(3, 3);
  j3(0, 1) = 1;
  j3(1, 2) = 1;
  Grading sl2 = diag_grading({-2, 0, 2});
  Grading t = tau_pair(IncFiltration::pure(3, 0), j3, sl2);
  CHECK(t == Grading::pure(3, 0));
  CHECK(t.components(j3).size() == 1);

  // N = 0: any alpha-compatible splitting of W.
  Grading a = diag_grading({0, 2});
  IncFiltration w = weight_filtration_of(a);
  Grading t0 = tau_pair(w, Mat(2, 2), a);
  CHECK(t0.splits(w));
  CHECK(t0.commutes_with(a));
  CHECK(t0 == a);

  DeligneSystem low = lowering();
  CHECK(tau_pair(low.w, low.n[0], low.alpha) == low.alpha);
}

TEST_CASE("tau_pair is unique") {
  DeligneSystem s = p1();
  Grading t = tau_pair(s.w, s.n[0], s.alpha);
  CHECK(check_tau_pair(s.w, s.n[0], s.alpha, t).ok);
  CHECK(!check_tau_pair(s.w, s.n[0], s.alpha, t.shifted(1)).ok);
  CHECK(!check_tau_pair(s.w, s.n[0], s.alpha, s.alpha).ok);

  DeligneSystem low = lowering();
  Grading tl = tau_pair(low.w, low.n[0], low.alpha);
  CHECK(!check_tau_pair(low.w, low.n[0], low.alpha, diag_grading({2, 0})).ok);
  CHECK(!check_tau_pair(low.w, low.n[0], low.alpha, tl.shifted(-1)).ok);
}

TEST_CASE("tau tuples of products") {
  DeligneSystem none{IncFiltration::pure(2, 1), {}, Grading::pure(2, 1), Field::Rat};
  auto t0 = tau_tuple(none);
  REQUIRE(t0.size() == 1);
  CHECK(t0[0] == none.alpha);

  auto t1 = tau_tuple(p1());
  REQUIRE(t1.size() == 2);
  CHECK(t1[0] == Grading::pure(2, 1));
  CHECK(t1[1] == p1().alpha);

  DeligneSystem pp = product(p1(), p1());
  ValidationReport rep = validate(pp);
  REQUIRE(rep.ok());
  auto t = tau_tuple(pp, rep.tower);
  CHECK(t[2] == diag_grading({0, 2, 2, 4}));
  CHECK(t[1] == diag_grading({1, 1, 3, 3}));
  CHECK(t[0] == Grading::pure(4, 2));
  CHECK(nhat(pp, t) == pp.n);
  DeligneSystem same = associated_sl2(pp);
  CHECK(same.n == pp.n);
  CHECK(same.alpha == pp.alpha);
}

TEST_CASE("N-hat recovers the orbit of a perturbed system") {
  // lowering (x) p1: the first operator mixes a part of tau_0-weight -2 into
  // the orbit operator 1 (x) N.
  DeligneSystem low = lowering();
  DeligneSystem mixed = product(low, p1());
  Mat sum = mixed.n[0] + mixed.n[1];
  DeligneSystem one{mixed.w, {sum}, mixed.alpha, Field::Rat};
  REQUIRE(validate(one).ok());
  auto t = tau_tuple(one);
  // tau_0 is the sum of the tau_0's of the factors.
  CHECK(t[0] == diag_grading({1, 1, 3, 3}));
  CHECK(nhat(one, t)[0] == mixed.n[1]);

  DeligneSystem orbit = associated_sl2(one);
  CHECK(validate(orbit).ok());
  CHECK(tau_tuple(orbit) == t);
}

TEST_CASE("properties under basis change and recombination") {
  std::mt19937_64 rng(31);
  const std::vector<DeligneSystem> seeds{p1(), lowering(), product(p1(), p1()), product(lowering(), p1()),
                                         product(p1(), lowering())};
  for (int trial = 0; trial < 25; ++trial) {
    const DeligneSystem& s = seeds[trial % seeds.size()];
    ValidationReport base = validate(s);
    REQUIRE(base.ok());
    auto tau = tau_tuple(s, base.tower);

    Mat g = test::random_invertible(rng, s.dim());
    DeligneSystem moved = transported(s, g);
    ValidationReport mrep = validate(moved);
    REQUIRE(mrep.ok());
    auto mtau = tau_tuple(moved, mrep.tower);
    for (std::size_t j = 0; j < tau.size(); ++j) CHECK(mtau[j] == tau[j].transformed(g));
    auto nh = nhat(s, tau), mnh = nhat(moved, mtau);
    for (std::size_t j = 0; j < nh.size(); ++j) CHECK(mnh[j] == g * nh[j] * *inverse(g));

    // Lower-triangular recombination keeps the tower.
    DeligneSystem rec = s;
    for (std::size_t j = 0; j < s.vars(); ++j) {
      Mat acc = GRat(Rat(1 + static_cast<long>(rng() % 5))) * s.n[j];
      for (std::size_t k = 0; k < j; ++k) acc += GRat(Rat(static_cast<long>(rng() % 7) - 3)) * s.n[k];
      rec.n[j] = acc;
    }
    ValidationReport rrep = validate(rec);
    CHECK(rrep.ok());
    CHECK(rrep.tower == base.tower);
  }
}

TEST_CASE("one-variable collapse") {
  DeligneSystem s = p1();
  CollapseResult same = one_variable_collapse(s, {Rat(1)});
  REQUIRE(same.system);
  CHECK(same.system->n == s.n);

  DeligneSystem pp = product(p1(), p1());
  for (Rat y1 : {Rat(1), Rat(7, 3), Rat(1, 9)})
    for (Rat y2 : {Rat(1), Rat(5)}) {
      CollapseResult c = one_variable_collapse(pp, {y1, y2});
      REQUIRE(c.system);
      CHECK(validate(*c.system).ok());
    }
  CHECK_THROWS_AS(one_variable_collapse(pp, {Rat(1)}), DimensionError);
}
