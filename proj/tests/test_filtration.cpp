#include <doctest.h>

#include <random>

#include "dhsys/filtration.hpp"
#include "support.hpp"

using namespace dhsys;

namespace {

Vec v(std::initializer_list<long> xs) {
  Vec out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

Mat shift_down(std::size_t n) {
  Mat m(n, n);
  for (std::size_t k = 0; k + 1 < n; ++k) m(k, k + 1) = 1;
  return m;
}

// Pure weight 1, N e2 = e1.
IncFiltration p1_weight() { return IncFiltration::pure(2, 1); }
Mat p1_n() { return shift_down(2); }

IncFiltration j3_expected() {
  return IncFiltration::from_map(3, {{-2, Subspace::span(3, {v({1, 0, 0})})},
                                     {0, Subspace::span(3, {v({1, 0, 0}), v({0, 1, 0})})},
                                     {2, Subspace::full(3)}});
}

// Oracle for hom_induced: f(W_w) in W_{w+k} for every w.
bool shifts_by(const IncFiltration& w, const Mat& f, int k) {
  for (int x = w.lo() - 1; x <= w.hi(); ++x)
    if (!w.step(x + k).contains(image(f, w.step(x)))) return false;
  return true;
}

struct Instance {
  IncFiltration w;
  Mat n;
};

// Direct sum of Jordan blocks, each pure of a random weight, moved by a random
// change of basis. The relative monodromy filtration always exists here.
Instance random_split(std::mt19937_64& rng, std::size_t dim) {
  std::vector<Vec> cols;
  std::vector<int> weights;
  Mat n(dim, dim);
  std::size_t at = 0;
  while (at < dim) {
    std::size_t len = 1 + rng() % (dim - at);
    int weight = static_cast<int>(rng() % 4) - 1;
    for (std::size_t k = 0; k < len; ++k) {
      weights.push_back(weight);
      if (k + 1 < len) n(at + k, at + k + 1) = 1;
    }
    at += len;
  }
  Grading g = Grading::from_basis(Mat::identity(dim), weights);
  IncFiltration w = weight_filtration_of(g);
  Mat basis = test::random_invertible(rng, dim);
  Mat inv = *inverse(basis);
  return {w.transformed(basis), basis * n * inv};
}

}  // namespace

TEST_CASE("weight filtration of a grading") {
  IncFiltration t = weight_filtration_of(Grading::pure(3, 0));
  CHECK(t.step(-1).is_zero());
  CHECK(t.step(0).is_full());

  Grading alpha = Grading::from_basis(Mat::identity(2), {0, 2});
  IncFiltration wp = weight_filtration_of(alpha);
  CHECK(wp.step(0) == Subspace::span(2, {v({1, 0})}));
  CHECK(wp.step(1) == Subspace::span(2, {v({1, 0})}));
  CHECK(wp.step(2).is_full());
  CHECK(alpha.splits(wp));

  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    std::size_t dim = 1 + rng() % 5;
    std::vector<int> weights;
    for (std::size_t j = 0; j < dim; ++j) weights.push_back(static_cast<int>(rng() % 5) - 2);
    Grading g = Grading::from_basis(test::random_invertible(rng, dim), weights);
    IncFiltration f = weight_filtration_of(g);
    for (int x = -3; x <= 3; ++x) {
      std::size_t expect = 0;
      for (int y : weights) expect += y <= x ? 1 : 0;
      CHECK(f.step(x).dim() == expect);
    }
  }
}

TEST_CASE("grading actions and components") {
  std::mt19937_64 rng(2);
  Grading g = Grading::from_basis(test::random_invertible(rng, 4), {-1, 0, 0, 2});
  CHECK(g.act(GRat(2)) * g.act(GRat(3)) == g.act(GRat(6)));
  CHECK(g.act(GRat(1)) == Mat::identity(4));
  Mat x = test::random_mat(rng, 4, 4, 3);
  Mat total(4, 4);
  for (const auto& [k, c] : g.components(x)) {
    CHECK(g.has_weight(c, k));
    CHECK(g.component(x, k) == c);
    // a X_k a^{-1} = a^k X_k.
    CHECK(g.act(GRat(2)) * c * g.act(GRat(Rat(1, 2))) == GRat(rat_pow(Rat(2), k)) * c);
    total += c;
  }
  CHECK(total == x);
}

TEST_CASE("induced filtrations on graded pieces") {
  IncFiltration w = IncFiltration::pure(3, 0);
  IncFiltration same = induced_on_graded(w, w, 0);
  CHECK(same.step(-1).is_zero());
  CHECK(same.step(0).is_full());

  IncFiltration j3 = induced_on_graded(j3_expected(), w, 0);
  CHECK(j3.graded_dim(-2) == 1);
  CHECK(j3.graded_dim(0) == 1);
  CHECK(j3.graded_dim(2) == 1);
  CHECK(j3.jumps() == std::vector<int>{-2, 0, 2});

  IncFiltration p1 = induced_on_graded(weight_filtration_of(Grading::from_basis(Mat::identity(2), {0, 2})),
                                       p1_weight(), 1);
  CHECK(p1.ambient_dim() == 2);
  CHECK(p1.jumps() == std::vector<int>{0, 2});
  CHECK(p1.graded_dim(0) == 1);
}

TEST_CASE("filtration on Hom") {
  IncFiltration t = hom_induced(IncFiltration::pure(2, 0));
  CHECK(t.step(-1).is_zero());
  CHECK(t.step(0).is_full());

  IncFiltration wp = weight_filtration_of(Grading::from_basis(Mat::identity(2), {0, 2}));
  IncFiltration hom = hom_induced(wp);
  CHECK(hom.step(-2).contains(vectorize(p1_n())));
  CHECK(!hom.step(-3).contains(vectorize(p1_n())));
  CHECK(shifts_by(wp, p1_n(), -2));
  CHECK(!shifts_by(wp, p1_n(), -3));

  std::mt19937_64 rng(9);
  for (int k = 0; k < 15; ++k) {
    Instance in = random_split(rng, 1 + rng() % 3);
    IncFiltration h = hom_induced(in.w);
    Mat f = test::random_mat(rng, in.w.ambient_dim(), in.w.ambient_dim(), 2);
    for (int s = -3; s <= 3; ++s) CHECK(h.step(s).contains(vectorize(f)) == shifts_by(in.w, f, s));
  }
}

TEST_CASE("verify_rmf anchors") {
  IncFiltration w = IncFiltration::pure(3, 0);
  CHECK(verify_rmf(w, Mat(3, 3), w).ok);
  CHECK(verify_rmf(w, shift_down(3), j3_expected()).ok);

  RmfReport bad = verify_rmf(p1_weight(), p1_n(), p1_weight());
  CHECK(!bad.ok);
  CHECK(bad.condition == "(i)");
  CHECK(bad.w == 1);

  // Right shape but shifted by one: (i) holds, the symmetry (ii) does not.
  RmfReport off = verify_rmf(w, shift_down(3), j3_expected().shifted(1));
  CHECK(!off.ok);
  CHECK(off.condition == "(ii)");

  IncFiltration p1 = IncFiltration::from_map(2, {{1, Subspace::full(2)}});
  Mat not_respecting(2, 2);
  not_respecting(1, 0) = 1;
  IncFiltration two_step = IncFiltration::from_map(2, {{0, Subspace::span(2, {v({1, 0})})}, {1, Subspace::full(2)}});
  CHECK_THROWS_AS(verify_rmf(two_step, not_respecting, p1), std::invalid_argument);
}

TEST_CASE("compute_rmf anchors") {
  IncFiltration w = IncFiltration::pure(3, 0);
  CHECK(*compute_rmf(w, Mat(3, 3)) == w);
  CHECK(*compute_rmf(w, shift_down(3)) == j3_expected());
  auto p1 = compute_rmf(p1_weight(), p1_n());
  REQUIRE(p1);
  CHECK(*p1 == weight_filtration_of(Grading::from_basis(Mat::identity(2), {0, 2})));
  CHECK(compute_rmf(IncFiltration(0, 0, {}), Mat(0, 0))->ambient_dim() == 0);

  // N maps the weight-1 piece onto the weight-0 piece: no RMF can exist.
  IncFiltration two_step = IncFiltration::from_map(2, {{0, Subspace::span(2, {v({1, 0})})}, {1, Subspace::full(2)}});
  CHECK(!compute_rmf(two_step, p1_n()));
}

TEST_CASE("compute_rmf on random split instances, with uniqueness and restriction") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 40; ++k) {
    Instance in = random_split(rng, 1 + rng() % 6);
    auto wp = compute_rmf(in.w, in.n);
    REQUIRE(wp);
    CHECK(verify_rmf(in.w, in.n, *wp).ok);
    // Move the candidate: any other filtration must fail.
    const std::size_t dim = in.w.ambient_dim();
    IncFiltration moved = wp->transformed(test::random_invertible(rng, dim));
    if (!(moved == *wp)) CHECK(!verify_rmf(in.w, in.n, moved).ok);
    CHECK(!verify_rmf(in.w, in.n, wp->shifted(1)).ok);
    for (int a : in.w.jumps()) {
      Subspace u = in.w.step(a);
      auto sub = compute_rmf(in.w.restricted(u), restrict_operator(u, in.n));
      REQUIRE(sub);
      CHECK(wp->restricted(u) == *sub);
    }
  }
}

TEST_CASE("RMF is compatible with the induced filtration on Hom") {
  IncFiltration w = IncFiltration::pure(3, 0);
  auto hom = compute_rmf(hom_induced(w), ad_matrix(shift_down(3)));
  REQUIRE(hom);
  CHECK(*hom == hom_induced(j3_expected()));

  std::mt19937_64 rng(4);
  for (int k = 0; k < 8; ++k) {
    Instance in = random_split(rng, 1 + rng() % 3);
    auto wp = compute_rmf(in.w, in.n);
    auto homp = compute_rmf(hom_induced(in.w), ad_matrix(in.n));
    REQUIRE(homp);
    CHECK(hom_induced(*wp) == *homp);
  }
}

TEST_CASE("primitive components") {
  IncFiltration w = IncFiltration::pure(3, 0);
  PrimitivePiece zero = primitive_component(w, Mat(3, 3), w, 0, 0);
  CHECK(zero.primitive.is_full());
  CHECK(primitive_component(w, Mat(3, 3), w, 0, 1).piece.dim() == 0);

  PrimitivePiece top = primitive_component(w, shift_down(3), j3_expected(), 0, 2);
  CHECK(top.piece.dim() == 1);
  CHECK(top.primitive.dim() == 1);
  CHECK(top.piece.coords(v({0, 0, 1})) == Vec{GRat(1)});
  CHECK(top.image.is_zero());

  // J3 plus a one-dimensional kernel summand e4 of weight 0.
  Mat n(4, 4);
  n(0, 1) = 1;
  n(1, 2) = 1;
  IncFiltration w4 = IncFiltration::pure(4, 0);
  auto wp = compute_rmf(w4, n);
  PrimitivePiece middle = primitive_component(w4, n, *wp, 0, 0);
  CHECK(middle.piece.dim() == 2);
  CHECK(middle.primitive == Subspace::span(2, {middle.piece.coords(v({0, 0, 0, 1}))}));
  CHECK(middle.image == Subspace::span(2, {middle.piece.coords(v({0, 1, 0, 0}))}));

  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    Instance in = random_split(rng, 1 + rng() % 6);
    auto f = compute_rmf(in.w, in.n);
    for (int a : in.w.jumps())
      for (int m = 0; m <= 4; ++m) {
        PrimitivePiece p = primitive_component(in.w, in.n, *f, a, m);
        CHECK(intersect(p.primitive, p.image).is_zero());
        CHECK(sum(p.primitive, p.image).dim() == p.piece.dim());
      }
  }
}
