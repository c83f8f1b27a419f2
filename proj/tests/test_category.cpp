#include <doctest.h>

#include <random>

#include "dhsys/category.hpp"
#include "dhsys/sl2.hpp"
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

DeligneSystem p1() { return {IncFiltration::pure(2, 1), {nil2()}, diag_grading({0, 2}), Field::Rat}; }

DHSystem p1dh() {
  std::map<int, Subspace> steps{{0, Subspace::full(2)}, {1, Subspace::span(2, {{GRat(0), GRat(1)}})}, {2, Subspace::zero(2)}};
  return {IncFiltration::pure(2, 1), {nil2()}, DecFiltration::from_map(2, steps)};
}

// 1-dimensional pure structure of weight 2w, type (w, w).
DHSystem tate_line(int w) {
  return tate(DHSystem{IncFiltration::pure(1, 0), {Mat(1, 1)}, DecFiltration::trivial(1, 0)}, -w);
}

Mat zero_block(const Mat& id, std::size_t rest) { return direct_sum(id, Mat(rest, rest)); }

ZeroOnlyZeta zero;

}  // namespace

TEST_CASE("constructors preserve the axioms") {
  CHECK(validate(direct_sum(p1(), p1())).ok());
  CHECK(validate(tensor(p1(), p1())).ok());
  CHECK(validate(dual(p1())).ok());
  CHECK(validate(tate(p1(), 1)).ok());
  CHECK(validate(sym(p1(), 2)).ok());
  CHECK(validate(wedge(p1(), 2)).ok());
  CHECK(validate_dh(direct_sum(p1dh(), p1dh())).ok());
  CHECK(validate_dh(tensor(p1dh(), p1dh())).ok());
  CHECK(validate_dh(dual(p1dh())).ok());
  CHECK(validate_dh(tate(p1dh(), -1)).ok());
  CHECK(validate_dh(sym(p1dh(), 3)).ok());
  CHECK(validate_dh(wedge(p1dh(), 2)).ok());
  CHECK(validate_dh(tate_line(1)).ok());
}

TEST_CASE("constructor anchors") {
  CHECK(sym(p1(), 2).dim() == 3);
  CHECK(wedge(p1(), 2).dim() == 1);
  CHECK(wedge(p1(), 3).dim() == 0);
  CHECK(sym(p1(), 0).dim() == 1);

  OrbitDecomposition s2 = decompose(sym(p1(), 2));
  REQUIRE(s2.components.size() == 1);
  CHECK(s2.components[0].piece.m == std::vector<int>{2});
  CHECK(s2.components[0].piece.k == 2);

  // The determinant of the standard orbit is Q(-1).
  DHSystem det = wedge(p1dh(), 2);
  CHECK(det.w == IncFiltration::pure(1, 2));
  CHECK(det.f.step(1).is_full());
  CHECK(det.f.step(2).is_zero());

  DeligneSystem d = dual(p1());
  CHECK(d.w == IncFiltration::pure(2, -1));
  CHECK(d.alpha == diag_grading({0, -2}));
  CHECK(d.n[0] == -nil2().transpose());

  DHSystem t = tate(p1dh(), 1);
  CHECK(t.w == IncFiltration::pure(2, -1));
  CHECK(t.f.step(0) == p1dh().f.step(1));
}

TEST_CASE("duality is an involution") {
  for (const DeligneSystem& s : {p1(), tensor(p1(), tate(p1(), 1)), direct_sum(p1(), dual(p1()))}) {
    DeligneSystem dd = dual(dual(s));
    CHECK(dd.w == s.w);
    CHECK(dd.n[0] == s.n[0]);
    CHECK(dd.alpha == s.alpha);
  }
  for (const DHSystem& s : {p1dh(), tensor(p1dh(), p1dh()), direct_sum(p1dh(), tate_line(1))}) {
    DHSystem dd = dual(dual(s));
    CHECK(dd.w == s.w);
    CHECK(dd.f == s.f);
  }
}

TEST_CASE("kernels, cokernels and strictness") {
  DeligneSystem y = p1(), z = tate(p1(), -1);
  DeligneSystem v = direct_sum(y, z);
  DeligneMorphism proj{v, v, zero_block(Mat::identity(2), 2)};
  CHECK(morphism_defect(proj).empty());
  CHECK(kernel(proj).object.dim() == 2);
  CHECK(cokernel(proj).object.dim() == 2);
  CHECK(validate(kernel(proj).object).ok());
  CHECK(validate(cokernel(proj).object).ok());
  CHECK(kernel(proj).object.w == z.w);
  CHECK(coimage_image_defect(proj).empty());

  DeligneMorphism twist{y, y, nil2()};
  CHECK(!morphism_defect(twist).empty());
}

TEST_CASE("random morphisms id + 0 are strict") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    DHSystem y = trial % 2 ? p1dh() : tensor(p1dh(), p1dh());
    DHSystem z = trial % 3 ? tate_line(1) : p1dh();
    DHSystem v = direct_sum(y, z);
    Mat g = test::random_invertible(rng, v.dim());
    Mat h = test::random_invertible(rng, v.dim());
    Mat f = h * zero_block(Mat::identity(y.dim()), z.dim()) * *inverse(g);
    DhMorphism m{transported(v, g), transported(v, h), f};
    CHECK(morphism_defect(m).empty());
    CHECK(coimage_image_defect(m).empty());
    auto k = kernel(m);
    auto c = cokernel(m);
    CHECK(k.object.dim() == z.dim());
    CHECK(c.object.dim() == z.dim());
    CHECK(validate_dh(k.object).ok());
    CHECK(validate_dh(c.object).ok());
    CHECK((f * k.inclusion).is_zero());
    CHECK((c.projection * f).is_zero());
  }
}

TEST_CASE("scalar changes") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Mat a(2, 2), b(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        a(i, j) = test::random_grat(rng, 3);
        b(i, j) = test::random_grat(rng, 3);
      }
    CHECK(realify(a * b) == realify(a) * realify(b));
    CHECK(realify(a).is_real());
  }
  Mat i2 = realify(GRat::i() * Mat::identity(2));
  CHECK(i2 * i2 == -Mat::identity(4));

  DeligneSystem g = scalar_change(p1());
  CHECK(g.field == Field::Gauss);
  DeligneSystem r = restrict_scalars(g);
  CHECK(r.dim() == 4);
  CHECK(r.field == Field::Rat);
  CHECK(validate(r).ok());
  CHECK(is_orbit(r));
  CHECK(validate_dh(from_deligne(g)).ok());
  CHECK(to_deligne(from_deligne(g), zero).dim() == 8);
}
