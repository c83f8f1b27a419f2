#include "dhsys/category.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dhsys {

namespace {

struct Adapted {
  Mat basis;  // columns
  std::vector<int> weights;
};

// Basis adapted to an increasing filtration: each vector carries the first
// index at which it enters.
Adapted adapted(const IncFiltration& w) {
  const std::size_t d = w.ambient_dim();
  Adapted out{Mat(d, d), {}};
  Subspace cur = Subspace::zero(d);
  std::size_t col = 0;
  for (int k = w.lo(); k <= w.hi(); ++k)
    for (const auto& v : w.step(k).basis_vectors()) {
      if (cur.contains(v)) continue;
      cur = sum(cur, Subspace::span(d, {v}));
      out.basis.set_col(col++, v);
      out.weights.push_back(k);
    }
  return out;
}

Adapted adapted(const DecFiltration& f) {
  const std::size_t d = f.ambient_dim();
  Adapted out{Mat(d, d), {}};
  Subspace cur = Subspace::zero(d);
  std::size_t col = 0;
  for (int p = f.hi(); p >= f.lo(); --p)
    for (const auto& v : f.step(p).basis_vectors()) {
      if (cur.contains(v)) continue;
      cur = sum(cur, Subspace::span(d, {v}));
      out.basis.set_col(col++, v);
      out.weights.push_back(p);
    }
  return out;
}

Adapted adapted(const Grading& g) { return {g.basis(), g.basis_weights()}; }

Adapted kron(const Adapted& a, const Adapted& b) {
  Adapted out{kron(a.basis, b.basis), {}};
  for (int x : a.weights)
    for (int y : b.weights) out.weights.push_back(x + y);
  return out;
}

Adapted concat(const Adapted& a, const Adapted& b) {
  Adapted out{direct_sum(a.basis, b.basis), a.weights};
  out.weights.insert(out.weights.end(), b.weights.begin(), b.weights.end());
  return out;
}

std::pair<int, int> range(const std::vector<int>& w) {
  if (w.empty()) return {0, 0};
  auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return {*lo, *hi};
}

IncFiltration inc_from(const Adapted& a) {
  const std::size_t d = a.basis.rows();
  auto [lo, hi] = range(a.weights);
  std::map<int, Subspace> steps;
  for (int k = lo - 1; k <= hi; ++k) {
    std::vector<Vec> vs;
    for (std::size_t i = 0; i < a.weights.size(); ++i)
      if (a.weights[i] <= k) vs.push_back(a.basis.col(i));
    steps[k] = Subspace::span(d, vs);
  }
  return IncFiltration::from_map(d, steps);
}

DecFiltration dec_from(const Adapted& a) {
  const std::size_t d = a.basis.rows();
  auto [lo, hi] = range(a.weights);
  std::map<int, Subspace> steps;
  for (int p = lo; p <= hi + 1; ++p) {
    std::vector<Vec> vs;
    for (std::size_t i = 0; i < a.weights.size(); ++i)
      if (a.weights[i] >= p) vs.push_back(a.basis.col(i));
    steps[p] = Subspace::span(d, vs);
  }
  return DecFiltration::from_map(d, steps);
}

Grading grading_from(const Adapted& a) {
  if (a.basis.rows() == 0) return Grading(0, {});
  return Grading::from_basis(a.basis, a.weights);
}

Mat leibniz(const Mat& a, const Mat& b) {
  return kron(a, Mat::identity(b.rows())) + kron(Mat::identity(a.rows()), b);
}

std::vector<Mat> leibniz_all(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  if (a.size() != b.size()) throw DimensionError("systems with different numbers of operators");
  std::vector<Mat> out;
  for (std::size_t j = 0; j < a.size(); ++j) out.push_back(leibniz(a[j], b[j]));
  return out;
}

std::vector<Mat> sum_all(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  if (a.size() != b.size()) throw DimensionError("systems with different numbers of operators");
  std::vector<Mat> out;
  for (std::size_t j = 0; j < a.size(); ++j) out.push_back(direct_sum(a[j], b[j]));
  return out;
}

Field join(Field a, Field b) { return a == Field::Gauss || b == Field::Gauss ? Field::Gauss : Field::Rat; }

// Image of a filtration step in quotient coordinates.
template <class Filt>
std::map<int, Subspace> quotient_steps(const Filt& f, const QuotientMap& q, int lo, int hi) {
  std::map<int, Subspace> out;
  for (int k = lo; k <= hi; ++k) out[k] = q.image_of(f.step(k));
  return out;
}

Grading quotient_grading(const Grading& g, const QuotientMap& q) {
  std::map<int, Subspace> parts;
  for (const auto& [w, part] : g.parts()) {
    Subspace im = q.image_of(part);
    if (!im.is_zero()) parts[w] = im;
  }
  return Grading(q.dim(), parts);
}

Mat projection_matrix(const QuotientMap& q, std::size_t d) {
  Mat p(q.dim(), d);
  for (std::size_t i = 0; i < d; ++i) p.set_col(i, q.coords(unit_vec(d, i)));
  return p;
}

void check_invariant(const std::vector<Mat>& n, const Subspace& u) {
  for (const auto& nj : n)
    if (!u.contains(image(nj, u))) throw std::invalid_argument("subspace is not N-invariant");
}

// Matrix of the permutation of tensor factors sending factor k to slot perm[k].
Mat factor_permutation(std::size_t d, const std::vector<int>& perm) {
  const std::size_t m = perm.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < m; ++k) total *= d;
  Mat p(total, total);
  std::vector<std::size_t> digits(m), moved(m);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (std::size_t k = m; k-- > 0;) {
      digits[k] = r % d;
      r /= d;
    }
    for (std::size_t k = 0; k < m; ++k) moved[perm[k]] = digits[k];
    std::size_t out = 0;
    for (std::size_t k = 0; k < m; ++k) out = out * d + moved[k];
    p(out, idx) = GRat(1);
  }
  return p;
}

int parity(const std::vector<int>& perm) {
  int inv = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inv;
  return inv % 2;
}

Subspace symmetrizer_image(std::size_t d, int m, bool alternating) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t total = 1;
  for (int k = 0; k < m; ++k) total *= d;
  Mat s(total, total);
  do {
    Mat p = factor_permutation(d, perm);
    if (alternating && parity(perm)) s -= p;
    else s += p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Subspace::column_space(s);
}

DeligneSystem unit_deligne(std::size_t n, Field field) {
  return {IncFiltration::pure(1, 0), std::vector<Mat>(n, Mat(1, 1)), Grading::pure(1, 0), field};
}

DHSystem unit_dh(std::size_t n) {
  return {IncFiltration::pure(1, 0), std::vector<Mat>(n, Mat(1, 1)), DecFiltration::trivial(1, 0)};
}

template <class S>
S tensor_power(const S& a, int m, S unit) {
  S out = unit;
  for (int k = 0; k < m; ++k) out = tensor(out, a);
  return out;
}

std::string check_map(const IncFiltration& ws, const IncFiltration& wt, const std::vector<Mat>& ns,
                      const std::vector<Mat>& nt, const Mat& f) {
  if (f.rows() != wt.ambient_dim() || f.cols() != ws.ambient_dim()) return "map has the wrong shape";
  if (ns.size() != nt.size()) return "different numbers of operators";
  for (std::size_t j = 0; j < ns.size(); ++j)
    if (!(f * ns[j] == nt[j] * f)) return "map does not commute with N_" + std::to_string(j + 1);
  for (int w : ws.jumps())
    if (!wt.step(w).contains(image(f, ws.step(w)))) return "map does not respect W_" + std::to_string(w);
  return {};
}

Mat realify_vec_pair(const Vec& v) {
  const std::size_t d = v.size();
  Mat out(2 * d, 2);
  for (std::size_t i = 0; i < d; ++i) {
    out(i, 0) = GRat(v[i].re);
    out(d + i, 0) = GRat(v[i].im);
    out(i, 1) = GRat(-v[i].im);
    out(d + i, 1) = GRat(v[i].re);
  }
  return out;
}

}  // namespace

std::string morphism_defect(const DeligneMorphism& f) {
  std::string err = check_map(f.source.w, f.target.w, f.source.n, f.target.n, f.map);
  if (!err.empty()) return err;
  if (f.source.dim() && f.target.dim() &&
      !(f.map * f.source.alpha.generator() == f.target.alpha.generator() * f.map))
    return "map does not respect the alpha-grading";
  return {};
}

std::string morphism_defect(const DhMorphism& f) {
  std::string err = check_map(f.source.w, f.target.w, f.source.n, f.target.n, f.map);
  if (!err.empty()) return err;
  for (int p = f.source.f.lo(); p <= f.source.f.hi(); ++p)
    if (!f.target.f.step(p).contains(image(f.map, f.source.f.step(p))))
      return "map does not respect F^" + std::to_string(p);
  return {};
}

DeligneSystem induced_sub(const DeligneSystem& s, const Subspace& u) {
  check_invariant(s.n, u);
  if (!s.alpha.is_stable(u)) throw std::invalid_argument("subspace is not alpha-stable");
  std::vector<Mat> n;
  for (const auto& nj : s.n) n.push_back(restrict_operator(u, nj));
  Grading alpha = u.is_zero() ? Grading(0, {}) : s.alpha.restricted(u);
  return {s.w.restricted(u), n, alpha, s.field};
}

DeligneSystem induced_quotient(const DeligneSystem& s, const Subspace& u, Mat* projection) {
  check_invariant(s.n, u);
  if (!s.alpha.is_stable(u)) throw std::invalid_argument("subspace is not alpha-stable");
  QuotientMap q = quotient_map(Subspace::full(s.dim()), u);
  std::vector<Mat> n;
  for (const auto& nj : s.n) n.push_back(q.induced(nj));
  if (projection) *projection = projection_matrix(q, s.dim());
  return {IncFiltration::from_map(q.dim(), quotient_steps(s.w, q, s.w.lo(), s.w.hi())), n,
          quotient_grading(s.alpha, q), s.field};
}

DHSystem induced_sub(const DHSystem& s, const Subspace& u) {
  check_invariant(s.n, u);
  std::vector<Mat> n;
  for (const auto& nj : s.n) n.push_back(restrict_operator(u, nj));
  return {s.w.restricted(u), n, s.f.restricted(u)};
}

DHSystem induced_quotient(const DHSystem& s, const Subspace& u, Mat* projection) {
  check_invariant(s.n, u);
  QuotientMap q = quotient_map(Subspace::full(s.dim()), u);
  std::vector<Mat> n;
  for (const auto& nj : s.n) n.push_back(q.induced(nj));
  if (projection) *projection = projection_matrix(q, s.dim());
  return {IncFiltration::from_map(q.dim(), quotient_steps(s.w, q, s.w.lo(), s.w.hi())), n,
          DecFiltration::from_map(q.dim(), quotient_steps(s.f, q, s.f.lo(), s.f.hi()))};
}

Sub<DeligneSystem> kernel(const DeligneMorphism& f) {
  Subspace k = Subspace::kernel(f.map);
  return {induced_sub(f.source, k), k.basis_columns()};
}

Quot<DeligneSystem> cokernel(const DeligneMorphism& f) {
  Mat p;
  DeligneSystem q = induced_quotient(f.target, Subspace::column_space(f.map), &p);
  return {q, p};
}

Sub<DHSystem> kernel(const DhMorphism& f) {
  Subspace k = Subspace::kernel(f.map);
  return {induced_sub(f.source, k), k.basis_columns()};
}

Quot<DHSystem> cokernel(const DhMorphism& f) {
  Mat p;
  DHSystem q = induced_quotient(f.target, Subspace::column_space(f.map), &p);
  return {q, p};
}

namespace {

template <class S, class M>
std::string coim_im(const S& source, const S& target, const Mat& map) {
  Subspace k = Subspace::kernel(map);
  Subspace im = Subspace::column_space(map);
  QuotientMap q = quotient_map(Subspace::full(source.dim()), k);
  S coim = induced_quotient(source, k);
  S imobj = induced_sub(target, im);
  Mat m(im.dim(), q.dim());
  for (std::size_t c = 0; c < q.dim(); ++c) m.set_col(c, coords_in(im, map * q.lifts()[c]));
  auto inv = inverse(m);
  if (!inv) return "coimage and image have different dimensions";
  std::string err = morphism_defect(M{coim, imobj, m});
  if (!err.empty()) return "coim -> im: " + err;
  err = morphism_defect(M{imobj, coim, *inv});
  if (!err.empty()) return "im -> coim: " + err;
  return {};
}

}  // namespace

std::string coimage_image_defect(const DeligneMorphism& f) {
  std::string err = morphism_defect(f);
  if (!err.empty()) return err;
  return coim_im<DeligneSystem, DeligneMorphism>(f.source, f.target, f.map);
}

std::string coimage_image_defect(const DhMorphism& f) {
  std::string err = morphism_defect(f);
  if (!err.empty()) return err;
  return coim_im<DHSystem, DhMorphism>(f.source, f.target, f.map);
}

DeligneSystem direct_sum(const DeligneSystem& a, const DeligneSystem& b) {
  return {inc_from(concat(adapted(a.w), adapted(b.w))), sum_all(a.n, b.n),
          grading_from(concat(adapted(a.alpha), adapted(b.alpha))), join(a.field, b.field)};
}

DHSystem direct_sum(const DHSystem& a, const DHSystem& b) {
  return {inc_from(concat(adapted(a.w), adapted(b.w))), sum_all(a.n, b.n),
          dec_from(concat(adapted(a.f), adapted(b.f)))};
}

DeligneSystem tensor(const DeligneSystem& a, const DeligneSystem& b) {
  return {inc_from(kron(adapted(a.w), adapted(b.w))), leibniz_all(a.n, b.n),
          grading_from(kron(adapted(a.alpha), adapted(b.alpha))), join(a.field, b.field)};
}

DHSystem tensor(const DHSystem& a, const DHSystem& b) {
  return {inc_from(kron(adapted(a.w), adapted(b.w))), leibniz_all(a.n, b.n),
          dec_from(kron(adapted(a.f), adapted(b.f)))};
}

DeligneSystem sym(const DeligneSystem& a, int m) {
  if (m < 0) throw std::invalid_argument("negative symmetric power");
  DeligneSystem t = tensor_power(a, m, unit_deligne(a.vars(), a.field));
  return m == 0 ? t : induced_sub(t, symmetrizer_image(a.dim(), m, false));
}

DHSystem sym(const DHSystem& a, int m) {
  if (m < 0) throw std::invalid_argument("negative symmetric power");
  DHSystem t = tensor_power(a, m, unit_dh(a.vars()));
  return m == 0 ? t : induced_sub(t, symmetrizer_image(a.dim(), m, false));
}

DeligneSystem wedge(const DeligneSystem& a, int m) {
  if (m < 0) throw std::invalid_argument("negative exterior power");
  DeligneSystem t = tensor_power(a, m, unit_deligne(a.vars(), a.field));
  return m == 0 ? t : induced_sub(t, symmetrizer_image(a.dim(), m, true));
}

DHSystem wedge(const DHSystem& a, int m) {
  if (m < 0) throw std::invalid_argument("negative exterior power");
  DHSystem t = tensor_power(a, m, unit_dh(a.vars()));
  return m == 0 ? t : induced_sub(t, symmetrizer_image(a.dim(), m, true));
}

namespace {

IncFiltration dual_w(const IncFiltration& w) {
  const std::size_t d = w.ambient_dim();
  std::map<int, Subspace> steps;
  for (int k = -w.hi() - 1; k <= -w.lo() + 1; ++k)
    steps[k] = Subspace::row_space(w.step(-k - 1).annihilator());
  return IncFiltration::from_map(d, steps);
}

std::vector<Mat> dual_n(const std::vector<Mat>& n) {
  std::vector<Mat> out;
  for (const auto& nj : n) out.push_back(-nj.transpose());
  return out;
}

}  // namespace

DeligneSystem dual(const DeligneSystem& a) {
  Grading alpha(0, {});
  if (a.dim()) {
    std::vector<int> weights;
    for (int x : a.alpha.basis_weights()) weights.push_back(-x);
    alpha = Grading::from_basis(a.alpha.basis_inverse().transpose(), weights);
  }
  return {dual_w(a.w), dual_n(a.n), alpha, a.field};
}

DHSystem dual(const DHSystem& a) {
  std::map<int, Subspace> steps;
  for (int p = 1 - a.f.hi() - 1; p <= 1 - a.f.lo() + 1; ++p)
    steps[p] = Subspace::row_space(a.f.step(1 - p).annihilator());
  return {dual_w(a.w), dual_n(a.n), DecFiltration::from_map(a.dim(), steps)};
}

DeligneSystem tate(const DeligneSystem& a, int r) {
  return {a.w.shifted(-2 * r), a.n, a.dim() ? a.alpha.shifted(-2 * r) : a.alpha, a.field};
}

DHSystem tate(const DHSystem& a, int r) { return {a.w.shifted(-2 * r), a.n, a.f.shifted(r)}; }

DeligneSystem transported(const DeligneSystem& s, const Mat& g) {
  auto inv = inverse(g);
  if (!inv) throw std::invalid_argument("transport by a singular matrix");
  std::vector<Mat> n;
  for (const auto& nj : s.n) n.push_back(g * nj * *inv);
  return {s.w.transformed(g), n, s.dim() ? s.alpha.transformed(g) : s.alpha, s.field};
}

DHSystem transported(const DHSystem& s, const Mat& g) {
  auto inv = inverse(g);
  if (!inv) throw std::invalid_argument("transport by a singular matrix");
  std::vector<Mat> n;
  for (const auto& nj : s.n) n.push_back(g * nj * *inv);
  return {s.w.transformed(g), n, s.f.transformed(g)};
}

DeligneSystem scalar_change(const DeligneSystem& s) {
  DeligneSystem out = s;
  out.field = Field::Gauss;
  return out;
}

Mat realify(const Mat& m) {
  const std::size_t r = m.rows(), c = m.cols();
  Mat out(2 * r, 2 * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      out(i, j) = GRat(m(i, j).re);
      out(i, c + j) = GRat(-m(i, j).im);
      out(r + i, j) = GRat(m(i, j).im);
      out(r + i, c + j) = GRat(m(i, j).re);
    }
  return out;
}

Subspace realify(const Subspace& u) {
  std::vector<Vec> vs;
  for (const auto& v : u.basis_vectors()) {
    Mat pair = realify_vec_pair(v);
    vs.push_back(pair.col(0));
    vs.push_back(pair.col(1));
  }
  return Subspace::span(2 * u.ambient_dim(), vs);
}

DeligneSystem restrict_scalars(const DeligneSystem& s) {
  const std::size_t d = s.dim();
  std::map<int, Subspace> steps;
  for (int k = s.w.lo(); k <= s.w.hi(); ++k) steps[k] = realify(s.w.step(k));
  std::vector<Mat> n;
  for (const auto& nj : s.n) n.push_back(realify(nj));
  std::map<int, Subspace> parts;
  if (d)
    for (const auto& [w, part] : s.alpha.parts()) parts[w] = realify(part);
  return {IncFiltration::from_map(2 * d, steps), n, Grading(2 * d, parts), Field::Rat};
}

}  // namespace dhsys
