#include "dhsys/filtration.hpp"

#include <algorithm>
#include <stdexcept>

namespace dhsys {

// ---------------------------------------------------------------- increasing

IncFiltration::IncFiltration(std::size_t n, int lo, std::vector<Subspace> steps) : n_(n), lo_(lo) {
  for (const auto& s : steps)
    if (s.ambient_dim() != n) throw DimensionError("filtration step has wrong ambient dimension");
  if (n == 0) {
    lo_ = 0;
    return;
  }
  if (steps.empty() || !steps.back().is_full()) throw std::invalid_argument("filtration must end at the whole space");
  for (std::size_t k = 1; k < steps.size(); ++k)
    if (!steps[k].contains(steps[k - 1])) throw std::invalid_argument("filtration is not increasing");
  std::size_t first = 0;
  while (steps[first].is_zero()) ++first;
  std::size_t last = first;
  while (!steps[last].is_full()) ++last;
  steps_.assign(steps.begin() + static_cast<long>(first), steps.begin() + static_cast<long>(last) + 1);
  lo_ = lo + static_cast<int>(first);
}

IncFiltration IncFiltration::pure(std::size_t n, int weight) {
  return IncFiltration(n, weight, {Subspace::full(n)});
}

IncFiltration IncFiltration::from_map(std::size_t n, const std::map<int, Subspace>& steps) {
  if (n == 0) return IncFiltration(0, 0, {});
  if (steps.empty()) throw std::invalid_argument("filtration has no steps");
  int lo = steps.begin()->first, hi = steps.rbegin()->first;
  std::vector<Subspace> out;
  Subspace cur = Subspace::zero(n);
  for (int w = lo; w <= hi; ++w) {
    auto it = steps.find(w);
    if (it != steps.end()) cur = it->second;
    out.push_back(cur);
  }
  return IncFiltration(n, lo, std::move(out));
}

Subspace IncFiltration::step(int w) const {
  if (steps_.empty() || w >= hi()) return Subspace::full(n_);
  if (w < lo_) return Subspace::zero(n_);
  return steps_[static_cast<std::size_t>(w - lo_)];
}

std::vector<int> IncFiltration::jumps() const {
  std::vector<int> out;
  for (int w = lo_; w <= hi() && !steps_.empty(); ++w)
    if (graded_dim(w) > 0) out.push_back(w);
  return out;
}

std::size_t IncFiltration::graded_dim(int w) const { return step(w).dim() - step(w - 1).dim(); }

bool IncFiltration::respected_by(const Mat& m, int shift) const {
  if (m.rows() != n_ || m.cols() != n_) throw DimensionError("operator size does not match filtration");
  for (int w = lo_; w < hi(); ++w)
    if (!step(w + shift).contains(image(m, step(w)))) return false;
  // Top step: m(V) must lie in W_{hi+shift}.
  return steps_.empty() || step(hi() + shift).contains(image(m, Subspace::full(n_)));
}

IncFiltration IncFiltration::shifted(int d) const {
  IncFiltration r = *this;
  r.lo_ += d;
  return r;
}

IncFiltration IncFiltration::transformed(const Mat& g) const {
  std::vector<Subspace> out;
  for (const auto& s : steps_) out.push_back(image(g, s));
  return IncFiltration(n_, lo_, std::move(out));
}

IncFiltration IncFiltration::restricted(const Subspace& u) const {
  std::vector<Subspace> out;
  for (const auto& s : steps_) {
    std::vector<Vec> vs;
    for (const auto& x : intersect(s, u).basis_vectors()) vs.push_back(coords_in(u, x));
    out.push_back(Subspace::span(u.dim(), vs));
  }
  if (u.dim() == 0) return IncFiltration(0, 0, {});
  return IncFiltration(u.dim(), lo_, std::move(out));
}

// ---------------------------------------------------------------- decreasing

DecFiltration::DecFiltration(std::size_t n, int lo, std::vector<Subspace> steps) : n_(n), lo_(lo) {
  for (const auto& s : steps)
    if (s.ambient_dim() != n) throw DimensionError("filtration step has wrong ambient dimension");
  if (n == 0) {
    lo_ = 0;
    return;
  }
  if (steps.empty() || !steps.front().is_full())
    throw std::invalid_argument("decreasing filtration must start at the whole space");
  for (std::size_t k = 1; k < steps.size(); ++k)
    if (!steps[k - 1].contains(steps[k])) throw std::invalid_argument("filtration is not decreasing");
  std::size_t first = 0;
  while (first + 1 < steps.size() && steps[first + 1].is_full()) ++first;
  std::size_t last = steps.size() - 1;
  while (steps[last].is_zero()) --last;
  steps_.assign(steps.begin() + static_cast<long>(first), steps.begin() + static_cast<long>(last) + 1);
  lo_ = lo + static_cast<int>(first);
}

DecFiltration DecFiltration::trivial(std::size_t n, int p0) { return DecFiltration(n, p0, {Subspace::full(n)}); }

DecFiltration DecFiltration::from_map(std::size_t n, const std::map<int, Subspace>& steps) {
  if (n == 0) return DecFiltration(0, 0, {});
  if (steps.empty()) throw std::invalid_argument("filtration has no steps");
  int lo = steps.begin()->first, hi = steps.rbegin()->first;
  std::vector<Subspace> out(static_cast<std::size_t>(hi - lo + 1));
  Subspace cur = Subspace::zero(n);
  for (int p = hi; p >= lo; --p) {
    auto it = steps.find(p);
    if (it != steps.end()) cur = it->second;
    out[static_cast<std::size_t>(p - lo)] = cur;
  }
  return DecFiltration(n, lo, std::move(out));
}

Subspace DecFiltration::step(int p) const {
  if (steps_.empty() || p <= lo_) return Subspace::full(n_);
  if (p > hi()) return Subspace::zero(n_);
  return steps_[static_cast<std::size_t>(p - lo_)];
}

bool DecFiltration::respected_by(const Mat& m, int shift) const {
  if (m.rows() != n_ || m.cols() != n_) throw DimensionError("operator size does not match filtration");
  for (int p = lo_ - std::abs(shift); p <= hi(); ++p)
    if (!step(p + shift).contains(image(m, step(p)))) return false;
  return true;
}

DecFiltration DecFiltration::shifted(int d) const {
  DecFiltration r = *this;
  r.lo_ -= d;
  return r;
}

DecFiltration DecFiltration::transformed(const Mat& g) const {
  std::vector<Subspace> out;
  for (const auto& s : steps_) out.push_back(image(g, s));
  return DecFiltration(n_, lo_, std::move(out));
}

DecFiltration DecFiltration::restricted(const Subspace& u) const {
  if (u.dim() == 0) return DecFiltration(0, 0, {});
  std::vector<Subspace> out;
  for (const auto& s : steps_) {
    std::vector<Vec> vs;
    for (const auto& x : intersect(s, u).basis_vectors()) vs.push_back(coords_in(u, x));
    out.push_back(Subspace::span(u.dim(), vs));
  }
  return DecFiltration(u.dim(), lo_, std::move(out));
}

DecFiltration DecFiltration::conj() const {
  std::vector<Subspace> out;
  for (const auto& s : steps_) out.push_back(s.conj());
  return DecFiltration(n_, lo_, std::move(out));
}

// ---------------------------------------------------------------- helpers

Vec coords_in(const Subspace& u, const Vec& x) {
  // The echelon basis has identity columns at the pivots.
  Vec c(u.dim());
  for (std::size_t k = 0; k < u.dim(); ++k) c[k] = x.at(u.pivots()[k]);
  return c;
}

Mat restrict_operator(const Subspace& u, const Mat& m) {
  Mat r(u.dim(), u.dim());
  for (std::size_t j = 0; j < u.dim(); ++j) {
    Vec y = m * u.basis().row(j);
    if (!u.contains(y)) throw std::invalid_argument("operator does not preserve the subspace");
    r.set_col(j, coords_in(u, y));
  }
  return r;
}

}  // namespace dhsys

namespace dhsys {

// ---------------------------------------------------------------- gradings

Grading::Grading(std::size_t n, const std::map<int, Subspace>& parts) : n_(n) {
  std::vector<Vec> cols;
  for (const auto& [w, s] : parts) {
    if (s.ambient_dim() != n) throw DimensionError("grading part has wrong ambient dimension");
    if (s.is_zero()) continue;
    parts_[w] = s;
    for (const auto& b : s.basis_vectors()) {
      cols.push_back(b);
      basis_weights_.push_back(w);
    }
  }
  if (cols.size() != n) throw std::invalid_argument("grading parts do not form a direct sum decomposition");
  basis_ = Mat::from_cols(cols, n);
  auto inv = inverse(basis_);
  if (!inv) throw std::invalid_argument("grading parts are not independent");
  inverse_ = std::move(*inv);
}

Grading Grading::pure(std::size_t n, int weight) { return Grading(n, {{weight, Subspace::full(n)}}); }

Grading Grading::from_basis(const Mat& columns, const std::vector<int>& weights) {
  if (columns.cols() != weights.size()) throw DimensionError("one weight per basis column expected");
  std::map<int, std::vector<Vec>> groups;
  for (std::size_t c = 0; c < weights.size(); ++c) groups[weights[c]].push_back(columns.col(c));
  std::map<int, Subspace> parts;
  for (const auto& [w, vs] : groups) parts[w] = Subspace::span(columns.rows(), vs);
  return Grading(columns.rows(), parts);
}

Subspace Grading::part(int w) const {
  auto it = parts_.find(w);
  return it == parts_.end() ? Subspace::zero(n_) : it->second;
}

std::vector<int> Grading::weights() const {
  std::vector<int> out;
  for (const auto& [w, s] : parts_) out.push_back(w);
  return out;
}

Mat Grading::act(const GRat& a) const {
  Vec d(n_);
  for (std::size_t k = 0; k < n_; ++k) d[k] = grat_pow(a, basis_weights_[k]);
  return basis_ * Mat::diagonal(d) * inverse_;
}

Mat Grading::generator() const {
  Vec d(n_);
  for (std::size_t k = 0; k < n_; ++k) d[k] = GRat(static_cast<long>(basis_weights_[k]));
  return basis_ * Mat::diagonal(d) * inverse_;
}

Mat Grading::projector(int w) const {
  Vec d(n_);
  for (std::size_t k = 0; k < n_; ++k) d[k] = GRat(basis_weights_[k] == w ? 1 : 0);
  return basis_ * Mat::diagonal(d) * inverse_;
}

Mat Grading::component(const Mat& x, int k) const {
  Mat y = inverse_ * x * basis_;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (basis_weights_[i] - basis_weights_[j] != k) y(i, j) = GRat(0);
  return basis_ * y * inverse_;
}

std::map<int, Mat> Grading::components(const Mat& x) const {
  Mat y = inverse_ * x * basis_;
  std::map<int, Mat> blocks;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      if (y(i, j).is_zero()) continue;
      int k = basis_weights_[i] - basis_weights_[j];
      auto it = blocks.try_emplace(k, n_, n_).first;
      it->second(i, j) = y(i, j);
    }
  for (auto& [k, b] : blocks) b = basis_ * b * inverse_;
  return blocks;
}

bool Grading::has_weight(const Mat& x, int k) const {
  Mat y = inverse_ * x * basis_;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (!y(i, j).is_zero() && basis_weights_[i] - basis_weights_[j] != k) return false;
  return true;
}

bool Grading::is_stable(const Subspace& s) const {
  std::size_t total = 0;
  for (const auto& [w, p] : parts_) total += intersect(p, s).dim();
  return total == s.dim();
}

Grading Grading::shifted(int d) const {
  std::map<int, Subspace> parts;
  for (const auto& [w, s] : parts_) parts[w + d] = s;
  return Grading(n_, parts);
}

Grading Grading::transformed(const Mat& g) const {
  std::map<int, Subspace> parts;
  for (const auto& [w, s] : parts_) parts[w] = image(g, s);
  return Grading(n_, parts);
}

Grading Grading::restricted(const Subspace& u) const {
  if (!is_stable(u)) throw std::invalid_argument("subspace is not a sum of graded pieces");
  std::map<int, Subspace> parts;
  for (const auto& [w, s] : parts_) {
    std::vector<Vec> vs;
    for (const auto& x : intersect(s, u).basis_vectors()) vs.push_back(coords_in(u, x));
    parts[w] = Subspace::span(u.dim(), vs);
  }
  return Grading(u.dim(), parts);
}

bool Grading::is_real() const {
  return std::all_of(parts_.begin(), parts_.end(), [](const auto& kv) { return kv.second.is_conj_stable(); });
}

bool Grading::splits(const IncFiltration& w) const {
  if (w.ambient_dim() != n_) throw DimensionError("grading and filtration live on different spaces");
  return weight_filtration_of(*this) == w;
}

bool Grading::commutes_with(const Grading& other) const {
  Mat a = generator(), b = other.generator();
  return a * b == b * a;
}

IncFiltration weight_filtration_of(const Grading& g) {
  const std::size_t n = g.ambient_dim();
  if (n == 0) return IncFiltration(0, 0, {});
  std::vector<Subspace> steps;
  int lo = g.parts().begin()->first, hi = g.parts().rbegin()->first;
  Subspace acc = Subspace::zero(n);
  for (int w = lo; w <= hi; ++w) {
    acc = sum(acc, g.part(w));
    steps.push_back(acc);
  }
  return IncFiltration(n, lo, std::move(steps));
}

Grading splitting_of(const IncFiltration& w) {
  const std::size_t n = w.ambient_dim();
  if (n == 0) return Grading(0, {});
  std::map<int, Subspace> parts;
  Subspace acc = Subspace::zero(n);
  for (int k : w.jumps()) {
    std::vector<Vec> added;
    for (const auto& b : w.step(k).basis_vectors()) {
      if (acc.contains(b)) continue;
      added.push_back(b);
      acc = sum(acc, Subspace::span(n, {b}));
    }
    parts[k] = Subspace::span(n, added);
  }
  return Grading(n, parts);
}

Grading hom_grading(const Grading& g) {
  const std::size_t n = g.ambient_dim();
  std::map<int, std::vector<Vec>> groups;
  const Mat& p = g.basis();
  const Mat& q = g.basis_inverse();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Mat outer = kron(Mat::from_cols({p.col(i)}, n), Mat::from_rows({q.row(j)}, n));
      groups[g.basis_weights()[i] - g.basis_weights()[j]].push_back(outer.data());
    }
  std::map<int, Subspace> parts;
  for (const auto& [k, vs] : groups) parts[k] = Subspace::span(n * n, vs);
  return Grading(n * n, parts);
}

Mat ad_matrix(const Mat& m) {
  const std::size_t n = m.rows();
  return kron(m, Mat::identity(n)) - kron(Mat::identity(n), m.transpose());
}

IncFiltration induced_on_graded(const IncFiltration& f, const IncFiltration& w, int weight) {
  QuotientMap q(w.step(weight), w.step(weight - 1));
  if (q.dim() == 0) return IncFiltration(0, 0, {});
  std::vector<Subspace> steps;
  for (int k = f.lo(); k <= f.hi(); ++k)
    steps.push_back(q.image_of(sum(intersect(f.step(k), w.step(weight)), w.step(weight - 1))));
  return IncFiltration(q.dim(), f.lo(), std::move(steps));
}

DecFiltration induced_on_graded(const DecFiltration& f, const IncFiltration& w, int weight) {
  QuotientMap q(w.step(weight), w.step(weight - 1));
  if (q.dim() == 0) return DecFiltration(0, 0, {});
  std::vector<Subspace> steps;
  for (int p = f.lo(); p <= f.hi(); ++p)
    steps.push_back(q.image_of(sum(intersect(f.step(p), w.step(weight)), w.step(weight - 1))));
  return DecFiltration(q.dim(), f.lo(), std::move(steps));
}

IncFiltration hom_induced(const IncFiltration& w) { return weight_filtration_of(hom_grading(splitting_of(w))); }

}  // namespace dhsys

namespace dhsys {

// ---------------------------------------------------------------- monodromy

IncFiltration monodromy_filtration(const Mat& n, int center) {
  const std::size_t d = n.rows();
  if (!is_nilpotent(n)) throw std::invalid_argument("monodromy filtration of a non-nilpotent operator");
  if (d == 0) return IncFiltration(0, 0, {});
  std::vector<Subspace> kernels, images;
  Mat power = Mat::identity(d);
  for (std::size_t j = 0; j <= d + 1; ++j) {
    kernels.push_back(Subspace::kernel(power));
    images.push_back(Subspace::column_space(power));
    power = power * n;
  }
  const int top = static_cast<int>(d);
  std::vector<Subspace> steps;
  for (int k = -top; k <= top; ++k) {
    Subspace acc = Subspace::zero(d);
    for (int j = std::max(0, k); j <= top; ++j) {
      std::size_t im = std::min<std::size_t>(static_cast<std::size_t>(j - k), d + 1);
      acc = sum(acc, intersect(kernels[static_cast<std::size_t>(j + 1)], images[im]));
    }
    steps.push_back(acc);
  }
  return IncFiltration(d, center - top, std::move(steps));
}

namespace {

void require_respects(const IncFiltration& w, const Mat& n) {
  if (n.rows() != w.ambient_dim() || n.cols() != w.ambient_dim())
    throw DimensionError("operator size does not match filtration");
  if (!w.respected_by(n)) throw std::invalid_argument("operator does not respect the weight filtration");
}

// L_k = W'_k ∩ W_w + W_{w-1}.
Subspace relative_step(const IncFiltration& w, const IncFiltration& wp, int weight, int k) {
  return sum(intersect(wp.step(k), w.step(weight)), w.step(weight - 1));
}

}  // namespace

RmfReport verify_rmf(const IncFiltration& w, const Mat& n, const IncFiltration& wp) {
  require_respects(w, n);
  RmfReport r;
  if (wp.ambient_dim() != w.ambient_dim()) throw DimensionError("candidate lives on a different space");
  if (w.ambient_dim() == 0) return r;
  for (int k = wp.lo(); k <= wp.hi(); ++k) {
    if (!wp.step(k - 2).contains(image(n, wp.step(k)))) {
      r.ok = false;
      r.condition = "(i)";
      r.w = k;
      r.detail = "N W'_" + std::to_string(k) + " is not contained in W'_" + std::to_string(k - 2);
      return r;
    }
  }
  const int span = wp.hi() - wp.lo() + 2;
  for (int weight : w.jumps()) {
    for (int m = 1; m <= span; ++m) {
      Subspace top = relative_step(w, wp, weight, weight + m);
      Subspace top_below = relative_step(w, wp, weight, weight + m - 1);
      Subspace bottom = relative_step(w, wp, weight, weight - m);
      Subspace bottom_below = relative_step(w, wp, weight, weight - m - 1);
      bool dims_match = top.dim() - top_below.dim() == bottom.dim() - bottom_below.dim();
      bool injective = intersect(preimage(mat_pow(n, static_cast<unsigned>(m)), bottom_below), top) == top_below;
      if (!dims_match || !injective) {
        r.ok = false;
        r.condition = "(ii)";
        r.w = weight;
        r.m = m;
        r.detail = dims_match ? "N^m is not injective on the graded piece" : "graded dimensions differ";
        return r;
      }
    }
  }
  return r;
}

std::optional<IncFiltration> compute_rmf(const IncFiltration& w, const Mat& n) {
  require_respects(w, n);
  const std::size_t dim = w.ambient_dim();
  if (dim == 0) return w;
  auto jumps = w.jumps();
  if (jumps.size() == 1) return monodromy_filtration(n, jumps.front());

  // Peel off the top graded piece: RMF on U = W_{top-1}, monodromy filtration
  // on V/U, then glue with a corrected section.
  const int top = jumps.back();
  Subspace u = w.step(top - 1);
  auto inner = compute_rmf(w.restricted(u), restrict_operator(u, n));
  if (!inner) return std::nullopt;
  Mat ucols = u.basis_columns();
  auto lower = [&](int k) { return image(ucols, inner->step(k)); };

  QuotientMap q(Subspace::full(dim), u);
  const std::size_t d = q.dim();
  Mat nbar = q.induced(n);
  IncFiltration m = monodromy_filtration(nbar, top);
  Grading adapted = splitting_of(m);
  Mat sigma = q.lift_matrix();
  const std::size_t du = u.dim();

  // Unknown h = ucols * H with H of size du x d, vectorised row-major.
  std::vector<Vec> rows;
  Vec rhs;
  for (std::size_t b = 0; b < d; ++b) {
    Vec vb = adapted.basis().col(b);
    int k = adapted.basis_weights()[b];
    Mat ann = lower(k - 2).annihilator();
    if (ann.rows() == 0) continue;
    Vec nvb = nbar * vb;
    Vec base = n * (sigma * vb) - sigma * nvb;
    Mat coeff(dim, du * d);
    for (std::size_t a = 0; a < du; ++a) {
      Vec ua = ucols.col(a);
      Vec nua = n * ua;
      for (std::size_t c = 0; c < d; ++c) {
        Vec col = vb[c] * nua - nvb[c] * ua;
        coeff.set_col(a * d + c, col);
      }
    }
    Mat lhs = ann * coeff;
    Vec r = ann * base;
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
      rows.push_back(lhs.row(i));
      rhs.push_back(-r[i]);
    }
  }
  Mat h(du, d);
  if (!rows.empty()) {
    auto sol = solve(Mat::from_rows(rows, du * d), rhs);
    if (!sol) return std::nullopt;
    h = unvectorize(*sol, du, d);
  }
  Mat section = sigma + ucols * h;

  int lo = std::min(inner->lo(), m.lo());
  int hi = std::max(inner->hi(), m.hi());
  std::vector<Subspace> steps;
  for (int k = lo; k <= hi; ++k) steps.push_back(sum(lower(k), image(section, m.step(k))));
  IncFiltration candidate(dim, lo, std::move(steps));
  RmfReport check = verify_rmf(w, n, candidate);
  if (!check.ok) throw std::logic_error("relative monodromy construction failed its own verification: " + check.detail);
  return candidate;
}

PrimitivePiece primitive_component(const IncFiltration& w, const Mat& n, const IncFiltration& wp, int weight,
                                   int m) {
  if (m < 0) throw std::invalid_argument("primitive component needs m >= 0");
  if (!verify_rmf(w, n, wp).ok) throw std::invalid_argument("filtration is not the relative monodromy filtration");
  Subspace top = relative_step(w, wp, weight, weight + m);
  Subspace below = relative_step(w, wp, weight, weight + m - 1);
  QuotientMap piece(top, below);
  Mat lowering = mat_pow(n, static_cast<unsigned>(m + 1));
  Subspace kernel_part = intersect(preimage(lowering, relative_step(w, wp, weight, weight - m - 3)), top);
  Subspace image_part = sum(image(n, relative_step(w, wp, weight, weight + m + 2)), below);
  Subspace prim = piece.image_of(sum(kernel_part, below));
  Subspace img = piece.image_of(intersect(image_part, top));
  return PrimitivePiece{std::move(piece), std::move(prim), std::move(img)};
}

}  // namespace dhsys
