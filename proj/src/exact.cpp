#include "dhsys/exact.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace dhsys {

// ---------------------------------------------------------------- scalars

GRat& GRat::operator+=(const GRat& o) {
  re += o.re;
  if (sgn(o.im) != 0) im += o.im;
  return *this;
}

GRat& GRat::operator-=(const GRat& o) {
  re -= o.re;
  if (sgn(o.im) != 0) im -= o.im;
  return *this;
}

GRat& GRat::operator*=(const GRat& o) {
  if (sgn(im) == 0 && sgn(o.im) == 0) {
    re *= o.re;
    return *this;
  }
  Rat r = re * o.re - im * o.im;
  Rat i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

GRat& GRat::operator/=(const GRat& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  if (sgn(o.im) == 0) {
    re /= o.re;
    if (sgn(im) != 0) im /= o.re;
    return *this;
  }
  Rat d = o.norm2();
  Rat r = (re * o.re + im * o.im) / d;
  Rat i = (im * o.re - re * o.im) / d;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

namespace {

bool is_int_literal(std::string_view s) {
  std::size_t k = 0;
  if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
  if (k == s.size()) return false;
  for (; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  return true;
}

}  // namespace

Rat parse_rat(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_int_literal(num) || !is_int_literal(den) || den[0] == '-' || den[0] == '+')
    throw ParseError("malformed rational '" + std::string(text) + "'");
  std::string n(num);
  if (n[0] == '+') n.erase(0, 1);
  mpz_class zn(n), zd{std::string(den)};
  if (zd == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  Rat r(zn, zd);
  r.canonicalize();
  return r;
}

std::string to_string(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_str();
}

GRat parse_grat(std::string_view text) {
  if (text.empty()) throw ParseError("empty scalar");
  if (text.back() != 'i') return GRat(parse_rat(text));
  std::string_view body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not the leading character.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if (body[k] == '+' || body[k] == '-') {
      split = k;
      break;
    }
  }
  std::string_view re_part = split == std::string_view::npos ? std::string_view() : body.substr(0, split);
  std::string_view im_part = split == std::string_view::npos ? body : body.substr(split);
  Rat im;
  if (im_part.empty() || im_part == "+") im = 1;
  else if (im_part == "-") im = -1;
  else im = parse_rat(im_part);
  Rat re = re_part.empty() ? Rat(0) : parse_rat(re_part);
  return GRat(re, im);
}

std::string to_string(const GRat& z) {
  if (z.is_real()) return to_string(z.re);
  std::string im;
  if (z.im == 1) im = "";
  else if (z.im == -1) im = "-";
  else im = to_string(z.im);
  if (sgn(z.re) == 0) return im + "i";
  std::string s = to_string(z.re);
  if (sgn(z.im) > 0) s += "+";
  return s + im + "i";
}

Rat rat_pow(const Rat& a, long k) {
  if (k < 0) {
    if (sgn(a) == 0) throw std::domain_error("0 to a negative power");
    return Rat(1) / rat_pow(a, -k);
  }
  Rat r(1), b(a);
  for (unsigned long e = static_cast<unsigned long>(k); e; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

GRat grat_pow(const GRat& a, long k) {
  if (k < 0) return GRat(1) / grat_pow(a, -k);
  GRat r(1), b(a);
  for (unsigned long e = static_cast<unsigned long>(k); e; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

// ---------------------------------------------------------------- vectors

Vec vec_zero(std::size_t n) { return Vec(n); }

Vec unit_vec(std::size_t n, std::size_t i) {
  Vec v(n);
  v.at(i) = GRat(1);
  return v;
}

bool vec_is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](const GRat& z) { return z.is_zero(); });
}

Vec vec_conj(const Vec& v) {
  Vec r(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) r[k] = v[k].conj();
  return r;
}

Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("vector sizes differ");
  Vec r(a);
  for (std::size_t k = 0; k < a.size(); ++k) r[k] += b[k];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("vector sizes differ");
  Vec r(a);
  for (std::size_t k = 0; k < a.size(); ++k) r[k] -= b[k];
  return r;
}

Vec operator*(const GRat& s, const Vec& v) {
  Vec r(v);
  for (auto& x : r) x *= s;
  return r;
}

// ---------------------------------------------------------------- matrices

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = GRat(1);
  return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows, std::size_t cols) {
  Mat m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
  return m;
}

Mat Mat::from_cols(const std::vector<Vec>& cols, std::size_t rows) {
  Mat m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) m.set_col(c, cols[c]);
  return m;
}

Mat Mat::diagonal(const Vec& d) {
  Mat m(d.size(), d.size());
  for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
  return m;
}

Vec Mat::row(std::size_t r) const {
  return Vec(a_.begin() + static_cast<long>(r * cols_), a_.begin() + static_cast<long>((r + 1) * cols_));
}

Vec Mat::col(std::size_t c) const {
  Vec v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void Mat::set_row(std::size_t r, const Vec& v) {
  if (v.size() != cols_) throw DimensionError("row length mismatch");
  std::copy(v.begin(), v.end(), a_.begin() + static_cast<long>(r * cols_));
}

void Mat::set_col(std::size_t c, const Vec& v) {
  if (v.size() != rows_) throw DimensionError("column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

bool Mat::is_real() const {
  return std::all_of(a_.begin(), a_.end(), [](const GRat& z) { return z.is_real(); });
}

bool Mat::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const GRat& z) { return z.is_zero(); });
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Mat Mat::conj() const {
  Mat m(*this);
  for (auto& z : m.a_) z.im = -z.im;
  return m;
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
  Mat b(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
  return b;
}

Mat& Mat::operator+=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix sum shape mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix difference shape mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Mat Mat::operator-() const {
  Mat m(*this);
  for (auto& z : m.a_) z = -z;
  return m;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
  Mat c(a.rows_, b.cols_);
  GRat t;
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const GRat& x = a(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        const GRat& y = b(k, j);
        if (y.is_zero()) continue;
        t = x;
        t *= y;
        c(i, j) += t;
      }
    }
  return c;
}

Mat operator*(const GRat& s, Mat a) {
  for (auto& z : a.a_) z *= s;
  return a;
}

Vec operator*(const Mat& a, const Vec& v) {
  if (a.cols_ != v.size()) throw DimensionError("matrix-vector shape mismatch");
  Vec r(a.rows_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k)
      if (!a(i, k).is_zero() && !v[k].is_zero()) r[i] += a(i, k) * v[k];
  return r;
}

Mat hstack(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw DimensionError("hstack row mismatch");
  Mat m(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = a(r, c);
    for (std::size_t c = 0; c < b.cols(); ++c) m(r, a.cols() + c) = b(r, c);
  }
  return m;
}

Mat vstack(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols() && a.rows() != 0 && b.rows() != 0) throw DimensionError("vstack column mismatch");
  std::size_t cols = a.rows() ? a.cols() : b.cols();
  Mat m(a.rows() + b.rows(), cols);
  for (std::size_t r = 0; r < a.rows(); ++r) m.set_row(r, a.row(r));
  for (std::size_t r = 0; r < b.rows(); ++r) m.set_row(a.rows() + r, b.row(r));
  return m;
}

Mat direct_sum(const Mat& a, const Mat& b) {
  Mat m(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = a(r, c);
  for (std::size_t r = 0; r < b.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) m(a.rows() + r, a.cols() + c) = b(r, c);
  return m;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat m(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          if (!b(k, l).is_zero()) m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return m;
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

Mat mat_pow(const Mat& a, unsigned k) {
  if (!a.is_square()) throw DimensionError("power of non-square matrix");
  Mat r = Mat::identity(a.rows());
  for (unsigned e = 0; e < k; ++e) r = r * a;
  return r;
}

Vec vectorize(const Mat& a) { return a.data(); }

Mat unvectorize(const Vec& v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) throw DimensionError("unvectorize size mismatch");
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = v[r * cols + c];
  return m;
}

// ---------------------------------------------------------------- elimination

RowEchelon row_reduce(const Mat& input) {
  Mat m = input;
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m(p, c).is_zero()) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t k = 0; k < cols; ++k) std::swap(m(p, k), m(r, k));
    GRat inv = GRat(1) / m(r, c);
    for (std::size_t k = c; k < cols; ++k) m(r, k) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      GRat f = m(i, c);
      for (std::size_t k = c; k < cols; ++k)
        if (!m(r, k).is_zero()) m(i, k) -= f * m(r, k);
    }
    pivots.push_back(c);
    ++r;
  }
  return {m.block(0, 0, r, cols), pivots};
}

std::size_t rank(const Mat& m) { return row_reduce(m).pivots.size(); }

std::vector<Vec> kernel_vectors(const Mat& m) {
  RowEchelon e = row_reduce(m);
  const std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<Vec> out;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    Vec v(n);
    v[f] = GRat(1);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, f);
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<Vec> solve(const Mat& m, const Vec& b) {
  if (b.size() != m.rows()) throw DimensionError("solve: right-hand side size mismatch");
  Mat aug = hstack(m, Mat::from_cols({b}, m.rows()));
  RowEchelon e = row_reduce(aug);
  Vec x(m.cols());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] == m.cols()) return std::nullopt;
    x[e.pivots[r]] = e.reduced(r, m.cols());
  }
  return x;
}

std::optional<Mat> inverse(const Mat& m) {
  if (!m.is_square()) throw DimensionError("inverse of non-square matrix");
  const std::size_t n = m.rows();
  RowEchelon e = row_reduce(hstack(m, Mat::identity(n)));
  if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) return std::nullopt;
  return e.reduced.block(0, n, n, n);
}

GRat determinant(const Mat& input) {
  if (!input.is_square()) throw DimensionError("determinant of non-square matrix");
  Mat m = input;
  const std::size_t n = m.rows();
  GRat det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c).is_zero()) ++p;
    if (p == n) return GRat(0);
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m(p, k), m(c, k));
      det = -det;
    }
    det *= m(c, c);
    GRat inv = GRat(1) / m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c).is_zero()) continue;
      GRat f = m(i, c) * inv;
      for (std::size_t k = c; k < n; ++k) m(i, k) -= f * m(c, k);
    }
  }
  return det;
}

bool is_nilpotent(const Mat& m) {
  if (!m.is_square()) return false;
  Mat p = m;
  for (std::size_t k = 1; k < m.rows() && !p.is_zero(); ++k) p = p * m;
  return p.is_zero();
}

Mat exp_nilpotent(const Mat& m) {
  if (!m.is_square()) throw DimensionError("exp of non-square matrix");
  const std::size_t n = m.rows();
  Mat result = Mat::identity(n);
  Mat term = Mat::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    term = GRat(Rat(1, static_cast<unsigned long>(k))) * (term * m);
    if (term.is_zero()) return result;
    result += term;
  }
  if (!(term * m).is_zero()) throw std::domain_error("exp_nilpotent: matrix is not nilpotent");
  return result;
}

Rat max_entry_norm2(const Mat& m) {
  Rat best(0);
  for (const auto& z : m.data()) {
    Rat v = z.norm2();
    if (v > best) best = v;
  }
  return best;
}

// ---------------------------------------------------------------- subspaces

Subspace Subspace::zero(std::size_t n) {
  Subspace s;
  s.n_ = n;
  s.basis_ = Mat(0, n);
  return s;
}

Subspace Subspace::full(std::size_t n) {
  Subspace s;
  s.n_ = n;
  s.basis_ = Mat::identity(n);
  for (std::size_t i = 0; i < n; ++i) s.pivots_.push_back(i);
  return s;
}

Subspace Subspace::span(std::size_t n, const std::vector<Vec>& vectors) {
  for (const auto& v : vectors)
    if (v.size() != n) throw DimensionError("span: vector dimension mismatch");
  if (vectors.empty()) return zero(n);
  return row_space(Mat::from_rows(vectors, n));
}

Subspace Subspace::row_space(const Mat& m) {
  RowEchelon e = row_reduce(m);
  Subspace s;
  s.n_ = m.cols();
  s.basis_ = std::move(e.reduced);
  s.pivots_ = std::move(e.pivots);
  return s;
}

Subspace Subspace::column_space(const Mat& m) { return row_space(m.transpose()); }

Subspace Subspace::kernel(const Mat& m) { return span(m.cols(), kernel_vectors(m)); }

std::vector<Vec> Subspace::basis_vectors() const {
  std::vector<Vec> out;
  out.reserve(dim());
  for (std::size_t r = 0; r < dim(); ++r) out.push_back(basis_.row(r));
  return out;
}

bool Subspace::contains(const Vec& v) const {
  if (v.size() != n_) throw DimensionError("contains: vector dimension mismatch");
  // Reduce v against the echelon basis; it lies in the span iff it vanishes.
  Vec r = v;
  for (std::size_t k = 0; k < pivots_.size(); ++k) {
    const GRat f = r[pivots_[k]];
    if (f.is_zero()) continue;
    for (std::size_t c = pivots_[k]; c < n_; ++c)
      if (!basis_(k, c).is_zero()) r[c] -= f * basis_(k, c);
  }
  return vec_is_zero(r);
}

bool Subspace::contains(const Subspace& other) const {
  if (other.n_ != n_) throw DimensionError("contains: ambient dimension mismatch");
  if (other.dim() > dim()) return false;
  if (is_full() || other.is_zero()) return true;
  for (std::size_t r = 0; r < other.dim(); ++r)
    if (!contains(other.basis_.row(r))) return false;
  return true;
}

Mat Subspace::annihilator() const {
  auto k = kernel_vectors(basis_.rows() ? basis_ : Mat(0, n_));
  if (basis_.rows() == 0) return Mat::identity(n_);
  return Mat::from_rows(k, n_);
}

Subspace Subspace::conj() const {
  if (is_real()) return *this;
  return row_space(basis_.conj());
}

Subspace sum(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("sum: ambient dimension mismatch");
  if (a.contains(b)) return a;
  if (b.contains(a)) return b;
  return Subspace::row_space(vstack(a.basis(), b.basis()));
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("intersect: ambient dimension mismatch");
  if (a.contains(b)) return b;
  if (b.contains(a)) return a;
  return Subspace::kernel(vstack(a.annihilator(), b.annihilator()));
}

Subspace image(const Mat& m, const Subspace& a) {
  if (m.cols() != a.ambient_dim()) throw DimensionError("image: dimension mismatch");
  if (a.is_zero()) return Subspace::zero(m.rows());
  return Subspace::column_space(m * a.basis_columns());
}

Subspace preimage(const Mat& m, const Subspace& a) {
  if (m.rows() != a.ambient_dim()) throw DimensionError("preimage: dimension mismatch");
  if (a.is_full()) return Subspace::full(m.cols());
  return Subspace::kernel(a.annihilator() * m);
}

std::vector<Vec> pivot_complement(const Subspace& sub) {
  std::vector<bool> is_pivot(sub.ambient_dim(), false);
  for (auto p : sub.pivots()) is_pivot[p] = true;
  std::vector<Vec> out;
  for (std::size_t c = 0; c < sub.ambient_dim(); ++c)
    if (!is_pivot[c]) out.push_back(unit_vec(sub.ambient_dim(), c));
  return out;
}

// ---------------------------------------------------------------- quotients

QuotientMap::QuotientMap(const Subspace& a, const Subspace& b) : a_(a), b_(b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("quotient: ambient dimension mismatch");
  if (!a.contains(b)) throw std::invalid_argument("quotient: B is not contained in A");
  const std::size_t n = a.ambient_dim();
  // Lifts: basis vectors of A whose pivots are not pivots of B, reduced modulo B.
  // Build them by extending B's basis to A greedily over A's echelon rows.
  std::vector<Vec> cols = b.basis_vectors();
  Subspace acc = b;
  for (const auto& v : a.basis_vectors()) {
    if (acc.contains(v)) continue;
    lifts_.push_back(v);
    acc = sum(acc, Subspace::span(n, {v}));
  }
  for (const auto& l : lifts_) cols.push_back(l);
  // Extend to a basis of the whole space and invert; the rows belonging to the
  // lifts give coordinates on A/B.
  Subspace all = Subspace::span(n, cols);
  for (const auto& e : pivot_complement(all)) cols.push_back(e);
  Mat square = Mat::from_cols(cols, n);
  auto inv = inverse(square);
  if (!inv) throw std::logic_error("quotient: basis extension failed");
  solver_ = inv->block(b.dim(), 0, lifts_.size(), n);
}

Mat QuotientMap::lift_matrix() const { return Mat::from_cols(lifts_, a_.ambient_dim()); }

Vec QuotientMap::coords(const Vec& x) const {
  if (lifts_.empty()) return Vec{};
  return solver_ * x;
}

Mat QuotientMap::induced(const Mat& m) const {
  Mat out(dim(), dim());
  for (std::size_t j = 0; j < dim(); ++j) out.set_col(j, coords(m * lifts_[j]));
  return out;
}

Subspace QuotientMap::image_of(const Subspace& s) const {
  std::vector<Vec> vs;
  for (const auto& v : s.basis_vectors()) vs.push_back(coords(v));
  return Subspace::span(dim(), vs);
}

QuotientMap quotient_map(const Subspace& a, const Subspace& b) { return QuotientMap(a, b); }

Vec coordinates(const Mat& basis_columns, const Vec& x) {
  auto sol = solve(basis_columns, x);
  if (!sol) throw std::invalid_argument("coordinates: vector not in span");
  return *sol;
}

}  // namespace dhsys
