// Exact scalars over Q and Q(i), dense matrices, and the subspace lattice.
//
// Everything here is exact: there is no floating point anywhere in the
// library. Rat models real coefficients, GRat (Gaussian rationals) models
// complex coefficients. Matrices act on column vectors; subspaces are stored
// by the rows of their reduced row echelon basis, so two equal subspaces have
// identical representations.
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dhsys {

using Rat = mpq_class;

/// Raised when operands have incompatible shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when textual scalar/matrix input cannot be parsed.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gaussian rational re + im*i.
struct GRat {
  Rat re;
  Rat im;

  GRat() = default;
  GRat(long v) : re(v), im(0) {}  // NOLINT: integer literals are scalars
  GRat(Rat r) : re(std::move(r)), im(0) {}  // NOLINT
  GRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  static GRat i() { return GRat(Rat(0), Rat(1)); }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  GRat conj() const { return GRat(re, -im); }
  /// |z|^2
  Rat norm2() const { return re * re + im * im; }

  GRat& operator+=(const GRat& o);
  GRat& operator-=(const GRat& o);
  GRat& operator*=(const GRat& o);
  GRat& operator/=(const GRat& o);
  GRat operator-() const { return GRat(-re, -im); }

  friend GRat operator+(GRat a, const GRat& b) { return a += b; }
  friend GRat operator-(GRat a, const GRat& b) { return a -= b; }
  friend GRat operator*(GRat a, const GRat& b) { return a *= b; }
  friend GRat operator/(GRat a, const GRat& b) { return a /= b; }
  friend bool operator==(const GRat& a, const GRat& b) {
    return a.re == b.re && a.im == b.im;
  }
};

Rat parse_rat(std::string_view text);
std::string to_string(const Rat& r);
/// Accepts `p/q`, `a+bi`, `a-bi`, `bi`, `i`, `-i` (no embedded spaces).
GRat parse_grat(std::string_view text);
std::string to_string(const GRat& z);

/// a^k for integer k (a != 0 when k < 0).
Rat rat_pow(const Rat& a, long k);
GRat grat_pow(const GRat& a, long k);

using Vec = std::vector<GRat>;

Vec vec_zero(std::size_t n);
Vec unit_vec(std::size_t n, std::size_t i);
bool vec_is_zero(const Vec& v);
Vec vec_conj(const Vec& v);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(const GRat& s, const Vec& v);

/// Dense row-major matrix over Q(i).
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);

  static Mat identity(std::size_t n);
  static Mat zero(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat from_rows(const std::vector<Vec>& rows, std::size_t cols);
  static Mat from_cols(const std::vector<Vec>& cols, std::size_t rows);
  static Mat diagonal(const Vec& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  GRat& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const GRat& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  Vec row(std::size_t r) const;
  Vec col(std::size_t c) const;
  void set_row(std::size_t r, const Vec& v);
  void set_col(std::size_t c, const Vec& v);

  /// True iff every entry has zero imaginary part.
  bool is_real() const;
  bool is_zero() const;

  Mat transpose() const;
  Mat conj() const;
  Mat adjoint() const { return conj().transpose(); }
  Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat operator-() const;
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(const Mat& a, const Mat& b);
  friend Mat operator*(const GRat& s, Mat a);
  friend Vec operator*(const Mat& a, const Vec& v);
  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  /// Row-major entries, e.g. for vectorising an operator.
  const std::vector<GRat>& data() const { return a_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<GRat> a_;
};

Mat hstack(const Mat& a, const Mat& b);
Mat vstack(const Mat& a, const Mat& b);
/// Block diagonal sum.
Mat direct_sum(const Mat& a, const Mat& b);
/// Kronecker product.
Mat kron(const Mat& a, const Mat& b);
Mat commutator(const Mat& a, const Mat& b);
Mat mat_pow(const Mat& a, unsigned k);
/// Row-major vectorisation; Hom(V,V) is modelled as Q(i)^{n*n} this way.
Vec vectorize(const Mat& a);
Mat unvectorize(const Vec& v, std::size_t rows, std::size_t cols);

struct RowEchelon {
  Mat reduced;                      // reduced row echelon form, zero rows dropped
  std::vector<std::size_t> pivots;  // pivot column of each row
};

RowEchelon row_reduce(const Mat& m);
std::size_t rank(const Mat& m);
/// Basis (as vectors) of {x : m x = 0}.
std::vector<Vec> kernel_vectors(const Mat& m);
/// Some solution of m x = b, or nullopt.
std::optional<Vec> solve(const Mat& m, const Vec& b);
std::optional<Mat> inverse(const Mat& m);
GRat determinant(const Mat& m);

bool is_nilpotent(const Mat& m);
/// exp(m) for nilpotent m, as a finite sum. Throws std::domain_error otherwise.
Mat exp_nilpotent(const Mat& m);
/// Squared modulus of the largest entry: max |m_ij|^2.
Rat max_entry_norm2(const Mat& m);

/// A linear subspace of Q(i)^n with canonical (RREF) basis rows.
class Subspace {
 public:
  Subspace() = default;
  static Subspace zero(std::size_t n);
  static Subspace full(std::size_t n);
  static Subspace span(std::size_t n, const std::vector<Vec>& vectors);
  /// Span of the rows of m.
  static Subspace row_space(const Mat& m);
  /// Span of the columns of m.
  static Subspace column_space(const Mat& m);
  static Subspace kernel(const Mat& m);

  std::size_t ambient_dim() const { return n_; }
  std::size_t dim() const { return basis_.rows(); }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == n_; }

  /// Basis vectors as rows (canonical RREF).
  const Mat& basis() const { return basis_; }
  std::vector<Vec> basis_vectors() const;
  /// Basis vectors as columns of an n x dim matrix.
  Mat basis_columns() const { return basis_.transpose(); }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  bool contains(const Vec& v) const;
  bool contains(const Subspace& other) const;
  /// Rows r with r.x = 0 exactly for x in this subspace (bilinear pairing).
  Mat annihilator() const;
  Subspace conj() const;
  bool is_real() const { return basis_.is_real(); }
  /// Entry-wise conjugation stability (the subspace is defined over Q).
  bool is_conj_stable() const { return *this == conj(); }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.n_ == b.n_ && a.basis_ == b.basis_;
  }

 private:
  std::size_t n_ = 0;
  Mat basis_;
  std::vector<std::size_t> pivots_;
};

Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersect(const Subspace& a, const Subspace& b);
Subspace image(const Mat& m, const Subspace& a);
Subspace preimage(const Mat& m, const Subspace& a);
/// Complement of `sub` spanned by standard basis vectors at non-pivot columns.
std::vector<Vec> pivot_complement(const Subspace& sub);

/// The surjection A -> A/B with a recorded basis of A/B.
///
/// `lifts` holds vectors of A whose classes form the basis of A/B (chosen from
/// echelon pivots, so deterministic). `coords(x)` returns the coordinates of
/// the class of x in that basis; it is defined for every x in A.
class QuotientMap {
 public:
  QuotientMap(const Subspace& a, const Subspace& b);

  std::size_t dim() const { return lifts_.size(); }
  const Subspace& source() const { return a_; }
  const Subspace& kernel() const { return b_; }
  const std::vector<Vec>& lifts() const { return lifts_; }
  /// Columns are the lifts (n x dim).
  Mat lift_matrix() const;
  Vec coords(const Vec& x) const;
  /// Matrix of the map induced by an operator m with m(A) in A, m(B) in B.
  Mat induced(const Mat& m) const;
  /// Image of a subspace S (with S in A) in the quotient coordinates.
  Subspace image_of(const Subspace& s) const;

 private:
  Subspace a_;
  Subspace b_;
  std::vector<Vec> lifts_;
  Mat solver_;  // rows of the inverse of [B basis, lifts, complement] for the lifts
};

QuotientMap quotient_map(const Subspace& a, const Subspace& b);

/// Coordinates of x with respect to the columns of `basis` (x must lie in
/// their span; throws otherwise).
Vec coordinates(const Mat& basis_columns, const Vec& x);

}  // namespace dhsys
