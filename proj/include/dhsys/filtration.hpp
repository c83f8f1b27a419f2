// Filtrations, gradings and relative monodromy filtrations.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dhsys/exact.hpp"

namespace dhsys {

/// Finite increasing filtration W_w of Q(i)^n.
///
/// Stored as the steps W_lo .. W_hi with W_{lo-1} = 0 and W_hi = V. The
/// representation is normalised (lo is the first nonzero step, hi the first
/// full one), so operator== compares filtrations.
class IncFiltration {
 public:
  IncFiltration() = default;
  /// steps[k] is W_{lo+k}; the last step must be the whole space.
  IncFiltration(std::size_t n, int lo, std::vector<Subspace> steps);
  /// W_w = V for w >= weight and 0 below.
  static IncFiltration pure(std::size_t n, int weight);
  /// W_w = the entry with the greatest key <= w (0 if none); the last entry
  /// must be the whole space.
  static IncFiltration from_map(std::size_t n, const std::map<int, Subspace>& steps);

  std::size_t ambient_dim() const { return n_; }
  Subspace step(int w) const;
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(steps_.size()) - 1; }
  /// Weights w with gr_w != 0, increasing.
  std::vector<int> jumps() const;
  std::size_t graded_dim(int w) const;

  /// True iff m(W_w) is contained in W_{w+shift} for every w.
  bool respected_by(const Mat& m, int shift = 0) const;
  /// Result_w = W_{w-d}.
  IncFiltration shifted(int d) const;
  /// g(W_w) for invertible g.
  IncFiltration transformed(const Mat& g) const;
  /// Restriction to U, written in the coordinates of U's echelon basis.
  IncFiltration restricted(const Subspace& u) const;

  friend bool operator==(const IncFiltration& a, const IncFiltration& b) {
    return a.n_ == b.n_ && a.lo_ == b.lo_ && a.steps_ == b.steps_;
  }

 private:
  std::size_t n_ = 0;
  int lo_ = 0;
  std::vector<Subspace> steps_;
};

/// Finite decreasing filtration F^p of Q(i)^n.
///
/// F^p = V for p <= lo and F^p = 0 for p > hi.
class DecFiltration {
 public:
  DecFiltration() = default;
  /// steps[k] is F^{lo+k}; the first step must be the whole space.
  DecFiltration(std::size_t n, int lo, std::vector<Subspace> steps);
  /// F^p = V for p <= p0 and 0 above.
  static DecFiltration trivial(std::size_t n, int p0);
  /// F^p = the entry with the smallest key >= p (0 if none); the first entry
  /// must be the whole space.
  static DecFiltration from_map(std::size_t n, const std::map<int, Subspace>& steps);

  std::size_t ambient_dim() const { return n_; }
  Subspace step(int p) const;
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(steps_.size()) - 1; }

  /// True iff m(F^p) is contained in F^{p+shift} for every p.
  bool respected_by(const Mat& m, int shift = 0) const;
  /// Result^p = F^{p+d}.
  DecFiltration shifted(int d) const;
  DecFiltration transformed(const Mat& g) const;
  DecFiltration restricted(const Subspace& u) const;
  DecFiltration conj() const;

  friend bool operator==(const DecFiltration& a, const DecFiltration& b) {
    return a.n_ == b.n_ && a.lo_ == b.lo_ && a.steps_ == b.steps_;
  }

 private:
  std::size_t n_ = 0;
  int lo_ = 0;
  std::vector<Subspace> steps_;
};

/// Coordinates of x in U with respect to U's echelon basis (x must lie in U).
Vec coords_in(const Subspace& u, const Vec& x);
/// Matrix of m restricted to an m-stable subspace U, in U's echelon basis.
Mat restrict_operator(const Subspace& u, const Mat& m);

/// A direct sum decomposition V = sum_w V_w (equivalently a G_m-action).
class Grading {
 public:
  Grading() = default;
  /// Parts must be in direct sum and span V; zero parts are dropped.
  Grading(std::size_t n, const std::map<int, Subspace>& parts);
  static Grading pure(std::size_t n, int weight);
  /// Grading whose weight-w part is spanned by the columns with weight w.
  static Grading from_basis(const Mat& columns, const std::vector<int>& weights);

  std::size_t ambient_dim() const { return n_; }
  const std::map<int, Subspace>& parts() const { return parts_; }
  Subspace part(int w) const;
  std::vector<int> weights() const;

  /// Adapted basis (columns, sorted by weight), its inverse and the weights.
  const Mat& basis() const { return basis_; }
  const Mat& basis_inverse() const { return inverse_; }
  const std::vector<int>& basis_weights() const { return basis_weights_; }

  /// a acts on V_w by a^w.
  Mat act(const GRat& a) const;
  /// The infinitesimal generator: multiplication by w on V_w.
  Mat generator() const;
  Mat projector(int w) const;
  /// Weight-k component of an operator (maps V_w into V_{w+k}).
  Mat component(const Mat& x, int k) const;
  std::map<int, Mat> components(const Mat& x) const;
  /// True iff x maps each V_w into V_{w+k}.
  bool has_weight(const Mat& x, int k) const;
  bool is_stable(const Subspace& s) const;

  Grading shifted(int d) const;
  Grading transformed(const Mat& g) const;
  /// Restriction to a sum of pieces, in the coordinates of U's echelon basis.
  Grading restricted(const Subspace& u) const;
  bool is_real() const;
  /// True iff W_w = sum_{k <= w} V_k for every w.
  bool splits(const IncFiltration& w) const;
  bool commutes_with(const Grading& other) const;

  friend bool operator==(const Grading& a, const Grading& b) {
    return a.n_ == b.n_ && a.parts_ == b.parts_;
  }

 private:
  std::size_t n_ = 0;
  std::map<int, Subspace> parts_;
  Mat basis_;
  Mat inverse_;
  std::vector<int> basis_weights_;
};

IncFiltration weight_filtration_of(const Grading& g);
/// A deterministic grading splitting W (echelon-pivot complements).
Grading splitting_of(const IncFiltration& w);
/// Grading of Hom(V,V) (row-major vectorisation) induced by a grading of V.
Grading hom_grading(const Grading& g);
/// Matrix of X -> [m, X] on the row-major vectorisation of Hom(V,V).
Mat ad_matrix(const Mat& m);

/// Filtration induced by F on gr^W_w = W_w / W_{w-1}, in the basis recorded by
/// quotient_map(W_w, W_{w-1}).
IncFiltration induced_on_graded(const IncFiltration& f, const IncFiltration& w, int weight);
DecFiltration induced_on_graded(const DecFiltration& f, const IncFiltration& w, int weight);

/// W_k Hom = { f : f(W_w) in W_{w+k} for all w }.
IncFiltration hom_induced(const IncFiltration& w);

/// Monodromy filtration of a nilpotent m centred at `center`.
IncFiltration monodromy_filtration(const Mat& n, int center);

struct RmfReport {
  bool ok = true;
  std::string condition;  // "(i)" or "(ii)" on failure
  int w = 0;
  int m = 0;
  std::string detail;
};

/// Checks that Wp is the relative monodromy filtration of n with respect to w.
/// Throws std::invalid_argument if n does not respect w.
RmfReport verify_rmf(const IncFiltration& w, const Mat& n, const IncFiltration& wp);

/// The relative monodromy filtration, or nullopt if the recursive construction
/// finds no candidate. Throws std::invalid_argument if n does not respect w.
std::optional<IncFiltration> compute_rmf(const IncFiltration& w, const Mat& n);

/// The bigraded piece gr^{W'}_{w+m} gr^W_w with its primitive part
/// ker N^{m+1} and the image of N, in the coordinates of `piece`.
struct PrimitivePiece {
  QuotientMap piece;
  Subspace primitive;
  Subspace image;
};

PrimitivePiece primitive_component(const IncFiltration& w, const Mat& n, const IncFiltration& wp, int weight,
                                   int m);

}  // namespace dhsys
