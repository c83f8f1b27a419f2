// Hodge filtrations, mixed Hodge structures, canonical splittings and
// polarizations.
//
// Conventions: V_C is modelled as Q(i)^n and conj is entrywise conjugation.
// A bilinear form Q polarizes a pure Hodge structure of weight w when the
// Hodge pieces H^{p,q} = F^p ∩ conj F^q satisfy Q(F^p, F^{w-p+1}) = 0 and the
// Hermitian form h(u, v) = i^{p-q} Q(u, conj v) is positive definite on each
// H^{p,q}.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "dhsys/filtration.hpp"

namespace dhsys {

using Bidegree = std::pair<int, int>;

/// True iff F^p ⊕ conj F^{w-p+1} = V for every p.
bool is_pure_hs(std::size_t dim, int w, const DecFiltration& f);
/// H^{p,q} = F^p ∩ conj F^q for the pure structure of weight w (nonzero only).
std::map<Bidegree, Subspace> hodge_decomposition(int w, const DecFiltration& f);

struct MhsReport {
  bool ok = true;
  int weight = 0;  // first graded piece that is not pure, on failure
  std::string detail;
};

/// True iff F induces a pure Hodge structure of weight w on every gr^W_w.
MhsReport is_mhs(const IncFiltration& w, const DecFiltration& f);

/// Deligne's bigrading I^{p,q} of a mixed Hodge structure (nonzero pieces).
std::map<Bidegree, Subspace> deligne_bigrading(const IncFiltration& w, const DecFiltration& f);

/// Components of an operator with respect to a bigrading: the piece of
/// bidegree (r, s) maps I^{p,q} into I^{p+r,q+s}.
std::map<Bidegree, Mat> bigraded_components(const std::map<Bidegree, Subspace>& bigrading, const Mat& x);

/// The pair (s', delta) of a mixed Hodge structure.
///
/// s' is recorded as the real grading of V whose weight-w part is s'(gr_w).
/// delta is recorded on V, transported through s'; it is real and its Hodge
/// components vanish unless both indices are negative.
struct DeltaSplitting {
  Grading s_prime;
  Mat delta;
  /// The split structure s'(gr^W F), so F = exp(i delta) f_split.
  DecFiltration f_split;
  /// Deligne bigrading of (W, f_split).
  std::map<Bidegree, Subspace> split_bigrading;
  /// Components delta_{p,q} with respect to split_bigrading.
  std::map<Bidegree, Mat> delta_components;
};

/// Throws std::invalid_argument if (W, F) is not a mixed Hodge structure.
DeltaSplitting delta_splitting(const IncFiltration& w, const DecFiltration& f);

/// Supplies zeta as a Lie polynomial in the components of delta.
class ZetaProvider {
 public:
  virtual ~ZetaProvider() = default;
  virtual std::string name() const = 0;
  /// zeta on V (same transport as delta), or nullopt when delta is outside
  /// the provider's domain.
  virtual std::optional<Mat> zeta(const DeltaSplitting& d) const = 0;
};

/// Accepts only delta = 0, where zeta = 0.
class ZeroOnlyZeta : public ZetaProvider {
 public:
  std::string name() const override { return "zero-only"; }
  std::optional<Mat> zeta(const DeltaSplitting& d) const override;
};

/// zeta = sum of coeff * word, where each word is a nested bracket of delta
/// components, read from text lines such as
///   -1/2i  d(-1,-2)
///   1/8    [d(-1,-2),d(-2,-1)]
/// Blank lines and lines starting with '#' are ignored. Rejects a delta with
/// nonzero components not mentioned in the table, and non-real results.
class TableZeta : public ZetaProvider {
 public:
  static TableZeta parse(const std::string& text);
  std::string name() const override { return "table"; }
  std::optional<Mat> zeta(const DeltaSplitting& d) const override;

  struct Word;
  struct Term {
    GRat coeff;
    std::shared_ptr<const Word> word;
  };
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

/// Raised when the zeta provider rejects a delta.
class ZetaRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The canonical (SL(2)-) splitting s = s' exp(-zeta), as a real grading of V
/// splitting W. Throws ZetaRejected when the provider rejects delta.
Grading canonical_splitting(const IncFiltration& w, const DecFiltration& f, const ZetaProvider& zeta);
Grading canonical_splitting(const DeltaSplitting& d, const ZetaProvider& zeta);

/// A real bilinear form Q(u, v) = u^T gram v, (-1)^w-symmetric.
struct GradedForm {
  int weight = 0;
  Mat gram;
};

struct PolarizationReport {
  bool ok = true;
  std::string detail;
};

PolarizationReport verify_polarization(const GradedForm& form, const DecFiltration& f);
/// Some polarization of a pure Hodge structure; throws if F is not pure.
GradedForm construct_polarization(int w, const DecFiltration& f);

/// A real basis of a conjugation-stable subspace.
std::vector<Vec> real_basis(const Subspace& s);

}  // namespace dhsys
