#include "dhsys/hodge.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace dhsys {

namespace {

GRat i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return GRat(1);
    case 1: return GRat::i();
    case 2: return GRat(-1);
    default: return -GRat::i();
  }
}

// Basis of V adapted to a bigrading: columns grouped by bidegree.
struct BigradedBasis {
  Mat basis;
  Mat inverse;
  std::vector<Bidegree> degrees;
};

BigradedBasis adapted_basis(const std::map<Bidegree, Subspace>& bigrading, std::size_t n) {
  BigradedBasis b;
  std::vector<Vec> cols;
  for (const auto& [pq, s] : bigrading)
    for (const auto& x : s.basis_vectors()) {
      cols.push_back(x);
      b.degrees.push_back(pq);
    }
  if (cols.size() != n) throw std::logic_error("bigrading does not decompose the space");
  b.basis = Mat::from_cols(cols, n);
  auto inv = inverse(b.basis);
  if (!inv) throw std::logic_error("bigrading pieces are dependent");
  b.inverse = std::move(*inv);
  return b;
}

}  // namespace

bool is_pure_hs(std::size_t dim, int w, const DecFiltration& f) {
  if (f.ambient_dim() != dim) throw DimensionError("Hodge filtration has the wrong dimension");
  if (dim == 0) return true;
  DecFiltration fc = f.conj();
  for (int p = f.lo(); p <= f.hi() + 1; ++p) {
    Subspace a = f.step(p), b = fc.step(w - p + 1);
    if (a.dim() + b.dim() != dim || !intersect(a, b).is_zero()) return false;
  }
  return true;
}

std::map<Bidegree, Subspace> hodge_decomposition(int w, const DecFiltration& f) {
  std::map<Bidegree, Subspace> out;
  DecFiltration fc = f.conj();
  for (int p = f.lo(); p <= f.hi(); ++p) {
    Subspace h = intersect(f.step(p), fc.step(w - p));
    if (!h.is_zero()) out[{p, w - p}] = h;
  }
  return out;
}

MhsReport is_mhs(const IncFiltration& w, const DecFiltration& f) {
  if (w.ambient_dim() != f.ambient_dim()) throw DimensionError("W and F live on different spaces");
  MhsReport r;
  for (int k : w.jumps()) {
    DecFiltration g = induced_on_graded(f, w, k);
    if (!is_pure_hs(g.ambient_dim(), k, g)) {
      r.ok = false;
      r.weight = k;
      r.detail = "induced filtration on gr^W_" + std::to_string(k) + " is not a pure Hodge structure of weight " +
                 std::to_string(k);
      return r;
    }
  }
  return r;
}

std::map<Bidegree, Subspace> deligne_bigrading(const IncFiltration& w, const DecFiltration& f) {
  const std::size_t n = w.ambient_dim();
  std::map<Bidegree, Subspace> out;
  if (n == 0) return out;
  DecFiltration fc = f.conj();
  const int span = w.hi() - w.lo();
  std::size_t total = 0;
  for (int k : w.jumps()) {
    for (int p = f.lo() - span - 1; p <= f.hi() + 1; ++p) {
      const int q = k - p;
      Subspace a = intersect(f.step(p), w.step(k));
      if (a.is_zero()) continue;
      Subspace b = intersect(fc.step(q), w.step(k));
      for (int j = 1; k - j - 1 >= w.lo() - 1; ++j) b = sum(b, intersect(fc.step(q - j), w.step(k - j - 1)));
      Subspace piece = intersect(a, b);
      if (piece.is_zero()) continue;
      total += piece.dim();
      out[{p, q}] = piece;
    }
  }
  if (total != n) throw std::invalid_argument("not a mixed Hodge structure: bigrading is incomplete");
  return out;
}

std::map<Bidegree, Mat> bigraded_components(const std::map<Bidegree, Subspace>& bigrading, const Mat& x) {
  const std::size_t n = x.rows();
  std::map<Bidegree, Mat> out;
  if (n == 0) return out;
  BigradedBasis b = adapted_basis(bigrading, n);
  Mat y = b.inverse * x * b.basis;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (y(i, j).is_zero()) continue;
      Bidegree d{b.degrees[i].first - b.degrees[j].first, b.degrees[i].second - b.degrees[j].second};
      out.try_emplace(d, n, n).first->second(i, j) = y(i, j);
    }
  for (auto& [d, m] : out) m = b.basis * m * b.inverse;
  return out;
}

DeltaSplitting delta_splitting(const IncFiltration& w, const DecFiltration& f) {
  MhsReport check = is_mhs(w, f);
  if (!check.ok) throw std::invalid_argument("delta splitting needs a mixed Hodge structure: " + check.detail);
  const std::size_t n = w.ambient_dim();
  DeltaSplitting out;
  if (n == 0) {
    out.s_prime = Grading(0, {});
    out.f_split = f;
    return out;
  }
  auto bigrading = deligne_bigrading(w, f);
  std::map<int, Subspace> by_weight;
  for (const auto& [pq, s] : bigrading) {
    auto it = by_weight.try_emplace(pq.first + pq.second, Subspace::zero(n)).first;
    it->second = sum(it->second, s);
  }
  Grading y(n, by_weight);
  Mat gen = y.generator();
  Mat target = gen.conj();

  // Find lambda of negative Y-weight with exp(lambda) Y exp(-lambda) = conj Y,
  // one weight at a time; the weight -k part enters linearly as k * lambda_{-k}.
  Mat lambda(n, n);
  const int depth = w.hi() - w.lo();
  for (int k = 1; k <= depth; ++k) {
    Mat conjugated = exp_nilpotent(lambda) * gen * exp_nilpotent(-lambda);
    Mat residual = y.component(target - conjugated, -k);
    lambda += GRat(Rat(1, k)) * residual;
  }
  if (!(exp_nilpotent(lambda) * gen * exp_nilpotent(-lambda) == target))
    throw std::logic_error("delta splitting: conjugating element not found");

  out.delta = GRat(Rat(0), Rat(1, 2)) * lambda;
  if (!out.delta.is_real()) throw std::logic_error("delta splitting: delta is not real");
  for (const auto& [d, m] : bigraded_components(bigrading, out.delta))
    if (d.first >= 0 || d.second >= 0) throw std::logic_error("delta splitting: delta has a component of nonnegative type");

  Mat i_delta = GRat::i() * out.delta;
  out.s_prime = y.transformed(exp_nilpotent(-i_delta));
  if (!out.s_prime.is_real()) throw std::logic_error("delta splitting: s' is not real");

  std::map<int, Subspace> split;
  for (int p = f.lo(); p <= f.hi(); ++p) {
    Subspace acc = Subspace::zero(n);
    for (int k : w.jumps()) acc = sum(acc, image(out.s_prime.projector(k), intersect(f.step(p), w.step(k))));
    split[p] = acc;
  }
  out.f_split = DecFiltration::from_map(n, split);
  if (!(out.f_split.transformed(exp_nilpotent(i_delta)) == f))
    throw std::logic_error("delta splitting: F != exp(i delta) s'(gr F)");
  out.split_bigrading = deligne_bigrading(w, out.f_split);
  out.delta_components = bigraded_components(out.split_bigrading, out.delta);
  return out;
}

// ---------------------------------------------------------------- zeta

std::optional<Mat> ZeroOnlyZeta::zeta(const DeltaSplitting& d) const {
  if (!d.delta.is_zero()) return std::nullopt;
  return Mat(d.delta.rows(), d.delta.cols());
}

struct TableZeta::Word {
  bool leaf = true;
  Bidegree degree{0, 0};
  std::shared_ptr<const Word> left, right;
};

namespace {

using WordPtr = std::shared_ptr<const TableZeta::Word>;

struct WordParser {
  const std::string& s;
  std::size_t at = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("zeta table: " + what + " at offset " + std::to_string(at) + " in '" + s + "'");
  }
  void expect(char c) {
    if (at >= s.size() || s[at] != c) fail(std::string("expected '") + c + "'");
    ++at;
  }
  int integer() {
    std::size_t start = at;
    if (at < s.size() && (s[at] == '-' || s[at] == '+')) ++at;
    while (at < s.size() && std::isdigit(static_cast<unsigned char>(s[at]))) ++at;
    if (start == at || !std::isdigit(static_cast<unsigned char>(s[at - 1]))) fail("expected an integer");
    return std::stoi(s.substr(start, at - start));
  }
  WordPtr word() {
    auto w = std::make_shared<TableZeta::Word>();
    if (at < s.size() && s[at] == 'd') {
      ++at;
      expect('(');
      int p = integer();
      expect(',');
      int q = integer();
      expect(')');
      w->degree = {p, q};
      return w;
    }
    expect('[');
    w->leaf = false;
    w->left = word();
    expect(',');
    w->right = word();
    expect(']');
    return w;
  }
};

Mat evaluate(const TableZeta::Word& w, const std::map<Bidegree, Mat>& comps, std::size_t n) {
  if (w.leaf) {
    auto it = comps.find(w.degree);
    return it == comps.end() ? Mat(n, n) : it->second;
  }
  return commutator(evaluate(*w.left, comps, n), evaluate(*w.right, comps, n));
}

void collect_degrees(const TableZeta::Word& w, std::vector<Bidegree>& out) {
  if (w.leaf) {
    out.push_back(w.degree);
    return;
  }
  collect_degrees(*w.left, out);
  collect_degrees(*w.right, out);
}

}  // namespace

TableZeta TableZeta::parse(const std::string& text) {
  TableZeta t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string coeff, rest, chunk;
    fields >> coeff;
    while (fields >> chunk) rest += chunk;
    if (rest.empty()) throw ParseError("zeta table line " + std::to_string(lineno) + ": missing word");
    WordParser p{rest};
    Term term{parse_grat(coeff), p.word()};
    if (p.at != rest.size()) p.fail("trailing characters");
    t.terms_.push_back(std::move(term));
  }
  return t;
}

std::optional<Mat> TableZeta::zeta(const DeltaSplitting& d) const {
  const std::size_t n = d.delta.rows();
  std::vector<Bidegree> known;
  for (const auto& term : terms_) collect_degrees(*term.word, known);
  for (const auto& [deg, m] : d.delta_components)
    if (!m.is_zero() && std::find(known.begin(), known.end(), deg) == known.end()) return std::nullopt;
  Mat z(n, n);
  for (const auto& term : terms_) z += term.coeff * evaluate(*term.word, d.delta_components, n);
  if (!z.is_real()) return std::nullopt;
  return z;
}

Grading canonical_splitting(const DeltaSplitting& d, const ZetaProvider& zeta) {
  auto z = zeta.zeta(d);
  if (!z) throw ZetaRejected("zeta provider '" + zeta.name() + "' rejects this delta");
  if (z->is_zero()) return d.s_prime;
  Grading s = d.s_prime.transformed(exp_nilpotent(-*z));
  if (!s.is_real()) throw std::logic_error("canonical splitting is not real");
  return s;
}

Grading canonical_splitting(const IncFiltration& w, const DecFiltration& f, const ZetaProvider& zeta) {
  return canonical_splitting(delta_splitting(w, f), zeta);
}

// ---------------------------------------------------------------- polarization

std::vector<Vec> real_basis(const Subspace& s) {
  std::vector<Vec> out;
  Subspace acc = Subspace::zero(s.ambient_dim());
  auto offer = [&](const Vec& x) {
    if (vec_is_zero(x) || acc.contains(x)) return;
    out.push_back(x);
    acc = sum(acc, Subspace::span(s.ambient_dim(), {x}));
  };
  for (const auto& x : s.basis_vectors()) {
    Vec re(x.size()), im(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      re[k] = GRat(x[k].re);
      im[k] = GRat(x[k].im);
    }
    offer(re);
    offer(im);
  }
  if (out.size() != s.dim()) throw std::invalid_argument("subspace is not defined over the reals");
  return out;
}

namespace {

GRat pair(const Mat& gram, const Vec& u, const Vec& v) {
  GRat acc;
  Vec gv = gram * v;
  for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * gv[k];
  return acc;
}

}  // namespace

PolarizationReport verify_polarization(const GradedForm& form, const DecFiltration& f) {
  const std::size_t n = f.ambient_dim();
  const int w = form.weight;
  PolarizationReport r;
  auto fail = [&](std::string why) {
    r.ok = false;
    r.detail = std::move(why);
    return r;
  };
  if (form.gram.rows() != n || form.gram.cols() != n) throw DimensionError("form and filtration sizes differ");
  if (n == 0) return r;
  if (!form.gram.is_real()) return fail("form is not real");
  Mat t = form.gram.transpose();
  if (!(w % 2 == 0 ? t == form.gram : t == -form.gram)) return fail("form has the wrong symmetry for its weight");
  if (determinant(form.gram).is_zero()) return fail("form is degenerate");
  if (!is_pure_hs(n, w, f)) return fail("filtration is not a pure Hodge structure");
  for (int p = f.lo(); p <= f.hi() + 1; ++p) {
    Mat a = f.step(p).basis(), b = f.step(w - p + 1).basis();
    if (a.rows() == 0 || b.rows() == 0) continue;
    if (!(a * form.gram * b.transpose()).is_zero())
      return fail("Q(F^" + std::to_string(p) + ", F^" + std::to_string(w - p + 1) + ") != 0");
  }
  for (const auto& [pq, h] : hodge_decomposition(w, f)) {
    auto basis = h.basis_vectors();
    const std::size_t d = basis.size();
    Mat herm(d, d);
    GRat factor = i_pow(pq.first - pq.second);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) herm(a, b) = factor * pair(form.gram, basis[a], vec_conj(basis[b]));
    if (!(herm.adjoint() == herm)) return fail("Hermitian form is not Hermitian");
    for (std::size_t k = 1; k <= d; ++k) {
      GRat minor = determinant(herm.block(0, 0, k, k));
      if (!minor.is_real() || sgn(minor.re) <= 0)
        return fail("Hermitian form is not positive on H^{" + std::to_string(pq.first) + "," +
                    std::to_string(pq.second) + "}");
    }
  }
  return r;
}

GradedForm construct_polarization(int w, const DecFiltration& f) {
  const std::size_t n = f.ambient_dim();
  if (!is_pure_hs(n, w, f)) throw std::invalid_argument("construct_polarization needs a pure Hodge structure");
  GradedForm form{w, Mat(n, n)};
  if (n == 0) return form;
  // Work in a basis made of bases of the Hodge pieces; pair H^{p,q} with H^{q,p}.
  std::vector<Vec> cols;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // index pairs with prescribed value
  std::vector<GRat> values;
  for (const auto& [pq, h] : hodge_decomposition(w, f)) {
    const auto [p, q] = pq;
    if (p < q) continue;
    if (p == q) {
      for (const auto& x : real_basis(h)) {
        pairs.push_back({cols.size(), cols.size()});
        values.push_back(GRat(1));
        cols.push_back(x);
      }
      continue;
    }
    GRat c = i_pow(q - p);
    GRat c_back = w % 2 == 0 ? c : -c;
    for (const auto& x : h.basis_vectors()) {
      std::size_t a = cols.size();
      cols.push_back(x);
      cols.push_back(vec_conj(x));
      pairs.push_back({a, a + 1});
      values.push_back(c);
      pairs.push_back({a + 1, a});
      values.push_back(c_back);
    }
  }
  Mat gram_b(n, n);
  for (std::size_t k = 0; k < pairs.size(); ++k) gram_b(pairs[k].first, pairs[k].second) = values[k];
  Mat basis = Mat::from_cols(cols, n);
  auto inv = inverse(basis);
  if (!inv) throw std::logic_error("Hodge pieces do not form a basis");
  form.gram = inv->transpose() * gram_b * *inv;
  if (!form.gram.is_real()) throw std::logic_error("constructed polarization is not real");
  return form;
}

}  // namespace dhsys
