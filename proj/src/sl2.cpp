#include "dhsys/sl2.hpp"

#include <numeric>
#include <stdexcept>

namespace dhsys {

namespace {

// Multi-indices 0 <= i_l <= m_l, first index slowest.
std::vector<std::vector<int>> multi_indices(const std::vector<int>& m) {
  std::vector<std::vector<int>> out{{}};
  for (int ml : m) {
    std::vector<std::vector<int>> next;
    for (const auto& i : out)
      for (int v = 0; v <= ml; ++v) {
        auto j = i;
        j.push_back(v);
        next.push_back(j);
      }
    out = next;
  }
  return out;
}

int total(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

struct Layout {
  std::size_t dim = 0;
  std::vector<std::vector<int>> tau_weights;  // per tau_j, per basis vector
  std::vector<Mat> n;
};

// Basis, torus weights and nilpotents of the direct sum of the pieces.
Layout layout(std::size_t n, const std::vector<FamilyPiece>& family, bool hodge) {
  Layout out;
  for (const auto& p : family) {
    if (p.m.size() != n) throw DimensionError("family piece has the wrong number of indices");
    for (int ml : p.m)
      if (ml < 0) throw std::invalid_argument("family piece with negative index");
    out.dim += piece_dim(p);
  }
  out.tau_weights.assign(n + 1, {});
  out.n.assign(n, Mat(out.dim, out.dim));
  std::size_t offset = 0;
  for (const auto& p : family) {
    const int base = hodge ? total(p.m) + p.k : p.k;
    auto indices = multi_indices(p.m);
    for (std::size_t a = 0; a < indices.size(); ++a) {
      const auto& i = indices[a];
      for (std::size_t h = 0; h < p.dim; ++h) {
        int t = base;
        out.tau_weights[0].push_back(t);
        for (std::size_t l = 0; l < n; ++l) {
          t += 2 * i[l] - p.m[l];
          out.tau_weights[l + 1].push_back(t);
        }
      }
      // N_l s_i = (m_l - i_l + 1) s_{i - e_l}.
      for (std::size_t l = 0; l < n; ++l) {
        if (i[l] == 0) continue;
        auto lower = i;
        lower[l] -= 1;
        std::size_t b = 0;
        while (indices[b] != lower) ++b;
        for (std::size_t h = 0; h < p.dim; ++h)
          out.n[l](offset + b * p.dim + h, offset + a * p.dim + h) = GRat(Rat(p.m[l] - i[l] + 1));
      }
    }
    offset += piece_dim(p);
  }
  return out;
}

Grading diag_grading(const std::vector<int>& weights) {
  return Grading::from_basis(Mat::identity(weights.size()), weights);
}

Mat gen_of(const Grading& g, std::size_t dim) { return dim == 0 ? Mat(0, 0) : g.generator(); }

OrbitDecomposition decompose_core(std::size_t dim, const std::vector<Mat>& n, const std::vector<Grading>& tau,
                                  const DecFiltration* f) {
  const std::size_t vars = n.size();
  OrbitDecomposition out;
  out.n = vars;
  out.hodge = f != nullptr;
  out.iso = Mat(dim, dim);
  if (dim == 0) return out;

  Subspace k = Subspace::full(dim);
  for (const auto& nj : n) k = intersect(k, Subspace::kernel(nj));
  std::vector<std::pair<std::vector<int>, Subspace>> groups{{{}, k}};
  for (std::size_t j = 0; j <= vars; ++j) {
    std::vector<std::pair<std::vector<int>, Subspace>> next;
    for (const auto& [t, u] : groups)
      for (const auto& [w, part] : tau[j].parts()) {
        Subspace both = intersect(u, part);
        if (both.is_zero()) continue;
        auto t2 = t;
        t2.push_back(w);
        next.push_back({t2, both});
      }
    groups = next;
  }

  std::vector<Mat> raise;
  for (std::size_t l = 1; l <= vars; ++l) {
    std::map<int, Subspace> hparts;
    for (const auto& [a, pa] : tau[l].parts())
      for (const auto& [b, pb] : tau[l - 1].parts()) {
        Subspace both = intersect(pa, pb);
        if (both.is_zero()) continue;
        auto it = hparts.find(a - b);
        hparts[a - b] = it == hparts.end() ? both : sum(it->second, both);
      }
    auto x = sl2_partner(Grading(dim, hparts), n[l - 1]);
    if (!x) throw std::logic_error("no sl(2) partner for N_" + std::to_string(l));
    raise.push_back(*x);
  }

  std::size_t col = 0;
  for (const auto& [t, u] : groups) {
    FamilyPiece piece;
    for (std::size_t l = 1; l <= vars; ++l) {
      int ml = t[l - 1] - t[l];
      if (ml < 0) throw std::logic_error("kernel vector of positive sl(2) weight");
      piece.m.push_back(ml);
    }
    piece.k = f ? t[0] - total(piece.m) : t[0];
    piece.dim = u.dim();
    Mat basis = u.basis_columns();
    if (f) {
      std::map<int, Subspace> steps;
      for (int p = f->lo(); p <= f->hi() + 1; ++p) {
        std::vector<Vec> vs;
        for (const auto& x : intersect(f->step(p), u).basis_vectors()) vs.push_back(coordinates(basis, x));
        steps[p] = Subspace::span(u.dim(), vs);
      }
      piece.hodge = DecFiltration::from_map(u.dim(), steps);
    }
    if (col + piece_dim(piece) > dim) throw std::logic_error("orbit pieces overfill V");
    for (const auto& i : multi_indices(piece.m))
      for (std::size_t h = 0; h < piece.dim; ++h) {
        Vec v = basis.col(h);
        for (std::size_t l = 0; l < vars; ++l) {
          Rat fact(1);
          for (int r = 1; r <= i[l]; ++r) {
            v = raise[l] * v;
            fact *= r;
          }
          v = GRat(Rat(1) / fact) * v;
        }
        out.iso.set_col(col++, v);
      }
    out.components.push_back({piece, basis});
  }
  if (col != dim || !inverse(out.iso)) throw std::logic_error("orbit pieces do not exhaust V");
  return out;
}

}  // namespace

std::size_t piece_dim(const FamilyPiece& p) {
  std::size_t d = p.dim;
  for (int ml : p.m) d *= static_cast<std::size_t>(ml + 1);
  return d;
}

std::vector<FamilyPiece> OrbitDecomposition::family() const {
  std::vector<FamilyPiece> out;
  for (const auto& c : components) out.push_back(c.piece);
  return out;
}

bool is_orbit(const std::vector<Mat>& n, const std::vector<Grading>& tau, const DecFiltration* f) {
  for (long a : {2, 3}) {
    for (std::size_t k = 0; k < tau.size(); ++k) {
      if (tau[k].ambient_dim() == 0) continue;
      Mat act = tau[k].act(GRat(Rat(a)));
      Mat inv = tau[k].act(GRat(Rat(1, a)));
      for (std::size_t j = k + 1; j <= n.size(); ++j)
        if (!(act * n[j - 1] * inv == n[j - 1])) return false;
      if (f && !(f->transformed(act) == *f)) return false;
    }
  }
  return true;
}

bool is_orbit(const DeligneSystem& s) {
  ValidationReport rep = validate(s);
  if (!rep.ok()) return false;
  return is_orbit(s.n, tau_tuple(s, rep.tower), nullptr);
}

bool is_orbit(const DHSystem& s, const ZetaProvider& zeta) {
  DhData d = derive(s, zeta);
  return is_orbit(s.n, d.tau, &s.f);
}

OrbitDecomposition decompose(const DeligneSystem& s) {
  ValidationReport rep = validate(s);
  if (!rep.ok()) throw std::invalid_argument("decompose needs a valid Deligne system");
  auto tau = tau_tuple(s, rep.tower);
  if (!is_orbit(s.n, tau, nullptr)) throw std::invalid_argument("decompose needs an SL(2)-orbit");
  return decompose_core(s.dim(), s.n, tau, nullptr);
}

OrbitDecomposition decompose(const DHSystem& s, const ZetaProvider& zeta) {
  DhData d = derive(s, zeta);
  if (!is_orbit(s.n, d.tau, &s.f)) throw std::invalid_argument("decompose needs an SL(2)-orbit");
  return decompose_core(s.dim(), s.n, d.tau, &s.f);
}

DeligneSystem reconstruct_deligne(std::size_t n, const std::vector<FamilyPiece>& family) {
  Layout l = layout(n, family, false);
  if (l.dim == 0) return {IncFiltration::pure(0, 0), l.n, Grading(0, {}), Field::Rat};
  return {weight_filtration_of(diag_grading(l.tau_weights[0])), l.n, diag_grading(l.tau_weights[n]), Field::Rat};
}

DHSystem reconstruct_dh(std::size_t n, const std::vector<FamilyPiece>& family) {
  Layout l = layout(n, family, true);
  if (l.dim == 0) return {IncFiltration::pure(0, 0), l.n, DecFiltration::trivial(0, 0)};
  int plo = 0, phi = 0;
  bool first = true;
  for (const auto& p : family) {
    if (!p.hodge) throw std::invalid_argument("DH family piece without a Hodge structure");
    if (p.hodge->ambient_dim() != p.dim) throw DimensionError("Hodge filtration of the wrong dimension");
    if (!is_pure_hs(p.dim, p.k, *p.hodge)) throw std::invalid_argument("family piece is not a pure Hodge structure");
    int lo = p.hodge->lo(), hi = p.hodge->hi() + total(p.m) + 1;
    plo = first ? lo : std::min(plo, lo);
    phi = first ? hi : std::max(phi, hi);
    first = false;
  }
  std::map<int, Subspace> steps;
  for (int q = plo; q <= phi; ++q) {
    std::vector<Vec> vs;
    std::size_t offset = 0;
    for (const auto& p : family) {
      auto indices = multi_indices(p.m);
      for (std::size_t a = 0; a < indices.size(); ++a)
        for (const auto& x : p.hodge->step(q - total(indices[a])).basis_vectors()) {
          Vec v(l.dim);
          for (std::size_t h = 0; h < p.dim; ++h) v[offset + a * p.dim + h] = x[h];
          vs.push_back(v);
        }
      offset += piece_dim(p);
    }
    steps[q] = Subspace::span(l.dim, vs);
  }
  return {weight_filtration_of(diag_grading(l.tau_weights[0])), l.n, DecFiltration::from_map(l.dim, steps)};
}

bool restriction_check(const DeligneSystem& s, std::size_t l, std::size_t j, std::size_t k, const std::vector<Rat>& y) {
  if (!(l <= j && j < k && k <= s.vars())) throw std::out_of_range("restriction_check needs 0 <= l <= j < k <= n");
  if (y.size() != k - l) throw DimensionError("restriction_check needs one y_t for each l < t <= k");
  ValidationReport rep = validate(s);
  if (!rep.ok()) return false;
  Mat total_n(s.dim(), s.dim());
  for (std::size_t t = l + 1; t <= k; ++t) total_n += GRat(y[t - l - 1]) * s.n[t - 1];
  try {
    return verify_rmf(rep.tower[j], total_n, rep.tower[k]).ok;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

Mat sym_gram(int m) {
  Mat g(m + 1, m + 1);
  Rat binom(1);
  for (int i = 0; i <= m; ++i) {
    g(i, m - i) = GRat((m - i) % 2 == 0 ? binom : -binom);
    binom = binom * Rat(m - i) / Rat(i + 1);
  }
  return g;
}

std::optional<Mat> sl2_partner(const Mat& h, const Mat& n) {
  const std::size_t d = h.rows();
  const std::size_t d2 = d * d;
  Mat a = vstack(ad_matrix(h) - GRat(2) * Mat::identity(d2), -ad_matrix(n));
  Vec b(2 * d2);
  Vec vh = vectorize(h);
  for (std::size_t i = 0; i < d2; ++i) b[d2 + i] = vh[i];
  auto x = solve(a, b);
  if (!x) return std::nullopt;
  return unvectorize(*x, d, d);
}

std::optional<Mat> sl2_partner(const Grading& h, const Mat& n) {
  // In an eigenbasis of H the partner only has entries raising the weight by 2.
  const std::size_t d = h.ambient_dim();
  if (d == 0) return Mat(0, 0);
  const Mat& p = h.basis();
  const Mat& pinv = h.basis_inverse();
  const std::vector<int>& wt = h.basis_weights();
  Mat nb = pinv * n * p;
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      if (wt[r] == wt[c] + 2) slots.push_back({r, c});
  // [X, N] = H entrywise: sum_k X(r,k) N(k,c) - N(r,k) X(k,c) = H(r,c).
  Mat a(d * d, slots.size());
  Vec b(d * d);
  for (std::size_t u = 0; u < slots.size(); ++u) {
    auto [r, k] = slots[u];
    for (std::size_t c = 0; c < d; ++c)
      if (!nb(k, c).is_zero()) a(r * d + c, u) += nb(k, c);
    for (std::size_t q = 0; q < d; ++q)
      if (!nb(q, r).is_zero()) a(q * d + k, u) -= nb(q, r);
  }
  for (std::size_t r = 0; r < d; ++r) b[r * d + r] = GRat(Rat(wt[r]));
  auto x = solve(a, b);
  if (!x) return std::nullopt;
  Mat xb(d, d);
  for (std::size_t u = 0; u < slots.size(); ++u) xb(slots[u].first, slots[u].second) = (*x)[u];
  return p * xb * pinv;
}

std::map<int, GradedForm> orbit_polarization(const DHSystem& s, const ZetaProvider& zeta) {
  return orbit_polarization(s, derive(s, zeta).tau);
}

std::map<int, GradedForm> orbit_polarization(const DHSystem& s, const std::vector<Grading>& tau) {
  if (!is_orbit(s.n, tau, &s.f)) throw std::invalid_argument("orbit_polarization needs an SL(2)-orbit");
  OrbitDecomposition dec = decompose_core(s.dim(), s.n, tau, &s.f);
  const std::size_t dim = s.dim();
  std::map<int, GradedForm> out;
  if (dim == 0) return out;

  Mat grec(dim, dim);
  std::size_t offset = 0;
  for (const auto& c : dec.components) {
    Mat block = construct_polarization(c.piece.k, *c.piece.hodge).gram;
    for (auto it = c.piece.m.rbegin(); it != c.piece.m.rend(); ++it) block = kron(sym_gram(*it), block);
    for (std::size_t i = 0; i < block.rows(); ++i)
      for (std::size_t j = 0; j < block.cols(); ++j) grec(offset + i, offset + j) = block(i, j);
    offset += block.rows();
  }
  Mat inv = *inverse(dec.iso);
  Mat gv = inv.transpose() * grec * inv;
  for (int w : s.w.jumps()) {
    QuotientMap q(s.w.step(w), s.w.step(w - 1));
    Mat lifts = tau[0].projector(w) * q.lift_matrix();
    out[w] = GradedForm{w, lifts.transpose() * gv * lifts};
  }
  return out;
}

}  // namespace dhsys
