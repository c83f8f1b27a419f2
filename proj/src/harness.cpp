#include "dhsys/harness.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dhsys {

std::string to_string(SystemKind k) { return k == SystemKind::Dh ? "dh" : "deligne"; }

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::None: return "none";
    case Perturbation::Transport: return "transport";
    case Perturbation::Hodge: return "hodge";
    case Perturbation::Recombine: return "recombine";
  }
  return "none";
}

std::optional<SystemKind> parse_kind(const std::string& s) {
  if (s == "dh") return SystemKind::Dh;
  if (s == "deligne") return SystemKind::Deligne;
  return std::nullopt;
}

std::optional<Perturbation> parse_perturbation(const std::string& s) {
  for (auto p : {Perturbation::None, Perturbation::Transport, Perturbation::Hodge, Perturbation::Recombine})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

std::string to_string(TraceQuantity q) {
  switch (q) {
    case TraceQuantity::Nilpotents: return "nilpotents";
    case TraceQuantity::Hodge: return "hodge";
    case TraceQuantity::Orbit: return "orbit";
    case TraceQuantity::Splitting: return "splitting";
    case TraceQuantity::Series: return "series";
  }
  return "";
}

namespace {

Rat pick(std::mt19937_64& rng, const std::vector<Rat>& from) { return from[rng() % from.size()]; }

Rat small_nonzero(std::mt19937_64& rng) {
  return pick(rng, {Rat(1), Rat(2), Rat(3), Rat(-1), Rat(-2), Rat(1, 2), Rat(-1, 2), Rat(3, 2)});
}

Mat unimodular(std::mt19937_64& rng, std::size_t n) {
  Mat m = Mat::identity(n);
  if (n < 2) return m;
  for (std::size_t k = 0; k < 3 * n; ++k) {
    std::size_t i = rng() % n, j = rng() % n;
    if (i == j) continue;
    GRat f(static_cast<long>(rng() % 5) - 2);
    for (std::size_t c = 0; c < n; ++c) m(i, c) += f * m(j, c);
  }
  return m;
}

DecFiltration hs_block(std::mt19937_64& rng, int w) {
  // Type (p, q) + (q, p), p > q, on Q(i)^2.
  int q = (w - 1 >= 0 ? (w - 1) / 2 : -((1 - w + 1) / 2)) - static_cast<int>(rng() % 2);
  int p = w - q;
  Vec v{GRat(1), GRat(pick(rng, {Rat(0), Rat(1), Rat(-1), Rat(1, 2)}), small_nonzero(rng))};
  std::map<int, Subspace> steps;
  for (int k = q; k <= p + 1; ++k)
    steps[k] = k <= q ? Subspace::full(2) : k <= p ? Subspace::span(2, {v}) : Subspace::zero(2);
  return DecFiltration::from_map(2, steps);
}

DecFiltration dsum(const DecFiltration& a, const DecFiltration& b) {
  const std::size_t da = a.ambient_dim(), db = b.ambient_dim();
  int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi()) + 1;
  std::map<int, Subspace> steps;
  for (int p = lo; p <= hi; ++p) {
    std::vector<Vec> vs;
    for (const auto& x : a.step(p).basis_vectors()) {
      Vec v(da + db);
      std::copy(x.begin(), x.end(), v.begin());
      vs.push_back(v);
    }
    for (const auto& x : b.step(p).basis_vectors()) {
      Vec v(da + db);
      std::copy(x.begin(), x.end(), v.begin() + da);
      vs.push_back(v);
    }
    steps[p] = Subspace::span(da + db, vs);
  }
  return DecFiltration::from_map(da + db, steps);
}

FamilyPiece random_piece(std::mt19937_64& rng, std::size_t n, std::size_t budget, SystemKind kind) {
  for (int attempt = 0; attempt < 30; ++attempt) {
    FamilyPiece p;
    for (std::size_t l = 0; l < n; ++l) p.m.push_back(static_cast<int>(rng() % 3));
    if (kind == SystemKind::Dh) {
      p.k = static_cast<int>(rng() % 4) - 1;
      p.dim = (p.k % 2 == 0 && rng() % 2) ? 1 : 2;
    } else {
      p.k = static_cast<int>(rng() % 5) - 2;
      p.dim = 1 + rng() % 2;
    }
    if (piece_dim(p) > budget) continue;
    if (kind == SystemKind::Dh) p.hodge = random_pure_hs(rng, p.dim, p.k);
    return p;
  }
  FamilyPiece p{std::vector<int>(n, 0), 0, 1, std::nullopt};
  if (kind == SystemKind::Dh) p.hodge = DecFiltration::trivial(1, 0);
  return p;
}

bool valid(const Instance& in) {
  return in.kind == SystemKind::Dh ? validate_dh(in.dh).ok() : validate(in.deligne).ok();
}

std::vector<Mat>& ops(Instance& in) { return in.kind == SystemKind::Dh ? in.dh.n : in.deligne.n; }

}  // namespace

DecFiltration random_pure_hs(std::mt19937_64& rng, std::size_t dim, int w) {
  if (dim == 0) return DecFiltration::trivial(0, 0);
  const bool even = w % 2 == 0;
  if (dim % 2 == 1 && !even) throw std::invalid_argument("odd weight needs even dimension");
  DecFiltration out = DecFiltration::trivial(0, 0);
  bool first = true;
  std::size_t left = dim;
  while (left > 0) {
    DecFiltration block = (left == 1 || (even && rng() % 2)) ? DecFiltration::trivial(left == 1 ? 1 : 2, w / 2)
                                                           : hs_block(rng, w);
    left -= block.ambient_dim();
    out = first ? block : dsum(out, block);
    first = false;
  }
  return out;
}

Instance generate(const GeneratorConfig& c) {
  std::seed_seq seq{c.seed, static_cast<std::uint64_t>(c.n), static_cast<std::uint64_t>(c.max_dim),
                    static_cast<std::uint64_t>(c.kind), static_cast<std::uint64_t>(c.mode)};
  std::mt19937_64 rng(seq);
  Instance in;
  in.kind = c.kind;
  in.seed = c.seed;
  in.mode = c.mode;
  if (c.max_dim == 0) throw std::invalid_argument("generate needs max_dim >= 1");
  if (c.mode == Perturbation::Hodge && c.kind == SystemKind::Deligne)
    throw std::invalid_argument("hodge perturbation needs a DH system");

  bool paired = c.mode == Perturbation::Transport || c.mode == Perturbation::Hodge;
  if (paired && c.max_dim < 2) {
    paired = false;
    in.mode = Perturbation::None;
    in.note = "no room for a perturbation pair";
  }
  if (c.mode == Perturbation::Recombine && c.n < 2) {
    in.mode = Perturbation::None;
    in.note = "recombination needs n >= 2";
  }

  std::size_t budget = c.max_dim;
  if (paired) {
    FamilyPiece a;
    for (int attempt = 0;; ++attempt) {
      a = random_piece(rng, c.n, budget / 2, c.kind);
      if (c.kind == SystemKind::Dh && a.k < 1) a.k += 2;
      if (c.kind == SystemKind::Dh) a.hodge = random_pure_hs(rng, a.dim, a.k);
      if (2 * piece_dim(a) <= budget || attempt > 10) break;
    }
    FamilyPiece b = a;
    b.k = a.k - 2;
    if (b.hodge) b.hodge = a.hodge->shifted(1);
    in.family = {a, b};
    budget -= 2 * piece_dim(a);
    if (budget > 0 && rng() % 2) in.family.push_back(random_piece(rng, c.n, budget, c.kind));
  } else {
    std::size_t pieces = 1 + rng() % 3;
    for (std::size_t k = 0; k < pieces && budget > 0; ++k) {
      FamilyPiece p = random_piece(rng, c.n, budget, c.kind);
      budget -= piece_dim(p);
      in.family.push_back(p);
    }
  }

  if (c.kind == SystemKind::Dh) {
    in.dh_orbit = reconstruct_dh(c.n, in.family);
    in.dh = in.dh_orbit;
  } else {
    in.deligne_orbit = reconstruct_deligne(c.n, in.family);
    in.deligne = in.deligne_orbit;
  }
  if (!valid(in)) throw std::logic_error("generated orbit does not validate");
  const std::size_t dim = in.dim();

  if (paired) {
    const std::size_t da = piece_dim(in.family[0]);
    const Instance orbit = in;
    bool done = false;
    for (int attempt = 0; attempt < 5 && !done; ++attempt) {
      in = orbit;
      Mat x(dim, dim);
      Rat coeff = small_nonzero(rng);
      for (std::size_t a = 0; a < da; ++a) x(da + a, a) = GRat(coeff);
      if (in.mode == Perturbation::Transport) {
        if (c.n > 0) ops(in)[0] += x;
      } else {
        in.dh.f = in.dh.f.transformed(exp_nilpotent(GRat(Rat(0), small_nonzero(rng)) * x));
      }
      done = c.n > 0 && valid(in);
    }
    if (!done) {
      in = orbit;
      in.mode = Perturbation::None;
      in.note = "perturbation discarded";
    }
  } else if (in.mode == Perturbation::Recombine) {
    const Instance orbit = in;
    const std::vector<Mat> base = ops(in);
    for (std::size_t j = 1; j < c.n; ++j)
      for (std::size_t k = 0; k < j; ++k) ops(in)[j] -= GRat(Rat(1 + static_cast<long>(rng() % 3))) * base[k];
    if (!valid(in)) {
      in = orbit;
      in.mode = Perturbation::None;
      in.note = "recombination discarded";
    }
  }

  if (c.basis_change && dim > 0) {
    Mat g = unimodular(rng, dim);
    if (c.kind == SystemKind::Dh) {
      in.dh = transported(in.dh, g);
      in.dh_orbit = transported(in.dh_orbit, g);
    } else {
      in.deligne = transported(in.deligne, g);
      in.deligne_orbit = transported(in.deligne_orbit, g);
    }
  }
  return in;
}

const ZetaProvider& domain_zeta() {
  static const TableZeta table = TableZeta::parse("0 d(-1,-1)");
  return table;
}

std::vector<Rat> ray(std::size_t n, const Rat& t) {
  std::vector<Rat> y;
  for (std::size_t j = 1; j <= n; ++j) y.push_back(rat_pow(t, 2 * static_cast<long>(n + 1 - j)));
  return y;
}

Mat beta(const std::vector<Grading>& tau, const Rat& t) {
  if (tau.empty() || tau[0].ambient_dim() == 0) return Mat(0, 0);
  Mat b = Mat::identity(tau[0].ambient_dim());
  for (const auto& g : tau) b = b * g.act(GRat(t));
  return b;
}

Rat distance(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("distance: shape mismatch");
  Rat best(0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      GRat d = a(i, j) - b(i, j);
      Rat m = d.re * d.re + d.im * d.im;
      if (m > best) best = m;
    }
  return best;
}

namespace {

Mat orthogonal_projector(const Subspace& u) {
  const std::size_t d = u.ambient_dim();
  if (u.is_zero()) return Mat(d, d);
  Mat m = u.basis_columns();
  Mat gram = m.adjoint() * m;
  return m * *inverse(gram) * m.adjoint();
}

}  // namespace

Rat distance(const DecFiltration& a, const DecFiltration& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("distance: dimension mismatch");
  Rat best(0);
  for (int p = std::min(a.lo(), b.lo()); p <= std::max(a.hi(), b.hi()) + 1; ++p) {
    Rat d = distance(orthogonal_projector(a.step(p)), orthogonal_projector(b.step(p)));
    if (d > best) best = d;
  }
  return best;
}

bool DistanceTrace::zero() const {
  return std::all_of(points.begin(), points.end(), [](const auto& p) { return sgn(p.second) == 0; });
}

bool DistanceTrace::decaying() const {
  if (points.empty()) return false;
  const std::size_t fit = (points.size() + 1) / 2;
  Rat c = 0;
  for (std::size_t i = 0; i < fit; ++i) c = std::max(c, Rat(points[i].second * points[i].first * points[i].first));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [t, d] = points[i];
    if (i >= fit && d * t * t > c) return false;
    if (i > 0) {
      const Rat& prev = points[i - 1].second;
      if (!(d < prev || (sgn(d) == 0 && sgn(prev) == 0))) return false;
    }
  }
  return true;
}

namespace {

Mat weighted_sum(const std::vector<Mat>& n, const std::vector<Rat>& y, std::size_t dim) {
  Mat out(dim, dim);
  for (std::size_t j = 0; j < n.size(); ++j) out += GRat(y[j]) * n[j];
  return out;
}

Mat i_exp(const Mat& m) { return exp_nilpotent(GRat::i() * m); }

struct Hats {
  IncFiltration w;
  std::vector<Mat> n;
  Grading alpha;
  std::vector<Grading> tau;
  std::vector<Mat> nhat;
};

// Splitting trace: tau_0 of (W, sum y N, alpha) against tau_0 of (W, sum N-hat, alpha).
void splitting_points(DistanceTrace& tr, const Hats& h, const std::vector<Rat>& grid) {
  const std::size_t dim = h.w.ambient_dim();
  const std::size_t n = h.n.size();
  if (dim == 0 || n == 0) {
    for (const Rat& t : grid) tr.points.push_back({t, Rat(0)});
    return;
  }
  Grading shat = tau_pair(h.w, weighted_sum(h.nhat, std::vector<Rat>(n, Rat(1)), dim), h.alpha);
  for (const Rat& t : grid) {
    Grading sy = tau_pair(h.w, weighted_sum(h.n, ray(n, t), dim), h.alpha);
    tr.points.push_back({t, distance(sy.generator(), shat.generator())});
    Mat r(dim, dim);
    for (const auto& [w, part] : shat.parts()) r += sy.projector(w) * shat.projector(w);
    if (!h.w.respected_by(r - Mat::identity(dim), -1)) {
      tr.residual_lowering = false;
      if (tr.witness.empty()) tr.witness = "r(t) - 1 does not lower W at t = " + to_string(t);
    }
  }
}

void nilpotent_points(DistanceTrace& tr, const Hats& h, const std::vector<Rat>& grid) {
  const std::size_t n = h.n.size();
  for (const Rat& t : grid) {
    Rat best(0);
    if (h.w.ambient_dim() > 0) {
      Mat b = beta(h.tau, t), bi = beta(h.tau, Rat(1) / t);
      auto y = ray(n, t);
      for (std::size_t j = 0; j < n; ++j) {
        Rat d = distance(b * (GRat(y[j]) * h.n[j]) * bi, h.nhat[j]);
        if (d > best) best = d;
      }
    }
    tr.points.push_back({t, best});
  }
}

}  // namespace

DistanceTrace convergence_trace(const DeligneSystem& s, TraceQuantity q, const std::vector<Rat>& grid) {
  DistanceTrace tr;
  tr.quantity = q;
  if (q != TraceQuantity::Nilpotents && q != TraceQuantity::Splitting) {
    tr.applicable = false;
    return tr;
  }
  ValidationReport rep = validate(s);
  if (!rep.ok()) throw std::invalid_argument("convergence_trace needs a valid Deligne system");
  Hats h{s.w, s.n, s.alpha, tau_tuple(s, rep.tower), {}};
  h.nhat = nhat(s, h.tau);
  if (q == TraceQuantity::Nilpotents) nilpotent_points(tr, h, grid);
  else splitting_points(tr, h, grid);
  return tr;
}

DistanceTrace convergence_trace(const DHSystem& s, TraceQuantity q, const std::vector<Rat>& grid,
                                const ZetaProvider& zeta) {
  DistanceTrace tr;
  tr.quantity = q;
  DhData d = derive(s, zeta);
  Hats h{s.w, s.n, d.deligne.alpha, d.tau, d.nhat};
  const std::size_t dim = s.dim(), n = s.vars();
  switch (q) {
    case TraceQuantity::Nilpotents: nilpotent_points(tr, h, grid); break;
    case TraceQuantity::Splitting: splitting_points(tr, h, grid); break;
    case TraceQuantity::Hodge:
      for (const Rat& t : grid) tr.points.push_back({t, distance(s.f.transformed(beta(d.tau, t)), d.fhat)});
      break;
    case TraceQuantity::Orbit: {
      DecFiltration target = d.fhat.transformed(i_exp(weighted_sum(d.nhat, std::vector<Rat>(n, Rat(1)), dim)));
      for (const Rat& t : grid) {
        Mat m = beta(d.tau, t) * i_exp(weighted_sum(s.n, ray(n, t), dim));
        tr.points.push_back({t, distance(s.f.transformed(m), target)});
      }
      break;
    }
    case TraceQuantity::Series: {
      if (s.w.jumps().size() > 1) {
        tr.applicable = false;
        break;
      }
      DecFiltration target = d.fhat.transformed(i_exp(weighted_sum(d.nhat, std::vector<Rat>(n, Rat(1)), dim)));
      std::vector<Grading> upper(d.tau.begin() + 1, d.tau.end());
      for (const Rat& t : grid) {
        DecFiltration lhs = s.f.transformed(i_exp(weighted_sum(s.n, ray(n, t), dim)));
        DecFiltration rhs = upper.empty() || dim == 0 ? target : target.transformed(beta(upper, Rat(1) / t));
        tr.points.push_back({t, distance(lhs, rhs)});
      }
      break;
    }
  }
  return tr;
}


namespace {

InstanceResult result(bool pass, std::string detail) {
  InstanceResult r;
  r.pass = pass;
  r.detail = std::move(detail);
  return r;
}

InstanceResult not_applicable(std::string why) {
  InstanceResult r = result(true, std::move(why));
  r.applicable = false;
  return r;
}

bool same(const DeligneSystem& a, const DeligneSystem& b) {
  if (!(a.w == b.w) || a.n.size() != b.n.size() || !(a.alpha == b.alpha)) return false;
  for (std::size_t j = 0; j < a.n.size(); ++j)
    if (!(a.n[j] == b.n[j])) return false;
  return true;
}

bool same(const DHSystem& a, const DHSystem& b) {
  if (!(a.w == b.w) || a.n.size() != b.n.size() || !(a.f == b.f)) return false;
  for (std::size_t j = 0; j < a.n.size(); ++j)
    if (!(a.n[j] == b.n[j])) return false;
  return true;
}

Grading doubled(const Grading& g) {
  if (g.ambient_dim() == 0) return g;
  std::vector<int> w = g.basis_weights();
  w.insert(w.end(), g.basis_weights().begin(), g.basis_weights().end());
  return Grading::from_basis(direct_sum(g.basis(), g.basis()), w);
}

// An elementary unimodular move that changes w, if one exists.
std::optional<IncFiltration> moved(const IncFiltration& w, std::mt19937_64& rng) {
  const std::size_t d = w.ambient_dim();
  if (d < 2) return std::nullopt;
  for (int attempt = 0; attempt < 40; ++attempt) {
    std::size_t a = rng() % d, b = rng() % d;
    if (a == b) continue;
    Mat g = Mat::identity(d);
    g(a, b) = GRat(static_cast<long>(1 + rng() % 3));
    IncFiltration out = w.transformed(g);
    if (!(out == w)) return out;
  }
  return std::nullopt;
}

std::vector<Rat> random_nonzero(std::mt19937_64& rng, std::size_t n) {
  std::vector<Rat> y;
  for (std::size_t k = 0; k < n; ++k) y.push_back(small_nonzero(rng));
  return y;
}

std::vector<std::vector<Rat>> cube(std::size_t n, const std::vector<Rat>& values) {
  std::vector<std::vector<Rat>> out{{}};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Rat>> next;
    for (const auto& p : out)
      for (const Rat& v : values) {
        auto q = p;
        q.push_back(v);
        next.push_back(q);
      }
    out = next;
  }
  return out;
}

std::string summary(const DistanceTrace& tr) {
  std::string s = to_string(tr.quantity) + "=";
  if (!tr.applicable) return s + "n/a";
  if (!tr.residual_lowering) return s + "residual-not-lowering";
  return s + (tr.zero() ? "zero" : tr.decaying() ? "decaying" : "NOT-CONVERGED");
}

}  // namespace

InstanceResult check_rmf(const DeligneSystem& s, std::mt19937_64& rng) {
  std::size_t perturbed = 0, skipped = 0;
  IncFiltration w = s.w;
  for (std::size_t j = 0; j < s.vars(); ++j) {
    auto wp = compute_rmf(w, s.n[j]);
    if (!wp) return result(false, "no RMF for N_" + std::to_string(j + 1));
    RmfReport rep = verify_rmf(w, s.n[j], *wp);
    if (!rep.ok) return result(false, "computed RMF fails " + rep.condition + " for N_" + std::to_string(j + 1));
    auto other = moved(*wp, rng);
    if (!other) {
      ++skipped;
    } else {
      bool rejected = true;
      try {
        rejected = !verify_rmf(w, s.n[j], *other).ok;
      } catch (const std::invalid_argument&) {
      }
      if (!rejected) return result(false, "perturbed RMF for N_" + std::to_string(j + 1) + " also verifies");
      ++perturbed;
    }
    w = *wp;
  }
  return result(true, "steps " + std::to_string(s.vars()) + ", perturbed " + std::to_string(perturbed) +
                          ", unmovable " + std::to_string(skipped));
}

InstanceResult check_deligne(const DeligneSystem& s) {
  ValidationReport rep = validate(s);
  if (!rep.ok()) return result(false, "invalid: " + rep.to_text());
  auto tau = tau_tuple(s, rep.tower);
  AxiomCheck tuple = check_tau_tuple(s, rep.tower, tau);
  if (!tuple.ok) return result(false, "tau tuple " + tuple.name + ": " + tuple.witness);
  for (std::size_t j = 1; j <= s.vars(); ++j) {
    Grading t0 = tau_pair(rep.tower[j - 1], s.n[j - 1], tau[j]);
    AxiomCheck pair = check_tau_pair(rep.tower[j - 1], s.n[j - 1], tau[j], t0);
    if (!pair.ok) return result(false, "tau pair " + std::to_string(j) + " " + pair.name + ": " + pair.witness);
  }
  return result(true, "tau tuple and pairs verified");
}

InstanceResult check_collapse(const DeligneSystem& s, const std::vector<Rat>& t_grid) {
  ValidationReport rep = validate(s);
  if (!rep.ok()) return result(false, "invalid");
  const IncFiltration top = s.dim() ? weight_filtration_of(s.alpha) : s.w;
  bool seen = false, persistent = true;
  std::string marks;
  for (const Rat& t : t_grid) {
    Mat sum(s.dim(), s.dim());
    auto y = ray(s.vars(), t);
    for (std::size_t j = 0; j < s.vars(); ++j) sum += GRat(y[j]) * s.n[j];
    auto wp = compute_rmf(s.w, sum);
    bool ok = wp && *wp == top;
    marks += ok ? '+' : '-';
    if (ok) seen = true;
    else if (seen) persistent = false;
  }
  InstanceResult r;
  r.traces.push_back(convergence_trace(s, TraceQuantity::Nilpotents, t_grid));
  r.traces.push_back(convergence_trace(s, TraceQuantity::Splitting, t_grid));
  bool conv = std::all_of(r.traces.begin(), r.traces.end(), [](const auto& tr) { return tr.converged(); });
  r.pass = seen && persistent && marks.back() == '+' && conv;
  r.detail = "rmf " + marks;
  for (const auto& tr : r.traces) r.detail += " " + summary(tr);
  return r;
}

InstanceResult check_recombination(const DHSystem& s, const std::vector<Rat>& a_grid, const ZetaProvider& zeta) {
  if (!validate_dh(s).ok()) return result(false, "not a DH system");
  RecombinationResult t = recombination_search(s, a_grid, default_samples(s.vars()), zeta);
  std::string scan;
  for (const auto& [level, ok] : t.scan) scan += ok ? '+' : '-';
  if (!t.found) return result(false, "no level passes: " + scan);
  std::string detail = "level " + to_string(t.level) + " scan " + scan;
  if (!t.persistent) return result(false, detail + " (not persistent)");
  if (!t.revalidates) return result(false, detail + " (certified system fails validate_dh)");
  return result(true, detail);
}

InstanceResult check_imhm(const DeligneSystem& s, const std::vector<Rat>& a_grid, const ZetaProvider& zeta) {
  DHSystem dh = from_deligne(s);
  if (!validate_dh(dh).ok()) return result(false, "from_deligne output fails validate_dh");
  DeligneSystem base = s.field == Field::Gauss ? restrict_scalars(s) : s;
  if (!same(to_deligne(dh, zeta), direct_sum(base, base))) return result(false, "round trip is not the doubled system");
  InstanceResult r = check_recombination(dh, a_grid, zeta);
  r.detail = "round trip exact, " + r.detail;
  return r;
}

InstanceResult check_convergence(const DHSystem& s, bool orbit, const std::vector<Rat>& t_grid,
                                 const ZetaProvider& zeta) {
  InstanceResult r;
  r.pass = true;
  for (auto q : {TraceQuantity::Nilpotents, TraceQuantity::Hodge, TraceQuantity::Orbit, TraceQuantity::Splitting,
                 TraceQuantity::Series}) {
    DistanceTrace tr = convergence_trace(s, q, t_grid, zeta);
    bool ok = orbit ? (!tr.applicable || (tr.zero() && tr.residual_lowering)) : tr.converged();
    if (!ok) r.pass = false;
    r.detail += (r.detail.empty() ? "" : " ") + summary(tr);
    if (!tr.witness.empty()) r.detail += " (" + tr.witness + ")";
    r.traces.push_back(tr);
  }
  return r;
}

InstanceResult check_fhat(const DHSystem& s, const ZetaProvider& zeta) {
  DhData d = derive(s, zeta);
  if (s.dim() == 0) return result(true, "zero space");
  for (std::size_t j = 0; j < d.tau.size(); ++j)
    for (long a : {2, 3})
      if (!(d.fhat.transformed(d.tau[j].act(GRat(Rat(a)))) == d.fhat))
        return result(false, "tau_" + std::to_string(j) + "(" + std::to_string(a) + ") moves F-hat");
  return result(true, "F-hat fixed by every tau_j(2), tau_j(3)");
}

InstanceResult check_splitting(const DeligneSystem& s, const ZetaProvider& zeta) {
  if (s.vars() != 1) return not_applicable("needs one variable");
  if (s.field != Field::Rat) return not_applicable("needs a Q-model");
  ValidationReport rep = validate(s);
  if (!rep.ok()) return result(false, "invalid");
  Grading tau0 = tau_tuple(s, rep.tower)[0];
  DHSystem dh = from_deligne(s);
  DecFiltration f = dh.f.transformed(i_exp(dh.n[0]));
  MhsReport mhs = is_mhs(dh.w, f);
  if (!mhs.ok) return result(false, "(W, exp(iN)F) is not mixed Hodge: " + mhs.detail);
  Grading split;
  try {
    split = canonical_splitting(dh.w, f, zeta);
  } catch (const ZetaRejected& e) {
    return not_applicable(e.what());
  }
  if (!(split == doubled(tau0))) return result(false, "canonical splitting differs from doubled tau_0");
  return result(true, "canonical splitting = doubled tau_0");
}

InstanceResult check_classification(const DeligneSystem& s) {
  if (!is_orbit(s)) return result(false, "not an orbit");
  OrbitDecomposition d = decompose(s);
  if (!same(transported(reconstruct_deligne(s.vars(), d.family()), d.iso), s))
    return result(false, "reconstruction differs");
  return result(true, std::to_string(d.components.size()) + " families");
}

InstanceResult check_classification(const DHSystem& s, const ZetaProvider& zeta) {
  if (!is_orbit(s, zeta)) return result(false, "not an orbit");
  OrbitDecomposition d = decompose(s, zeta);
  if (!same(transported(reconstruct_dh(s.vars(), d.family()), d.iso), s))
    return result(false, "reconstruction differs");
  return result(true, std::to_string(d.components.size()) + " families");
}

namespace {

template <class M, class Validate>
InstanceResult abelian(const M& f, Validate valid_object) {
  std::string err = morphism_defect(f);
  if (!err.empty()) return result(false, "not a morphism: " + err);
  auto k = kernel(f);
  auto c = cokernel(f);
  if (!valid_object(k.object)) return result(false, "kernel fails validation");
  if (!valid_object(c.object)) return result(false, "cokernel fails validation");
  err = coimage_image_defect(f);
  if (!err.empty()) return result(false, err);
  const std::size_t r = rank(f.map);
  if (k.object.dim() + r != f.source.dim() || c.object.dim() + r != f.target.dim())
    return result(false, "dimension bookkeeping fails");
  if (!(f.map * k.inclusion).is_zero() || !(c.projection * f.map).is_zero())
    return result(false, "kernel or cokernel map is wrong");
  return result(true, "ker " + std::to_string(k.object.dim()) + ", rank " + std::to_string(r) + ", coker " +
                          std::to_string(c.object.dim()));
}

}  // namespace

InstanceResult check_abelian(const DeligneMorphism& f) {
  return abelian(f, [](const DeligneSystem& s) { return validate(s).ok(); });
}

InstanceResult check_abelian(const DhMorphism& f) {
  return abelian(f, [](const DHSystem& s) { return validate_dh(s).ok(); });
}

InstanceResult check_sl2(const DHSystem& s, std::mt19937_64& rng, const ZetaProvider& zeta) {
  if (!is_orbit(s, zeta)) return result(false, "not an orbit");
  DeligneSystem d = to_deligne(s, zeta);
  const std::size_t n = s.vars();
  std::size_t checks = 0;
  for (std::size_t l = 0; l <= n; ++l)
    for (std::size_t j = l; j <= n; ++j)
      for (std::size_t k = j + 1; k <= n; ++k) {
        auto y = random_nonzero(rng, k - l);
        ++checks;
        if (!restriction_check(d, l, j, k, y))
          return result(false, "restriction fails for (l, j, k) = (" + std::to_string(l) + ", " + std::to_string(j) +
                                   ", " + std::to_string(k) + ")");
      }
  auto forms = orbit_polarization(s, zeta);
  for (const auto& [w, q] : forms) {
    Mat sign = GRat(w % 2 == 0 ? 1 : -1) * q.gram;
    if (!(q.gram.transpose() == sign)) return result(false, "form on gr_" + std::to_string(w) + " has the wrong symmetry");
    QuotientMap gr = quotient_map(s.w.step(w), s.w.step(w - 1));
    for (const auto& nj : s.n) {
      Mat ng = gr.induced(nj);
      if (!(ng.transpose() * q.gram + q.gram * ng).is_zero())
        return result(false, "form on gr_" + std::to_string(w) + " is not N-anti-invariant");
    }
  }
  for (const auto& y : cube(n, {Rat(1), Rat(2), Rat(1, 2)})) {
    DecFiltration f = s.f.transformed(i_exp(weighted_sum(s.n, y, s.dim())));
    for (const auto& [w, q] : forms) {
      PolarizationReport rep = verify_polarization(q, induced_on_graded(f, s.w, w));
      if (!rep.ok) return result(false, "positivity fails on gr_" + std::to_string(w) + ": " + rep.detail);
    }
  }
  return result(true, std::to_string(checks) + " restriction checks, " + std::to_string(forms.size()) + " forms");
}

namespace {

template <class S>
std::pair<S, Mat> morphism_parts(std::mt19937_64& rng, const S& y, const S& z, const S& z2, S* target) {
  S source = direct_sum(y, z);
  S tgt = direct_sum(y, z2);
  Mat f(tgt.dim(), source.dim());
  for (std::size_t i = 0; i < y.dim(); ++i) f(i, i) = GRat(1);
  Mat g = unimodular(rng, source.dim()), h = unimodular(rng, tgt.dim());
  *target = transported(tgt, h);
  return {transported(source, g), h * f * *inverse(g)};
}

}  // namespace

DeligneMorphism random_deligne_morphism(std::uint64_t seed, std::size_t max_dim) {
  std::mt19937_64 rng(seed);
  const std::size_t n = 1 + rng() % 2;
  const std::size_t part = std::max<std::size_t>(1, max_dim / 2);
  auto piece = [&](std::uint64_t s) {
    return generate({SystemKind::Deligne, n, part, s, Perturbation::None, false}).deligne;
  };
  DeligneSystem target;
  auto [source, map] = morphism_parts(rng, piece(seed * 3 + 1), piece(seed * 3 + 2), piece(seed * 3 + 3), &target);
  return {source, target, map};
}

DhMorphism random_dh_morphism(std::uint64_t seed, std::size_t max_dim) {
  std::mt19937_64 rng(seed);
  const std::size_t n = 1 + rng() % 2;
  const std::size_t part = std::max<std::size_t>(1, max_dim / 2);
  auto piece = [&](std::uint64_t s) { return generate({SystemKind::Dh, n, part, s, Perturbation::None, false}).dh; };
  DHSystem target;
  auto [source, map] = morphism_parts(rng, piece(seed * 3 + 1), piece(seed * 3 + 2), piece(seed * 3 + 3), &target);
  return {source, target, map};
}

std::size_t CampaignReport::passed() const {
  return std::count_if(results.begin(), results.end(), [](const auto& r) { return r.applicable && r.pass; });
}

std::size_t CampaignReport::applicable() const {
  return std::count_if(results.begin(), results.end(), [](const auto& r) { return r.applicable; });
}

bool CampaignReport::ok() const { return passed() == applicable(); }

std::string CampaignReport::to_text() const {
  std::ostringstream out;
  out << "campaign " << theorem << ": " << passed() << "/" << applicable() << " passed";
  if (applicable() != results.size()) out << " (" << results.size() - applicable() << " not applicable)";
  out << "\n";
  for (const auto& r : results)
    out << "  seed " << r.seed << ": " << (!r.applicable ? "N/A " : r.pass ? "PASS" : "FAIL") << " " << r.detail
        << "\n";
  out << (ok() ? "result: PASS" : "result: FAIL") << "\n";
  return out.str();
}

std::string CampaignReport::traces_csv() const {
  std::ostringstream out;
  out << "seed,quantity,t,squared_distance\n";
  for (const auto& r : results)
    for (const auto& tr : r.traces)
      for (const auto& [t, d] : tr.points)
        out << r.seed << "," << to_string(tr.quantity) << "," << to_string(t) << "," << to_string(d) << "\n";
  return out.str();
}

std::vector<std::string> campaign_names() {
  return {"rmf", "deligne", "collapse", "recombination", "imhm", "convergence", "fhat", "splitting", "classification", "abelian", "sl2"};
}

namespace {

template <class T>
T cycle(std::size_t i, std::initializer_list<T> xs) {
  return *(xs.begin() + i % xs.size());
}

std::string label(const Instance& in) {
  return "n=" + std::to_string(in.vars()) + " dim=" + std::to_string(in.dim()) + " " + to_string(in.kind) + "/" +
         to_string(in.mode) + (in.note.empty() ? "" : " [" + in.note + "]") + ": ";
}

InstanceResult run_one(const CampaignConfig& c, std::size_t i, const ZetaProvider& zeta) {
  const std::uint64_t seed = c.seed + i;
  const std::size_t n = 1 + i % std::max<std::size_t>(1, c.n_max);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  auto gen = [&](SystemKind k, std::size_t vars, Perturbation p) {
    return generate({k, vars, c.max_dim, seed, p, true});
  };
  auto tagged = [](const Instance& in, InstanceResult r) {
    r.detail = label(in) + r.detail;
    return r;
  };
  // Modes advance once per sweep of n so that every mode meets every n.
  const std::size_t m = i / std::max<std::size_t>(1, c.n_max);
  const std::string& t = c.theorem;
  if (t == "rmf") {
    Instance in = gen(SystemKind::Deligne, n, cycle(m, {Perturbation::None, Perturbation::Transport, Perturbation::Recombine}));
    return tagged(in, check_rmf(in.deligne, rng));
  }
  if (t == "deligne") {
    Instance in = gen(SystemKind::Deligne, n, cycle(m, {Perturbation::None, Perturbation::Transport, Perturbation::Recombine}));
    return tagged(in, check_deligne(in.deligne));
  }
  if (t == "collapse") {
    Instance in = gen(SystemKind::Deligne, n, cycle(m, {Perturbation::None, Perturbation::Transport, Perturbation::Recombine}));
    return tagged(in, check_collapse(in.deligne, c.t_grid));
  }
  if (t == "recombination") {
    Instance in = gen(SystemKind::Dh, n,
                      cycle(m, {Perturbation::Recombine, Perturbation::Hodge, Perturbation::Transport, Perturbation::None}));
    return tagged(in, check_recombination(in.dh, c.a_grid, zeta));
  }
  if (t == "imhm") {
    Instance in = gen(SystemKind::Deligne, n, cycle(m, {Perturbation::Recombine, Perturbation::Transport, Perturbation::None}));
    return tagged(in, check_imhm(in.deligne, c.a_grid, zeta));
  }
  if (t == "convergence") {
    Instance in = gen(SystemKind::Dh, n, cycle(m, {Perturbation::None, Perturbation::Transport, Perturbation::Hodge}));
    return tagged(in, check_convergence(in.dh, in.mode == Perturbation::None, c.t_grid, zeta));
  }
  if (t == "fhat") {
    Instance in = gen(SystemKind::Dh, n,
                      cycle(m, {Perturbation::None, Perturbation::Transport, Perturbation::Hodge, Perturbation::Recombine}));
    return tagged(in, check_fhat(in.dh, zeta));
  }
  if (t == "splitting") {
    Instance in = gen(SystemKind::Deligne, 1, cycle(m, {Perturbation::None, Perturbation::Transport}));
    return tagged(in, check_splitting(in.deligne, zeta));
  }
  if (t == "classification") {
    if (i % 2 == 0) {
      Instance in = gen(SystemKind::Deligne, n, Perturbation::None);
      return tagged(in, check_classification(in.deligne));
    }
    Instance in = gen(SystemKind::Dh, n, Perturbation::None);
    return tagged(in, check_classification(in.dh, zeta));
  }
  if (t == "abelian") {
    if (i % 2 == 0) {
      DeligneMorphism f = random_deligne_morphism(seed, c.max_dim);
      InstanceResult r = check_abelian(f);
      r.detail = "deligne " + std::to_string(f.source.dim()) + "->" + std::to_string(f.target.dim()) + ": " + r.detail;
      return r;
    }
    DhMorphism f = random_dh_morphism(seed, c.max_dim);
    InstanceResult r = check_abelian(f);
    r.detail = "dh " + std::to_string(f.source.dim()) + "->" + std::to_string(f.target.dim()) + ": " + r.detail;
    return r;
  }
  if (t == "sl2") {
    Instance in = gen(SystemKind::Dh, n, Perturbation::None);
    return tagged(in, check_sl2(in.dh, rng, zeta));
  }
  throw std::invalid_argument("unknown campaign '" + t + "'");
}

}  // namespace

CampaignReport run_campaign(const CampaignConfig& c) {
  auto names = campaign_names();
  if (std::find(names.begin(), names.end(), c.theorem) == names.end())
    throw std::invalid_argument("unknown campaign '" + c.theorem + "'");
  const ZetaProvider& zeta = c.zeta ? *c.zeta : domain_zeta();
  CampaignReport report;
  report.theorem = c.theorem;
  report.results.resize(c.count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < c.count; i = next++) {
      InstanceResult r;
      try {
        r = run_one(c, i, zeta);
      } catch (const ZetaRejected& e) {
        r = not_applicable(e.what());
      } catch (const std::exception& e) {
        r = result(false, std::string("error: ") + e.what());
      }
      r.seed = c.seed + i;
      report.results[i] = std::move(r);
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(c.jobs, c.count));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return report;
}

}  // namespace dhsys
