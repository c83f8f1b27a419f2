#include "dhsys/deligne.hpp"

#include <sstream>
#include <stdexcept>

namespace dhsys {

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return true;
}

const AxiomCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << c.name << ' ' << (c.ok ? "pass" : "FAIL");
    if (!c.ok && !c.witness.empty()) out << ": " << c.witness;
    out << '\n';
  }
  return out.str();
}

std::optional<std::vector<IncFiltration>> weight_tower(const IncFiltration& w, const std::vector<Mat>& n) {
  std::vector<IncFiltration> tower{w};
  for (const auto& nj : n) {
    auto next = compute_rmf(tower.back(), nj);
    if (!next) return std::nullopt;
    tower.push_back(std::move(*next));
  }
  return tower;
}

namespace {

AxiomCheck failed(std::string name, std::string witness) { return AxiomCheck{std::move(name), false, std::move(witness)}; }

std::string idx(std::size_t j) { return std::to_string(j + 1); }

}  // namespace

ValidationReport validate_monodromy(const IncFiltration& w, const std::vector<Mat>& n, Field field) {
  ValidationReport rep;
  const std::size_t dim = w.ambient_dim();

  AxiomCheck a{"(a)", true, ""};
  for (std::size_t j = 0; j < n.size() && a.ok; ++j) {
    if (n[j].rows() != dim || n[j].cols() != dim) a = failed("(a)", "N_" + idx(j) + " has the wrong size");
    else if (field == Field::Rat && !n[j].is_real()) a = failed("(a)", "N_" + idx(j) + " is not real");
    else if (!is_nilpotent(n[j])) a = failed("(a)", "N_" + idx(j) + " is not nilpotent");
    else if (!w.respected_by(n[j])) a = failed("(a)", "N_" + idx(j) + " does not respect W");
    for (std::size_t k = 0; k < j && a.ok; ++k)
      if (!(n[j] * n[k] == n[k] * n[j])) a = failed("(a)", "N_" + idx(k) + " and N_" + idx(j) + " do not commute");
  }
  if (a.ok && field == Field::Rat) {
    for (int k = w.lo(); k <= w.hi(); ++k)
      if (!w.step(k).is_conj_stable()) a = failed("(a)", "W_" + std::to_string(k) + " is not defined over Q");
  }
  rep.checks.push_back(a);
  if (!a.ok) {
    for (const char* name : {"(b)", "(c)", "(d)"}) rep.checks.push_back(failed(name, "not checked: (a) fails"));
    return rep;
  }

  AxiomCheck b{"(b)", true, ""};
  std::vector<IncFiltration> tower{w};
  for (std::size_t j = 0; j < n.size(); ++j) {
    auto next = compute_rmf(tower.back(), n[j]);
    if (!next) {
      b = failed("(b)", "no relative monodromy filtration of N_" + idx(j) + " with respect to W^(" +
                            std::to_string(j) + ")");
      break;
    }
    tower.push_back(std::move(*next));
  }
  rep.checks.push_back(b);
  if (!b.ok) {
    for (const char* name : {"(c)", "(d)"}) rep.checks.push_back(failed(name, "not checked: (b) fails"));
    return rep;
  }
  rep.tower = tower;

  AxiomCheck d{"(d)", true, ""};
  for (std::size_t j = 0; j < n.size() && d.ok; ++j)
    for (std::size_t k = 0; k <= n.size() && d.ok; ++k) {
      if (!tower[k].respected_by(n[j])) d = failed("(d)", "N_" + idx(j) + " does not preserve W^(" + std::to_string(k) + ")");
      else if (k >= j + 1 && !tower[k].respected_by(n[j], -2))
        d = failed("(d)", "N_" + idx(j) + " does not lower W^(" + std::to_string(k) + ") by 2");
    }

  AxiomCheck c{"(c)", true, ""};
  for (std::size_t j = 1; j <= n.size() && c.ok; ++j)
    for (std::size_t k = 0; k + 1 < j && c.ok; ++k)
      for (int weight : tower[k].jumps()) {
        Subspace u = tower[k].step(weight);
        std::string where = "j=" + std::to_string(j) + ", k=" + std::to_string(k) + ", w=" + std::to_string(weight);
        if (!u.contains(image(n[j - 1], u))) {
          c = failed("(c)", "N_" + std::to_string(j) + " does not preserve U at " + where);
          break;
        }
        RmfReport r = verify_rmf(tower[j - 1].restricted(u), restrict_operator(u, n[j - 1]), tower[j].restricted(u));
        if (!r.ok) {
          c = failed("(c)", "restriction to U is not the relative monodromy filtration at " + where + " " + r.condition);
          break;
        }
      }
  rep.checks.push_back(c);
  rep.checks.push_back(d);
  return rep;
}

ValidationReport validate(const DeligneSystem& s) {
  ValidationReport rep = validate_monodromy(s.w, s.n, s.field);
  AxiomCheck e{"(e)", true, ""};
  if (s.alpha.ambient_dim() != s.dim()) {
    e = failed("(e)", "alpha acts on a space of the wrong dimension");
  } else if (s.field == Field::Rat && !s.alpha.is_real()) {
    e = failed("(e)", "alpha is not defined over Q");
  } else if (rep.tower.empty()) {
    e = failed("(e)", "not checked: no weight tower");
  } else {
    const std::size_t n = s.vars();
    if (!s.alpha.splits(rep.tower[n])) e = failed("(e)", "alpha does not split W^(" + std::to_string(n) + ")");
    for (std::size_t j = 0; j < n && e.ok; ++j)
      for (int k = rep.tower[j].lo(); k < rep.tower[j].hi(); ++k)
        if (!s.alpha.is_stable(rep.tower[j].step(k))) {
          e = failed("(e)", "W^(" + std::to_string(j) + ")_" + std::to_string(k) + " is not alpha-stable");
          break;
        }
    for (std::size_t j = 0; j < n && e.ok; ++j)
      if (!s.alpha.has_weight(s.n[j], -2)) e = failed("(e)", "N_" + idx(j) + " is not of alpha-weight -2");
  }
  rep.checks.push_back(e);
  return rep;
}

Grading compatible_splitting(const IncFiltration& w, const Grading& g) {
  const std::size_t n = w.ambient_dim();
  if (n == 0) return Grading(0, {});
  std::map<int, std::vector<Vec>> parts;
  for (const auto& [a, piece] : g.parts()) {
    IncFiltration inner = w.restricted(piece);
    Grading split = splitting_of(inner);
    Mat cols = piece.basis_columns();
    for (const auto& [k, sub] : split.parts())
      for (const auto& x : sub.basis_vectors()) parts[k].push_back(cols * x);
  }
  std::map<int, Subspace> out;
  for (const auto& [k, vs] : parts) out[k] = Subspace::span(n, vs);
  Grading result(n, out);
  if (!result.splits(w)) throw std::invalid_argument("filtration is not stable under the grading");
  return result;
}

namespace {

Mat ad_power(const Mat& n0, Mat x, int k) {
  for (int r = 0; r < k; ++r) x = n0 * x - x * n0;
  return x;
}

Mat mask(const Mat& x, const std::vector<int>& yw, int k) {
  Mat out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (yw[i] - yw[j] == k) out(i, j) = x(i, j);
  return out;
}

}  // namespace

AxiomCheck check_tau_pair(const IncFiltration& w, const Mat& n, const Grading& alpha, const Grading& tau0) {
  if (!tau0.splits(w)) return failed("tau", "tau_0 does not split W");
  if (!tau0.commutes_with(alpha)) return failed("tau", "tau_0 does not commute with tau_1");
  auto comps = tau0.components(n);
  Mat n0 = comps.count(0) ? comps.at(0) : Mat(n.rows(), n.cols());
  for (const auto& [k, c] : comps) {
    if (k > 0) return failed("tau", "N has a component of positive tau_0-weight");
    if (k == -1) return failed("tau", "N_{-1} != 0");
    if (k <= -2 && !ad_power(n0, c, -k - 1).is_zero())
      return failed("tau", "N_{" + std::to_string(k) + "} is not primitive");
  }
  return AxiomCheck{"tau", true, ""};
}

Grading tau_pair(const IncFiltration& w, const Mat& n, const Grading& alpha) {
  const std::size_t dim = w.ambient_dim();
  if (dim == 0) return Grading(0, {});
  Grading y0 = compatible_splitting(w, alpha);

  // Joint eigenbasis of the initial splitting and alpha.
  std::vector<Vec> cols;
  std::vector<int> yw, aw;
  for (const auto& [k, py] : y0.parts())
    for (const auto& [a, pa] : alpha.parts()) {
      Subspace both = intersect(py, pa);
      for (const auto& x : both.basis_vectors()) {
        cols.push_back(x);
        yw.push_back(k);
        aw.push_back(a);
      }
    }
  if (cols.size() != dim) throw std::invalid_argument("tau_pair: splitting does not commute with alpha");
  Mat p = Mat::from_cols(cols, dim);
  Mat pinv = *inverse(p);
  Mat nb = pinv * n * p;
  Mat n0 = mask(nb, yw, 0);

  // u has negative weight for the splitting and weight 0 for alpha; the
  // weight -k part is fixed at step k by a linear equation in Ad(N_0).
  Mat u(dim, dim);
  const int depth = w.hi() - w.lo();
  for (int k = 1; k <= depth; ++k) {
    Mat moved = exp_nilpotent(-u) * nb * exp_nilpotent(u);
    Mat r = mask(moved, yw, -k);
    Mat rhs = -ad_power(n0, r, k - 1);
    if (rhs.is_zero()) continue;
    std::vector<std::pair<std::size_t, std::size_t>> unknowns;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        if (yw[i] - yw[j] == -k && aw[i] == aw[j]) unknowns.push_back({i, j});
    Mat system(dim * dim, unknowns.size());
    for (std::size_t c = 0; c < unknowns.size(); ++c) {
      Mat e(dim, dim);
      e(unknowns[c].first, unknowns[c].second) = GRat(1);
      system.set_col(c, vectorize(ad_power(n0, e, k)));
    }
    auto sol = solve(system, vectorize(rhs));
    if (!sol) throw std::runtime_error("tau_pair: no correction exists at weight -" + std::to_string(k));
    for (std::size_t c = 0; c < unknowns.size(); ++c) u(unknowns[c].first, unknowns[c].second) += (*sol)[c];
  }
  Grading tau0 = Grading::from_basis(p * exp_nilpotent(u), yw);
  AxiomCheck check = check_tau_pair(w, n, alpha, tau0);
  if (!check.ok) throw std::runtime_error("tau_pair: result fails verification: " + check.witness);
  return tau0;
}

std::vector<Grading> tau_tuple(const DeligneSystem& s, const std::vector<IncFiltration>& tower) {
  const std::size_t n = s.vars();
  if (tower.size() != n + 1) throw std::invalid_argument("tau_tuple: tower has the wrong length");
  std::vector<Grading> tau(n + 1);
  tau[n] = s.alpha;
  for (std::size_t j = n; j >= 1; --j) tau[j - 1] = tau_pair(tower[j - 1], s.n[j - 1], tau[j]);
  AxiomCheck check = check_tau_tuple(s, tower, tau);
  if (!check.ok) throw std::runtime_error("tau_tuple: result fails verification: " + check.witness);
  return tau;
}

std::vector<Grading> tau_tuple(const DeligneSystem& s) {
  ValidationReport rep = validate(s);
  if (!rep.ok()) throw std::invalid_argument("tau_tuple needs a valid Deligne system:\n" + rep.to_text());
  return tau_tuple(s, rep.tower);
}

AxiomCheck check_tau_tuple(const DeligneSystem& s, const std::vector<IncFiltration>& tower,
                           const std::vector<Grading>& tau) {
  const std::size_t n = s.vars();
  if (tau.size() != n + 1) return failed("tau", "wrong number of gradings");
  if (!(tau[n] == s.alpha)) return failed("(i)", "tau_n != alpha");
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t k = 0; k < j; ++k)
      if (!tau[j].commutes_with(tau[k])) return failed("tau", "tau_" + std::to_string(k) + " and tau_" + std::to_string(j) + " do not commute");
  for (std::size_t j = 1; j <= n; ++j) {
    AxiomCheck pair = check_tau_pair(tower[j - 1], s.n[j - 1], tau[j], tau[j - 1]);
    if (!pair.ok) return failed("(ii)", "pair j=" + std::to_string(j) + ": " + pair.witness);
  }
  for (std::size_t j = 0; j <= n; ++j)
    if (!tau[j].splits(tower[j])) return failed("(iii)", "tau_" + std::to_string(j) + " does not split W^(" + std::to_string(j) + ")");
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t k = j; k <= n; ++k)
      if (!tau[k].has_weight(s.n[j - 1], -2))
        return failed("(iv)", "N_" + std::to_string(j) + " is not of weight -2 for tau_" + std::to_string(k));
  for (std::size_t j = 1; j <= n; ++j) {
    Mat hat = tau[j - 1].component(s.n[j - 1], 0);
    for (std::size_t k = 0; k < j; ++k)
      if (!tau[k].has_weight(hat, 0))
        return failed("(v)", "N-hat_" + std::to_string(j) + " is not of weight 0 for tau_" + std::to_string(k));
  }
  return AxiomCheck{"tau", true, ""};
}

std::vector<Mat> nhat(const DeligneSystem& s, const std::vector<Grading>& tau) {
  std::vector<Mat> out;
  for (std::size_t j = 1; j <= s.vars(); ++j) out.push_back(tau[j - 1].component(s.n[j - 1], 0));
  return out;
}

DeligneSystem associated_sl2(const DeligneSystem& s) {
  DeligneSystem out = s;
  out.n = nhat(s, tau_tuple(s));
  return out;
}

CollapseResult one_variable_collapse(const DeligneSystem& s, const std::vector<Rat>& y) {
  if (y.size() != s.vars()) throw DimensionError("one weight y_j per operator expected");
  Mat total(s.dim(), s.dim());
  for (std::size_t j = 0; j < y.size(); ++j) total += GRat(y[j]) * s.n[j];
  RmfReport r = verify_rmf(s.w, total, weight_filtration_of(s.alpha));
  CollapseResult out;
  if (r.ok) {
    out.system = DeligneSystem{s.w, {total}, s.alpha, s.field};
  } else {
    out.diagnostic = "alpha filtration is not the relative monodromy filtration of sum y_j N_j: " + r.condition +
                     " " + r.detail;
  }
  return out;
}

}  // namespace dhsys
