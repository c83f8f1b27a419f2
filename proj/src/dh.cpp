#include "dhsys/dh.hpp"

#include <sstream>
#include <stdexcept>

#include "dhsys/category.hpp"
#include "dhsys/sl2.hpp"

namespace dhsys {

namespace {

AxiomCheck failed(std::string name, std::string witness) { return AxiomCheck{std::move(name), false, std::move(witness)}; }

Mat sum_iy(const std::vector<Mat>& n, const std::vector<Rat>& y, std::size_t dim) {
  Mat total(dim, dim);
  for (std::size_t j = 0; j < n.size(); ++j) total += GRat(Rat(0), y[j]) * n[j];
  return total;
}

}  // namespace

ValidationReport validate_dh(const DHSystem& s) {
  ValidationReport rep = validate_monodromy(s.w, s.n, Field::Rat);
  const std::size_t n = s.vars();

  AxiomCheck f1{"(f1)", true, ""};
  if (s.f.ambient_dim() != s.dim()) f1 = failed("(f1)", "F lives on a space of the wrong dimension");
  for (std::size_t j = 0; j < n && f1.ok; ++j)
    for (int p = s.f.lo(); p <= s.f.hi() + 1; ++p)
      if (!s.f.step(p - 1).contains(image(s.n[j], s.f.step(p)))) {
        f1 = failed("(f1)", "N_" + std::to_string(j + 1) + " F^" + std::to_string(p) + " is not inside F^" +
                                std::to_string(p - 1));
        break;
      }
  rep.checks.push_back(f1);

  AxiomCheck f2{"(f2)", true, ""};
  if (s.f.ambient_dim() != s.dim()) {
    f2 = failed("(f2)", "F lives on a space of the wrong dimension");
  } else if (rep.tower.empty()) {
    f2 = failed("(f2)", "not checked: no weight tower");
  } else {
    MhsReport top = is_mhs(rep.tower[n], s.f);
    if (!top.ok) f2 = failed("(f2)", "(W^(n), F) is not a mixed Hodge structure at weight " + std::to_string(top.weight));
    for (std::size_t k = 1; k < n && f2.ok; ++k)
      for (int w : rep.tower[k].jumps()) {
        Subspace u = rep.tower[k].step(w);
        MhsReport r = is_mhs(rep.tower[n].restricted(u), s.f.restricted(u));
        if (!r.ok) {
          f2 = failed("(f2)", "restriction to U = W^(" + std::to_string(k) + ")_" + std::to_string(w) +
                                  " is not a mixed Hodge structure at weight " + std::to_string(r.weight));
          break;
        }
      }
  }
  rep.checks.push_back(f2);
  return rep;
}

DecFiltration graded_transport(const Grading& s, const IncFiltration& w, const DecFiltration& f) {
  const std::size_t dim = w.ambient_dim();
  std::map<int, Subspace> steps;
  for (int p = f.lo(); p <= f.hi() + 1; ++p) {
    Subspace acc = Subspace::zero(dim);
    for (const auto& [v, part] : s.parts()) acc = sum(acc, intersect(part, sum(f.step(p), w.step(v - 1))));
    steps[p] = acc;
  }
  return DecFiltration::from_map(dim, steps);
}

DhData derive(const DHSystem& s, const ZetaProvider& zeta) {
  ValidationReport rep = validate_dh(s);
  if (!rep.ok()) throw std::invalid_argument("not a DH system:\n" + rep.to_text());
  const std::size_t n = s.vars();
  DhData d;
  d.tower = rep.tower;
  d.delta = delta_splitting(d.tower[n], s.f);
  Grading alpha = canonical_splitting(d.delta, zeta);
  d.deligne = DeligneSystem{s.w, s.n, alpha, Field::Rat};
  ValidationReport drep = validate(d.deligne);
  if (!drep.ok()) throw std::logic_error("canonical splitting does not give a Deligne system:\n" + drep.to_text());
  d.tau = tau_tuple(d.deligne, d.tower);
  d.nhat = nhat(d.deligne, d.tau);
  d.fhat = graded_transport(alpha, d.tower[n], s.f);
  return d;
}

DeligneSystem to_deligne(const DHSystem& s, const ZetaProvider& zeta) { return derive(s, zeta).deligne; }

DHSystem from_deligne(const DeligneSystem& input) {
  const DeligneSystem s = input.field == Field::Gauss ? restrict_scalars(input) : input;
  const std::size_t d = s.dim();
  auto doubled = [d](const Subspace& u) {
    std::vector<Vec> vs;
    for (const auto& x : u.basis_vectors()) {
      Vec a(2 * d), b(2 * d);
      for (std::size_t i = 0; i < d; ++i) {
        a[i] = x[i];
        b[d + i] = x[i];
      }
      vs.push_back(a);
      vs.push_back(b);
    }
    return Subspace::span(2 * d, vs);
  };
  std::map<int, Subspace> wsteps;
  for (int k = s.w.lo(); k <= s.w.hi(); ++k) wsteps[k] = doubled(s.w.step(k));
  std::vector<Mat> n;
  for (const auto& nj : s.n) n.push_back(direct_sum(nj, nj));

  auto floor_half = [](int w) { return w >= 0 ? w / 2 : -((-w + 1) / 2); };
  int plo = 0, phi = 0;
  bool first = true;
  for (const auto& [w, part] : s.alpha.parts()) {
    int r = floor_half(w);
    plo = first ? r : std::min(plo, r);
    phi = first ? r + 1 : std::max(phi, r + 1);
    first = false;
  }
  std::map<int, Subspace> fsteps;
  for (int p = plo; p <= phi + 1; ++p) {
    std::vector<Vec> vs;
    for (const auto& [w, part] : s.alpha.parts()) {
      int r = floor_half(w);
      for (const auto& x : part.basis_vectors()) {
        if (p <= r) {
          Vec a(2 * d), b(2 * d);
          for (std::size_t i = 0; i < d; ++i) {
            a[i] = x[i];
            b[d + i] = x[i];
          }
          vs.push_back(a);
          vs.push_back(b);
        } else if (w % 2 != 0 && p == r + 1) {
          Vec c(2 * d);
          for (std::size_t i = 0; i < d; ++i) {
            c[i] = GRat::i() * x[i];
            c[d + i] = x[i];
          }
          vs.push_back(c);
        }
      }
    }
    fsteps[p] = Subspace::span(2 * d, vs);
  }
  if (d == 0) fsteps = {{0, Subspace::zero(0)}};
  return DHSystem{IncFiltration::from_map(2 * d, wsteps), n, DecFiltration::from_map(2 * d, fsteps)};
}

DecFiltration fhat(const DHSystem& s, const ZetaProvider& zeta) { return derive(s, zeta).fhat; }

DHSystem associated_sl2_dh(const DHSystem& s, const ZetaProvider& zeta) {
  DhData d = derive(s, zeta);
  return DHSystem{s.w, d.nhat, d.fhat};
}

std::vector<Mat> recombine(const std::vector<Mat>& n, const std::vector<std::vector<Rat>>& a) {
  std::vector<Mat> out;
  for (std::size_t j = 0; j < n.size(); ++j) {
    Mat acc(n[j].rows(), n[j].cols());
    for (std::size_t k = 0; k <= j; ++k)
      if (sgn(a[j][k]) != 0) acc += GRat(a[j][k]) * n[k];
    out.push_back(acc);
  }
  return out;
}

std::vector<std::vector<Rat>> geometric_coefficients(std::size_t n, const Rat& level) {
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k <= j; ++k) a[j][k] = rat_pow(level, static_cast<long>(j - k));
  return a;
}

std::string ImhmCertificate::to_text() const {
  std::ostringstream out;
  out << "(a) " << (a ? "pass" : "FAIL") << '\n';
  out << "(f1) " << (f1 ? "pass" : "FAIL") << '\n';
  out << "(g) " << (g ? "pass" : "FAIL") << " at " << samples.size() << " sample points (positivity is certified at these points only)\n";
  out << "(h) " << (h ? "pass" : "FAIL") << '\n';
  if (!witness.empty()) out << "witness: " << witness << '\n';
  return out.str();
}

std::vector<std::vector<Rat>> default_samples(std::size_t n) {
  std::vector<std::vector<Rat>> out{{}};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Rat>> next;
    for (const auto& y : out)
      for (long v : {1, 4, 16}) {
        auto z = y;
        z.push_back(Rat(v));
        next.push_back(z);
      }
    out = next;
  }
  return out;
}

ImhmCertificate imhm_check(const DHSystem& s, const std::vector<std::vector<Rat>>& samples, const ZetaProvider& zeta) {
  ImhmCertificate cert;
  cert.samples = samples;
  auto note = [&](const std::string& w) {
    if (cert.witness.empty()) cert.witness = w;
  };
  ValidationReport mono = validate_monodromy(s.w, s.n, Field::Rat);
  cert.a = mono.find("(a)")->ok;
  if (!cert.a) note(mono.find("(a)")->witness);

  cert.f1 = true;
  for (std::size_t j = 0; j < s.vars(); ++j)
    if (!s.f.respected_by(s.n[j], -1)) {
      cert.f1 = false;
      note("N_" + std::to_string(j + 1) + " does not map F^p into F^{p-1}");
    }

  cert.h = cert.a;
  for (std::size_t j = 0; j < s.vars() && cert.h; ++j)
    if (!compute_rmf(s.w, s.n[j])) {
      cert.h = false;
      note("no relative monodromy filtration of N_" + std::to_string(j + 1) + " with respect to W");
    }

  cert.g = false;
  if (!cert.a || !cert.f1) return cert;
  try {
    DhData d = derive(s, zeta);
    cert.forms = orbit_polarization(DHSystem{s.w, d.nhat, d.fhat}, d.tau);
  } catch (const std::exception& e) {
    note(std::string("no orbit forms: ") + e.what());
    return cert;
  }
  cert.g = true;
  for (int w : s.w.jumps()) {
    QuotientMap q(s.w.step(w), s.w.step(w - 1));
    const GradedForm& form = cert.forms.at(w);
    for (std::size_t j = 0; j < s.vars() && cert.g; ++j) {
      Mat nj = q.induced(s.n[j]);
      if (!(nj.transpose() * form.gram + form.gram * nj).is_zero()) {
        cert.g = false;
        note("form on gr_" + std::to_string(w) + " is not N_" + std::to_string(j + 1) + "-invariant");
      }
    }
    for (const auto& y : samples) {
      if (!cert.g) break;
      DecFiltration fy = s.f.transformed(exp_nilpotent(sum_iy(s.n, y, s.dim())));
      PolarizationReport r = verify_polarization(form, induced_on_graded(fy, s.w, w));
      if (!r.ok) {
        cert.g = false;
        std::ostringstream msg;
        msg << "gr_" << w << " not polarized at y = (";
        for (std::size_t j = 0; j < y.size(); ++j) msg << (j ? "," : "") << to_string(y[j]);
        msg << "): " << r.detail;
        note(msg.str());
      }
    }
  }
  return cert;
}

RecombinationResult recombination_search(const DHSystem& s, const std::vector<Rat>& grid, const std::vector<std::vector<Rat>>& samples,
                       const ZetaProvider& zeta) {
  RecombinationResult out;
  for (const Rat& level : grid) {
    auto coeffs = geometric_coefficients(s.vars(), level);
    DHSystem r{s.w, recombine(s.n, coeffs), s.f};
    bool pass = imhm_check(r, samples, zeta).ok();
    out.scan.push_back({level, pass});
    if (pass && !out.found) {
      out.found = true;
      out.level = level;
      out.coefficients = coeffs;
      out.revalidates = validate_dh(r).ok();
    } else if (!pass && out.found) {
      out.persistent = false;
    }
  }
  return out;
}

DHSystem theta_twist(const DHSystem& s, const Rat& a) {
  DHSystem out = s;
  for (std::size_t j = 0; j < s.vars(); ++j) {
    Mat acc(s.dim(), s.dim());
    Rat coeff(1);
    for (std::size_t k = 0; k <= j; ++k) {
      if (k > 0) coeff = coeff * a / Rat(static_cast<long>(k));
      if (sgn(coeff) != 0) acc += GRat(coeff) * s.n[j - k];
    }
    out.n[j] = acc;
  }
  return out;
}

}  // namespace dhsys
