// Deligne-Hodge systems (V, W, N_1..N_n, F), the functors to and from Deligne
// systems, the associated SL(2)-orbit and the IMHM checks.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dhsys/deligne.hpp"
#include "dhsys/hodge.hpp"

namespace dhsys {

/// V is real (Q-model of R); F lives on V_C.
struct DHSystem {
  IncFiltration w;
  std::vector<Mat> n;
  DecFiltration f;

  std::size_t dim() const { return w.ambient_dim(); }
  std::size_t vars() const { return n.size(); }
};

/// Conditions (a)-(d), (f1), (f2); (f2) also on U = W^(k)_w for 1 <= k < n.
ValidationReport validate_dh(const DHSystem& s);

/// Everything derived from a valid DH system.
struct DhData {
  std::vector<IncFiltration> tower;
  DeltaSplitting delta;  // of (W^(n), F)
  DeligneSystem deligne;  // alpha = canonical splitting of W^(n)
  std::vector<Grading> tau;
  std::vector<Mat> nhat;
  DecFiltration fhat;
};

/// Throws std::invalid_argument if s is not a DH system, ZetaRejected if the
/// provider rejects delta.
DhData derive(const DHSystem& s, const ZetaProvider& zeta);

DeligneSystem to_deligne(const DHSystem& s, const ZetaProvider& zeta);
/// The DH system on V + V; a Gauss system is first restricted to Q.
DHSystem from_deligne(const DeligneSystem& s);

/// s(F(gr)) for a grading s splitting W: F-hat^p = sum_w s_w ∩ (F^p + W_{w-1}).
DecFiltration graded_transport(const Grading& s, const IncFiltration& w, const DecFiltration& f);
DecFiltration fhat(const DHSystem& s, const ZetaProvider& zeta);
DHSystem associated_sl2_dh(const DHSystem& s, const ZetaProvider& zeta);

/// N'_j = sum_{k<=j} a[j][k] N_k (a lower triangular, 0-based).
std::vector<Mat> recombine(const std::vector<Mat>& n, const std::vector<std::vector<Rat>>& a);
/// a_{j,k} = level^{j-k}.
std::vector<std::vector<Rat>> geometric_coefficients(std::size_t n, const Rat& level);

struct ImhmCertificate {
  bool a = false, f1 = false, g = false, h = false;
  std::map<int, GradedForm> forms;
  std::vector<std::vector<Rat>> samples;
  std::string witness;

  bool ok() const { return a && f1 && g && h; }
  std::string to_text() const;
};

/// (a), (f1), (h) exactly; (g) with the forms of the associated SL(2)-orbit,
/// checked for N-invariance and for positivity at the given samples only.
ImhmCertificate imhm_check(const DHSystem& s, const std::vector<std::vector<Rat>>& samples,
                           const ZetaProvider& zeta);

/// The sample set {1, 4, 16}^n.
std::vector<std::vector<Rat>> default_samples(std::size_t n);

struct RecombinationResult {
  bool found = false;
  Rat level;  // smallest passing grid level
  std::vector<std::vector<Rat>> coefficients;
  std::vector<std::pair<Rat, bool>> scan;
  bool persistent = true;  // every later level passed too
  bool revalidates = false;  // certified system passes validate_dh
};

RecombinationResult recombination_search(const DHSystem& s, const std::vector<Rat>& grid,
                       const std::vector<std::vector<Rat>>& samples, const ZetaProvider& zeta);

/// N'_j = sum_{k=0}^{j-1} a^k/k! N_{j-k}.
DHSystem theta_twist(const DHSystem& s, const Rat& a);

}  // namespace dhsys
