// Deligne systems (V, W, N_1..N_n, alpha): axioms, the W^(j) tower, the
// tau actions of Deligne's theorems and the associated SL(2)-orbit.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dhsys/filtration.hpp"

namespace dhsys {

/// Scalar field of a system: Q models R, Q(i) models C.
enum class Field { Rat, Gauss };

struct DeligneSystem {
  IncFiltration w;
  std::vector<Mat> n;  // N_1 .. N_n
  Grading alpha;
  Field field = Field::Rat;

  std::size_t dim() const { return w.ambient_dim(); }
  std::size_t vars() const { return n.size(); }
};

struct AxiomCheck {
  std::string name;  // "(a)", "(b)", ...
  bool ok = true;
  std::string witness;
};

struct ValidationReport {
  std::vector<AxiomCheck> checks;
  /// W^(0) .. W^(n) when (b) holds.
  std::vector<IncFiltration> tower;

  bool ok() const;
  const AxiomCheck* find(const std::string& name) const;
  std::string to_text() const;
};

/// W^(0) = W and W^(j) = RMF(N_j, W^(j-1)); nullopt at the first missing step.
std::optional<std::vector<IncFiltration>> weight_tower(const IncFiltration& w, const std::vector<Mat>& n);

/// Conditions (a)-(d), shared by Deligne and DH systems.
ValidationReport validate_monodromy(const IncFiltration& w, const std::vector<Mat>& n, Field field);
/// Conditions (a)-(e).
ValidationReport validate(const DeligneSystem& s);

/// tau_0 of Deligne's first theorem for the one-variable system (V, W, N, alpha).
/// Throws std::runtime_error if the construction does not verify.
Grading tau_pair(const IncFiltration& w, const Mat& n, const Grading& alpha);

/// Re-checks (i)-(iii) of the first theorem for a candidate tau_0.
AxiomCheck check_tau_pair(const IncFiltration& w, const Mat& n, const Grading& alpha, const Grading& tau0);

/// tau_0 .. tau_n (tau_n = alpha). Needs the tower from validate.
std::vector<Grading> tau_tuple(const DeligneSystem& s, const std::vector<IncFiltration>& tower);
std::vector<Grading> tau_tuple(const DeligneSystem& s);

/// Re-checks (i)-(v) of the second theorem.
AxiomCheck check_tau_tuple(const DeligneSystem& s, const std::vector<IncFiltration>& tower,
                           const std::vector<Grading>& tau);

/// N-hat_j = weight-0 part of N_j for tau_{j-1}.
std::vector<Mat> nhat(const DeligneSystem& s, const std::vector<Grading>& tau);

/// (V, W, N-hat_1..N-hat_n, alpha).
DeligneSystem associated_sl2(const DeligneSystem& s);

struct CollapseResult {
  std::optional<DeligneSystem> system;
  std::string diagnostic;
};

/// (V, W, sum y_j N_j, alpha) when the alpha filtration is the RMF of the sum.
CollapseResult one_variable_collapse(const DeligneSystem& s, const std::vector<Rat>& y);

/// A grading splitting W and commuting with g (W must be g-stable).
Grading compatible_splitting(const IncFiltration& w, const Grading& g);

}  // namespace dhsys
