// Seeded instance generation, convergence traces along rays and the
// verification campaigns.
//
// Rays: y_j(t) = t^{2(n+1-j)} for j = 0..n, so every ratio y_j/y_{j+1} is t^2
// and beta(y) = tau_0(t) ... tau_n(t) stays rational.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dhsys/category.hpp"
#include "dhsys/sl2.hpp"

namespace dhsys {

enum class SystemKind { Deligne, Dh };

/// none: an orbit. transport: N_1 += X with X = id ⊗ c between the pieces
/// (m, k) and (m, k-2); the tower and the hats are unchanged but the system is
/// no longer an orbit. hodge: F -> exp(i y X) F for the same kind of X.
/// recombine: N_j -> N_j - sum_{k<j} c_{jk} N_k with c_{jk} in {1, 2, 3}.
enum class Perturbation { None, Transport, Hodge, Recombine };

std::string to_string(SystemKind k);
std::string to_string(Perturbation p);
std::optional<SystemKind> parse_kind(const std::string& s);
std::optional<Perturbation> parse_perturbation(const std::string& s);

struct GeneratorConfig {
  SystemKind kind = SystemKind::Dh;
  std::size_t n = 1;
  std::size_t max_dim = 8;
  std::uint64_t seed = 0;
  Perturbation mode = Perturbation::None;
  bool basis_change = true;
};

struct Instance {
  SystemKind kind = SystemKind::Dh;
  std::uint64_t seed = 0;
  Perturbation mode = Perturbation::None;
  std::vector<FamilyPiece> family;
  DeligneSystem deligne;  // kind == Deligne
  DHSystem dh;            // kind == Dh
  DeligneSystem deligne_orbit;  // the unperturbed orbit, same basis
  DHSystem dh_orbit;
  std::string note;

  std::size_t dim() const { return kind == SystemKind::Dh ? dh.dim() : deligne.dim(); }
  std::size_t vars() const { return kind == SystemKind::Dh ? dh.vars() : deligne.vars(); }
};

/// Deterministic in the config; DH instances always pass validate_dh.
Instance generate(const GeneratorConfig& c);

/// Pure Hodge structure of weight w on Q(i)^dim (dim 1 needs w even).
DecFiltration random_pure_hs(std::mt19937_64& rng, std::size_t dim, int w);

/// The table provider "0 d(-1,-1)": delta of pure type (-1,-1) has zeta = 0.
const ZetaProvider& domain_zeta();

std::vector<Rat> ray(std::size_t n, const Rat& t);  // y_1 .. y_n
Mat beta(const std::vector<Grading>& tau, const Rat& t);

/// Squared max-entry modulus of a - b.
Rat distance(const Mat& a, const Mat& b);
/// Max over p of the distance of the orthogonal projectors onto F^p.
Rat distance(const DecFiltration& a, const DecFiltration& b);

enum class TraceQuantity { Nilpotents, Hodge, Orbit, Splitting, Series };
std::string to_string(TraceQuantity q);

struct DistanceTrace {
  TraceQuantity quantity = TraceQuantity::Nilpotents;
  bool applicable = true;
  std::vector<std::pair<Rat, Rat>> points;  // (t, squared distance)
  /// Splitting only: r(t) - 1 lowers W at every t.
  bool residual_lowering = true;
  std::string witness;

  bool zero() const;
  /// Strictly decreasing, and C = max d(t) t^2 over the first half of the grid
  /// bounds d(t) t^2 on the second half.
  bool decaying() const;
  bool converged() const { return !applicable || (residual_lowering && (zero() || decaying())); }
};

/// Deligne systems support Nilpotents and Splitting; DH systems all five.
DistanceTrace convergence_trace(const DeligneSystem& s, TraceQuantity q, const std::vector<Rat>& grid);
DistanceTrace convergence_trace(const DHSystem& s, TraceQuantity q, const std::vector<Rat>& grid,
                                const ZetaProvider& zeta);

struct InstanceResult {
  std::uint64_t seed = 0;
  bool pass = false;
  bool applicable = true;
  std::string detail;
  std::vector<DistanceTrace> traces;
};

// Per-instance checks, shared by the campaigns and `verify`.
InstanceResult check_rmf(const DeligneSystem& s, std::mt19937_64& rng);
InstanceResult check_deligne(const DeligneSystem& s);
InstanceResult check_collapse(const DeligneSystem& s, const std::vector<Rat>& t_grid);
InstanceResult check_recombination(const DHSystem& s, const std::vector<Rat>& a_grid, const ZetaProvider& zeta);
InstanceResult check_imhm(const DeligneSystem& s, const std::vector<Rat>& a_grid, const ZetaProvider& zeta);
InstanceResult check_convergence(const DHSystem& s, bool orbit, const std::vector<Rat>& t_grid,
                                 const ZetaProvider& zeta);
InstanceResult check_fhat(const DHSystem& s, const ZetaProvider& zeta);
InstanceResult check_splitting(const DeligneSystem& s, const ZetaProvider& zeta);
InstanceResult check_classification(const DeligneSystem& s);
InstanceResult check_classification(const DHSystem& s, const ZetaProvider& zeta);
InstanceResult check_abelian(const DeligneMorphism& f);
InstanceResult check_abelian(const DhMorphism& f);
InstanceResult check_sl2(const DHSystem& s, std::mt19937_64& rng, const ZetaProvider& zeta);

/// id_Y ⊕ 0 : Y ⊕ Z -> Y ⊕ Z' up to random basis changes on both sides.
DeligneMorphism random_deligne_morphism(std::uint64_t seed, std::size_t max_dim);
DhMorphism random_dh_morphism(std::uint64_t seed, std::size_t max_dim);

struct CampaignConfig {
  /// rmf, deligne, collapse, recombination, imhm, convergence, fhat, splitting, classification, abelian, sl2
  std::string theorem;
  std::size_t count = 10;
  std::size_t n_max = 2;
  std::size_t max_dim = 8;
  std::uint64_t seed = 1;
  std::vector<Rat> t_grid{Rat(2), Rat(4), Rat(8), Rat(16), Rat(32)};
  std::vector<Rat> a_grid{Rat(1), Rat(4), Rat(16), Rat(64), Rat(256)};
  std::size_t jobs = 1;
  const ZetaProvider* zeta = nullptr;  // defaults to domain_zeta()
};

struct CampaignReport {
  std::string theorem;
  std::vector<InstanceResult> results;  // seed order

  std::size_t passed() const;
  std::size_t applicable() const;
  bool ok() const;
  std::string to_text() const;
  /// seed,quantity,t,squared_distance
  std::string traces_csv() const;
};

std::vector<std::string> campaign_names();
/// Throws std::invalid_argument for an unknown theorem id.
CampaignReport run_campaign(const CampaignConfig& c);

}  // namespace dhsys
