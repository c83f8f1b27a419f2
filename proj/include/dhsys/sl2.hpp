// SL(2)-orbits: the orbit predicate, the classification by families H_{m,k}
// (decompose / reconstruct), the one-variable restriction check and the
// polarization of an orbit.
//
// Conventions. Sym^m of the standard representation has basis s_0..s_m with
// N s_i = (m-i+1) s_{i-1}, N+ s_i = (i+1) s_{i+1} and diag(1/a, a) acting on s_i
// by a^{2i-m}. For a Deligne orbit the piece Sym^m ⊗ S_k ⊗ H has
// tau_0-weight k and tau_j-weight k + sum_{l<=j} (2 i_l - m_l). For a DH orbit
// each P_j carries G_m-weight 1, so tau_0 = |m| + k (k the Hodge weight of H)
// and F on the piece is F^p = span{ s_i ⊗ x : x in F^{p - |i|} H }.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "dhsys/dh.hpp"

namespace dhsys {

bool is_orbit(const DeligneSystem& s);
bool is_orbit(const DHSystem& s, const ZetaProvider& zeta);
/// Orbit test against a known tau tuple (and F-hat condition when f is given).
bool is_orbit(const std::vector<Mat>& n, const std::vector<Grading>& tau, const DecFiltration* f);

/// One multiplicity space H_{m,k}: a dimension (Deligne) or a pure Hodge
/// structure of weight k on Q(i)^dim (DH).
struct FamilyPiece {
  std::vector<int> m;
  int k = 0;
  std::size_t dim = 0;
  std::optional<DecFiltration> hodge;
};

struct OrbitComponent {
  FamilyPiece piece;
  Mat basis;  // columns in V spanning H_{m,k}
};

struct OrbitDecomposition {
  std::size_t n = 0;
  bool hodge = false;
  std::vector<OrbitComponent> components;
  /// Columns: images in V of the reconstructed basis, so V = iso(reconstruct).
  Mat iso;

  std::vector<FamilyPiece> family() const;
};

/// Throws std::invalid_argument if s is not an orbit, std::logic_error if the
/// pieces do not exhaust V.
OrbitDecomposition decompose(const DeligneSystem& s);
OrbitDecomposition decompose(const DHSystem& s, const ZetaProvider& zeta);

DeligneSystem reconstruct_deligne(std::size_t n, const std::vector<FamilyPiece>& family);
DHSystem reconstruct_dh(std::size_t n, const std::vector<FamilyPiece>& family);

/// Number of basis vectors of Sym^{m(1)} ⊗ ... ⊗ Sym^{m(n)} ⊗ H.
std::size_t piece_dim(const FamilyPiece& p);

/// verify_rmf(W^(j), sum_{t=l+1}^k y_t N_t, W^(k)); y holds y_{l+1}..y_k.
bool restriction_check(const DeligneSystem& s, std::size_t l, std::size_t j, std::size_t k, const std::vector<Rat>& y);

/// Form on each gr^W_w (coordinates of quotient_map(W_w, W_{w-1})) built from
/// <s_1, s_0> = 1 on each P_j and a polarization of each H_{m,k}.
std::map<int, GradedForm> orbit_polarization(const DHSystem& s, const ZetaProvider& zeta);
/// Same, for an orbit whose tau tuple is already known.
std::map<int, GradedForm> orbit_polarization(const DHSystem& s, const std::vector<Grading>& tau);

/// Gram matrix of the induced form on Sym^m(P) in the basis s_i.
Mat sym_gram(int m);

/// The sl(2)-partner X of N with [H, X] = 2X, [X, N] = H; nullopt if none.
std::optional<Mat> sl2_partner(const Mat& h, const Mat& n);
/// Same, with H given by its eigenspace grading.
std::optional<Mat> sl2_partner(const Grading& h, const Mat& n);

}  // namespace dhsys
