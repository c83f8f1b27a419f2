// Morphisms, kernels and cokernels with induced structures, the standard
// constructors (direct sum, tensor, Sym, wedge, dual, Tate twist) and the
// scalar changes between the Q- and Q(i)-models.
//
// Conventions: W and F of a tensor product are convolutions; N acts by the
// Leibniz rule; alpha-weights add. On the dual, N acts by -N^T, W*_w is the
// annihilator of W_{-w-1}, F*^p the annihilator of F^{1-p}, alpha-weights
// negate. Tate twist (r): W shifts by -2r, F by -r, alpha-weights by -2r.
#pragma once

#include <string>

#include "dhsys/dh.hpp"

namespace dhsys {

struct DeligneMorphism {
  DeligneSystem source;
  DeligneSystem target;
  Mat map;  // target.dim() x source.dim()
};

struct DhMorphism {
  DHSystem source;
  DHSystem target;
  Mat map;
};

/// Empty when the map respects all structure; otherwise the first violation.
std::string morphism_defect(const DeligneMorphism& f);
std::string morphism_defect(const DhMorphism& f);

template <class T>
struct Sub {
  T object;
  Mat inclusion;  // columns: basis of the subspace in the ambient coordinates
};

template <class T>
struct Quot {
  T object;
  Mat projection;  // quotient coordinates of the ambient space
};

/// Induced structures on an invariant subspace / quotient.
DeligneSystem induced_sub(const DeligneSystem& s, const Subspace& u);
DeligneSystem induced_quotient(const DeligneSystem& s, const Subspace& u, Mat* projection = nullptr);
DHSystem induced_sub(const DHSystem& s, const Subspace& u);
DHSystem induced_quotient(const DHSystem& s, const Subspace& u, Mat* projection = nullptr);

Sub<DeligneSystem> kernel(const DeligneMorphism& f);
Quot<DeligneSystem> cokernel(const DeligneMorphism& f);
Sub<DHSystem> kernel(const DhMorphism& f);
Quot<DHSystem> cokernel(const DhMorphism& f);

/// Checks that the canonical map coim f -> im f is an isomorphism of systems;
/// empty string on success.
std::string coimage_image_defect(const DeligneMorphism& f);
std::string coimage_image_defect(const DhMorphism& f);

DeligneSystem direct_sum(const DeligneSystem& a, const DeligneSystem& b);
DHSystem direct_sum(const DHSystem& a, const DHSystem& b);
/// Coordinates e_i ⊗ f_j at index i * dim(b) + j.
DeligneSystem tensor(const DeligneSystem& a, const DeligneSystem& b);
DHSystem tensor(const DHSystem& a, const DHSystem& b);
DeligneSystem sym(const DeligneSystem& a, int m);
DHSystem sym(const DHSystem& a, int m);
DeligneSystem wedge(const DeligneSystem& a, int m);
DHSystem wedge(const DHSystem& a, int m);
DeligneSystem dual(const DeligneSystem& a);
DHSystem dual(const DHSystem& a);
DeligneSystem tate(const DeligneSystem& a, int r);
DHSystem tate(const DHSystem& a, int r);

/// Transport of all data by an invertible g.
DeligneSystem transported(const DeligneSystem& s, const Mat& g);
DHSystem transported(const DHSystem& s, const Mat& g);

/// Q-model of R -> Q(i)-model of C (same matrices, field tag changes).
DeligneSystem scalar_change(const DeligneSystem& s);
/// Q(i)^d regarded as Q^{2d} with coordinates (Re x, Im x).
DeligneSystem restrict_scalars(const DeligneSystem& s);

/// Matrices of the realification: A + iB -> [[A, -B], [B, A]].
Mat realify(const Mat& m);
Subspace realify(const Subspace& u);

}  // namespace dhsys
