#pragma once

#include <array>
#include <map>
#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "modglue/glue.hpp"
#include "modglue/oracle.hpp"

namespace modglue {

// (A',A)-equivalence bimodule in block form: elements are families of m_k x n_k
// matrices, a'.x = u a' u^* x and x.a = x w a w^*. The left twist u is m_k x m_k;
// the right twist w is n_k x n_k and is the identity for bimodules in normal
// form. Inner products: <x|y>_A = w^* x^* y w and _A'<x|y> = u^* x y^* u.
struct EquivalenceBimodule {
  FdCStarAlgebra left;
  FdCStarAlgebra right;
  std::vector<std::size_t> mult;
  std::vector<CMatrix> left_twist;
  std::vector<CMatrix> right_twist;

  HilbertModule space() const { return {right, mult}; }
  std::size_t num_blocks() const { return mult.size(); }
};

// Checks shapes and labels, not the bimodule axioms.
EquivalenceBimodule make_bimodule(FdCStarAlgebra left, FdCStarAlgebra right, std::vector<CMatrix> left_twist,
                                  std::vector<CMatrix> right_twist = {});
EquivalenceBimodule standard_bimodule(const FdCStarAlgebra& left, const FdCStarAlgebra& right);
EquivalenceBimodule identity_bimodule(const FdCStarAlgebra& A);
EquivalenceBimodule restrict_bimodule(const EquivalenceBimodule& M, const LabelSet& F);

ModuleVector bimodule_left_act(const EquivalenceBimodule& M, const AlgebraElement& a, const ModuleVector& x);
ModuleVector bimodule_right_act(const EquivalenceBimodule& M, const ModuleVector& x, const AlgebraElement& a);
AlgebraElement bimodule_right_inner(const EquivalenceBimodule& M, const ModuleVector& x, const ModuleVector& y);
AlgebraElement bimodule_left_inner(const EquivalenceBimodule& M, const ModuleVector& x, const ModuleVector& y);

struct BimoduleValidation {
  bool left_action_defined = false;  // m_k = n'_k, so the left twist can act
  double twist_residual = 0;         // unitarity of u and w
  double compatibility_residual = 0; // _A'<x|y> z - x <y|z>_A
  double axiom_residual = 0;         // linearity and adjoint identities, commuting actions
  bool left_full = false;
  bool right_full = false;
  bool aligned = false;              // both algebras carry the same labels

  bool passes(double tol) const;
};

// Identities are checked on all basis vectors and matrix-unit generators.
BimoduleValidation validate_bimodule(const EquivalenceBimodule& M, double tol = 1e-9);

EquivalenceBimodule dual_bimodule(const EquivalenceBimodule& M);
// x -> x^*.
ModuleVector dual_vector(const EquivalenceBimodule& M, const ModuleVector& x);

// M (x)_{A'} N realized on m_k x n_k matrices by x (x) y -> x w_M u_N^* y.
EquivalenceBimodule tensor_bimodules(const EquivalenceBimodule& M, const EquivalenceBimodule& N);
ModuleVector tensor_vectors(const EquivalenceBimodule& M, const EquivalenceBimodule& N, const ModuleVector& x,
                            const ModuleVector& y);

// Oracle factors for the balanced tensor over the middle algebra.
LeftFactor bimodule_left_factor(const EquivalenceBimodule& M);
RightFactor bimodule_right_factor(const EquivalenceBimodule& N);

// Block map x -> P x Q between bimodules over the same algebras.
struct BimoduleMap {
  std::vector<CMatrix> left;   // P_k
  std::vector<CMatrix> right;  // Q_k
};

BimoduleMap identity_map(const EquivalenceBimodule& M);
ModuleVector apply_map(const BimoduleMap& T, const EquivalenceBimodule& target, const ModuleVector& x);
// a o b.
BimoduleMap compose(const BimoduleMap& a, const BimoduleMap& b);
BimoduleMap adjoint_of(const BimoduleMap& T);
// Matrix of the map on column-major coordinates of block k.
CMatrix operator_form(const BimoduleMap& T, std::size_t k);
double map_distance(const BimoduleMap& a, const BimoduleMap& b);
BimoduleMap restrict_map(const BimoduleMap& T, const FdCStarAlgebra& source_algebra, const LabelSet& F);
BimoduleMap dual_map(const BimoduleMap& T);
// T1 (x) T2 : M1 (x) N1 -> M2 (x) N2. Throws ModelViolation if the maps are
// not compatible with the middle action.
BimoduleMap tensor_maps(const EquivalenceBimodule& M1, const EquivalenceBimodule& N1, const EquivalenceBimodule& M2,
                        const EquivalenceBimodule& N2, const BimoduleMap& T1, const BimoduleMap& T2);

struct BimoduleMapCheck {
  double action_residual = 0;     // failure to commute with either action
  double right_inner_residual = 0;
  double left_inner_residual = 0;
  double max() const { return std::max({action_residual, right_inner_residual, left_inner_residual}); }
};

BimoduleMapCheck check_bimodule_map(const EquivalenceBimodule& src, const EquivalenceBimodule& dst,
                                    const BimoduleMap& T);

// A unitary bimodule isomorphism M -> N preserving both inner products, if any.
std::optional<BimoduleMap> bimodules_isomorphic(const EquivalenceBimodule& M, const EquivalenceBimodule& N,
                                                double tol = 1e-9);

// Local bimodules N_i over (A'|F_i, A|F_i) and transitions nu_ij : N_j|F_ij -> N_i|F_ij
// stored at index i*N + j.
struct BimoduleGluingDatum {
  FdCStarAlgebra left_base;
  FdCStarAlgebra right_base;
  ClosedCover cover;
  std::vector<EquivalenceBimodule> parts;
  std::vector<BimoduleMap> nu;

  std::size_t num_sets() const { return parts.size(); }
  const BimoduleMap& transition(std::size_t i, std::size_t j) const { return nu.at(i * num_sets() + j); }
  EquivalenceBimodule part_on(std::size_t i, const LabelSet& F) const { return restrict_bimodule(parts.at(i), F); }
};

// Checks the shapes of parts and transitions.
void check_shapes(const BimoduleGluingDatum& D);

struct BimoduleDatumValidation {
  bool parts_valid = false;
  double map_residual = 0;         // nu_ij is a unitary bimodule map
  double identity_residual = 0;    // nu_ii = id
  double involution_residual = 0;  // nu_ij^* = nu_ji
  double cocycle_residual = 0;
  bool valid(double tol) const;
  bool cocycle(double tol) const { return cocycle_residual <= tol; }
};

BimoduleDatumValidation validate_bimodule_datum(const BimoduleGluingDatum& D, double tol = 1e-9);

BimoduleGluingDatum pull_apart_bimodule(const EquivalenceBimodule& M, const ClosedCover& cover);

// Underlying right-module gluing datum in standard coordinates x w_i.
GluingDatum right_module_datum(const BimoduleGluingDatum& D, double tol = 1e-9);

struct BimoduleGlueResult {
  GluingDatum right_datum;
  GluedModule glued;
  std::optional<EquivalenceBimodule> bimodule;
  BimoduleValidation validation;
  double action_consistency = 0;  // left action of each set agrees on the glued module
  std::string diagnostic;
};

BimoduleGlueResult glue_bimodules(const BimoduleGluingDatum& D, double tol = 1e-9);

// Phi^M : M -> G(P(M)) as a bimodule map.
BimoduleMap bimodule_phi(const EquivalenceBimodule& M, const BimoduleGlueResult& glued);
// Per set, the bimodule map G(D)|F_i -> N_i.
std::vector<BimoduleMap> bimodule_epsilon(const BimoduleGluingDatum& D, const BimoduleGlueResult& glued);

// Largest failure of a family T_i : D1_i -> D2_i to be bimodule isomorphisms
// intertwining the transitions.
double data_morphism_residual(const BimoduleGluingDatum& D1, const BimoduleGluingDatum& D2,
                              const std::vector<BimoduleMap>& T);

// Isomorphism of bimodule gluing data: per-set witnesses with phases aligned
// to intertwine the transitions.
std::optional<std::vector<BimoduleMap>> bimodule_data_isomorphic(const BimoduleGluingDatum& D1,
                                                                 const BimoduleGluingDatum& D2, double tol = 1e-9);

// f_{ijl,k} = nu_ij nu_jl nu_il^* as a scalar, keyed by (i, j, l, k).
using ObstructionCocycle = std::map<std::array<std::size_t, 4>, Complex>;

ObstructionCocycle obstruction_2cocycle(const BimoduleGluingDatum& D, double tol = 1e-9);
// max |f_jlm f_ilm^{-1} f_ijm f_ijl^{-1} - 1| over quadruples and shared blocks.
double cech_coboundary_residual(const ObstructionCocycle& f, const ClosedCover& cover);

BimoduleGluingDatum dual_datum(const BimoduleGluingDatum& D);
BimoduleGluingDatum tensor_data(const BimoduleGluingDatum& D1, const BimoduleGluingDatum& D2);
// N(M) = N~ (x) M (x) N for D = (N_i, nu_ij) over (A',A) and M over (A',A').
BimoduleGluingDatum picard_conjugate(const BimoduleGluingDatum& D, const BimoduleGluingDatum& M);
// The inverse conjugation N~(X) = N (x) X (x) N~ for X over (A,A).
BimoduleGluingDatum picard_unconjugate(const BimoduleGluingDatum& D, const BimoduleGluingDatum& X);
// N(theta) = id (x) theta_i (x) id for a morphism theta : M -> M'.
std::vector<BimoduleMap> picard_conjugate_map(const BimoduleGluingDatum& D, const BimoduleGluingDatum& M,
                                              const BimoduleGluingDatum& M2, const std::vector<BimoduleMap>& theta);

}  // namespace modglue
