#pragma once

#include "modglue/datum.hpp"

namespace modglue {

// Zero vectors fixing the component shapes of the pair model
// Z (x)_A B = (+)_{(i,j)} Z_i|F_ij and the triple model (+)_{(i,j,l)} Z_i|F_ijl.
PairVector pair_zero(const BModule& Z);
TripleVector triple_zero(const BModule& Z);

// eta^X(x) = (x|F_i)_i for a module over the base algebra.
BVector eta_map(const HilbertModule& X, const ClosedCover& cover, const ModuleVector& x);
// eta^Z(z), component (i,j) = z_i|F_ij.
PairVector eta_map(const BModule& Z, const BVector& z);

// Places v in Z_i|F_ij at component (i,j).
PairVector phi_embed(const BModule& Z, std::size_t i, std::size_t j, const ModuleVector& v);

// Component (i,j) = zeta_ij(z_j|F_ij).
PairVector delta_map(const GluingDatum& D, const BVector& z);

// Diagonal extraction, eps(t)_i = t_(i,i).
BVector epsilon_map(const PairVector& t);

// Right action of B on the pair model: t_ij . b_j|F_ij.
PairVector pair_right_act(const PairVector& t, const BElement& b);
// Right action of B on the triple model: t_ijl . b_l|F_ijl.
TripleVector triple_right_act(const TripleVector& t, const BElement& b);

enum class LiftKind { EtaTensorId, IdTensorEtaB, DeltaTensorId };

// Component (i,j,l): t_(i,l)| for eta(x)id, t_(i,j)| for id(x)eta_B,
// zeta_ij(t_(j,l)|) for delta(x)id, all restricted to F_ijl.
TripleVector lift_to_triple(LiftKind kind, const GluingDatum& D, const PairVector& t);

// Psi^X : X (x)_A B -> (+)_i X|F_i, x (x) b -> (x|F_i b_i)_i.
BVector psi_apply(const HilbertModule& X, const SumAlgebraB& B, const ModuleVector& x, const BElement& b);

// nu^Y_ij : Y (x)_A A|F_j -> Y|F_ij, y (x) a -> y|F_ij a|F_ij, for Y over A|F_i.
ModuleVector nu_apply(const ModuleVector& y, const AlgebraElement& a, const LabelSet& Fj);

// On the pair model of X (x)_A B (x)_A B = pair model of the pull-apart of X:
// (eta^X (x) id)(s) has component (i,j) = s_j|F_ij and
// (id (x) eta^B)(s) has component (i,j) = s_i|F_ij.
PairVector eta_tensor_id(const BModule& PX, const BVector& s);
PairVector id_tensor_eta_b(const BModule& PX, const BVector& s);

}  // namespace modglue
