#pragma once

#include <functional>
#include <vector>

#include "modglue/datum.hpp"

namespace modglue {

// Sesquilinear form on C^dim with values in an algebra C: the entry of
// value(u, v) at coordinate c of C (to_coords order) is u^* S_c v.
struct AlgebraValuedForm {
  FdCStarAlgebra outer;
  Eigen::Index dim = 0;
  std::vector<CMatrix> components;

  AlgebraElement evaluate(const CVector& u, const CVector& v) const;
};

using FormFunction = std::function<AlgebraElement(const CVector&, const CVector&)>;

// Tabulates f on basis pairs; f must be conjugate-linear in its first slot.
AlgebraValuedForm form_from_function(Eigen::Index dim, const FdCStarAlgebra& outer, const FormFunction& f);
// The pulled-back form (u, v) -> f(W u, W v).
AlgebraValuedForm congruence(const AlgebraValuedForm& f, const CMatrix& W);
double form_distance(const AlgebraValuedForm& f, const AlgebraValuedForm& g);

// Left tensor factor: a right module over the middle algebra with a
// middle-valued inner product. right_action[u] is x -> x e_u for the u-th
// matrix unit of the middle algebra (to_coords order).
struct LeftFactor {
  Eigen::Index dim = 0;
  std::vector<CMatrix> right_action;
  AlgebraValuedForm gram;
};

// Right tensor factor: a left module over the middle algebra carrying an
// outer-valued inner product and, optionally, a right action of the outer algebra.
struct RightFactor {
  Eigen::Index dim = 0;
  std::vector<CMatrix> left_action;
  AlgebraValuedForm gram;
  std::vector<CMatrix> outer_right_action;
};

// The balanced tensor product L (x)_M R computed as a quotient of the plain
// tensor space C^{dL} (x) C^{dR} (plain index alpha*dR + beta) by the span of
// x e (x) y - x (x) e y over generators e of M. The quotient is realized as the
// orthogonal complement of the relation span.
class GenericBalancedTensor {
 public:
  GenericBalancedTensor(const FdCStarAlgebra& middle, const LeftFactor& left, const RightFactor& right,
                        double tol = kRankTol);

  Eigen::Index plain_dim() const { return plain_dim_; }
  Eigen::Index dimension() const { return Q_.cols(); }
  // Orthonormal basis of the complement of the relations, plain_dim x dimension.
  const CMatrix& complement() const { return Q_; }
  // Columns spanning the balancing relations.
  const CMatrix& relations() const { return relations_; }
  // Induced outer-valued inner product in quotient coordinates.
  const AlgebraValuedForm& gram() const { return gram_; }
  // Right action of the outer algebra's matrix units in quotient coordinates.
  const std::vector<CMatrix>& outer_right_action() const { return outer_right_; }
  // Quotient coordinates of a plain tensor.
  CVector quotient_coords(const CVector& plain) const { return Q_.adjoint() * plain; }

 private:
  Eigen::Index plain_dim_ = 0;
  CMatrix relations_;
  CMatrix Q_;
  AlgebraValuedForm gram_;
  std::vector<CMatrix> outer_right_;
};

// Agreement between the oracle quotient and a concrete model given by the
// matrix `model_map` (model coordinates x plain coordinates) and the model's
// outer-valued inner product.
struct OracleComparison {
  Eigen::Index oracle_dim = 0;
  Eigen::Index model_dim = 0;
  double relation_residual = 0;  // |model_map . relations|, relative
  double min_singular = 0;       // smallest singular value of the induced map
  double gram_residual = 0;      // |W^* S_model W - S_oracle|
  CMatrix induced;               // model_map restricted to the quotient

  bool agrees(double tol) const;
};

OracleComparison compare_with_model(const GenericBalancedTensor& T, const CMatrix& model_map,
                                    const AlgebraValuedForm& model_gram);

// X as a left factor over `middle`; blocks of `middle` that X lacks act by zero.
LeftFactor left_factor(const HilbertModule& X, const FdCStarAlgebra& middle);
// Z = (+)_i Z_i as a right A-module (A acting through eta) with the localized
// A-valued inner product sum_i <z_i|w_i> (blocks extended by zero).
LeftFactor left_factor(const BModule& Z);
// The quotient T (a right B-module) viewed as a right A-module through eta,
// with the localized A-valued inner product.
LeftFactor left_factor(const GenericBalancedTensor& T, const SumAlgebraB& B);

// A matrix space Y over the outer algebra, with the middle algebra acting on
// the left: middle_label[b] is the middle label acting on block b of Y, whose
// multiplicity must equal that middle block's dimension.
RightFactor right_factor(const HilbertModule& Y, const FdCStarAlgebra& middle, const std::vector<Label>& middle_label);
// B over itself with A acting on the left through eta.
RightFactor right_factor(const SumAlgebraB& B);
// A|F as a left A-module over itself.
RightFactor right_factor(const FdCStarAlgebra& A, const LabelSet& F);

// Module of an algebra over itself (multiplicities = block dimensions).
HilbertModule self_module(const FdCStarAlgebra& A);
// The B-valued inner product on B-module models, as an outer-valued form on
// the concatenated coordinates of the family whose components are `shape`.
// Component p contributes its inner product to flat block outer_label[p][b].
AlgebraValuedForm summed_form(const std::vector<HilbertModule>& shape, const FdCStarAlgebra& outer,
                              const std::vector<std::vector<Label>>& outer_label);

// Oracle checks of the pair model of Z (x)_A B and the triple model of
// (Z (x)_A B) (x)_A B against the generic balanced tensor.
struct ModelCheck {
  GenericBalancedTensor tensor;
  OracleComparison comparison;
};

// Plain tensor dimensions the two checks work in.
Eigen::Index pair_plain_dim(const BModule& Z);
Eigen::Index triple_plain_dim(const BModule& Z);

ModelCheck check_pair_model(const BModule& Z);
// Takes the pair check so the triple oracle is built on the pair quotient.
ModelCheck check_triple_model(const BModule& Z, const ModelCheck& pair);

}  // namespace modglue
