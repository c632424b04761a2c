#pragma once

#include <map>
#include <span>
#include <vector>

#include "modglue/tensor.hpp"

namespace modglue {

struct GluingValidation {
  bool unitary = false;
  bool involutive = false;  // zeta_ii = I and zeta_ij^* = zeta_ji
  bool cocycle = false;
  double unitary_residual = 0;
  double identity_residual = 0;
  double involution_residual = 0;
  double cocycle_residual = 0;

  // Unitarity and involutivity are required; the cocycle is advisory.
  bool valid() const { return unitary && involutive; }
};

GluingValidation validate_gluing_datum(const GluingDatum& D, double tol);

// The canonical map X|F_i|F_ij -> X|F_j|F_ij, the identity in label-preserving coordinates.
AdjointableMap kappa(const HilbertModule& X, const ClosedCover& cover, std::size_t i, std::size_t j);

GluingDatum pull_apart(const HilbertModule& X, const ClosedCover& cover);

// Morphism of gluing data: one adjointable map per cover set.
struct GlueMorphism {
  std::vector<AdjointableMap> components;
};

GlueMorphism pull_apart_map(const AdjointableMap& a, const ClosedCover& cover);
GlueMorphism compose(const GlueMorphism& a, const GlueMorphism& b);
GlueMorphism adjoint_of(const GlueMorphism& a);
double morphism_norm(const GlueMorphism& a);
double morphism_distance(const GlueMorphism& a, const GlueMorphism& b);
// max |alpha_i|F_ij o zeta_ij - omega_ij o alpha_j|F_ij|.
double intertwining_residual(const GlueMorphism& a, const GluingDatum& src, const GluingDatum& dst);

// The glued Hilbert A-module with its embedding into (+)_i Z_i. For block k
// the embedding is a matrix whose rows stack the coordinates of the sets
// containing k (increasing), normalized so that each set's slice E^(i)_k is an
// isometry from C^{g_k} into C^{m^(i)_k}.
struct GluedModule {
  HilbertModule module;
  std::vector<std::vector<std::size_t>> sets;  // per block, the sets containing it
  std::vector<CMatrix> embedding;              // per block, (sum_i m^(i)_k) x g_k
  std::vector<std::vector<Eigen::Index>> row_offset;

  // E^(i)_k, the slice of the embedding for set i.
  CMatrix slice(Label k, std::size_t i) const;
  BVector embed(const BModule& Z, const ModuleVector& g) const;
  // The glued coordinates of an element of the glued subspace.
  ModuleVector project(const BVector& z) const;
};

GluedModule glue(const GluingDatum& D, double tol = kRankTol);

// G(alpha) between glued modules; throws NotAMorphism if alpha does not intertwine.
AdjointableMap glue_morphism(const GlueMorphism& a, const GluingDatum& src, const GluedModule& gsrc,
                             const GluingDatum& dst, const GluedModule& gdst, double tol = 1e-9);

struct PhiIso {
  GluingDatum datum;
  GluedModule glued;
  AdjointableMap phi;  // X -> G(P(X))
};

PhiIso phi_iso(const HilbertModule& X, const ClosedCover& cover, double tol = kRankTol);

struct EpsilonIso {
  GlueMorphism eps;                   // P(G(D)) -> D
  std::vector<long> deficit;          // per set, max_k (m^(i)_k - g_k)
  double unitary_residual = 0;
  double intertwining_residual = 0;   // |E^(i) - zeta_ij E^(j)| on overlaps
  bool unitary = false;
};

EpsilonIso epsilon_iso(const GluingDatum& D, const GluedModule& G, double tol = 1e-9);

struct DescentReport {
  double counit_residual = 0;          // (a) |eps(delta z) - z|
  double coassociativity_residual = 0; // (b) |(delta x id) delta z - (eta x id) delta z|
  double kernel_angle = 0;             // (c) sin of the largest principal angle
  std::size_t kernel_dim = 0;          // dim ker(eta - delta)
  std::size_t glued_dim = 0;           // dim G(Z, zeta) in coordinates
  double kernel_leakage = 0;           // coupling between blocks in eta - delta
  double tensor_kernel_angle = 0;      // kernels identity, subspace distance
  std::size_t tensor_kernel_dim = 0;   // dim ker((eta - delta) x id)
  std::size_t glued_tensor_dim = 0;    // dim G(Z, zeta) (x)_A B
  double tensor_kernel_leakage = 0;
};

// Evaluates the descent identities on the sample vectors and by kernel
// computations on the pair and triple models.
DescentReport descent_identities_check(const GluingDatum& D, const GluedModule& G, std::span<const BVector> samples,
                                       double tol = kRankTol);

// Kernel of a linear map probed on basis vectors and split by groups of
// coordinates that the map does not mix. Groups are given per coordinate.
struct GroupedKernel {
  std::map<std::vector<std::size_t>, CMatrix> basis;  // group key -> orthonormal columns in group coordinates
  std::map<std::vector<std::size_t>, std::vector<Eigen::Index>> coords;  // group key -> input coordinates
  double leakage = 0;  // largest output entry outside the input's group
  std::size_t dimension() const;
};

GroupedKernel grouped_kernel(const LinearMap& L, const std::vector<std::vector<std::size_t>>& in_group,
                             const std::vector<std::vector<std::size_t>>& out_group, double tol = kRankTol);

// Distance between the grouped kernel and the span of `reference` columns,
// each of which must be supported in a single group.
double grouped_subspace_distance(const GroupedKernel& K, const CMatrix& reference,
                                 const std::vector<std::vector<std::size_t>>& in_group);

}  // namespace modglue
