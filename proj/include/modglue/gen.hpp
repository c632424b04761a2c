#pragma once

#include <cstdint>
#include <vector>

#include "modglue/datum.hpp"
#include "modglue/morita.hpp"

namespace modglue {

// SplitMix64. The state advances by 0x9E3779B97F4A7C15 and each output is the
// mixed state; see the README appendix for the full recipe.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [lo, hi], by reduction modulo the range.
  std::size_t uniform_int(std::size_t lo, std::size_t hi);
  double normal();
  // (x + iy)/sqrt(2) with independent standard normals.
  Complex complex_normal();
  Complex unit_phase();

 private:
  std::uint64_t state_;
};

enum class TwistMode { coherent, random_unitary, prescribed_phases };

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t max_blocks = 6;
  std::size_t max_block_dim = 4;
  std::size_t max_cover_sets = 4;
  std::size_t max_mult = 5;
  TwistMode twist_mode = TwistMode::coherent;
  // Transition phases on block 0, for pairs i<j ordered by j-i and then i.
  std::vector<Complex> phases;
};

// Throws InvalidInput if the bounds are violated.
void check_config(const GenConfig& cfg);

CMatrix random_gaussian(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols);
// Gram-Schmidt on a complex Gaussian matrix, i.e. QR with positive R diagonal.
CMatrix random_unitary(SplitMix64& rng, Eigen::Index n);

FdCStarAlgebra random_algebra(SplitMix64& rng, std::size_t max_blocks, std::size_t max_block_dim);
// Same labels as A, fresh block sizes.
FdCStarAlgebra random_partner_algebra(SplitMix64& rng, const FdCStarAlgebra& A, std::size_t max_block_dim);
// Every block lies in at least one set and no set is empty.
ClosedCover random_cover(SplitMix64& rng, std::size_t prim_size, std::size_t max_sets);
// Exactly num_sets sets, all containing block 0.
ClosedCover random_cover_with_common_block(SplitMix64& rng, std::size_t prim_size, std::size_t num_sets);
HilbertModule random_module(SplitMix64& rng, const FdCStarAlgebra& A, std::size_t max_mult);
ModuleVector random_vector(SplitMix64& rng, const HilbertModule& X);
AlgebraElement random_element(SplitMix64& rng, const FdCStarAlgebra& A);
AdjointableMap random_map(SplitMix64& rng, const HilbertModule& X, const HilbertModule& Y);
BVector random_bvector(SplitMix64& rng, const BModule& Z);
BElement random_belement(SplitMix64& rng, const SumAlgebraB& B);

// Transitions on the pull-apart of X. Coherent: V_i V_j^* from per-set unitaries.
// Random unitary: independent unitaries for i<j. Prescribed phases: coherent,
// with the given phases multiplied into block 0.
GluingDatum random_gluing_datum(SplitMix64& rng, const HilbertModule& X, const ClosedCover& cover, TwistMode mode,
                                const std::vector<Complex>& phases = {});

// Equivalence bimodule over (left, right) with m_k = n'_k and random twists.
EquivalenceBimodule random_bimodule(SplitMix64& rng, const FdCStarAlgebra& left, const FdCStarAlgebra& right,
                                    bool normal_form = false);
// Parts are randomly twisted copies of one bimodule; the transitions carry a
// phase c_ij per block, a coboundary unless `twisted`.
BimoduleGluingDatum random_bimodule_datum(SplitMix64& rng, const FdCStarAlgebra& left, const FdCStarAlgebra& right,
                                          const ClosedCover& cover, bool twisted);

// (C, C)-bimodule datum over one block and N sets: identity bimodules with
// transitions multiplying by the given phases, ordered as in GenConfig.
BimoduleGluingDatum phase_bimodule_datum(const std::vector<Complex>& phases);

struct Instance {
  GenConfig config;
  FdCStarAlgebra algebra;
  ClosedCover cover;
  HilbertModule module;
  GluingDatum datum;
};

Instance random_instance(const GenConfig& cfg);

// One block of size 1, every set equal to it, multiplicity 1 and the given
// transition phases.
Instance phase_instance(const std::vector<Complex>& phases);

}  // namespace modglue
