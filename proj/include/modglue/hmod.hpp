#pragma once

#include <functional>
#include <span>
#include <vector>

#include "modglue/cstar.hpp"

namespace modglue {

// (+)_k C^{m_k x n_k} as a right Hilbert module over (+)_k M_{n_k}.
class HilbertModule {
 public:
  HilbertModule() = default;
  HilbertModule(FdCStarAlgebra algebra, std::vector<std::size_t> mult);

  const FdCStarAlgebra& algebra() const { return algebra_; }
  const std::vector<std::size_t>& mult() const { return mult_; }
  std::size_t mult(std::size_t b) const { return mult_.at(b); }
  std::size_t num_blocks() const { return mult_.size(); }
  // Number of complex coordinates, the sum of m_k n_k.
  std::size_t dimension() const;
  Eigen::Index block_offset(std::size_t b) const;

  bool operator==(const HilbertModule&) const = default;

 private:
  FdCStarAlgebra algebra_;
  std::vector<std::size_t> mult_;
};

struct ModuleVector {
  HilbertModule module;
  std::vector<CMatrix> blocks;

  ModuleVector() = default;
  ModuleVector(HilbertModule mod, std::vector<CMatrix> blks);
  static ModuleVector zero(const HilbertModule& X);
};

ModuleVector operator+(const ModuleVector& x, const ModuleVector& y);
ModuleVector operator-(const ModuleVector& x, const ModuleVector& y);
ModuleVector operator*(Complex s, const ModuleVector& x);

AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y);
ModuleVector right_act(const ModuleVector& x, const AlgebraElement& a);
// |x| = |<x|x>|^{1/2}.
double norm(const ModuleVector& x);
double distance(const ModuleVector& x, const ModuleVector& y);

// Norm of an l x l matrix of vectors (row-major) in M_l(X):
// |[<x_{.p}|x_{.q}>]|^{1/2} with <x_{.p}|x_{.q}> = sum_r <x_rp|x_rq>.
double amplified_norm(std::span<const ModuleVector> entries, std::size_t level);

CVector to_coords(const ModuleVector& x);
ModuleVector from_coords(const HilbertModule& X, const CVector& v);
// Label of the block each coordinate belongs to.
std::vector<Label> coordinate_labels(const HilbertModule& X);

struct AdjointableMap {
  HilbertModule source;
  HilbertModule target;
  std::vector<CMatrix> blocks;  // T_k of shape p_k x m_k

  AdjointableMap() = default;
  AdjointableMap(HilbertModule src, HilbertModule tgt, std::vector<CMatrix> blks);
  static AdjointableMap identity(const HilbertModule& X);
  static AdjointableMap zero(const HilbertModule& X, const HilbertModule& Y);
};

AdjointableMap adjoint_of(const AdjointableMap& a);
ModuleVector apply_map(const AdjointableMap& a, const ModuleVector& x);
// a o b.
AdjointableMap compose(const AdjointableMap& a, const AdjointableMap& b);
AdjointableMap operator+(const AdjointableMap& a, const AdjointableMap& b);
AdjointableMap operator-(const AdjointableMap& a, const AdjointableMap& b);
AdjointableMap operator*(Complex s, const AdjointableMap& a);
double map_norm(const AdjointableMap& a);
double map_distance(const AdjointableMap& a, const AdjointableMap& b);
double unitarity_residual(const AdjointableMap& a);
bool is_unitary_module_map(const AdjointableMap& a, double tol);

HilbertModule restrict_module(const HilbertModule& X, const LabelSet& F);
ModuleVector restrict_vector(const ModuleVector& x, const LabelSet& F);
AdjointableMap restrict_map(const AdjointableMap& a, const LabelSet& F);
// Zero-fills the blocks of `target` that x does not carry.
ModuleVector extend_by_zero(const ModuleVector& x, const HilbertModule& target);

using LinearMap = std::function<CVector(const CVector&)>;

// Coordinate matrix of x -> x e_{rs}, e_{rs} the matrix unit in block b.
CMatrix right_unit_action(const HilbertModule& X, std::size_t b, std::size_t r, std::size_t s);

// Dense matrix of a linear map on coordinates, by probing basis vectors.
CMatrix probe_matrix(const LinearMap& L, Eigen::Index in_dim);
// Coordinate matrix of an adjointable map.
CMatrix coordinate_matrix(const AdjointableMap& a);

// Recovers the blockwise matrices of L when it commutes with the right
// action of every matrix unit; throws NotAModuleMap otherwise.
AdjointableMap module_map_from_linear(const LinearMap& L, const HilbertModule& X, const HilbertModule& Y,
                                      double tol = 1e-9);

}  // namespace modglue
