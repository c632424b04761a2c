#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "modglue/numlin.hpp"

namespace modglue {

using Label = std::size_t;
// Sorted, duplicate-free list of block labels.
using LabelSet = std::vector<Label>;

LabelSet make_label_set(std::vector<Label> labels);
LabelSet intersect(const LabelSet& a, const LabelSet& b);
bool contains(const LabelSet& s, Label k);

// Finite direct sum of matrix algebras M_{n_k}. Blocks carry labels drawn from
// the primitive spectrum {0, ..., prim_size-1} of the ambient algebra, so a
// restriction keeps the labels of the blocks it retains.
class FdCStarAlgebra {
 public:
  FdCStarAlgebra() = default;
  explicit FdCStarAlgebra(std::vector<std::size_t> block_dims);
  FdCStarAlgebra(std::size_t prim_size, LabelSet labels, std::vector<std::size_t> dims);

  std::size_t prim_size() const { return prim_size_; }
  std::size_t num_blocks() const { return labels_.size(); }
  Label label(std::size_t b) const { return labels_.at(b); }
  std::size_t dim(std::size_t b) const { return dims_.at(b); }
  const LabelSet& labels() const { return labels_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::optional<std::size_t> position(Label k) const;
  std::size_t dim_of_label(Label k) const;
  // Complex dimension, the sum of n_k^2.
  std::size_t dimension() const;
  bool is_full() const { return labels_.size() == prim_size_; }

  bool operator==(const FdCStarAlgebra&) const = default;

 private:
  std::size_t prim_size_ = 0;
  LabelSet labels_;
  std::vector<std::size_t> dims_;
};

FdCStarAlgebra restrict_algebra(const FdCStarAlgebra& A, const LabelSet& F);

struct AlgebraElement {
  FdCStarAlgebra algebra;
  std::vector<CMatrix> blocks;

  AlgebraElement() = default;
  AlgebraElement(FdCStarAlgebra alg, std::vector<CMatrix> blks);

  static AlgebraElement zero(const FdCStarAlgebra& A);
  static AlgebraElement identity(const FdCStarAlgebra& A);
  // The matrix unit e_{rs} in block b.
  static AlgebraElement unit(const FdCStarAlgebra& A, std::size_t b, std::size_t r, std::size_t s);

  AlgebraElement adjoint() const;
  double norm() const;
};

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator*(Complex s, const AlgebraElement& a);
// Largest block norm of a - b.
double distance(const AlgebraElement& a, const AlgebraElement& b);

AlgebraElement restrict_element(const AlgebraElement& a, const LabelSet& F);
// Zero-fills the blocks of `target` that a does not carry.
AlgebraElement extend_by_zero(const AlgebraElement& a, const FdCStarAlgebra& target);

class ClosedCover {
 public:
  ClosedCover() = default;
  ClosedCover(std::size_t prim_size, std::vector<LabelSet> sets);

  std::size_t prim_size() const { return prim_size_; }
  std::size_t size() const { return sets_.size(); }
  const LabelSet& set(std::size_t i) const { return sets_.at(i); }
  const std::vector<LabelSet>& sets() const { return sets_; }
  LabelSet overlap(std::size_t i, std::size_t j) const;
  LabelSet overlap(std::size_t i, std::size_t j, std::size_t l) const;
  // Indices of the sets containing label k, increasing.
  std::vector<std::size_t> sets_containing(Label k) const;

  bool operator==(const ClosedCover&) const = default;

 private:
  std::size_t prim_size_ = 0;
  std::vector<LabelSet> sets_;
};

// Elements of B = (+)_i A|F_i, one element of the quotient per cover set.
struct BElement {
  std::vector<AlgebraElement> parts;
};

class SumAlgebraB {
 public:
  SumAlgebraB() = default;
  SumAlgebraB(FdCStarAlgebra base, ClosedCover cover);

  const FdCStarAlgebra& base() const { return base_; }
  const ClosedCover& cover() const { return cover_; }
  std::size_t num_sets() const { return cover_.size(); }
  const FdCStarAlgebra& part(std::size_t i) const { return parts_.at(i); }

  // B as a single algebra whose blocks are the pairs (i,k) in lexicographic order.
  const FdCStarAlgebra& flat() const { return flat_; }
  std::size_t flat_label(std::size_t i, Label k) const;

  BElement zero() const;
  BElement identity() const;
  AlgebraElement flatten(const BElement& b) const;
  BElement unflatten(const AlgebraElement& b) const;

 private:
  FdCStarAlgebra base_;
  ClosedCover cover_;
  std::vector<FdCStarAlgebra> parts_;
  FdCStarAlgebra flat_;
  std::vector<std::vector<std::size_t>> flat_offset_;
};

BElement operator*(const BElement& a, const BElement& b);
BElement operator+(const BElement& a, const BElement& b);
double norm(const BElement& b);
double distance(const BElement& a, const BElement& b);

BElement eta_embed(const SumAlgebraB& B, const AlgebraElement& a);

// Largest disagreement between blocks (i,k) and (j,k) over all overlaps.
double eta_image_residual(const SumAlgebraB& B, const BElement& b);
bool image_of_eta_characterization(const SumAlgebraB& B, const BElement& b, double tol);

// The linear constraint map b -> (b_i|F_ij - b_j|F_ij)_{i<j} on flattened
// coordinates of B; its kernel is the image of eta.
CMatrix eta_constraint_matrix(const SumAlgebraB& B);

}  // namespace modglue

namespace modglue {

// Concatenated column-major block entries.
CVector to_coords(const AlgebraElement& a);
AlgebraElement element_from_coords(const FdCStarAlgebra& A, const CVector& v);

}  // namespace modglue
