#include "modglue/cstar.hpp"

#include <algorithm>
#include <string>

#include "modglue/errors.hpp"

namespace modglue {

LabelSet make_label_set(std::vector<Label> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

LabelSet intersect(const LabelSet& a, const LabelSet& b) {
  LabelSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool contains(const LabelSet& s, Label k) { return std::binary_search(s.begin(), s.end(), k); }

FdCStarAlgebra::FdCStarAlgebra(std::vector<std::size_t> block_dims)
    : prim_size_(block_dims.size()), dims_(std::move(block_dims)) {
  if (dims_.empty()) throw InvalidInput("algebra needs at least one block");
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] == 0) throw InvalidInput("block dimensions must be positive");
    labels_.push_back(k);
  }
}

FdCStarAlgebra::FdCStarAlgebra(std::size_t prim_size, LabelSet labels, std::vector<std::size_t> dims)
    : prim_size_(prim_size), labels_(std::move(labels)), dims_(std::move(dims)) {
  if (labels_.size() != dims_.size()) throw InvalidInput("labels and dims differ in length");
  if (!std::is_sorted(labels_.begin(), labels_.end()) ||
      std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end())
    throw InvalidInput("block labels must be strictly increasing");
  if (!labels_.empty() && labels_.back() >= prim_size_) throw InvalidInput("block label out of range");
  for (auto n : dims_)
    if (n == 0) throw InvalidInput("block dimensions must be positive");
}

std::optional<std::size_t> FdCStarAlgebra::position(Label k) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), k);
  if (it == labels_.end() || *it != k) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t FdCStarAlgebra::dim_of_label(Label k) const {
  auto p = position(k);
  if (!p) throw InvalidInput("label " + std::to_string(k) + " not present in algebra");
  return dims_[*p];
}

std::size_t FdCStarAlgebra::dimension() const {
  std::size_t d = 0;
  for (auto n : dims_) d += n * n;
  return d;
}

FdCStarAlgebra restrict_algebra(const FdCStarAlgebra& A, const LabelSet& F) {
  LabelSet labels;
  std::vector<std::size_t> dims;
  for (Label k : F) {
    if (k >= A.prim_size()) throw InvalidInput("restriction label " + std::to_string(k) + " out of range");
    if (auto p = A.position(k)) {
      labels.push_back(k);
      dims.push_back(A.dim(*p));
    }
  }
  return FdCStarAlgebra(A.prim_size(), std::move(labels), std::move(dims));
}

AlgebraElement::AlgebraElement(FdCStarAlgebra alg, std::vector<CMatrix> blks)
    : algebra(std::move(alg)), blocks(std::move(blks)) {
  if (blocks.size() != algebra.num_blocks()) throw InvalidInput("algebra element: wrong number of blocks");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto n = static_cast<Eigen::Index>(algebra.dim(b));
    if (blocks[b].rows() != n || blocks[b].cols() != n) throw InvalidInput("algebra element: block shape mismatch");
    require_finite(blocks[b], "algebra element");
  }
}

AlgebraElement AlgebraElement::zero(const FdCStarAlgebra& A) {
  std::vector<CMatrix> blks;
  for (auto n : A.dims()) blks.push_back(CMatrix::Zero(n, n));
  return {A, std::move(blks)};
}

AlgebraElement AlgebraElement::identity(const FdCStarAlgebra& A) {
  std::vector<CMatrix> blks;
  for (auto n : A.dims()) blks.push_back(CMatrix::Identity(n, n));
  return {A, std::move(blks)};
}

AlgebraElement AlgebraElement::unit(const FdCStarAlgebra& A, std::size_t b, std::size_t r, std::size_t s) {
  auto e = zero(A);
  e.blocks.at(b)(r, s) = 1.0;
  return e;
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement out = *this;
  for (auto& m : out.blocks) m = m.adjoint().eval();
  return out;
}

double AlgebraElement::norm() const {
  double n = 0;
  for (const auto& m : blocks) n = std::max(n, op_norm(m));
  return n;
}

namespace {

void require_same(const FdCStarAlgebra& a, const FdCStarAlgebra& b) {
  if (!(a == b)) throw InvalidInput("algebra elements over different algebras");
}

template <class F>
AlgebraElement blockwise(const AlgebraElement& a, const AlgebraElement& b, F f) {
  require_same(a.algebra, b.algebra);
  AlgebraElement out = a;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) out.blocks[k] = f(a.blocks[k], b.blocks[k]);
  return out;
}

}  // namespace

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  return blockwise(a, b, [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x + y; });
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  return blockwise(a, b, [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x - y; });
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  return blockwise(a, b, [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x * y; });
}

AlgebraElement operator*(Complex s, const AlgebraElement& a) {
  AlgebraElement out = a;
  for (auto& m : out.blocks) m *= s;
  return out;
}

double distance(const AlgebraElement& a, const AlgebraElement& b) { return (a - b).norm(); }

AlgebraElement restrict_element(const AlgebraElement& a, const LabelSet& F) {
  FdCStarAlgebra R = restrict_algebra(a.algebra, F);
  std::vector<CMatrix> blks;
  for (Label k : R.labels()) blks.push_back(a.blocks[*a.algebra.position(k)]);
  return {R, std::move(blks)};
}

AlgebraElement extend_by_zero(const AlgebraElement& a, const FdCStarAlgebra& target) {
  auto out = AlgebraElement::zero(target);
  for (std::size_t b = 0; b < a.algebra.num_blocks(); ++b) {
    auto p = target.position(a.algebra.label(b));
    if (!p || target.dim(*p) != a.algebra.dim(b)) throw InvalidInput("extend_by_zero: incompatible algebras");
    out.blocks[*p] = a.blocks[b];
  }
  return out;
}

CVector to_coords(const AlgebraElement& a) {
  Eigen::Index total = 0;
  for (const auto& m : a.blocks) total += m.size();
  CVector v(total);
  Eigen::Index off = 0;
  for (const auto& m : a.blocks) {
    v.segment(off, m.size()) = vec(m);
    off += m.size();
  }
  return v;
}

AlgebraElement element_from_coords(const FdCStarAlgebra& A, const CVector& v) {
  if (v.size() != static_cast<Eigen::Index>(A.dimension())) throw InvalidInput("element_from_coords: length mismatch");
  std::vector<CMatrix> blks;
  Eigen::Index off = 0;
  for (auto n : A.dims()) {
    const auto ni = static_cast<Eigen::Index>(n);
    blks.push_back(unvec(v.segment(off, ni * ni), ni, ni));
    off += ni * ni;
  }
  return {A, std::move(blks)};
}

ClosedCover::ClosedCover(std::size_t prim_size, std::vector<LabelSet> sets) : prim_size_(prim_size) {
  if (prim_size == 0) throw InvalidInput("cover of an empty spectrum");
  std::vector<bool> hit(prim_size, false);
  for (auto& s : sets) {
    for (Label k : s) {
      if (k >= prim_size) throw InvalidInput("cover label " + std::to_string(k) + " out of range");
      hit[k] = true;
    }
    sets_.push_back(make_label_set(s));
  }
  if (sets_.empty()) throw InvalidInput("cover has no sets");
  for (std::size_t k = 0; k < prim_size; ++k)
    if (!hit[k]) throw InvalidInput("cover misses block " + std::to_string(k));
}

LabelSet ClosedCover::overlap(std::size_t i, std::size_t j) const { return intersect(set(i), set(j)); }

LabelSet ClosedCover::overlap(std::size_t i, std::size_t j, std::size_t l) const {
  return intersect(overlap(i, j), set(l));
}

std::vector<std::size_t> ClosedCover::sets_containing(Label k) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sets_.size(); ++i)
    if (contains(sets_[i], k)) out.push_back(i);
  return out;
}

SumAlgebraB::SumAlgebraB(FdCStarAlgebra base, ClosedCover cover) : base_(std::move(base)), cover_(std::move(cover)) {
  if (!base_.is_full()) throw InvalidInput("B needs the full base algebra");
  if (cover_.prim_size() != base_.prim_size()) throw InvalidInput("cover and algebra have different spectra");
  std::vector<std::size_t> flat_dims;
  flat_offset_.resize(cover_.size());
  for (std::size_t i = 0; i < cover_.size(); ++i) {
    parts_.push_back(restrict_algebra(base_, cover_.set(i)));
    for (Label k : cover_.set(i)) {
      flat_offset_[i].push_back(flat_dims.size());
      flat_dims.push_back(base_.dim(k));
    }
  }
  LabelSet flat_labels(flat_dims.size());
  for (std::size_t q = 0; q < flat_labels.size(); ++q) flat_labels[q] = q;
  flat_ = FdCStarAlgebra(flat_dims.size(), flat_labels, flat_dims);
}

std::size_t SumAlgebraB::flat_label(std::size_t i, Label k) const {
  auto p = parts_.at(i).position(k);
  if (!p) throw InvalidInput("block not in cover set");
  return flat_offset_[i][*p];
}

BElement SumAlgebraB::zero() const {
  BElement b;
  for (const auto& P : parts_) b.parts.push_back(AlgebraElement::zero(P));
  return b;
}

BElement SumAlgebraB::identity() const {
  BElement b;
  for (const auto& P : parts_) b.parts.push_back(AlgebraElement::identity(P));
  return b;
}

AlgebraElement SumAlgebraB::flatten(const BElement& b) const {
  if (b.parts.size() != parts_.size()) throw InvalidInput("B element: wrong number of parts");
  std::vector<CMatrix> blks;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (!(b.parts[i].algebra == parts_[i])) throw InvalidInput("B element: part over wrong algebra");
    for (const auto& m : b.parts[i].blocks) blks.push_back(m);
  }
  return {flat_, std::move(blks)};
}

BElement SumAlgebraB::unflatten(const AlgebraElement& a) const {
  if (!(a.algebra == flat_)) throw InvalidInput("unflatten: element not over B");
  BElement b;
  std::size_t q = 0;
  for (const auto& P : parts_) {
    std::vector<CMatrix> blks(a.blocks.begin() + static_cast<std::ptrdiff_t>(q),
                              a.blocks.begin() + static_cast<std::ptrdiff_t>(q + P.num_blocks()));
    q += P.num_blocks();
    b.parts.emplace_back(P, std::move(blks));
  }
  return b;
}

namespace {

template <class F>
BElement partwise(const BElement& a, const BElement& b, F f) {
  if (a.parts.size() != b.parts.size()) throw InvalidInput("B elements with different part counts");
  BElement out;
  for (std::size_t i = 0; i < a.parts.size(); ++i) out.parts.push_back(f(a.parts[i], b.parts[i]));
  return out;
}

}  // namespace

BElement operator*(const BElement& a, const BElement& b) {
  return partwise(a, b, [](const AlgebraElement& x, const AlgebraElement& y) { return x * y; });
}

BElement operator+(const BElement& a, const BElement& b) {
  return partwise(a, b, [](const AlgebraElement& x, const AlgebraElement& y) { return x + y; });
}

double norm(const BElement& b) {
  double n = 0;
  for (const auto& p : b.parts) n = std::max(n, p.norm());
  return n;
}

double distance(const BElement& a, const BElement& b) {
  double d = 0;
  if (a.parts.size() != b.parts.size()) throw InvalidInput("B elements with different part counts");
  for (std::size_t i = 0; i < a.parts.size(); ++i) d = std::max(d, distance(a.parts[i], b.parts[i]));
  return d;
}

BElement eta_embed(const SumAlgebraB& B, const AlgebraElement& a) {
  if (!(a.algebra == B.base())) throw InvalidInput("eta_embed: element not over the base algebra");
  BElement out;
  for (std::size_t i = 0; i < B.num_sets(); ++i) out.parts.push_back(restrict_element(a, B.cover().set(i)));
  return out;
}

double eta_image_residual(const SumAlgebraB& B, const BElement& b) {
  double r = 0;
  for (std::size_t i = 0; i < B.num_sets(); ++i)
    for (std::size_t j = 0; j < B.num_sets(); ++j) {
      auto F = B.cover().overlap(i, j);
      r = std::max(r, distance(restrict_element(b.parts.at(i), F), restrict_element(b.parts.at(j), F)));
    }
  return r;
}

bool image_of_eta_characterization(const SumAlgebraB& B, const BElement& b, double tol) {
  return eta_image_residual(B, b) <= tol;
}

CMatrix eta_constraint_matrix(const SumAlgebraB& B) {
  const auto& flat = B.flat();
  std::vector<Eigen::Index> offset(flat.num_blocks() + 1, 0);
  for (std::size_t q = 0; q < flat.num_blocks(); ++q)
    offset[q + 1] = offset[q] + static_cast<Eigen::Index>(flat.dim(q) * flat.dim(q));
  std::vector<std::pair<std::size_t, std::size_t>> rows;  // (flat block, flat block)
  for (std::size_t i = 0; i < B.num_sets(); ++i)
    for (std::size_t j = i + 1; j < B.num_sets(); ++j)
      for (Label k : B.cover().overlap(i, j)) rows.emplace_back(B.flat_label(i, k), B.flat_label(j, k));
  Eigen::Index nrows = 0;
  for (auto [p, q] : rows) nrows += static_cast<Eigen::Index>(flat.dim(p) * flat.dim(p));
  CMatrix C = CMatrix::Zero(nrows, offset.back());
  Eigen::Index r = 0;
  for (auto [p, q] : rows) {
    const auto len = static_cast<Eigen::Index>(flat.dim(p) * flat.dim(p));
    C.block(r, offset[p], len, len) += CMatrix::Identity(len, len);
    C.block(r, offset[q], len, len) -= CMatrix::Identity(len, len);
    r += len;
  }
  return C;
}

}  // namespace modglue
