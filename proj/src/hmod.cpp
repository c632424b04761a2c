#include "modglue/hmod.hpp"

#include <algorithm>
#include <cmath>

#include "modglue/errors.hpp"

namespace modglue {

HilbertModule::HilbertModule(FdCStarAlgebra algebra, std::vector<std::size_t> mult)
    : algebra_(std::move(algebra)), mult_(std::move(mult)) {
  if (mult_.size() != algebra_.num_blocks()) throw InvalidInput("module: multiplicity list does not match blocks");
}

std::size_t HilbertModule::dimension() const {
  std::size_t d = 0;
  for (std::size_t b = 0; b < mult_.size(); ++b) d += mult_[b] * algebra_.dim(b);
  return d;
}

Eigen::Index HilbertModule::block_offset(std::size_t b) const {
  Eigen::Index off = 0;
  for (std::size_t q = 0; q < b; ++q) off += static_cast<Eigen::Index>(mult_[q] * algebra_.dim(q));
  return off;
}

ModuleVector::ModuleVector(HilbertModule mod, std::vector<CMatrix> blks)
    : module(std::move(mod)), blocks(std::move(blks)) {
  if (blocks.size() != module.num_blocks()) throw InvalidInput("module vector: wrong number of blocks");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].rows() != static_cast<Eigen::Index>(module.mult(b)) ||
        blocks[b].cols() != static_cast<Eigen::Index>(module.algebra().dim(b)))
      throw InvalidInput("module vector: block shape mismatch");
    require_finite(blocks[b], "module vector");
  }
}

ModuleVector ModuleVector::zero(const HilbertModule& X) {
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) blks.push_back(CMatrix::Zero(X.mult(b), X.algebra().dim(b)));
  return {X, std::move(blks)};
}

namespace {

void require_same(const HilbertModule& X, const HilbertModule& Y) {
  if (!(X == Y)) throw InvalidInput("vectors from different modules");
}

template <class F>
ModuleVector blockwise(const ModuleVector& x, const ModuleVector& y, F f) {
  require_same(x.module, y.module);
  ModuleVector out = x;
  for (std::size_t b = 0; b < x.blocks.size(); ++b) out.blocks[b] = f(x.blocks[b], y.blocks[b]);
  return out;
}

}  // namespace

ModuleVector operator+(const ModuleVector& x, const ModuleVector& y) {
  return blockwise(x, y, [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a + b; });
}

ModuleVector operator-(const ModuleVector& x, const ModuleVector& y) {
  return blockwise(x, y, [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a - b; });
}

ModuleVector operator*(Complex s, const ModuleVector& x) {
  ModuleVector out = x;
  for (auto& m : out.blocks) m *= s;
  return out;
}

AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y) {
  require_same(x.module, y.module);
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < x.blocks.size(); ++b) blks.push_back(x.blocks[b].adjoint() * y.blocks[b]);
  return {x.module.algebra(), std::move(blks)};
}

ModuleVector right_act(const ModuleVector& x, const AlgebraElement& a) {
  if (!(x.module.algebra() == a.algebra)) throw InvalidInput("right_act: algebra mismatch");
  ModuleVector out = x;
  for (std::size_t b = 0; b < x.blocks.size(); ++b) out.blocks[b] = x.blocks[b] * a.blocks[b];
  return out;
}

double norm(const ModuleVector& x) {
  double n = 0;
  for (const auto& m : x.blocks) n = std::max(n, op_norm(m));
  return n;
}

double distance(const ModuleVector& x, const ModuleVector& y) { return norm(x - y); }

double amplified_norm(std::span<const ModuleVector> entries, std::size_t level) {
  if (entries.size() != level * level) throw InvalidInput("amplified_norm: need level^2 entries");
  if (level == 0) return 0.0;
  const HilbertModule& X = entries[0].module;
  for (const auto& e : entries) require_same(X, e.module);
  double best = 0;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) {
    const auto n = static_cast<Eigen::Index>(X.algebra().dim(b));
    const auto L = static_cast<Eigen::Index>(level);
    CMatrix G = CMatrix::Zero(L * n, L * n);
    for (Eigen::Index p = 0; p < L; ++p)
      for (Eigen::Index q = 0; q < L; ++q)
        for (Eigen::Index r = 0; r < L; ++r)
          G.block(p * n, q * n, n, n) +=
              entries[r * L + p].blocks[b].adjoint() * entries[r * L + q].blocks[b];
    best = std::max(best, op_norm(G));
  }
  return std::sqrt(best);
}

CVector to_coords(const ModuleVector& x) {
  CVector v(static_cast<Eigen::Index>(x.module.dimension()));
  Eigen::Index off = 0;
  for (const auto& m : x.blocks) {
    v.segment(off, m.size()) = vec(m);
    off += m.size();
  }
  return v;
}

ModuleVector from_coords(const HilbertModule& X, const CVector& v) {
  if (v.size() != static_cast<Eigen::Index>(X.dimension())) throw InvalidInput("from_coords: length mismatch");
  std::vector<CMatrix> blks;
  Eigen::Index off = 0;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) {
    const auto m = static_cast<Eigen::Index>(X.mult(b));
    const auto n = static_cast<Eigen::Index>(X.algebra().dim(b));
    blks.push_back(unvec(v.segment(off, m * n), m, n));
    off += m * n;
  }
  return {X, std::move(blks)};
}

std::vector<Label> coordinate_labels(const HilbertModule& X) {
  std::vector<Label> out;
  for (std::size_t b = 0; b < X.num_blocks(); ++b)
    out.insert(out.end(), X.mult(b) * X.algebra().dim(b), X.algebra().label(b));
  return out;
}

AdjointableMap::AdjointableMap(HilbertModule src, HilbertModule tgt, std::vector<CMatrix> blks)
    : source(std::move(src)), target(std::move(tgt)), blocks(std::move(blks)) {
  if (!(source.algebra() == target.algebra())) throw InvalidInput("adjointable map: modules over different algebras");
  if (blocks.size() != source.num_blocks()) throw InvalidInput("adjointable map: wrong number of blocks");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].rows() != static_cast<Eigen::Index>(target.mult(b)) ||
        blocks[b].cols() != static_cast<Eigen::Index>(source.mult(b)))
      throw InvalidInput("adjointable map: block shape mismatch");
    require_finite(blocks[b], "adjointable map");
  }
}

AdjointableMap AdjointableMap::identity(const HilbertModule& X) {
  std::vector<CMatrix> blks;
  for (auto m : X.mult()) blks.push_back(CMatrix::Identity(m, m));
  return {X, X, std::move(blks)};
}

AdjointableMap AdjointableMap::zero(const HilbertModule& X, const HilbertModule& Y) {
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) blks.push_back(CMatrix::Zero(Y.mult(b), X.mult(b)));
  return {X, Y, std::move(blks)};
}

AdjointableMap adjoint_of(const AdjointableMap& a) {
  std::vector<CMatrix> blks;
  for (const auto& m : a.blocks) blks.push_back(m.adjoint());
  return {a.target, a.source, std::move(blks)};
}

ModuleVector apply_map(const AdjointableMap& a, const ModuleVector& x) {
  require_same(a.source, x.module);
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < x.blocks.size(); ++b) blks.push_back(a.blocks[b] * x.blocks[b]);
  return {a.target, std::move(blks)};
}

AdjointableMap compose(const AdjointableMap& a, const AdjointableMap& b) {
  if (!(a.source == b.target)) throw InvalidInput("compose: maps are not composable");
  std::vector<CMatrix> blks;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) blks.push_back(a.blocks[k] * b.blocks[k]);
  return {b.source, a.target, std::move(blks)};
}

namespace {

template <class F>
AdjointableMap mapwise(const AdjointableMap& a, const AdjointableMap& b, F f) {
  if (!(a.source == b.source) || !(a.target == b.target)) throw InvalidInput("maps with different shapes");
  AdjointableMap out = a;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) out.blocks[k] = f(a.blocks[k], b.blocks[k]);
  return out;
}

}  // namespace

AdjointableMap operator+(const AdjointableMap& a, const AdjointableMap& b) {
  return mapwise(a, b, [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x + y; });
}

AdjointableMap operator-(const AdjointableMap& a, const AdjointableMap& b) {
  return mapwise(a, b, [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x - y; });
}

AdjointableMap operator*(Complex s, const AdjointableMap& a) {
  AdjointableMap out = a;
  for (auto& m : out.blocks) m *= s;
  return out;
}

double map_norm(const AdjointableMap& a) {
  double n = 0;
  for (const auto& m : a.blocks) n = std::max(n, op_norm(m));
  return n;
}

double map_distance(const AdjointableMap& a, const AdjointableMap& b) { return map_norm(a - b); }

double unitarity_residual(const AdjointableMap& a) {
  double r = 0;
  for (const auto& m : a.blocks) r = std::max(r, unitarity_residual(m));
  return r;
}

bool is_unitary_module_map(const AdjointableMap& a, double tol) { return unitarity_residual(a) <= tol; }

HilbertModule restrict_module(const HilbertModule& X, const LabelSet& F) {
  FdCStarAlgebra R = restrict_algebra(X.algebra(), F);
  std::vector<std::size_t> mult;
  for (Label k : R.labels()) mult.push_back(X.mult(*X.algebra().position(k)));
  return {R, std::move(mult)};
}

ModuleVector restrict_vector(const ModuleVector& x, const LabelSet& F) {
  HilbertModule R = restrict_module(x.module, F);
  std::vector<CMatrix> blks;
  for (Label k : R.algebra().labels()) blks.push_back(x.blocks[*x.module.algebra().position(k)]);
  return {R, std::move(blks)};
}

AdjointableMap restrict_map(const AdjointableMap& a, const LabelSet& F) {
  HilbertModule S = restrict_module(a.source, F);
  HilbertModule T = restrict_module(a.target, F);
  std::vector<CMatrix> blks;
  for (Label k : S.algebra().labels()) blks.push_back(a.blocks[*a.source.algebra().position(k)]);
  return {S, T, std::move(blks)};
}

ModuleVector extend_by_zero(const ModuleVector& x, const HilbertModule& target) {
  auto out = ModuleVector::zero(target);
  const auto& A = x.module.algebra();
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    auto p = target.algebra().position(A.label(b));
    if (!p || target.mult(*p) != x.module.mult(b) || target.algebra().dim(*p) != A.dim(b))
      throw InvalidInput("extend_by_zero: incompatible modules");
    out.blocks[*p] = x.blocks[b];
  }
  return out;
}

CMatrix probe_matrix(const LinearMap& L, Eigen::Index in_dim) {
  CMatrix M;
  for (Eigen::Index c = 0; c < in_dim; ++c) {
    CVector e = CVector::Unit(in_dim, c);
    CVector col = L(e);
    if (c == 0) M.resize(col.size(), in_dim);
    if (col.size() != M.rows()) throw InvalidInput("probe_matrix: inconsistent output length");
    M.col(c) = col;
  }
  if (in_dim == 0) M.resize(L(CVector(0)).size(), 0);
  return M;
}

CMatrix coordinate_matrix(const AdjointableMap& a) {
  const auto dx = static_cast<Eigen::Index>(a.source.dimension());
  const auto dy = static_cast<Eigen::Index>(a.target.dimension());
  CMatrix M = CMatrix::Zero(dy, dx);
  for (std::size_t b = 0; b < a.blocks.size(); ++b) {
    const auto n = static_cast<Eigen::Index>(a.source.algebra().dim(b));
    const auto& T = a.blocks[b];
    M.block(a.target.block_offset(b), a.source.block_offset(b), T.rows() * n, T.cols() * n) =
        kron(CMatrix::Identity(n, n), T);
  }
  return M;
}

CMatrix right_unit_action(const HilbertModule& X, std::size_t b, std::size_t r_, std::size_t s_) {
  const auto r = static_cast<Eigen::Index>(r_);
  const auto s = static_cast<Eigen::Index>(s_);
  const auto d = static_cast<Eigen::Index>(X.dimension());
  CMatrix R = CMatrix::Zero(d, d);
  const auto m = static_cast<Eigen::Index>(X.mult(b));
  const Eigen::Index off = X.block_offset(b);
  for (Eigen::Index p = 0; p < m; ++p) R(off + s * m + p, off + r * m + p) = 1.0;
  return R;
}

AdjointableMap module_map_from_linear(const LinearMap& L, const HilbertModule& X, const HilbertModule& Y,
                                      double tol) {
  if (!(X.algebra() == Y.algebra())) throw InvalidInput("module_map_from_linear: modules over different algebras");
  CMatrix M = probe_matrix(L, static_cast<Eigen::Index>(X.dimension()));
  if (M.rows() != static_cast<Eigen::Index>(Y.dimension())) throw InvalidInput("module_map_from_linear: output length");
  const double scale = std::max(1.0, op_norm(M));
  double residual = 0;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) {
    const auto n = static_cast<Eigen::Index>(X.algebra().dim(b));
    for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r)
      for (std::size_t s = 0; s < static_cast<std::size_t>(n); ++s) {
        CMatrix D = M * right_unit_action(X, b, r, s) - right_unit_action(Y, b, r, s) * M;
        residual = std::max(residual, op_norm(D) / scale);
      }
  }
  if (residual > tol) throw NotAModuleMap("linear map does not commute with the right action", residual);
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) {
    const auto mx = static_cast<Eigen::Index>(X.mult(b));
    const auto my = static_cast<Eigen::Index>(Y.mult(b));
    blks.push_back(M.block(Y.block_offset(b), X.block_offset(b), my, mx));
  }
  AdjointableMap T(X, Y, std::move(blks));
  residual = std::max(residual, op_norm(coordinate_matrix(T) - M) / scale);
  if (residual > tol) throw NotAModuleMap("linear map is not blockwise left multiplication", residual);
  return T;
}

}  // namespace modglue
