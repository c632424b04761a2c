#include "modglue/oracle.hpp"

#include <algorithm>
#include <limits>

#include "modglue/errors.hpp"
#include "modglue/tensor.hpp"

namespace modglue {

namespace {

// Offsets of each block in the to_coords order of an algebra.
std::vector<Eigen::Index> coord_offsets(const FdCStarAlgebra& A) {
  std::vector<Eigen::Index> off(A.num_blocks() + 1, 0);
  for (std::size_t b = 0; b < A.num_blocks(); ++b)
    off[b + 1] = off[b] + static_cast<Eigen::Index>(A.dim(b) * A.dim(b));
  return off;
}

Eigen::Index unit_index(const std::vector<Eigen::Index>& off, const FdCStarAlgebra& A, std::size_t b, std::size_t r,
                        std::size_t s) {
  return off[b] + static_cast<Eigen::Index>(s * A.dim(b) + r);
}

// Coordinate matrix of y -> e_{rs} y on block b of a matrix space.
CMatrix left_unit_action(const HilbertModule& Y, std::size_t b, std::size_t r, std::size_t s) {
  const auto d = static_cast<Eigen::Index>(Y.dimension());
  CMatrix L = CMatrix::Zero(d, d);
  const auto m = static_cast<Eigen::Index>(Y.mult(b));
  const auto n = static_cast<Eigen::Index>(Y.algebra().dim(b));
  const Eigen::Index off = Y.block_offset(b);
  const auto ri = static_cast<Eigen::Index>(r);
  const auto si = static_cast<Eigen::Index>(s);
  for (Eigen::Index c = 0; c < n; ++c) L(off + c * m + ri, off + c * m + si) = 1.0;
  return L;
}

}  // namespace

AlgebraElement AlgebraValuedForm::evaluate(const CVector& u, const CVector& v) const {
  CVector c(static_cast<Eigen::Index>(components.size()));
  for (std::size_t q = 0; q < components.size(); ++q) c(static_cast<Eigen::Index>(q)) = u.dot(components[q] * v);
  return element_from_coords(outer, c);
}

AlgebraValuedForm form_from_function(Eigen::Index dim, const FdCStarAlgebra& outer, const FormFunction& f) {
  AlgebraValuedForm F{outer, dim, std::vector<CMatrix>(outer.dimension(), CMatrix::Zero(dim, dim))};
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) {
      CVector val = to_coords(f(CVector::Unit(dim, a), CVector::Unit(dim, b)));
      for (Eigen::Index q = 0; q < val.size(); ++q) F.components[q](a, b) = val(q);
    }
  return F;
}

AlgebraValuedForm congruence(const AlgebraValuedForm& f, const CMatrix& W) {
  if (W.rows() != f.dim) throw InvalidInput("congruence: dimension mismatch");
  AlgebraValuedForm g{f.outer, W.cols(), {}};
  for (const auto& S : f.components) g.components.push_back(W.adjoint() * S * W);
  return g;
}

double form_distance(const AlgebraValuedForm& f, const AlgebraValuedForm& g) {
  if (!(f.outer == g.outer) || f.dim != g.dim) throw InvalidInput("form_distance: forms of different shape");
  double d = 0;
  for (std::size_t q = 0; q < f.components.size(); ++q)
    d = std::max(d, op_norm(f.components[q] - g.components[q]));
  return d;
}

GenericBalancedTensor::GenericBalancedTensor(const FdCStarAlgebra& middle, const LeftFactor& left,
                                             const RightFactor& right, double tol) {
  const Eigen::Index dL = left.dim, dR = right.dim;
  const auto nunits = static_cast<std::size_t>(middle.dimension());
  if (left.right_action.size() != nunits || right.left_action.size() != nunits)
    throw InvalidInput("balanced tensor: actions must cover every matrix unit of the middle algebra");
  if (!(left.gram.outer == middle)) throw InvalidInput("balanced tensor: left inner product not middle-valued");
  plain_dim_ = dL * dR;
  const auto off = coord_offsets(middle);

  // Generators e_11, e_p1, e_1p of each block generate the middle algebra.
  std::vector<Eigen::Index> gens;
  for (std::size_t b = 0; b < middle.num_blocks(); ++b) {
    gens.push_back(unit_index(off, middle, b, 0, 0));
    for (std::size_t p = 1; p < middle.dim(b); ++p) {
      gens.push_back(unit_index(off, middle, b, p, 0));
      gens.push_back(unit_index(off, middle, b, 0, p));
    }
  }
  const CMatrix IL = CMatrix::Identity(dL, dL), IR = CMatrix::Identity(dR, dR);
  relations_.resize(plain_dim_, plain_dim_ * static_cast<Eigen::Index>(gens.size()));
  for (std::size_t g = 0; g < gens.size(); ++g)
    relations_.middleCols(static_cast<Eigen::Index>(g) * plain_dim_, plain_dim_) =
        kron(left.right_action[gens[g]], IR) - kron(IL, right.left_action[gens[g]]);
  Q_ = kernel_basis(relations_.adjoint(), tol);

  // <x (x) y | x' (x) y'> = <y | <x|x'> y'>.
  const auto& H = right.gram.components;
  std::vector<CMatrix> S(H.size(), CMatrix::Zero(plain_dim_, plain_dim_));
  for (std::size_t u = 0; u < nunits; ++u) {
    const CMatrix& G = left.gram.components[u];
    if (G.cwiseAbs().maxCoeff() == 0.0) continue;
    std::vector<CMatrix> HL;
    for (const auto& Hc : H) HL.push_back(Hc * right.left_action[u]);
    for (Eigen::Index a = 0; a < dL; ++a)
      for (Eigen::Index a2 = 0; a2 < dL; ++a2) {
        const Complex g = G(a, a2);
        if (g == Complex(0.0)) continue;
        for (std::size_t c = 0; c < H.size(); ++c) S[c].block(a * dR, a2 * dR, dR, dR) += g * HL[c];
      }
  }
  gram_ = AlgebraValuedForm{right.gram.outer, Q_.cols(), {}};
  for (const auto& Sc : S) gram_.components.push_back(Q_.adjoint() * Sc * Q_);
  for (const auto& Rr : right.outer_right_action) outer_right_.push_back(Q_.adjoint() * kron(IL, Rr) * Q_);
}

bool OracleComparison::agrees(double tol) const {
  return oracle_dim == model_dim && relation_residual <= tol && gram_residual <= tol &&
         (model_dim == 0 || min_singular > 1e-6);
}

OracleComparison compare_with_model(const GenericBalancedTensor& T, const CMatrix& model_map,
                                    const AlgebraValuedForm& model_gram) {
  if (model_map.cols() != T.plain_dim()) throw InvalidInput("compare_with_model: model map has wrong width");
  OracleComparison c;
  c.oracle_dim = T.dimension();
  c.model_dim = model_map.rows();
  const double scale = std::max(1.0, op_norm(model_map));
  c.relation_residual = op_norm(model_map * T.relations()) / scale;
  c.induced = model_map * T.complement();
  auto s = singular_values(c.induced);
  c.min_singular = (c.induced.rows() == c.induced.cols() && !s.empty()) ? s.back() : 0.0;
  if (c.oracle_dim == c.model_dim)
    c.gram_residual = form_distance(congruence(model_gram, c.induced), T.gram());
  else
    c.gram_residual = std::numeric_limits<double>::infinity();
  return c;
}

HilbertModule self_module(const FdCStarAlgebra& A) { return {A, A.dims()}; }

AlgebraValuedForm summed_form(const std::vector<HilbertModule>& shape, const FdCStarAlgebra& outer,
                              const std::vector<std::vector<Label>>& outer_label) {
  Eigen::Index dim = 0;
  for (const auto& P : shape) dim += static_cast<Eigen::Index>(P.dimension());
  const auto off = coord_offsets(outer);
  AlgebraValuedForm F{outer, dim, std::vector<CMatrix>(outer.dimension(), CMatrix::Zero(dim, dim))};
  Eigen::Index base = 0;
  for (std::size_t p = 0; p < shape.size(); ++p) {
    const auto& P = shape[p];
    for (std::size_t b = 0; b < P.num_blocks(); ++b) {
      auto o = outer.position(outer_label.at(p).at(b));
      if (!o || outer.dim(*o) != P.algebra().dim(b)) throw InvalidInput("summed_form: incompatible outer block");
      const auto m = static_cast<Eigen::Index>(P.mult(b));
      const std::size_t n = P.algebra().dim(b);
      const Eigen::Index boff = base + P.block_offset(b);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          auto& C = F.components[unit_index(off, outer, *o, r, s)];
          for (Eigen::Index q = 0; q < m; ++q)
            C(boff + static_cast<Eigen::Index>(r) * m + q, boff + static_cast<Eigen::Index>(s) * m + q) += 1.0;
        }
    }
    base += static_cast<Eigen::Index>(P.dimension());
  }
  return F;
}

LeftFactor left_factor(const HilbertModule& X, const FdCStarAlgebra& middle) {
  LeftFactor L;
  L.dim = static_cast<Eigen::Index>(X.dimension());
  for (std::size_t b = 0; b < middle.num_blocks(); ++b) {
    auto p = X.algebra().position(middle.label(b));
    if (p && X.algebra().dim(*p) != middle.dim(b)) throw InvalidInput("left_factor: block dimension mismatch");
    for (std::size_t s = 0; s < middle.dim(b); ++s)
      for (std::size_t r = 0; r < middle.dim(b); ++r)
        L.right_action.push_back(p ? right_unit_action(X, *p, r, s) : CMatrix::Zero(L.dim, L.dim));
  }
  L.gram = summed_form({X}, middle, {X.algebra().labels()});
  return L;
}

LeftFactor left_factor(const BModule& Z) {
  const auto& A = Z.algebra.base();
  LeftFactor L;
  L.dim = static_cast<Eigen::Index>(Z.dimension());
  for (std::size_t b = 0; b < A.num_blocks(); ++b)
    for (std::size_t s = 0; s < A.dim(b); ++s)
      for (std::size_t r = 0; r < A.dim(b); ++r) {
        CMatrix R = CMatrix::Zero(L.dim, L.dim);
        Eigen::Index base = 0;
        for (const auto& P : Z.parts) {
          const auto d = static_cast<Eigen::Index>(P.dimension());
          if (auto p = P.algebra().position(A.label(b))) R.block(base, base, d, d) = right_unit_action(P, *p, r, s);
          base += d;
        }
        L.right_action.push_back(std::move(R));
      }
  std::vector<std::vector<Label>> labels;
  for (const auto& P : Z.parts) labels.push_back(P.algebra().labels());
  L.gram = summed_form(Z.parts, A, labels);
  return L;
}

LeftFactor left_factor(const GenericBalancedTensor& T, const SumAlgebraB& B) {
  const auto& A = B.base();
  const auto& flat = B.flat();
  const auto aoff = coord_offsets(A);
  const auto foff = coord_offsets(flat);
  if (T.outer_right_action().size() != flat.dimension() || !(T.gram().outer == flat))
    throw InvalidInput("left_factor: tensor is not a right B-module");
  LeftFactor L;
  L.dim = T.dimension();
  L.right_action.assign(A.dimension(), CMatrix::Zero(L.dim, L.dim));
  L.gram = AlgebraValuedForm{A, L.dim, std::vector<CMatrix>(A.dimension(), CMatrix::Zero(L.dim, L.dim))};
  for (std::size_t i = 0; i < B.num_sets(); ++i)
    for (Label k : B.cover().set(i)) {
      const std::size_t fb = B.flat_label(i, k);
      for (std::size_t r = 0; r < A.dim(k); ++r)
        for (std::size_t s = 0; s < A.dim(k); ++s) {
          const auto ai = unit_index(aoff, A, k, r, s);
          const auto fi = unit_index(foff, flat, fb, r, s);
          L.right_action[ai] += T.outer_right_action()[fi];
          L.gram.components[ai] += T.gram().components[fi];
        }
    }
  return L;
}

RightFactor right_factor(const HilbertModule& Y, const FdCStarAlgebra& middle, const std::vector<Label>& middle_label) {
  if (middle_label.size() != Y.num_blocks()) throw InvalidInput("right_factor: one middle label per block");
  RightFactor R;
  R.dim = static_cast<Eigen::Index>(Y.dimension());
  for (std::size_t b = 0; b < middle.num_blocks(); ++b)
    for (std::size_t s = 0; s < middle.dim(b); ++s)
      for (std::size_t r = 0; r < middle.dim(b); ++r) {
        CMatrix L = CMatrix::Zero(R.dim, R.dim);
        for (std::size_t yb = 0; yb < Y.num_blocks(); ++yb) {
          if (middle_label[yb] != middle.label(b)) continue;
          if (Y.mult(yb) != middle.dim(b)) throw InvalidInput("right_factor: multiplicity differs from middle block");
          L += left_unit_action(Y, yb, r, s);
        }
        R.left_action.push_back(std::move(L));
      }
  const auto& O = Y.algebra();
  R.gram = summed_form({Y}, O, {O.labels()});
  for (std::size_t b = 0; b < O.num_blocks(); ++b)
    for (std::size_t s = 0; s < O.dim(b); ++s)
      for (std::size_t r = 0; r < O.dim(b); ++r) R.outer_right_action.push_back(right_unit_action(Y, b, r, s));
  return R;
}

RightFactor right_factor(const SumAlgebraB& B) {
  std::vector<Label> middle_label;
  for (std::size_t i = 0; i < B.num_sets(); ++i)
    for (Label k : B.cover().set(i)) middle_label.push_back(k);
  return right_factor(self_module(B.flat()), B.base(), middle_label);
}

RightFactor right_factor(const FdCStarAlgebra& A, const LabelSet& F) {
  auto AF = restrict_algebra(A, F);
  return right_factor(self_module(AF), A, AF.labels());
}

namespace {

template <std::size_t N>
AlgebraValuedForm family_form(const Family<N>& shape, const SumAlgebraB& B) {
  std::vector<HilbertModule> mods;
  std::vector<std::vector<Label>> labels;
  for (std::size_t p = 0; p < shape.parts.size(); ++p) {
    const auto& M = shape.parts[p].module;
    mods.push_back(M);
    std::vector<Label> l;
    for (Label k : M.algebra().labels()) l.push_back(B.flat_label(p % shape.n_sets, k));
    labels.push_back(std::move(l));
  }
  return summed_form(mods, B.flat(), labels);
}

BElement b_basis(const SumAlgebraB& B, Eigen::Index beta) {
  const auto d = static_cast<Eigen::Index>(B.flat().dimension());
  return B.unflatten(element_from_coords(B.flat(), CVector::Unit(d, beta)));
}

}  // namespace

Eigen::Index pair_plain_dim(const BModule& Z) {
  return static_cast<Eigen::Index>(Z.dimension() * Z.algebra.flat().dimension());
}

Eigen::Index triple_plain_dim(const BModule& Z) {
  return static_cast<Eigen::Index>(family_dimension(pair_zero(Z)) * Z.algebra.flat().dimension());
}

ModelCheck check_pair_model(const BModule& Z) {
  const auto& B = Z.algebra;
  GenericBalancedTensor T(B.base(), left_factor(Z), right_factor(B));
  const PairVector pshape = pair_zero(Z);
  const BVector zshape = b_zero(Z);
  const auto dZ = static_cast<Eigen::Index>(Z.dimension());
  const auto dB = static_cast<Eigen::Index>(B.flat().dimension());
  std::vector<BElement> bs;
  for (Eigen::Index beta = 0; beta < dB; ++beta) bs.push_back(b_basis(B, beta));
  CMatrix model(static_cast<Eigen::Index>(family_dimension(pshape)), dZ * dB);
  for (Eigen::Index a = 0; a < dZ; ++a) {
    const PairVector ez = eta_map(Z, family_from_coords(zshape, CVector::Unit(dZ, a)));
    for (Eigen::Index beta = 0; beta < dB; ++beta) model.col(a * dB + beta) = to_coords(pair_right_act(ez, bs[beta]));
  }
  auto cmp = compare_with_model(T, model, family_form(pshape, B));
  return {std::move(T), std::move(cmp)};
}

ModelCheck check_triple_model(const BModule& Z, const ModelCheck& pair) {
  const auto& B = Z.algebra;
  const std::size_t N = Z.num_sets();
  GenericBalancedTensor T(B.base(), left_factor(pair.tensor, B), right_factor(B));
  const PairVector pshape = pair_zero(Z);
  const TripleVector tshape = triple_zero(Z);
  const auto dP = pair.tensor.dimension();
  const auto dB = static_cast<Eigen::Index>(B.flat().dimension());
  std::vector<BElement> bs;
  for (Eigen::Index beta = 0; beta < dB; ++beta) bs.push_back(b_basis(B, beta));
  CMatrix model(static_cast<Eigen::Index>(family_dimension(tshape)), dP * dB);
  for (Eigen::Index g = 0; g < dP; ++g) {
    const PairVector t = family_from_coords(pshape, pair.comparison.induced.col(g));
    TripleVector lifted = tshape;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t l = 0; l < N; ++l)
          lifted.at(i, j, l) = restrict_vector(t.at(i, j), Z.cover().overlap(i, j, l));
    for (Eigen::Index beta = 0; beta < dB; ++beta)
      model.col(g * dB + beta) = to_coords(triple_right_act(lifted, bs[beta]));
  }
  auto cmp = compare_with_model(T, model, family_form(tshape, B));
  return {std::move(T), std::move(cmp)};
}

}  // namespace modglue
