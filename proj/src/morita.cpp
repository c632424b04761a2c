#include "modglue/morita.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modglue/errors.hpp"

namespace modglue {

namespace {

double max_abs(const CMatrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

CMatrix unit_matrix(std::size_t n, std::size_t r, std::size_t s) {
  CMatrix e = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = 1.0;
  return e;
}

std::vector<CMatrix> all_units(std::size_t n) {
  std::vector<CMatrix> out;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t r = 0; r < n; ++r) out.push_back(unit_matrix(n, r, s));
  return out;
}

std::vector<CMatrix> basis_matrices(std::size_t m, std::size_t n) {
  std::vector<CMatrix> out;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t p = 0; p < m; ++p) {
      CMatrix e = CMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      e(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) = 1.0;
      out.push_back(e);
    }
  return out;
}

bool left_defined(const EquivalenceBimodule& M, std::size_t b) { return M.mult[b] == M.left.dim(b); }

// Block-level operations on raw matrices.
CMatrix lact(const EquivalenceBimodule& M, std::size_t b, const CMatrix& a, const CMatrix& x) {
  const CMatrix& u = M.left_twist[b];
  return u * a * u.adjoint() * x;
}
CMatrix ract(const EquivalenceBimodule& M, std::size_t b, const CMatrix& x, const CMatrix& a) {
  const CMatrix& w = M.right_twist[b];
  return x * w * a * w.adjoint();
}
CMatrix rip(const EquivalenceBimodule& M, std::size_t b, const CMatrix& x, const CMatrix& y) {
  const CMatrix& w = M.right_twist[b];
  return w.adjoint() * x.adjoint() * y * w;
}
CMatrix lip(const EquivalenceBimodule& M, std::size_t b, const CMatrix& x, const CMatrix& y) {
  const CMatrix& u = M.left_twist[b];
  return u.adjoint() * x * y.adjoint() * u;
}

// Scalar s with C ~ s R, and the relative defect |C - s R|.
std::pair<Complex, double> scalar_ratio(const CMatrix& C, const CMatrix& R) {
  const Complex rr = (R.adjoint() * R).trace();
  if (std::abs(rr) == 0.0) return {Complex(0.0), op_norm(C)};
  const Complex s = (R.adjoint() * C).trace() / rr;
  return {s, op_norm(C - s * R) / std::max(1.0, op_norm(C))};
}

}  // namespace

EquivalenceBimodule make_bimodule(FdCStarAlgebra left, FdCStarAlgebra right, std::vector<CMatrix> left_twist,
                                  std::vector<CMatrix> right_twist) {
  if (left.prim_size() != right.prim_size() || left.labels() != right.labels())
    throw InvalidInput("bimodule: left and right algebras must share block labels");
  if (left_twist.size() != left.num_blocks()) throw InvalidInput("bimodule: one left twist per block");
  if (right_twist.empty())
    for (auto n : right.dims()) right_twist.push_back(CMatrix::Identity(n, n));
  if (right_twist.size() != right.num_blocks()) throw InvalidInput("bimodule: one right twist per block");
  EquivalenceBimodule M{std::move(left), std::move(right), {}, std::move(left_twist), std::move(right_twist)};
  for (std::size_t b = 0; b < M.left_twist.size(); ++b) {
    const auto& u = M.left_twist[b];
    const auto& w = M.right_twist[b];
    if (u.rows() != u.cols()) throw InvalidInput("bimodule: left twist must be square");
    const auto n = static_cast<Eigen::Index>(M.right.dim(b));
    if (w.rows() != n || w.cols() != n) throw InvalidInput("bimodule: right twist must be n_k x n_k");
    require_finite(u, "left twist");
    require_finite(w, "right twist");
    M.mult.push_back(static_cast<std::size_t>(u.rows()));
  }
  return M;
}

EquivalenceBimodule standard_bimodule(const FdCStarAlgebra& left, const FdCStarAlgebra& right) {
  std::vector<CMatrix> u;
  for (auto n : left.dims()) u.push_back(CMatrix::Identity(n, n));
  return make_bimodule(left, right, std::move(u));
}

EquivalenceBimodule identity_bimodule(const FdCStarAlgebra& A) { return standard_bimodule(A, A); }

EquivalenceBimodule restrict_bimodule(const EquivalenceBimodule& M, const LabelSet& F) {
  auto L = restrict_algebra(M.left, F);
  auto R = restrict_algebra(M.right, F);
  std::vector<CMatrix> u, w;
  for (Label k : R.labels()) {
    const auto b = *M.right.position(k);
    u.push_back(M.left_twist[b]);
    w.push_back(M.right_twist[b]);
  }
  return make_bimodule(std::move(L), std::move(R), std::move(u), std::move(w));
}

ModuleVector bimodule_left_act(const EquivalenceBimodule& M, const AlgebraElement& a, const ModuleVector& x) {
  if (!(a.algebra == M.left) || !(x.module == M.space())) throw InvalidInput("bimodule_left_act: shape mismatch");
  ModuleVector out = x;
  for (std::size_t b = 0; b < M.num_blocks(); ++b) {
    if (!left_defined(M, b)) throw InvalidInput("bimodule_left_act: multiplicity differs from left block size");
    out.blocks[b] = lact(M, b, a.blocks[b], x.blocks[b]);
  }
  return out;
}

ModuleVector bimodule_right_act(const EquivalenceBimodule& M, const ModuleVector& x, const AlgebraElement& a) {
  if (!(a.algebra == M.right) || !(x.module == M.space())) throw InvalidInput("bimodule_right_act: shape mismatch");
  ModuleVector out = x;
  for (std::size_t b = 0; b < M.num_blocks(); ++b) out.blocks[b] = ract(M, b, x.blocks[b], a.blocks[b]);
  return out;
}

AlgebraElement bimodule_right_inner(const EquivalenceBimodule& M, const ModuleVector& x, const ModuleVector& y) {
  if (!(x.module == M.space()) || !(y.module == M.space())) throw InvalidInput("bimodule_right_inner: shape mismatch");
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < M.num_blocks(); ++b) blks.push_back(rip(M, b, x.blocks[b], y.blocks[b]));
  return {M.right, std::move(blks)};
}

AlgebraElement bimodule_left_inner(const EquivalenceBimodule& M, const ModuleVector& x, const ModuleVector& y) {
  if (!(x.module == M.space()) || !(y.module == M.space())) throw InvalidInput("bimodule_left_inner: shape mismatch");
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < M.num_blocks(); ++b) {
    if (!left_defined(M, b)) throw InvalidInput("bimodule_left_inner: multiplicity differs from left block size");
    blks.push_back(lip(M, b, x.blocks[b], y.blocks[b]));
  }
  return {M.left, std::move(blks)};
}

bool BimoduleValidation::passes(double tol) const {
  return left_action_defined && aligned && left_full && right_full && twist_residual <= tol &&
         compatibility_residual <= tol && axiom_residual <= tol;
}

BimoduleValidation validate_bimodule(const EquivalenceBimodule& M, double tol) {
  BimoduleValidation v;
  v.aligned = M.left.labels() == M.right.labels() && M.left.prim_size() == M.right.prim_size();
  v.left_action_defined = true;
  v.left_full = true;
  v.right_full = true;
  for (std::size_t b = 0; b < M.num_blocks(); ++b) {
    const std::size_t m = M.mult[b], n = M.right.dim(b), nl = M.left.dim(b);
    v.twist_residual = std::max({v.twist_residual, unitarity_residual(M.left_twist[b]),
                                 unitarity_residual(M.right_twist[b])});
    const auto X = basis_matrices(m, n);
    const auto Ur = all_units(n);

    // Right fullness and right-module identities.
    CMatrix span(static_cast<Eigen::Index>(n * n), static_cast<Eigen::Index>(X.size() * X.size()));
    Eigen::Index col = 0;
    for (const auto& x : X)
      for (const auto& y : X) {
        span.col(col++) = vec(rip(M, b, x, y));
        for (const auto& a : Ur) {
          v.axiom_residual = std::max(v.axiom_residual, max_abs(rip(M, b, x, ract(M, b, y, a)) - rip(M, b, x, y) * a));
          v.axiom_residual =
              std::max(v.axiom_residual, max_abs(rip(M, b, ract(M, b, x, a), y) - a.adjoint() * rip(M, b, x, y)));
        }
      }
    if (numerical_rank(span) != n * n) v.right_full = false;

    if (m != nl) {
      v.left_action_defined = false;
      v.left_full = false;
      continue;
    }
    const auto Ul = all_units(nl);
    CMatrix lspan(static_cast<Eigen::Index>(nl * nl), static_cast<Eigen::Index>(X.size() * X.size()));
    col = 0;
    for (const auto& x : X)
      for (const auto& y : X) {
        const CMatrix l = lip(M, b, x, y);
        lspan.col(col++) = vec(l);
        for (const auto& z : X)
          v.compatibility_residual =
              std::max(v.compatibility_residual, max_abs(lact(M, b, l, z) - ract(M, b, x, rip(M, b, y, z))));
        for (const auto& a : Ul) {
          v.axiom_residual = std::max(v.axiom_residual, max_abs(lip(M, b, lact(M, b, a, x), y) - a * l));
          v.axiom_residual = std::max(v.axiom_residual, max_abs(lip(M, b, x, lact(M, b, a, y)) - l * a.adjoint()));
          v.axiom_residual = std::max(
              v.axiom_residual, max_abs(rip(M, b, lact(M, b, a, x), y) - rip(M, b, x, lact(M, b, a.adjoint(), y))));
          for (const auto& r : Ur)
            v.axiom_residual = std::max(
                v.axiom_residual, max_abs(ract(M, b, lact(M, b, a, x), r) - lact(M, b, a, ract(M, b, x, r))));
        }
        for (const auto& a : Ur)
          v.axiom_residual = std::max(
              v.axiom_residual, max_abs(lip(M, b, ract(M, b, x, a), y) - lip(M, b, x, ract(M, b, y, a.adjoint()))));
      }
    if (numerical_rank(lspan) != nl * nl) v.left_full = false;
  }
  (void)tol;
  return v;
}

EquivalenceBimodule dual_bimodule(const EquivalenceBimodule& M) {
  return make_bimodule(M.right, M.left, M.right_twist, M.left_twist);
}

ModuleVector dual_vector(const EquivalenceBimodule& M, const ModuleVector& x) {
  if (!(x.module == M.space())) throw InvalidInput("dual_vector: vector not in the bimodule");
  const auto D = dual_bimodule(M);
  std::vector<CMatrix> blks;
  for (const auto& m : x.blocks) blks.push_back(m.adjoint());
  return {D.space(), std::move(blks)};
}

EquivalenceBimodule tensor_bimodules(const EquivalenceBimodule& M, const EquivalenceBimodule& N) {
  if (!(M.right == N.left)) throw InvalidInput("tensor_bimodules: middle algebras differ");
  for (std::size_t b = 0; b < N.num_blocks(); ++b)
    if (!left_defined(N, b)) throw InvalidInput("tensor_bimodules: right factor is not in normal form");
  return make_bimodule(M.left, N.right, M.left_twist, N.right_twist);
}

ModuleVector tensor_vectors(const EquivalenceBimodule& M, const EquivalenceBimodule& N, const ModuleVector& x,
                            const ModuleVector& y) {
  const auto T = tensor_bimodules(M, N);
  if (!(x.module == M.space()) || !(y.module == N.space())) throw InvalidInput("tensor_vectors: shape mismatch");
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < M.num_blocks(); ++b)
    blks.push_back(x.blocks[b] * M.right_twist[b] * N.left_twist[b].adjoint() * y.blocks[b]);
  return {T.space(), std::move(blks)};
}

LeftFactor bimodule_left_factor(const EquivalenceBimodule& M) {
  const auto X = M.space();
  LeftFactor L;
  L.dim = static_cast<Eigen::Index>(X.dimension());
  for (std::size_t b = 0; b < M.num_blocks(); ++b) {
    const auto m = static_cast<Eigen::Index>(M.mult[b]);
    for (const auto& e : all_units(M.right.dim(b))) {
      CMatrix R = CMatrix::Zero(L.dim, L.dim);
      const CMatrix W = M.right_twist[b] * e * M.right_twist[b].adjoint();
      R.block(X.block_offset(b), X.block_offset(b), m * W.rows(), m * W.rows()) =
          kron(W.transpose(), CMatrix::Identity(m, m));
      L.right_action.push_back(std::move(R));
    }
  }
  L.gram = form_from_function(L.dim, M.right, [&](const CVector& u, const CVector& v) {
    return bimodule_right_inner(M, from_coords(X, u), from_coords(X, v));
  });
  return L;
}

RightFactor bimodule_right_factor(const EquivalenceBimodule& N) {
  const auto Y = N.space();
  RightFactor R;
  R.dim = static_cast<Eigen::Index>(Y.dimension());
  for (std::size_t b = 0; b < N.num_blocks(); ++b) {
    if (!left_defined(N, b)) throw InvalidInput("bimodule_right_factor: bimodule not in normal form");
    const auto n = static_cast<Eigen::Index>(N.right.dim(b));
    for (const auto& e : all_units(N.left.dim(b))) {
      CMatrix L = CMatrix::Zero(R.dim, R.dim);
      const CMatrix V = N.left_twist[b] * e * N.left_twist[b].adjoint();
      L.block(Y.block_offset(b), Y.block_offset(b), V.rows() * n, V.rows() * n) = kron(CMatrix::Identity(n, n), V);
      R.left_action.push_back(std::move(L));
    }
  }
  R.gram = form_from_function(R.dim, N.right, [&](const CVector& u, const CVector& v) {
    return bimodule_right_inner(N, from_coords(Y, u), from_coords(Y, v));
  });
  for (std::size_t b = 0; b < N.num_blocks(); ++b) {
    const auto m = static_cast<Eigen::Index>(N.mult[b]);
    for (const auto& e : all_units(N.right.dim(b))) {
      CMatrix A = CMatrix::Zero(R.dim, R.dim);
      const CMatrix W = N.right_twist[b] * e * N.right_twist[b].adjoint();
      A.block(Y.block_offset(b), Y.block_offset(b), m * W.rows(), m * W.rows()) =
          kron(W.transpose(), CMatrix::Identity(m, m));
      R.outer_right_action.push_back(std::move(A));
    }
  }
  return R;
}

BimoduleMap identity_map(const EquivalenceBimodule& M) {
  BimoduleMap T;
  for (std::size_t b = 0; b < M.num_blocks(); ++b) {
    T.left.push_back(CMatrix::Identity(M.mult[b], M.mult[b]));
    T.right.push_back(CMatrix::Identity(M.right.dim(b), M.right.dim(b)));
  }
  return T;
}

ModuleVector apply_map(const BimoduleMap& T, const EquivalenceBimodule& target, const ModuleVector& x) {
  if (T.left.size() != x.blocks.size()) throw InvalidInput("apply_map: block count mismatch");
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < x.blocks.size(); ++b) {
    if (T.left[b].cols() != x.blocks[b].rows() || T.right[b].rows() != x.blocks[b].cols())
      throw InvalidInput("apply_map: block shape mismatch");
    blks.push_back(T.left[b] * x.blocks[b] * T.right[b]);
  }
  return {target.space(), std::move(blks)};
}

BimoduleMap compose(const BimoduleMap& a, const BimoduleMap& b) {
  if (a.left.size() != b.left.size()) throw InvalidInput("compose: block count mismatch");
  BimoduleMap c;
  for (std::size_t k = 0; k < a.left.size(); ++k) {
    if (a.left[k].cols() != b.left[k].rows()) throw InvalidInput("compose: maps are not composable");
    c.left.push_back(a.left[k] * b.left[k]);
    c.right.push_back(b.right[k] * a.right[k]);
  }
  return c;
}

BimoduleMap adjoint_of(const BimoduleMap& T) {
  BimoduleMap A;
  for (std::size_t k = 0; k < T.left.size(); ++k) {
    A.left.push_back(T.left[k].adjoint());
    A.right.push_back(T.right[k].adjoint());
  }
  return A;
}

CMatrix operator_form(const BimoduleMap& T, std::size_t k) { return kron(T.right.at(k).transpose(), T.left.at(k)); }

double map_distance(const BimoduleMap& a, const BimoduleMap& b) {
  if (a.left.size() != b.left.size()) throw InvalidInput("map_distance: block count mismatch");
  double d = 0;
  for (std::size_t k = 0; k < a.left.size(); ++k) {
    const CMatrix A = operator_form(a, k), B = operator_form(b, k);
    if (A.rows() != B.rows() || A.cols() != B.cols()) return std::numeric_limits<double>::infinity();
    d = std::max(d, op_norm(A - B));
  }
  return d;
}

BimoduleMap restrict_map(const BimoduleMap& T, const FdCStarAlgebra& source_algebra, const LabelSet& F) {
  if (T.left.size() != source_algebra.num_blocks()) throw InvalidInput("restrict_map: block count mismatch");
  BimoduleMap R;
  const auto sub = restrict_algebra(source_algebra, F);
  for (Label k : sub.labels()) {
    const auto b = *source_algebra.position(k);
    R.left.push_back(T.left[b]);
    R.right.push_back(T.right[b]);
  }
  return R;
}

BimoduleMap dual_map(const BimoduleMap& T) {
  BimoduleMap D;
  for (std::size_t k = 0; k < T.left.size(); ++k) {
    D.left.push_back(T.right[k].adjoint());
    D.right.push_back(T.left[k].adjoint());
  }
  return D;
}

BimoduleMap tensor_maps(const EquivalenceBimodule& M1, const EquivalenceBimodule& N1, const EquivalenceBimodule& M2,
                        const EquivalenceBimodule& N2, const BimoduleMap& T1, const BimoduleMap& T2) {
  BimoduleMap T;
  for (std::size_t b = 0; b < M1.num_blocks(); ++b) {
    const CMatrix C = T1.right[b] * M2.right_twist[b] * N2.left_twist[b].adjoint() * T2.left[b];
    const CMatrix R = M1.right_twist[b] * N1.left_twist[b].adjoint();
    auto [s, defect] = scalar_ratio(C, R);
    if (defect > 1e-8) throw ModelViolation("tensor_maps: maps do not respect the middle action", defect);
    T.left.push_back(s * T1.left[b]);
    T.right.push_back(T2.right[b]);
  }
  return T;
}

BimoduleMapCheck check_bimodule_map(const EquivalenceBimodule& src, const EquivalenceBimodule& dst,
                                    const BimoduleMap& T) {
  if (!(src.left == dst.left) || !(src.right == dst.right) || T.left.size() != src.num_blocks())
    throw InvalidInput("check_bimodule_map: bimodules over different algebras");
  BimoduleMapCheck c;
  for (std::size_t b = 0; b < src.num_blocks(); ++b) {
    const CMatrix &P = T.left[b], &Q = T.right[b];
    if (P.cols() != static_cast<Eigen::Index>(src.mult[b]) || P.rows() != static_cast<Eigen::Index>(dst.mult[b]))
      throw InvalidInput("check_bimodule_map: block shape mismatch");
    auto t = [&](const CMatrix& x) -> CMatrix { return P * x * Q; };
    const auto X = basis_matrices(src.mult[b], src.right.dim(b));
    const bool left_ok = left_defined(src, b) && left_defined(dst, b);
    for (const auto& x : X) {
      for (const auto& a : all_units(src.right.dim(b)))
        c.action_residual = std::max(c.action_residual, max_abs(t(ract(src, b, x, a)) - ract(dst, b, t(x), a)));
      if (left_ok)
        for (const auto& a : all_units(src.left.dim(b)))
          c.action_residual = std::max(c.action_residual, max_abs(t(lact(src, b, a, x)) - lact(dst, b, a, t(x))));
      for (const auto& y : X) {
        c.right_inner_residual =
            std::max(c.right_inner_residual, max_abs(rip(dst, b, t(x), t(y)) - rip(src, b, x, y)));
        if (left_ok)
          c.left_inner_residual = std::max(c.left_inner_residual, max_abs(lip(dst, b, t(x), t(y)) - lip(src, b, x, y)));
      }
    }
    if (!left_ok) c.left_inner_residual = c.action_residual = std::numeric_limits<double>::infinity();
  }
  return c;
}

namespace {

// Unitary P with P A_e = B_e P for all e, if the solution space is one-dimensional.
std::optional<CMatrix> unitary_intertwiner(const std::vector<CMatrix>& A, const std::vector<CMatrix>& B) {
  const Eigen::Index d = A.front().rows();
  const CMatrix I = CMatrix::Identity(d, d);
  CMatrix S(static_cast<Eigen::Index>(A.size()) * d * d, d * d);
  for (std::size_t e = 0; e < A.size(); ++e)
    S.middleRows(static_cast<Eigen::Index>(e) * d * d, d * d) = kron(A[e].transpose(), I) - kron(I, B[e]);
  // The generators have unit norm, so the cutoff is at least kRankTol.
  const CMatrix K = kernel_basis_below(S, kRankTol * std::max(1.0, op_norm(S)));
  if (K.cols() != 1) return std::nullopt;
  CMatrix P = unvec(K.col(0), d, d);
  const double c = (P.adjoint() * P).trace().real() / static_cast<double>(d);
  if (!(c > 0)) return std::nullopt;
  return P / std::sqrt(c);
}

}  // namespace

std::optional<BimoduleMap> bimodules_isomorphic(const EquivalenceBimodule& M, const EquivalenceBimodule& N,
                                                double tol) {
  if (!(M.left == N.left) || !(M.right == N.right) || M.mult != N.mult) return std::nullopt;
  BimoduleMap T;
  for (std::size_t b = 0; b < M.num_blocks(); ++b) {
    if (!left_defined(M, b) || !left_defined(N, b)) return std::nullopt;
    std::vector<CMatrix> la, lb, ra, rb;
    for (const auto& e : all_units(M.left.dim(b))) {
      la.push_back(M.left_twist[b] * e * M.left_twist[b].adjoint());
      lb.push_back(N.left_twist[b] * e * N.left_twist[b].adjoint());
    }
    // P x w_M a w_M^* Q = P x Q w_N a w_N^*  <=>  Q (w_N a w_N^*) = (w_M a w_M^*) Q.
    for (const auto& e : all_units(M.right.dim(b))) {
      ra.push_back(N.right_twist[b] * e * N.right_twist[b].adjoint());
      rb.push_back(M.right_twist[b] * e * M.right_twist[b].adjoint());
    }
    auto P = unitary_intertwiner(la, lb);
    auto Q = unitary_intertwiner(ra, rb);
    if (!P || !Q) return std::nullopt;
    T.left.push_back(*P);
    T.right.push_back(*Q);
  }
  if (check_bimodule_map(M, N, T).max() > tol) return std::nullopt;
  return T;
}

void check_shapes(const BimoduleGluingDatum& D) {
  const std::size_t N = D.cover.size();
  if (D.parts.size() != N) throw InvalidInput("bimodule datum: one bimodule per cover set required");
  if (D.nu.size() != N * N) throw InvalidInput("bimodule datum: need N^2 transitions");
  for (std::size_t i = 0; i < N; ++i) {
    const auto& F = D.cover.set(i);
    if (!(D.parts[i].left == restrict_algebra(D.left_base, F)) || !(D.parts[i].right == restrict_algebra(D.right_base, F)))
      throw InvalidInput("bimodule datum: part " + std::to_string(i) + " is not over the restricted algebras");
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = D.cover.overlap(i, j);
      const auto Ni = D.part_on(i, F), Nj = D.part_on(j, F);
      const auto& T = D.transition(i, j);
      if (T.left.size() != F.size() || T.right.size() != F.size())
        throw InvalidInput("bimodule datum: transition block count mismatch");
      for (std::size_t b = 0; b < F.size(); ++b) {
        const auto n = static_cast<Eigen::Index>(Ni.right.dim(b));
        if (T.left[b].rows() != static_cast<Eigen::Index>(Ni.mult[b]) ||
            T.left[b].cols() != static_cast<Eigen::Index>(Nj.mult[b]) || T.right[b].rows() != n ||
            T.right[b].cols() != n)
          throw InvalidInput("bimodule datum: transition block shape mismatch");
      }
    }
}

bool BimoduleDatumValidation::valid(double tol) const {
  return parts_valid && map_residual <= tol && identity_residual <= tol && involution_residual <= tol;
}

BimoduleDatumValidation validate_bimodule_datum(const BimoduleGluingDatum& D, double tol) {
  check_shapes(D);
  BimoduleDatumValidation v;
  v.parts_valid = std::all_of(D.parts.begin(), D.parts.end(),
                              [&](const EquivalenceBimodule& M) { return validate_bimodule(M, tol).passes(tol); });
  const std::size_t N = D.num_sets();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = D.cover.overlap(i, j);
      const auto Ni = D.part_on(i, F), Nj = D.part_on(j, F);
      const auto& T = D.transition(i, j);
      v.map_residual = std::max(v.map_residual, check_bimodule_map(Nj, Ni, T).max());
      for (std::size_t b = 0; b < F.size(); ++b) v.map_residual = std::max(v.map_residual, unitarity_residual(operator_form(T, b)));
      if (i == j)
        v.identity_residual = std::max(v.identity_residual, map_distance(T, identity_map(Ni)));
      else
        v.involution_residual = std::max(v.involution_residual, map_distance(adjoint_of(T), D.transition(j, i)));
    }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t l = 0; l < N; ++l) {
        const auto F = D.cover.overlap(i, j, l);
        const auto a = restrict_map(D.transition(i, j), D.part_on(j, D.cover.overlap(i, j)).right, F);
        const auto b = restrict_map(D.transition(j, l), D.part_on(l, D.cover.overlap(j, l)).right, F);
        const auto c = restrict_map(D.transition(i, l), D.part_on(l, D.cover.overlap(i, l)).right, F);
        v.cocycle_residual = std::max(v.cocycle_residual, map_distance(compose(a, b), c));
      }
  return v;
}

BimoduleGluingDatum pull_apart_bimodule(const EquivalenceBimodule& M, const ClosedCover& cover) {
  if (!M.right.is_full() || !M.left.is_full()) throw InvalidInput("pull_apart_bimodule: bimodule over full algebras required");
  BimoduleGluingDatum D{M.left, M.right, cover, {}, {}};
  for (const auto& F : cover.sets()) D.parts.push_back(restrict_bimodule(M, F));
  for (std::size_t i = 0; i < cover.size(); ++i)
    for (std::size_t j = 0; j < cover.size(); ++j) D.nu.push_back(identity_map(D.part_on(i, cover.overlap(i, j))));
  return D;
}

GluingDatum right_module_datum(const BimoduleGluingDatum& D, double tol) {
  check_shapes(D);
  const std::size_t N = D.num_sets();
  SumAlgebraB B(D.right_base, D.cover);
  std::vector<HilbertModule> parts;
  for (const auto& M : D.parts) parts.push_back(M.space());
  BModule Z(B, std::move(parts));
  std::vector<AdjointableMap> zeta;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = D.cover.overlap(i, j);
      const auto Ni = D.part_on(i, F), Nj = D.part_on(j, F);
      const auto& T = D.transition(i, j);
      std::vector<CMatrix> blks;
      for (std::size_t b = 0; b < F.size(); ++b) {
        const CMatrix S = Nj.right_twist[b].adjoint() * T.right[b] * Ni.right_twist[b];
        auto [s, defect] = scalar_ratio(S, CMatrix::Identity(S.rows(), S.cols()));
        if (defect > tol) throw ModelViolation("transition is not right A-linear", defect);
        blks.push_back(s * T.left[b]);
      }
      zeta.emplace_back(Nj.space(), Ni.space(), std::move(blks));
    }
  return {std::move(Z), std::move(zeta)};
}

BimoduleGlueResult glue_bimodules(const BimoduleGluingDatum& D, double tol) {
  BimoduleGlueResult res;
  res.right_datum = right_module_datum(D, tol);
  res.glued = glue(res.right_datum);
  const auto& A = D.right_base;
  std::vector<CMatrix> v;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    const Label k = A.label(b);
    const std::size_t g = res.glued.module.mult(b), nl = D.left_base.dim(b);
    if (g != nl) {
      res.diagnostic = "block " + std::to_string(k) + ": glued multiplicity " + std::to_string(g) +
                       " differs from left block dimension " + std::to_string(nl);
      return res;
    }
    const std::size_t i0 = res.glued.sets[b].front();
    const auto& N0 = D.parts[i0];
    const CMatrix vk = res.glued.slice(k, i0).adjoint() * N0.left_twist[*N0.left.position(k)];
    for (std::size_t i : res.glued.sets[b]) {
      const auto& Ni = D.parts[i];
      const CMatrix& ui = Ni.left_twist[*Ni.left.position(k)];
      const CMatrix E = res.glued.slice(k, i);
      for (const auto& e : all_units(nl))
        res.action_consistency = std::max(
            res.action_consistency, op_norm(ui * e * ui.adjoint() * E - E * vk * e * vk.adjoint()));
    }
    v.push_back(vk);
  }
  auto G = make_bimodule(D.left_base, A, std::move(v));
  res.validation = validate_bimodule(G, tol);
  if (!res.validation.passes(tol)) res.diagnostic = "glued object fails bimodule validation";
  if (res.action_consistency > tol) res.diagnostic = "left actions disagree on the glued module";
  res.bimodule = std::move(G);
  return res;
}

BimoduleMap bimodule_phi(const EquivalenceBimodule& M, const BimoduleGlueResult& glued) {
  const auto& G = glued.glued;
  BimoduleMap T;
  for (std::size_t b = 0; b < M.num_blocks(); ++b) {
    const auto m = static_cast<Eigen::Index>(M.mult[b]);
    CMatrix stack(G.embedding[b].rows(), m);
    for (std::size_t p = 0; p < G.sets[b].size(); ++p) stack.middleRows(G.row_offset[b][p], m) = CMatrix::Identity(m, m);
    T.left.push_back(G.embedding[b].adjoint() * stack / static_cast<double>(G.sets[b].size()));
    T.right.push_back(M.right_twist[b]);
  }
  return T;
}

std::vector<BimoduleMap> bimodule_epsilon(const BimoduleGluingDatum& D, const BimoduleGlueResult& glued) {
  std::vector<BimoduleMap> out;
  for (std::size_t i = 0; i < D.num_sets(); ++i) {
    BimoduleMap T;
    const auto& Ni = D.parts[i];
    for (std::size_t b = 0; b < Ni.num_blocks(); ++b) {
      T.left.push_back(glued.glued.slice(Ni.right.label(b), i));
      T.right.push_back(Ni.right_twist[b].adjoint());
    }
    out.push_back(std::move(T));
  }
  return out;
}

double data_morphism_residual(const BimoduleGluingDatum& D1, const BimoduleGluingDatum& D2,
                              const std::vector<BimoduleMap>& T) {
  const std::size_t N = D1.num_sets();
  if (D2.num_sets() != N || T.size() != N || !(D1.cover == D2.cover)) throw InvalidInput("data morphism: cover mismatch");
  double r = 0;
  for (std::size_t i = 0; i < N; ++i) {
    r = std::max(r, check_bimodule_map(D1.parts[i], D2.parts[i], T[i]).max());
    for (std::size_t b = 0; b < T[i].left.size(); ++b) r = std::max(r, unitarity_residual(operator_form(T[i], b)));
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = D1.cover.overlap(i, j);
      const auto Ti = restrict_map(T[i], D1.parts[i].right, F);
      const auto Tj = restrict_map(T[j], D1.parts[j].right, F);
      r = std::max(r, map_distance(compose(Ti, D1.transition(i, j)), compose(D2.transition(i, j), Tj)));
    }
  return r;
}

std::optional<std::vector<BimoduleMap>> bimodule_data_isomorphic(const BimoduleGluingDatum& D1,
                                                                 const BimoduleGluingDatum& D2, double tol) {
  const std::size_t N = D1.num_sets();
  if (D2.num_sets() != N || !(D1.cover == D2.cover)) return std::nullopt;
  std::vector<BimoduleMap> W;
  for (std::size_t i = 0; i < N; ++i) {
    auto w = bimodules_isomorphic(D1.parts[i], D2.parts[i], tol);
    if (!w) return std::nullopt;
    W.push_back(std::move(*w));
  }
  const auto& A = D1.right_base;
  for (std::size_t kb = 0; kb < A.num_blocks(); ++kb) {
    const Label k = A.label(kb);
    const auto sets = D1.cover.sets_containing(k);
    const std::size_t i0 = sets.front();
    for (std::size_t i : sets) {
      if (i == i0) continue;
      const auto F = D1.cover.overlap(i, i0);
      const auto bi = *restrict_algebra(A, F).position(k);
      const auto Wi = restrict_map(W[i], D1.parts[i].right, F);
      const auto W0 = restrict_map(W[i0], D1.parts[i0].right, F);
      const CMatrix lhs = operator_form(compose(Wi, D1.transition(i, i0)), bi);
      const CMatrix rhs = operator_form(compose(D2.transition(i, i0), W0), bi);
      auto [lambda, defect] = scalar_ratio(lhs, rhs);
      if (defect > tol || std::abs(lambda) == 0.0) return std::nullopt;
      W[i].left[*D1.parts[i].right.position(k)] /= lambda;
    }
  }
  if (data_morphism_residual(D1, D2, W) > tol) return std::nullopt;
  return W;
}

ObstructionCocycle obstruction_2cocycle(const BimoduleGluingDatum& D, double tol) {
  check_shapes(D);
  ObstructionCocycle f;
  const std::size_t N = D.num_sets();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t l = 0; l < N; ++l) {
        const auto F = D.cover.overlap(i, j, l);
        const auto a = restrict_map(D.transition(i, j), D.part_on(j, D.cover.overlap(i, j)).right, F);
        const auto b = restrict_map(D.transition(j, l), D.part_on(l, D.cover.overlap(j, l)).right, F);
        const auto c = restrict_map(D.transition(i, l), D.part_on(l, D.cover.overlap(i, l)).right, F);
        for (std::size_t q = 0; q < F.size(); ++q) {
          const CMatrix O = operator_form(a, q) * operator_form(b, q) * operator_form(c, q).adjoint();
          const Complex s = O.trace() / static_cast<double>(O.rows());
          const double defect = op_norm(O - s * CMatrix::Identity(O.rows(), O.cols()));
          if (defect > tol) throw ModelViolation("transition composite is not scalar", defect);
          f[{i, j, l, F[q]}] = s;
        }
      }
  return f;
}

double cech_coboundary_residual(const ObstructionCocycle& f, const ClosedCover& cover) {
  const std::size_t N = cover.size();
  double r = 0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t l = 0; l < N; ++l)
        for (std::size_t m = 0; m < N; ++m)
          for (Label k : intersect(cover.overlap(i, j, l), cover.set(m))) {
            const Complex v = f.at({j, l, m, k}) / f.at({i, l, m, k}) * f.at({i, j, m, k}) / f.at({i, j, l, k});
            r = std::max(r, std::abs(v - 1.0));
          }
  return r;
}

BimoduleGluingDatum dual_datum(const BimoduleGluingDatum& D) {
  BimoduleGluingDatum out{D.right_base, D.left_base, D.cover, {}, {}};
  for (const auto& M : D.parts) out.parts.push_back(dual_bimodule(M));
  for (const auto& T : D.nu) out.nu.push_back(dual_map(T));
  return out;
}

BimoduleGluingDatum tensor_data(const BimoduleGluingDatum& D1, const BimoduleGluingDatum& D2) {
  if (!(D1.cover == D2.cover) || !(D1.right_base == D2.left_base)) throw InvalidInput("tensor_data: incompatible data");
  BimoduleGluingDatum out{D1.left_base, D2.right_base, D1.cover, {}, {}};
  const std::size_t N = D1.num_sets();
  for (std::size_t i = 0; i < N; ++i) out.parts.push_back(tensor_bimodules(D1.parts[i], D2.parts[i]));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = D1.cover.overlap(i, j);
      out.nu.push_back(tensor_maps(D1.part_on(j, F), D2.part_on(j, F), D1.part_on(i, F), D2.part_on(i, F),
                                   D1.transition(i, j), D2.transition(i, j)));
    }
  return out;
}

BimoduleGluingDatum picard_conjugate(const BimoduleGluingDatum& D, const BimoduleGluingDatum& M) {
  if (!(M.left_base == D.left_base) || !(M.right_base == D.left_base) || !(M.cover == D.cover))
    throw InvalidInput("picard_conjugate: coefficient datum must live over (A',A') on the same cover");
  return tensor_data(tensor_data(dual_datum(D), M), D);
}

BimoduleGluingDatum picard_unconjugate(const BimoduleGluingDatum& D, const BimoduleGluingDatum& X) {
  if (!(X.left_base == D.right_base) || !(X.right_base == D.right_base) || !(X.cover == D.cover))
    throw InvalidInput("picard_unconjugate: datum must live over (A,A) on the same cover");
  return tensor_data(tensor_data(D, X), dual_datum(D));
}

std::vector<BimoduleMap> picard_conjugate_map(const BimoduleGluingDatum& D, const BimoduleGluingDatum& M,
                                              const BimoduleGluingDatum& M2, const std::vector<BimoduleMap>& theta) {
  const auto Dd = dual_datum(D);
  std::vector<BimoduleMap> out;
  for (std::size_t i = 0; i < D.num_sets(); ++i) {
    const auto& Nt = Dd.parts[i];
    const auto left = tensor_maps(Nt, M.parts[i], Nt, M2.parts[i], identity_map(Nt), theta.at(i));
    out.push_back(tensor_maps(tensor_bimodules(Nt, M.parts[i]), D.parts[i], tensor_bimodules(Nt, M2.parts[i]),
                              D.parts[i], left, identity_map(D.parts[i])));
  }
  return out;
}

}  // namespace modglue
