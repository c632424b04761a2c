#include "modglue/glue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modglue/errors.hpp"

namespace modglue {

GluingValidation validate_gluing_datum(const GluingDatum& D, double tol) {
  GluingValidation v;
  const std::size_t N = D.num_sets();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto& t = D.transition(i, j);
      v.unitary_residual = std::max(v.unitary_residual, unitarity_residual(t));
      if (i == j) {
        v.identity_residual = std::max(v.identity_residual, map_distance(t, AdjointableMap::identity(t.source)));
      } else if (t.source.mult() == D.transition(j, i).target.mult()) {
        v.involution_residual = std::max(v.involution_residual, map_distance(adjoint_of(t), D.transition(j, i)));
      } else {
        v.involution_residual = std::numeric_limits<double>::infinity();
      }
    }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t l = 0; l < N; ++l) {
        const auto F = D.cover().overlap(i, j, l);
        const auto a = restrict_map(D.transition(i, j), F);
        const auto b = restrict_map(D.transition(j, l), F);
        const auto c = restrict_map(D.transition(i, l), F);
        for (std::size_t k = 0; k < F.size(); ++k) {
          if (a.blocks[k].cols() != b.blocks[k].rows() || a.blocks[k].rows() != c.blocks[k].rows() ||
              b.blocks[k].cols() != c.blocks[k].cols()) {
            v.cocycle_residual = std::numeric_limits<double>::infinity();
            continue;
          }
          v.cocycle_residual = std::max(v.cocycle_residual, op_norm(a.blocks[k] * b.blocks[k] - c.blocks[k]));
        }
      }
  v.unitary = v.unitary_residual <= tol;
  v.involutive = std::max(v.identity_residual, v.involution_residual) <= tol;
  v.cocycle = v.cocycle_residual <= tol;
  return v;
}

AdjointableMap kappa(const HilbertModule& X, const ClosedCover& cover, std::size_t i, std::size_t j) {
  const auto F = cover.overlap(i, j);
  const auto src = restrict_module(restrict_module(X, cover.set(j)), F);
  const auto tgt = restrict_module(restrict_module(X, cover.set(i)), F);
  if (!(src == tgt)) throw InvalidInput("kappa: restrictions disagree");
  return AdjointableMap::identity(src);
}

GluingDatum pull_apart(const HilbertModule& X, const ClosedCover& cover) {
  BModule Z = pulled_apart_module(X, cover);
  std::vector<AdjointableMap> zeta;
  for (std::size_t i = 0; i < cover.size(); ++i)
    for (std::size_t j = 0; j < cover.size(); ++j) zeta.push_back(kappa(X, cover, i, j));
  return {std::move(Z), std::move(zeta)};
}

GlueMorphism pull_apart_map(const AdjointableMap& a, const ClosedCover& cover) {
  GlueMorphism m;
  for (const auto& F : cover.sets()) m.components.push_back(restrict_map(a, F));
  return m;
}

GlueMorphism compose(const GlueMorphism& a, const GlueMorphism& b) {
  if (a.components.size() != b.components.size()) throw InvalidInput("compose: morphisms over different covers");
  GlueMorphism m;
  for (std::size_t i = 0; i < a.components.size(); ++i) m.components.push_back(compose(a.components[i], b.components[i]));
  return m;
}

GlueMorphism adjoint_of(const GlueMorphism& a) {
  GlueMorphism m;
  for (const auto& c : a.components) m.components.push_back(adjoint_of(c));
  return m;
}

double morphism_norm(const GlueMorphism& a) {
  double n = 0;
  for (const auto& c : a.components) n = std::max(n, map_norm(c));
  return n;
}

double morphism_distance(const GlueMorphism& a, const GlueMorphism& b) {
  if (a.components.size() != b.components.size()) throw InvalidInput("morphism_distance: different covers");
  double d = 0;
  for (std::size_t i = 0; i < a.components.size(); ++i) d = std::max(d, map_distance(a.components[i], b.components[i]));
  return d;
}

double intertwining_residual(const GlueMorphism& a, const GluingDatum& src, const GluingDatum& dst) {
  const std::size_t N = src.num_sets();
  if (a.components.size() != N || dst.num_sets() != N) throw InvalidInput("intertwining_residual: set count mismatch");
  double r = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!(a.components[i].source == src.z.parts[i]) || !(a.components[i].target == dst.z.parts[i]))
      throw InvalidInput("intertwining_residual: component " + std::to_string(i) + " has the wrong shape");
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = src.cover().overlap(i, j);
      r = std::max(r, map_distance(compose(restrict_map(a.components[i], F), src.transition(i, j)),
                                   compose(dst.transition(i, j), restrict_map(a.components[j], F))));
    }
  }
  return r;
}

CMatrix GluedModule::slice(Label k, std::size_t i) const {
  const auto b = *module.algebra().position(k);
  const auto& S = sets[b];
  auto it = std::find(S.begin(), S.end(), i);
  if (it == S.end()) throw InvalidInput("slice: set does not contain the block");
  const auto p = static_cast<std::size_t>(it - S.begin());
  return embedding[b].middleRows(row_offset[b][p], row_offset[b][p + 1] - row_offset[b][p]);
}

BVector GluedModule::embed(const BModule& Z, const ModuleVector& g) const {
  if (!(g.module == module)) throw InvalidInput("embed: vector not in the glued module");
  BVector z;
  z.n_sets = Z.num_sets();
  for (std::size_t i = 0; i < Z.num_sets(); ++i) {
    std::vector<CMatrix> blks;
    for (Label k : Z.cover().set(i)) blks.push_back(slice(k, i) * g.blocks[*module.algebra().position(k)]);
    z.parts.emplace_back(Z.parts[i], std::move(blks));
  }
  return z;
}

ModuleVector GluedModule::project(const BVector& z) const {
  std::vector<CMatrix> blks;
  const auto& A = module.algebra();
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    CMatrix stacked(embedding[b].rows(), static_cast<Eigen::Index>(A.dim(b)));
    for (std::size_t p = 0; p < sets[b].size(); ++p) {
      const auto& zi = z.parts.at(sets[b][p]);
      stacked.middleRows(row_offset[b][p], row_offset[b][p + 1] - row_offset[b][p]) =
          zi.blocks[*zi.module.algebra().position(A.label(b))];
    }
    blks.push_back(embedding[b].adjoint() * stacked / static_cast<double>(sets[b].size()));
  }
  return {module, std::move(blks)};
}

GluedModule glue(const GluingDatum& D, double tol) {
  const auto v = validate_gluing_datum(D, 1e-9);
  if (!v.unitary) throw InvalidInput("glue: transitions are not unitary");
  if (!v.involutive) throw InvalidInput("glue: transitions need zeta_ii = I and zeta_ji = zeta_ij^*");
  const auto& A = D.algebra().base();
  GluedModule G;
  std::vector<std::size_t> mult;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    const Label k = A.label(b);
    const auto n = static_cast<Eigen::Index>(A.dim(b));
    const auto I = D.cover().sets_containing(k);
    std::vector<Eigen::Index> off{0};
    for (auto i : I) off.push_back(off.back() + static_cast<Eigen::Index>(D.z.parts[i].mult(*D.algebra().part(i).position(k))));
    const Eigen::Index total = off.back();

    // Full coordinates: vec(z_i) stacked over i in I. Per-column (m-level) coordinates: z_i stacked.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t p = 0; p < I.size(); ++p)
      for (std::size_t q = 0; q < I.size(); ++q)
        if (p != q) pairs.emplace_back(p, q);
    Eigen::Index rows = 0;
    for (auto [p, q] : pairs) rows += off[p + 1] - off[p];
    CMatrix C = CMatrix::Zero(rows * n, total * n);
    CMatrix Cm = CMatrix::Zero(rows, total);
    Eigen::Index r = 0;
    for (auto [p, q] : pairs) {
      const auto& t = D.transition(I[p], I[q]);
      const CMatrix& U = t.blocks[*t.source.algebra().position(k)];
      const Eigen::Index mp = off[p + 1] - off[p], mq = off[q + 1] - off[q];
      Cm.block(r, off[p], mp, mp) += CMatrix::Identity(mp, mp);
      Cm.block(r, off[q], mp, mq) -= U;
      C.block(r * n, off[p] * n, mp * n, mp * n) += CMatrix::Identity(mp * n, mp * n);
      C.block(r * n, off[q] * n, mp * n, mq * n) -= kron(CMatrix::Identity(n, n), U);
      r += mp;
    }
    const CMatrix K = kernel_basis(C, tol);
    const CMatrix E0 = kernel_basis(Cm, tol);
    const double kres = op_norm(C * K) / std::max(1.0, op_norm(C));
    if (K.cols() % n != 0)
      throw RankAmbiguity("block " + std::to_string(k) + ": kernel dimension " + std::to_string(K.cols()) +
                              " is not a multiple of " + std::to_string(n),
                          kres);
    if (K.cols() != E0.cols() * n)
      throw RankAmbiguity("block " + std::to_string(k) + ": column-wise kernel disagrees with the full kernel", kres);

    // Per-set slices of E0 have Gram matrix I/|I|; rescale to isometries.
    G.embedding.push_back(std::sqrt(static_cast<double>(I.size())) * E0);
    G.sets.push_back(I);
    G.row_offset.push_back(off);
    mult.push_back(static_cast<std::size_t>(E0.cols()));
  }
  G.module = HilbertModule(A, std::move(mult));
  return G;
}

AdjointableMap glue_morphism(const GlueMorphism& a, const GluingDatum& src, const GluedModule& gsrc,
                             const GluingDatum& dst, const GluedModule& gdst, double tol) {
  const double res = intertwining_residual(a, src, dst);
  if (res > tol) throw NotAMorphism("family does not intertwine the transitions", res);
  const auto& A = gsrc.module.algebra();
  std::vector<CMatrix> blks;
  double leak = 0;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    const Label k = A.label(b);
    const auto& S = gsrc.sets[b];
    CMatrix diagE(gdst.embedding[b].rows(), gsrc.embedding[b].cols());
    for (std::size_t p = 0; p < S.size(); ++p) {
      const auto& c = a.components[S[p]];
      const CMatrix& T = c.blocks[*c.source.algebra().position(k)];
      diagE.middleRows(gdst.row_offset[b][p], T.rows()) =
          T * gsrc.embedding[b].middleRows(gsrc.row_offset[b][p], T.cols());
    }
    CMatrix Gk = gdst.embedding[b].adjoint() * diagE / static_cast<double>(S.size());
    leak = std::max(leak, op_norm(diagE - gdst.embedding[b] * Gk));
    blks.push_back(std::move(Gk));
  }
  if (leak > tol) throw NotAMorphism("image leaves the glued submodule", leak);
  return {gsrc.module, gdst.module, std::move(blks)};
}

PhiIso phi_iso(const HilbertModule& X, const ClosedCover& cover, double tol) {
  GluingDatum D = pull_apart(X, cover);
  GluedModule G = glue(D, tol);
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) {
    const auto m = static_cast<Eigen::Index>(X.mult(b));
    CMatrix stack(G.embedding[b].rows(), m);
    for (std::size_t p = 0; p < G.sets[b].size(); ++p) stack.middleRows(G.row_offset[b][p], m) = CMatrix::Identity(m, m);
    blks.push_back(G.embedding[b].adjoint() * stack / static_cast<double>(G.sets[b].size()));
  }
  AdjointableMap phi(X, G.module, std::move(blks));
  return {std::move(D), std::move(G), std::move(phi)};
}

EpsilonIso epsilon_iso(const GluingDatum& D, const GluedModule& G, double tol) {
  EpsilonIso e;
  const std::size_t N = D.num_sets();
  for (std::size_t i = 0; i < N; ++i) {
    const auto& F = D.cover().set(i);
    const auto src = restrict_module(G.module, F);
    std::vector<CMatrix> blks;
    long deficit = 0;
    for (std::size_t b = 0; b < F.size(); ++b) {
      blks.push_back(G.slice(F[b], i));
      deficit = std::max(deficit, static_cast<long>(D.z.parts[i].mult(b)) - static_cast<long>(src.mult(b)));
    }
    e.deficit.push_back(deficit);
    e.eps.components.emplace_back(src, D.z.parts[i], std::move(blks));
    e.unitary_residual = std::max(e.unitary_residual, unitarity_residual(e.eps.components.back()));
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = D.cover().overlap(i, j);
      const auto lhs = restrict_map(e.eps.components[i], F);
      const auto rhs = compose(D.transition(i, j), restrict_map(e.eps.components[j], F));
      e.intertwining_residual = std::max(e.intertwining_residual, map_distance(lhs, rhs));
    }
  e.unitary = e.unitary_residual <= tol && e.intertwining_residual <= tol &&
              std::all_of(e.deficit.begin(), e.deficit.end(), [](long d) { return d == 0; });
  return e;
}

std::size_t GroupedKernel::dimension() const {
  std::size_t d = 0;
  for (const auto& [key, B] : basis) d += static_cast<std::size_t>(B.cols());
  return d;
}

GroupedKernel grouped_kernel(const LinearMap& L, const std::vector<std::vector<std::size_t>>& in_group,
                             const std::vector<std::vector<std::size_t>>& out_group, double tol) {
  GroupedKernel K;
  std::map<std::vector<std::size_t>, std::vector<Eigen::Index>> out_coords;
  for (std::size_t c = 0; c < in_group.size(); ++c) K.coords[in_group[c]].push_back(static_cast<Eigen::Index>(c));
  for (std::size_t c = 0; c < out_group.size(); ++c) out_coords[out_group[c]].push_back(static_cast<Eigen::Index>(c));
  const auto in_dim = static_cast<Eigen::Index>(in_group.size());
  std::map<std::vector<std::size_t>, CMatrix> blocks;
  double scale = 0;
  for (const auto& [key, cols] : K.coords) {
    const auto& rows = out_coords[key];
    CMatrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      CVector y = L(CVector::Unit(in_dim, cols[c]));
      if (y.size() != static_cast<Eigen::Index>(out_group.size())) throw InvalidInput("grouped_kernel: output length");
      for (std::size_t r = 0; r < rows.size(); ++r) M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = y(rows[r]);
      for (Eigen::Index q = 0; q < y.size(); ++q)
        if (out_group[q] != key) K.leakage = std::max(K.leakage, std::abs(y(q)));
    }
    scale = std::max(scale, op_norm(M));
    blocks[key] = std::move(M);
  }
  // One cutoff for every group: tol times the norm of the whole map, at least tol.
  const double cut = tol * std::max(scale, 1.0);
  for (const auto& [key, M] : blocks) K.basis[key] = kernel_basis_below(M, cut);
  return K;
}

double grouped_subspace_distance(const GroupedKernel& K, const CMatrix& reference,
                                 const std::vector<std::vector<std::size_t>>& in_group) {
  std::map<std::vector<std::size_t>, std::vector<Eigen::Index>> ref_cols;
  for (Eigen::Index c = 0; c < reference.cols(); ++c) {
    const std::vector<std::size_t>* key = nullptr;
    for (Eigen::Index r = 0; r < reference.rows(); ++r) {
      if (std::abs(reference(r, c)) == 0.0) continue;
      if (key && in_group[r] != *key) return 1.0;
      key = &in_group[r];
    }
    if (key) ref_cols[*key].push_back(c);
  }
  double d = 0;
  for (const auto& [key, coords] : K.coords) {
    const auto& cols = ref_cols[key];
    CMatrix R(static_cast<Eigen::Index>(coords.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < coords.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        R(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = reference(coords[r], cols[c]);
    d = std::max(d, subspace_distance(K.basis.at(key), range_basis(R)));
  }
  for (const auto& [key, cols] : ref_cols)
    if (!K.coords.count(key) && !cols.empty()) return 1.0;
  return d;
}

namespace {

template <std::size_t N>
std::vector<std::vector<std::size_t>> groups_by_block(const Family<N>& shape, bool with_last_index) {
  std::vector<std::vector<std::size_t>> out;
  for (auto [p, k] : coordinate_groups(shape)) {
    if (with_last_index)
      out.push_back({p % shape.n_sets, k});
    else
      out.push_back({k});
  }
  return out;
}

}  // namespace

DescentReport descent_identities_check(const GluingDatum& D, const GluedModule& G, std::span<const BVector> samples,
                                       double tol) {
  DescentReport rep;
  for (const auto& z : samples) {
    const PairVector dz = delta_map(D, z);
    rep.counit_residual = std::max(rep.counit_residual, distance(epsilon_map(dz), z));
    rep.coassociativity_residual =
        std::max(rep.coassociativity_residual, distance(lift_to_triple(LiftKind::DeltaTensorId, D, dz),
                                                        lift_to_triple(LiftKind::EtaTensorId, D, dz)));
  }

  const BVector zshape = b_zero(D.z);
  const PairVector pshape = pair_zero(D.z);
  const TripleVector tshape = triple_zero(D.z);
  const auto& A = D.algebra().base();

  // (c): ker(eta - delta) against the glued embedding, grouped by block.
  {
    const auto in_group = groups_by_block(zshape, false);
    const auto out_group = groups_by_block(pshape, false);
    LinearMap L = [&](const CVector& v) {
      const BVector z = family_from_coords(zshape, v);
      return CVector(to_coords(eta_map(D.z, z) - delta_map(D, z)));
    };
    const GroupedKernel K = grouped_kernel(L, in_group, out_group, tol);
    std::vector<CVector> cols;
    for (std::size_t b = 0; b < A.num_blocks(); ++b)
      for (std::size_t a = 0; a < G.module.mult(b); ++a)
        for (std::size_t c = 0; c < A.dim(b); ++c) {
          ModuleVector g = ModuleVector::zero(G.module);
          g.blocks[b](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = 1.0;
          cols.push_back(to_coords(G.embed(D.z, g)));
        }
    CMatrix ref(static_cast<Eigen::Index>(in_group.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) ref.col(static_cast<Eigen::Index>(c)) = cols[c];
    rep.kernel_dim = K.dimension();
    rep.glued_dim = G.module.dimension();
    rep.kernel_leakage = K.leakage;
    rep.kernel_angle = grouped_subspace_distance(K, ref, in_group);
  }

  // Kernels identity: ker((eta - delta) x id) against G (x)_A B, grouped by (l, block).
  {
    const auto in_group = groups_by_block(pshape, true);
    const auto out_group = groups_by_block(tshape, true);
    LinearMap L = [&](const CVector& v) {
      const PairVector t = family_from_coords(pshape, v);
      return CVector(to_coords(lift_to_triple(LiftKind::EtaTensorId, D, t) - lift_to_triple(LiftKind::DeltaTensorId, D, t)));
    };
    const GroupedKernel K = grouped_kernel(L, in_group, out_group, tol);
    // (iota x id) Psi^{-1}: g|F_l b_l -> component (i,l) = E^(i) g b_l on F_il.
    std::vector<CVector> cols;
    const std::size_t N = D.num_sets();
    for (std::size_t l = 0; l < N; ++l)
      for (Label k : D.cover().set(l)) {
        const std::size_t b = *A.position(k);
        for (std::size_t a = 0; a < G.module.mult(b); ++a)
          for (std::size_t c = 0; c < A.dim(b); ++c) {
            PairVector t = pshape;
            for (std::size_t i : G.sets[b]) {
              auto& comp = t.at(i, l);
              comp.blocks[*comp.module.algebra().position(k)].col(static_cast<Eigen::Index>(c)) =
                  G.slice(k, i).col(static_cast<Eigen::Index>(a));
            }
            cols.push_back(to_coords(t));
          }
        rep.glued_tensor_dim += G.module.mult(b) * A.dim(b);
      }
    CMatrix ref(static_cast<Eigen::Index>(in_group.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) ref.col(static_cast<Eigen::Index>(c)) = cols[c];
    rep.tensor_kernel_dim = K.dimension();
    rep.tensor_kernel_leakage = K.leakage;
    rep.tensor_kernel_angle = grouped_subspace_distance(K, ref, in_group);
  }
  return rep;
}

}  // namespace modglue
