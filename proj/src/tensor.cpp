#include "modglue/tensor.hpp"

#include <map>
#include <string>

#include "modglue/errors.hpp"

namespace modglue {

BModule::BModule(SumAlgebraB B, std::vector<HilbertModule> Zs) : algebra(std::move(B)), parts(std::move(Zs)) {
  if (parts.size() != algebra.num_sets()) throw InvalidInput("B-module: one module per cover set required");
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (!(parts[i].algebra() == algebra.part(i))) throw InvalidInput("B-module: part not over A|F_i");
}

std::size_t BModule::dimension() const {
  std::size_t d = 0;
  for (const auto& P : parts) d += P.dimension();
  return d;
}

BVector b_zero(const BModule& Z) {
  BVector z;
  z.n_sets = Z.num_sets();
  for (const auto& P : Z.parts) z.parts.push_back(ModuleVector::zero(P));
  return z;
}

BVector b_right_act(const BVector& z, const BElement& b) {
  if (b.parts.size() != z.parts.size()) throw InvalidInput("b_right_act: part count mismatch");
  BVector out = z;
  for (std::size_t i = 0; i < z.parts.size(); ++i) out.parts[i] = right_act(z.parts[i], b.parts[i]);
  return out;
}

BElement b_inner(const BVector& z, const BVector& w) {
  if (z.parts.size() != w.parts.size()) throw InvalidInput("b_inner: part count mismatch");
  BElement out;
  for (std::size_t i = 0; i < z.parts.size(); ++i) out.parts.push_back(inner_product(z.parts[i], w.parts[i]));
  return out;
}

BModule pulled_apart_module(const HilbertModule& X, const ClosedCover& cover) {
  if (!X.algebra().is_full()) throw InvalidInput("pull-apart needs a module over the full base algebra");
  SumAlgebraB B(X.algebra(), cover);
  std::vector<HilbertModule> parts;
  for (const auto& F : cover.sets()) parts.push_back(restrict_module(X, F));
  return {std::move(B), std::move(parts)};
}

GluingDatum::GluingDatum(BModule Z, std::vector<AdjointableMap> transitions)
    : z(std::move(Z)), zeta(std::move(transitions)) {
  const std::size_t N = z.num_sets();
  if (zeta.size() != N * N) throw InvalidInput("gluing datum: need N^2 transitions");
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = cover().overlap(i, j);
      const auto& t = zeta[i * N + j];
      if (!(t.source == restrict_module(z.parts[j], F)) || !(t.target == restrict_module(z.parts[i], F)))
        throw InvalidInput("gluing datum: transition (" + std::to_string(i) + "," + std::to_string(j) +
                           ") has the wrong shape");
    }
}

GluingDatum make_gluing_datum(const BModule& Z, const std::vector<TransitionEntry>& entries) {
  const std::size_t N = Z.num_sets();
  std::map<std::array<std::size_t, 3>, CMatrix> given;
  for (const auto& e : entries) {
    if (e.i >= N || e.j >= N) throw InvalidInput("transition entry: set index out of range");
    if (!contains(Z.cover().overlap(e.i, e.j), e.k)) throw InvalidInput("transition entry: block not in the overlap");
    if (!given.emplace(std::array{e.i, e.j, e.k}, e.matrix).second) throw InvalidInput("duplicate transition entry");
  }
  std::vector<AdjointableMap> zeta;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = Z.cover().overlap(i, j);
      auto src = restrict_module(Z.parts[j], F);
      auto tgt = restrict_module(Z.parts[i], F);
      std::vector<CMatrix> blks;
      for (std::size_t b = 0; b < F.size(); ++b) {
        const Label k = F[b];
        const auto mi = static_cast<Eigen::Index>(tgt.mult(b));
        const auto mj = static_cast<Eigen::Index>(src.mult(b));
        if (auto it = given.find({i, j, k}); it != given.end()) {
          blks.push_back(it->second);
        } else if (auto jt = given.find({j, i, k}); jt != given.end()) {
          blks.push_back(jt->second.adjoint());
        } else {
          if (mi != mj) throw InvalidInput("missing transition between blocks of different multiplicity");
          blks.push_back(CMatrix::Identity(mi, mj));
        }
        if (blks.back().rows() != mi || blks.back().cols() != mj)
          throw InvalidInput("transition (" + std::to_string(i) + "," + std::to_string(j) + ") block " +
                             std::to_string(k) + " has the wrong shape");
      }
      zeta.emplace_back(std::move(src), std::move(tgt), std::move(blks));
    }
  return {Z, std::move(zeta)};
}

std::vector<TransitionEntry> transition_entries(const GluingDatum& D) {
  std::vector<TransitionEntry> out;
  for (std::size_t i = 0; i < D.num_sets(); ++i)
    for (std::size_t j = 0; j < D.num_sets(); ++j) {
      const auto& t = D.transition(i, j);
      for (std::size_t b = 0; b < t.blocks.size(); ++b)
        out.push_back({i, j, t.source.algebra().label(b), t.blocks[b]});
    }
  return out;
}

PairVector pair_zero(const BModule& Z) {
  PairVector t;
  t.n_sets = Z.num_sets();
  for (std::size_t i = 0; i < t.n_sets; ++i)
    for (std::size_t j = 0; j < t.n_sets; ++j)
      t.parts.push_back(ModuleVector::zero(restrict_module(Z.parts[i], Z.cover().set(j))));
  return t;
}

TripleVector triple_zero(const BModule& Z) {
  TripleVector t;
  t.n_sets = Z.num_sets();
  for (std::size_t i = 0; i < t.n_sets; ++i)
    for (std::size_t j = 0; j < t.n_sets; ++j)
      for (std::size_t l = 0; l < t.n_sets; ++l)
        t.parts.push_back(ModuleVector::zero(restrict_module(Z.parts[i], Z.cover().overlap(j, l))));
  return t;
}

BVector eta_map(const HilbertModule& X, const ClosedCover& cover, const ModuleVector& x) {
  if (!(x.module == X)) throw InvalidInput("eta_map: vector not in X");
  BVector out;
  out.n_sets = cover.size();
  for (const auto& F : cover.sets()) out.parts.push_back(restrict_vector(x, F));
  return out;
}

PairVector eta_map(const BModule& Z, const BVector& z) {
  if (z.parts.size() != Z.num_sets()) throw InvalidInput("eta_map: part count mismatch");
  PairVector t;
  t.n_sets = Z.num_sets();
  for (std::size_t i = 0; i < t.n_sets; ++i)
    for (std::size_t j = 0; j < t.n_sets; ++j) t.parts.push_back(restrict_vector(z.parts[i], Z.cover().set(j)));
  return t;
}

PairVector phi_embed(const BModule& Z, std::size_t i, std::size_t j, const ModuleVector& v) {
  PairVector t = pair_zero(Z);
  auto& slot = t.at(i, j);
  if (!(slot.module == v.module)) throw InvalidInput("phi_embed: vector not in Z_i|F_ij");
  slot = v;
  return t;
}

PairVector delta_map(const GluingDatum& D, const BVector& z) {
  const std::size_t N = D.num_sets();
  if (z.parts.size() != N) throw InvalidInput("delta_map: part count mismatch");
  PairVector t;
  t.n_sets = N;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      t.parts.push_back(apply_map(D.transition(i, j), restrict_vector(z.parts[j], D.cover().set(i))));
  return t;
}

BVector epsilon_map(const PairVector& t) {
  BVector z;
  z.n_sets = t.n_sets;
  for (std::size_t i = 0; i < t.n_sets; ++i) z.parts.push_back(t.at(i, i));
  return z;
}

PairVector pair_right_act(const PairVector& t, const BElement& b) {
  if (b.parts.size() != t.n_sets) throw InvalidInput("pair_right_act: part count mismatch");
  PairVector out = t;
  for (std::size_t i = 0; i < t.n_sets; ++i)
    for (std::size_t j = 0; j < t.n_sets; ++j) {
      auto& c = out.at(i, j);
      c = right_act(c, restrict_element(b.parts[j], c.module.algebra().labels()));
    }
  return out;
}

TripleVector triple_right_act(const TripleVector& t, const BElement& b) {
  if (b.parts.size() != t.n_sets) throw InvalidInput("triple_right_act: part count mismatch");
  TripleVector out = t;
  const std::size_t N = t.n_sets;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t l = 0; l < N; ++l) {
        auto& c = out.at(i, j, l);
        c = right_act(c, restrict_element(b.parts[l], c.module.algebra().labels()));
      }
  return out;
}

TripleVector lift_to_triple(LiftKind kind, const GluingDatum& D, const PairVector& t) {
  const std::size_t N = D.num_sets();
  if (t.n_sets != N) throw InvalidInput("lift_to_triple: set count mismatch");
  TripleVector out;
  out.n_sets = N;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t l = 0; l < N; ++l) {
        const auto F = D.cover().overlap(i, j, l);
        switch (kind) {
          case LiftKind::EtaTensorId:
            out.parts.push_back(restrict_vector(t.at(i, l), F));
            break;
          case LiftKind::IdTensorEtaB:
            out.parts.push_back(restrict_vector(t.at(i, j), F));
            break;
          case LiftKind::DeltaTensorId:
            out.parts.push_back(apply_map(restrict_map(D.transition(i, j), F), restrict_vector(t.at(j, l), F)));
            break;
        }
      }
  return out;
}

BVector psi_apply(const HilbertModule& X, const SumAlgebraB& B, const ModuleVector& x, const BElement& b) {
  if (!(x.module == X) || !(X.algebra() == B.base())) throw InvalidInput("psi_apply: vector not in X over A");
  if (b.parts.size() != B.num_sets()) throw InvalidInput("psi_apply: element not in B");
  BVector out;
  out.n_sets = B.num_sets();
  for (std::size_t i = 0; i < B.num_sets(); ++i)
    out.parts.push_back(right_act(restrict_vector(x, B.cover().set(i)), b.parts[i]));
  return out;
}

ModuleVector nu_apply(const ModuleVector& y, const AlgebraElement& a, const LabelSet& Fj) {
  if (a.algebra.labels() != Fj) throw InvalidInput("nu_apply: element not in A|F_j");
  const auto Fij = intersect(y.module.algebra().labels(), Fj);
  return right_act(restrict_vector(y, Fij), restrict_element(a, Fij));
}

namespace {

PairVector pair_from_pullapart(const BModule& PX, const BVector& s, bool use_j) {
  PairVector t;
  t.n_sets = PX.num_sets();
  for (std::size_t i = 0; i < t.n_sets; ++i)
    for (std::size_t j = 0; j < t.n_sets; ++j)
      t.parts.push_back(restrict_vector(s.parts.at(use_j ? j : i), PX.cover().overlap(i, j)));
  return t;
}

}  // namespace

PairVector eta_tensor_id(const BModule& PX, const BVector& s) { return pair_from_pullapart(PX, s, true); }

PairVector id_tensor_eta_b(const BModule& PX, const BVector& s) { return pair_from_pullapart(PX, s, false); }

}  // namespace modglue
