#pragma once

#include <array>
#include <vector>

#include <span>

#include "modglue/errors.hpp"
#include "modglue/hmod.hpp"

namespace modglue {

// A Hilbert B-module Z = (+)_i Z_i with Z_i over A|F_i.
struct BModule {
  SumAlgebraB algebra;
  std::vector<HilbertModule> parts;

  BModule() = default;
  BModule(SumAlgebraB B, std::vector<HilbertModule> Zs);
  std::size_t num_sets() const { return parts.size(); }
  const ClosedCover& cover() const { return algebra.cover(); }
  std::size_t dimension() const;
};

// Vectors indexed by tuples of cover-set indices, stored lexicographically.
// Arity 1 models Z, arity 2 models Z (x)_A B, arity 3 models Z (x)_A B (x)_A B.
template <std::size_t Arity>
struct Family {
  std::size_t n_sets = 0;
  std::vector<ModuleVector> parts;

  static std::size_t flat_index(std::size_t n, const std::array<std::size_t, Arity>& idx) {
    std::size_t f = 0;
    for (auto i : idx) f = f * n + i;
    return f;
  }
  template <class... I>
  ModuleVector& at(I... idx) {
    return parts.at(flat_index(n_sets, {static_cast<std::size_t>(idx)...}));
  }
  template <class... I>
  const ModuleVector& at(I... idx) const {
    return parts.at(flat_index(n_sets, {static_cast<std::size_t>(idx)...}));
  }
};

using BVector = Family<1>;
using PairVector = Family<2>;
using TripleVector = Family<3>;

template <std::size_t N>
Family<N> operator+(const Family<N>& a, const Family<N>& b) {
  Family<N> out = a;
  for (std::size_t p = 0; p < a.parts.size(); ++p) out.parts[p] = a.parts[p] + b.parts.at(p);
  return out;
}

template <std::size_t N>
Family<N> operator-(const Family<N>& a, const Family<N>& b) {
  Family<N> out = a;
  for (std::size_t p = 0; p < a.parts.size(); ++p) out.parts[p] = a.parts[p] - b.parts.at(p);
  return out;
}

template <std::size_t N>
Family<N> operator*(Complex s, const Family<N>& a) {
  Family<N> out = a;
  for (auto& p : out.parts) p = s * p;
  return out;
}

// Largest component norm: the norm of a direct sum of Hilbert modules.
template <std::size_t N>
double norm(const Family<N>& a) {
  double n = 0;
  for (const auto& p : a.parts) n = std::max(n, norm(p));
  return n;
}

template <std::size_t N>
double distance(const Family<N>& a, const Family<N>& b) {
  return norm(a - b);
}

template <std::size_t N>
double amplified_norm(std::span<const Family<N>> entries, std::size_t level) {
  double n = 0;
  if (entries.empty()) return n;
  std::vector<ModuleVector> comp(entries.size());
  for (std::size_t p = 0; p < entries[0].parts.size(); ++p) {
    for (std::size_t e = 0; e < entries.size(); ++e) comp[e] = entries[e].parts.at(p);
    n = std::max(n, amplified_norm(std::span<const ModuleVector>(comp), level));
  }
  return n;
}

template <std::size_t N>
CVector to_coords(const Family<N>& a) {
  Eigen::Index total = 0;
  for (const auto& p : a.parts) total += static_cast<Eigen::Index>(p.module.dimension());
  CVector v(total);
  Eigen::Index off = 0;
  for (const auto& p : a.parts) {
    auto c = to_coords(p);
    v.segment(off, c.size()) = c;
    off += c.size();
  }
  return v;
}

// Inverse of to_coords; `shape` supplies the component modules.
template <std::size_t N>
Family<N> family_from_coords(const Family<N>& shape, const CVector& v) {
  Family<N> out;
  out.n_sets = shape.n_sets;
  Eigen::Index off = 0;
  for (const auto& p : shape.parts) {
    const auto d = static_cast<Eigen::Index>(p.module.dimension());
    if (off + d > v.size()) throw InvalidInput("family_from_coords: vector too short");
    out.parts.push_back(from_coords(p.module, v.segment(off, d)));
    off += d;
  }
  if (off != v.size()) throw InvalidInput("family_from_coords: vector too long");
  return out;
}

template <std::size_t N>
std::size_t family_dimension(const Family<N>& a) {
  std::size_t d = 0;
  for (const auto& p : a.parts) d += p.module.dimension();
  return d;
}

// For each coordinate: (flat component index, block label).
template <std::size_t N>
std::vector<std::pair<std::size_t, Label>> coordinate_groups(const Family<N>& a) {
  std::vector<std::pair<std::size_t, Label>> out;
  for (std::size_t p = 0; p < a.parts.size(); ++p)
    for (Label k : coordinate_labels(a.parts[p].module)) out.emplace_back(p, k);
  return out;
}

BVector b_zero(const BModule& Z);
BVector b_right_act(const BVector& z, const BElement& b);
BElement b_inner(const BVector& z, const BVector& w);

// The pull-apart family (X|F_i)_i of a module over the base algebra.
BModule pulled_apart_module(const HilbertModule& X, const ClosedCover& cover);

// Gluing datum: Z plus transitions zeta_ij : Z_j|F_ij -> Z_i|F_ij for every
// ordered pair (i,j), stored at index i*N + j.
struct GluingDatum {
  BModule z;
  std::vector<AdjointableMap> zeta;

  GluingDatum() = default;
  GluingDatum(BModule Z, std::vector<AdjointableMap> transitions);
  std::size_t num_sets() const { return z.num_sets(); }
  const ClosedCover& cover() const { return z.cover(); }
  const SumAlgebraB& algebra() const { return z.algebra; }
  const AdjointableMap& transition(std::size_t i, std::size_t j) const { return zeta.at(i * num_sets() + j); }
};

// One transition block U^{ij}_k as given in a file.
struct TransitionEntry {
  std::size_t i = 0, j = 0;
  Label k = 0;
  CMatrix matrix;
};

// Builds a datum from possibly partial transition entries. Missing blocks are
// filled by zeta_ji = zeta_ij^*, then zeta_ii = I, then identity.
GluingDatum make_gluing_datum(const BModule& Z, const std::vector<TransitionEntry>& entries);

// All transition blocks, ordered by (i, j, k).
std::vector<TransitionEntry> transition_entries(const GluingDatum& D);

}  // namespace modglue
