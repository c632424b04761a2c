#include "modglue/gen.hpp"

#include <cmath>
#include <numbers>

#include "modglue/errors.hpp"

namespace modglue {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t SplitMix64::uniform_int(std::size_t lo, std::size_t hi) {
  if (hi < lo) throw InvalidInput("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::size_t>(next() % span);
}

double SplitMix64::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex SplitMix64::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) / std::sqrt(2.0);
}

Complex SplitMix64::unit_phase() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

void check_config(const GenConfig& cfg) {
  if (cfg.max_blocks < 1 || cfg.max_blocks > 6) throw InvalidInput("max_blocks must lie in [1, 6]");
  if (cfg.max_block_dim < 1 || cfg.max_block_dim > 4) throw InvalidInput("max_block_dim must lie in [1, 4]");
  if (cfg.max_cover_sets < 1 || cfg.max_cover_sets > 4) throw InvalidInput("max_cover_sets must lie in [1, 4]");
  if (cfg.max_mult < 1 || cfg.max_mult > 5) throw InvalidInput("max_mult must lie in [1, 5]");
  if (cfg.twist_mode == TwistMode::prescribed_phases) {
    std::size_t n = 1;
    while (n * (n - 1) / 2 < cfg.phases.size()) ++n;
    if (n * (n - 1) / 2 != cfg.phases.size() || n < 2) throw InvalidInput("phase count must be N(N-1)/2 with N >= 2");
    if (n > cfg.max_cover_sets) throw InvalidInput("phase list needs more cover sets than max_cover_sets");
    for (auto c : cfg.phases)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || std::abs(std::abs(c) - 1.0) > 1e-12)
        throw InvalidInput("prescribed phases must be unit scalars");
  } else if (!cfg.phases.empty()) {
    throw InvalidInput("phases are only used in prescribed_phases mode");
  }
}

CMatrix random_gaussian(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix G(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) G(r, c) = rng.complex_normal();
  return G;
}

CMatrix random_unitary(SplitMix64& rng, Eigen::Index n) {
  CMatrix Q = random_gaussian(rng, n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < c; ++p) Q.col(c) -= Q.col(p).dot(Q.col(c)) * Q.col(p);
    Q.col(c) /= Q.col(c).norm();
  }
  return Q;
}

FdCStarAlgebra random_algebra(SplitMix64& rng, std::size_t max_blocks, std::size_t max_block_dim) {
  const std::size_t K = rng.uniform_int(1, max_blocks);
  std::vector<std::size_t> dims;
  for (std::size_t k = 0; k < K; ++k) dims.push_back(rng.uniform_int(1, max_block_dim));
  return FdCStarAlgebra(std::move(dims));
}

FdCStarAlgebra random_partner_algebra(SplitMix64& rng, const FdCStarAlgebra& A, std::size_t max_block_dim) {
  std::vector<std::size_t> dims;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) dims.push_back(rng.uniform_int(1, max_block_dim));
  return FdCStarAlgebra(A.prim_size(), A.labels(), std::move(dims));
}

ClosedCover random_cover(SplitMix64& rng, std::size_t prim_size, std::size_t max_sets) {
  const std::size_t N = rng.uniform_int(1, max_sets);
  std::vector<LabelSet> sets(N);
  for (Label k = 0; k < prim_size; ++k) {
    bool placed = false;
    for (auto& s : sets)
      if (rng.uniform() < 0.5) {
        s.push_back(k);
        placed = true;
      }
    if (!placed) sets[rng.uniform_int(0, N - 1)].push_back(k);
  }
  for (auto& s : sets)
    if (s.empty()) s.push_back(rng.uniform_int(0, prim_size - 1));
  return ClosedCover(prim_size, std::move(sets));
}

ClosedCover random_cover_with_common_block(SplitMix64& rng, std::size_t prim_size, std::size_t num_sets) {
  std::vector<LabelSet> sets(num_sets, LabelSet{0});
  for (Label k = 1; k < prim_size; ++k) {
    bool placed = false;
    for (auto& s : sets)
      if (rng.uniform() < 0.5) {
        s.push_back(k);
        placed = true;
      }
    if (!placed) sets[rng.uniform_int(0, num_sets - 1)].push_back(k);
  }
  return ClosedCover(prim_size, std::move(sets));
}

HilbertModule random_module(SplitMix64& rng, const FdCStarAlgebra& A, std::size_t max_mult) {
  std::vector<std::size_t> mult;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) mult.push_back(rng.uniform_int(1, max_mult));
  return HilbertModule(A, std::move(mult));
}

ModuleVector random_vector(SplitMix64& rng, const HilbertModule& X) {
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < X.num_blocks(); ++b)
    blks.push_back(random_gaussian(rng, static_cast<Eigen::Index>(X.mult(b)),
                                   static_cast<Eigen::Index>(X.algebra().dim(b))));
  return {X, std::move(blks)};
}

AlgebraElement random_element(SplitMix64& rng, const FdCStarAlgebra& A) {
  std::vector<CMatrix> blks;
  for (auto n : A.dims()) blks.push_back(random_gaussian(rng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  return {A, std::move(blks)};
}

AdjointableMap random_map(SplitMix64& rng, const HilbertModule& X, const HilbertModule& Y) {
  if (!(X.algebra() == Y.algebra())) throw InvalidInput("random_map: modules over different algebras");
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < X.num_blocks(); ++b)
    blks.push_back(random_gaussian(rng, static_cast<Eigen::Index>(Y.mult(b)), static_cast<Eigen::Index>(X.mult(b))));
  return {X, Y, std::move(blks)};
}

BVector random_bvector(SplitMix64& rng, const BModule& Z) {
  BVector z{Z.num_sets(), {}};
  for (const auto& P : Z.parts) z.parts.push_back(random_vector(rng, P));
  return z;
}

BElement random_belement(SplitMix64& rng, const SumAlgebraB& B) {
  BElement b;
  for (std::size_t i = 0; i < B.num_sets(); ++i) b.parts.push_back(random_element(rng, B.part(i)));
  return b;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> phase_pairs(std::size_t N) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t d = 1; d < N; ++d)
    for (std::size_t i = 0; i + d < N; ++i) out.emplace_back(i, i + d);
  return out;
}

}  // namespace

GluingDatum random_gluing_datum(SplitMix64& rng, const HilbertModule& X, const ClosedCover& cover, TwistMode mode,
                                const std::vector<Complex>& phases) {
  const BModule Z = pulled_apart_module(X, cover);
  const std::size_t N = cover.size();
  const auto& A = X.algebra();
  // U[i*N+j][b] is the block for label A.label(b).
  std::vector<std::vector<CMatrix>> U(N * N, std::vector<CMatrix>(A.num_blocks()));
  if (mode == TwistMode::random_unitary) {
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i; j < N; ++j)
        for (Label k : cover.overlap(i, j)) {
          const auto b = *A.position(k);
          const auto m = static_cast<Eigen::Index>(X.mult(b));
          if (i == j) {
            U[i * N + i][b] = CMatrix::Identity(m, m);
          } else {
            U[i * N + j][b] = random_unitary(rng, m);
            U[j * N + i][b] = U[i * N + j][b].adjoint();
          }
        }
  } else {
    std::vector<std::vector<CMatrix>> V(N);
    for (std::size_t i = 0; i < N; ++i)
      for (Label k : cover.set(i)) {
        V[i].resize(A.num_blocks());
        V[i][*A.position(k)] = random_unitary(rng, static_cast<Eigen::Index>(X.mult(*A.position(k))));
      }
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        for (Label k : cover.overlap(i, j)) {
          const auto b = *A.position(k);
          U[i * N + j][b] = V[i][b] * V[j][b].adjoint();
        }
    if (mode == TwistMode::prescribed_phases) {
      const auto pairs = phase_pairs(N);
      if (pairs.size() != phases.size()) throw InvalidInput("phase count must be N(N-1)/2");
      const auto b0 = A.position(0);
      for (std::size_t i = 0; i < N; ++i)
        if (!b0 || !contains(cover.set(i), 0)) throw InvalidInput("prescribed phases need block 0 in every set");
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        U[i * N + j][*b0] *= phases[p];
        U[j * N + i][*b0] *= std::conj(phases[p]);
      }
    }
  }
  std::vector<AdjointableMap> zeta;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = cover.overlap(i, j);
      std::vector<CMatrix> blks;
      for (Label k : F) blks.push_back(U[i * N + j][*A.position(k)]);
      zeta.emplace_back(restrict_module(Z.parts[j], F), restrict_module(Z.parts[i], F), std::move(blks));
    }
  return {Z, std::move(zeta)};
}

EquivalenceBimodule random_bimodule(SplitMix64& rng, const FdCStarAlgebra& left, const FdCStarAlgebra& right,
                                    bool normal_form) {
  std::vector<CMatrix> u, w;
  for (std::size_t b = 0; b < left.num_blocks(); ++b) {
    u.push_back(random_unitary(rng, static_cast<Eigen::Index>(left.dim(b))));
    const auto n = static_cast<Eigen::Index>(right.dim(b));
    w.push_back(normal_form ? CMatrix::Identity(n, n) : random_unitary(rng, n));
  }
  return make_bimodule(left, right, std::move(u), std::move(w));
}

BimoduleGluingDatum random_bimodule_datum(SplitMix64& rng, const FdCStarAlgebra& left, const FdCStarAlgebra& right,
                                          const ClosedCover& cover, bool twisted) {
  const std::size_t N = cover.size();
  BimoduleGluingDatum D{left, right, cover, {}, {}};
  for (std::size_t i = 0; i < N; ++i)
    D.parts.push_back(random_bimodule(rng, restrict_algebra(left, cover.set(i)), restrict_algebra(right, cover.set(i))));
  // c[i*N+j][label]
  std::vector<std::vector<Complex>> c(N * N, std::vector<Complex>(right.prim_size(), Complex(1.0)));
  std::vector<std::vector<Complex>> g(N, std::vector<Complex>(right.prim_size(), Complex(1.0)));
  for (auto& gi : g)
    for (auto& x : gi) x = rng.unit_phase();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (Label k : cover.overlap(i, j)) c[i * N + j][k] = g[i][k] * std::conj(g[j][k]);
  if (twisted)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j)
        for (Label k : cover.overlap(i, j)) {
          c[i * N + j][k] = rng.unit_phase();
          c[j * N + i][k] = std::conj(c[i * N + j][k]);
        }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto F = cover.overlap(i, j);
      const auto Ni = D.part_on(i, F), Nj = D.part_on(j, F);
      BimoduleMap T;
      for (std::size_t b = 0; b < F.size(); ++b) {
        T.left.push_back(c[i * N + j][F[b]] * Ni.left_twist[b] * Nj.left_twist[b].adjoint());
        T.right.push_back(Nj.right_twist[b] * Ni.right_twist[b].adjoint());
      }
      D.nu.push_back(std::move(T));
    }
  return D;
}

BimoduleGluingDatum phase_bimodule_datum(const std::vector<Complex>& phases) {
  std::size_t N = 2;
  while (N * (N - 1) / 2 < phases.size()) ++N;
  if (N * (N - 1) / 2 != phases.size()) throw InvalidInput("phase count must be N(N-1)/2");
  const FdCStarAlgebra C({1});
  BimoduleGluingDatum D{C, C, ClosedCover(1, std::vector<LabelSet>(N, LabelSet{0})), {}, {}};
  for (std::size_t i = 0; i < N; ++i) D.parts.push_back(identity_bimodule(C));
  std::vector<Complex> c(N * N, Complex(1.0));
  const auto pairs = phase_pairs(N);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    c[pairs[p].first * N + pairs[p].second] = phases[p];
    c[pairs[p].second * N + pairs[p].first] = std::conj(phases[p]);
  }
  for (std::size_t q = 0; q < N * N; ++q) {
    BimoduleMap T;
    T.left.push_back(CMatrix::Constant(1, 1, c[q]));
    T.right.push_back(CMatrix::Identity(1, 1));
    D.nu.push_back(std::move(T));
  }
  return D;
}

Instance random_instance(const GenConfig& cfg) {
  check_config(cfg);
  SplitMix64 rng(cfg.seed);
  Instance inst;
  inst.config = cfg;
  inst.algebra = random_algebra(rng, cfg.max_blocks, cfg.max_block_dim);
  const std::size_t K = inst.algebra.prim_size();
  if (cfg.twist_mode == TwistMode::prescribed_phases) {
    std::size_t N = 2;
    while (N * (N - 1) / 2 < cfg.phases.size()) ++N;
    auto base = random_cover(rng, K, N);
    std::vector<LabelSet> sets = base.sets();
    while (sets.size() < N) sets.push_back({rng.uniform_int(0, K - 1)});
    for (auto& s : sets) s.push_back(0);
    inst.cover = ClosedCover(K, std::move(sets));
  } else {
    inst.cover = random_cover(rng, K, cfg.max_cover_sets);
  }
  inst.module = random_module(rng, inst.algebra, cfg.max_mult);
  inst.datum = random_gluing_datum(rng, inst.module, inst.cover, cfg.twist_mode, cfg.phases);
  return inst;
}

Instance phase_instance(const std::vector<Complex>& phases) {
  GenConfig cfg;
  cfg.twist_mode = TwistMode::prescribed_phases;
  cfg.phases = phases;
  cfg.max_blocks = 1;
  cfg.max_block_dim = 1;
  cfg.max_mult = 1;
  check_config(cfg);
  std::size_t N = 2;
  while (N * (N - 1) / 2 < phases.size()) ++N;
  Instance inst;
  inst.config = cfg;
  inst.algebra = FdCStarAlgebra({1});
  inst.cover = ClosedCover(1, std::vector<LabelSet>(N, LabelSet{0}));
  inst.module = HilbertModule(inst.algebra, {1});
  const auto pairs = phase_pairs(N);
  std::vector<TransitionEntry> entries;
  for (std::size_t p = 0; p < pairs.size(); ++p)
    entries.push_back({pairs[p].first, pairs[p].second, 0, CMatrix::Constant(1, 1, phases[p])});
  inst.datum = make_gluing_datum(pulled_apart_module(inst.module, inst.cover), entries);
  return inst;
}

}  // namespace modglue
