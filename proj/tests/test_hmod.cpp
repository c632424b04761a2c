#include <gtest/gtest.h>

#include "modglue/errors.hpp"
#include "modglue/gen.hpp"
#include "modglue/hmod.hpp"

using namespace modglue;

namespace {

struct Setup {
  FdCStarAlgebra A;
  HilbertModule X;
};

Setup random_setup(SplitMix64& rng) {
  auto A = random_algebra(rng, 5, 3);
  auto X = random_module(rng, A, 3);
  return {A, X};
}

}  // namespace

TEST(Hmod, InnerProductOfRowVector) {
  const FdCStarAlgebra A({2});
  const HilbertModule X(A, {1});
  CMatrix x(1, 2);
  x << 1, 0;
  const ModuleVector v(X, {x});
  CMatrix expected = CMatrix::Zero(2, 2);
  expected(0, 0) = 1;
  EXPECT_EQ(inner_product(v, v).blocks[0], expected);
}

TEST(Hmod, InnerProductAxioms) {
  SplitMix64 rng(1);
  for (int t = 0; t < 30; ++t) {
    const auto [A, X] = random_setup(rng);
    const auto x = random_vector(rng, X), y = random_vector(rng, X);
    const auto a = random_element(rng, A), a2 = random_element(rng, A);
    EXPECT_LT(distance(inner_product(x, right_act(y, a)), inner_product(x, y) * a), 1e-12);
    EXPECT_LT(distance(inner_product(x, y).adjoint(), inner_product(y, x)), 1e-12);
    for (const auto& blk : inner_product(x, x).blocks)
      if (blk.size() > 0) EXPECT_GE(Eigen::SelfAdjointEigenSolver<CMatrix>(blk).eigenvalues().minCoeff(), -1e-12);
    // |x|^2 = |<x|x>| with both sides computed separately.
    double direct = 0;
    for (const auto& blk : x.blocks) direct = std::max(direct, op_norm(blk) * op_norm(blk));
    EXPECT_NEAR(norm(x) * norm(x), inner_product(x, x).norm(), 1e-10 * std::max(1.0, direct));
    EXPECT_NEAR(norm(x) * norm(x), direct, 1e-10 * std::max(1.0, direct));
    EXPECT_LE(inner_product(x, y).norm(), norm(x) * norm(y) * (1 + 1e-9));
    EXPECT_LT(distance(right_act(right_act(x, a), a2), right_act(x, a * a2)), 1e-12);
  }
}

TEST(Hmod, RightActionByIdentityAndZero) {
  SplitMix64 rng(2);
  const auto [A, X] = random_setup(rng);
  const auto x = random_vector(rng, X);
  EXPECT_EQ(distance(right_act(x, AlgebraElement::identity(A)), x), 0.0);
  EXPECT_EQ(norm(right_act(x, AlgebraElement::zero(A))), 0.0);
}

TEST(Hmod, RestrictModule) {
  const FdCStarAlgebra A({2, 1, 3});
  const HilbertModule X(A, {1, 2, 2});
  EXPECT_EQ(restrict_module(X, {0, 1, 2}), X);
  const auto R = restrict_module(X, {0, 1});
  EXPECT_EQ(R.mult(), std::vector<std::size_t>({1, 2}));
  EXPECT_EQ(R.algebra().dims(), std::vector<std::size_t>({2, 1}));
  EXPECT_THROW(restrict_module(X, {4}), InvalidInput);
}

TEST(Hmod, RestrictionIsTheQuotientNorm) {
  SplitMix64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto [A, X] = random_setup(rng);
    LabelSet F;
    for (Label k : A.labels())
      if (rng.uniform() < 0.5) F.push_back(k);
    const auto x = random_vector(rng, X);
    // The nearest point of X.J_F is x with the blocks in F set to zero.
    ModuleVector v = x;
    for (Label k : F) v.blocks[*A.position(k)].setZero();
    EXPECT_NEAR(norm(restrict_vector(x, F)), norm(x - v), 1e-12);
    // Any other point of X.J_F is no closer.
    ModuleVector w = v;
    for (std::size_t b = 0; b < X.num_blocks(); ++b)
      if (!contains(F, A.label(b))) w.blocks[b] += random_gaussian(rng, w.blocks[b].rows(), w.blocks[b].cols());
    EXPECT_LE(norm(restrict_vector(x, F)), norm(x - w) + 1e-12);
  }
}

TEST(Hmod, AdjointsAndComposition) {
  SplitMix64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const auto [A, X] = random_setup(rng);
    const auto Y = random_module(rng, A, 3), W = random_module(rng, A, 3);
    const auto a = random_map(rng, X, Y), b = random_map(rng, W, X);
    const auto x = random_vector(rng, X), y = random_vector(rng, Y);
    EXPECT_LT(distance(inner_product(apply_map(a, x), y), inner_product(x, apply_map(adjoint_of(a), y))), 1e-12);
    EXPECT_EQ(map_distance(adjoint_of(adjoint_of(a)), a), 0.0);
    LabelSet F;
    for (Label k : A.labels())
      if (rng.uniform() < 0.6) F.push_back(k);
    EXPECT_EQ(map_distance(restrict_map(compose(a, b), F), compose(restrict_map(a, F), restrict_map(b, F))), 0.0);
    EXPECT_EQ(map_distance(restrict_map(adjoint_of(a), F), adjoint_of(restrict_map(a, F))), 0.0);
    double expected = 0;
    for (const auto& blk : a.blocks) expected = std::max(expected, op_norm(blk));
    EXPECT_DOUBLE_EQ(map_norm(a), expected);
  }
}

TEST(Hmod, IdentityAndUnitaryMaps) {
  SplitMix64 rng(5);
  const auto [A, X] = random_setup(rng);
  const auto id = AdjointableMap::identity(X);
  EXPECT_EQ(map_distance(adjoint_of(id), id), 0.0);
  EXPECT_TRUE(is_unitary_module_map(id, 1e-12));
  std::vector<CMatrix> phases;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) {
    const auto m = static_cast<Eigen::Index>(X.mult(b));
    phases.push_back(rng.unit_phase() * CMatrix::Identity(m, m));
  }
  const AdjointableMap P(X, X, phases);
  EXPECT_TRUE(is_unitary_module_map(P, 1e-12));
  std::vector<std::size_t> bigger = X.mult();
  bigger[0] += 1;
  const HilbertModule Y(A, bigger);
  EXPECT_FALSE(is_unitary_module_map(random_map(rng, X, Y), 1e-6));
  std::vector<CMatrix> us;
  for (std::size_t b = 0; b < X.num_blocks(); ++b) us.push_back(random_unitary(rng, static_cast<Eigen::Index>(X.mult(b))));
  const AdjointableMap U(X, X, us);
  const auto x = random_vector(rng, X), y = random_vector(rng, X);
  EXPECT_LT(distance(inner_product(apply_map(U, x), apply_map(U, y)), inner_product(x, y)), 1e-12);
}

TEST(Hmod, ShapeMismatchesAreRejected) {
  const FdCStarAlgebra A({2, 1});
  const HilbertModule X(A, {1, 2});
  EXPECT_THROW(AdjointableMap(X, X, {CMatrix::Identity(1, 1)}), InvalidInput);
  EXPECT_THROW(AdjointableMap(X, X, {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)}), InvalidInput);
  const HilbertModule Y(FdCStarAlgebra({3}), {1});
  EXPECT_THROW(inner_product(ModuleVector::zero(X), ModuleVector::zero(Y)), InvalidInput);
}

TEST(Hmod, ScalarMapIsRecovered) {
  const FdCStarAlgebra A({2, 3});
  const HilbertModule X(A, {2, 1});
  const auto T = module_map_from_linear([](const CVector& v) { return CVector(2.0 * v); }, X, X);
  EXPECT_EQ(T.blocks[0], 2.0 * CMatrix::Identity(2, 2));
  EXPECT_EQ(T.blocks[1], 2.0 * CMatrix::Identity(1, 1));
}

TEST(Hmod, RandomLeftMultiplicationIsRecovered) {
  SplitMix64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto [A, X] = random_setup(rng);
    const auto Y = random_module(rng, A, 3);
    const auto a = random_map(rng, X, Y);
    const LinearMap L = [&](const CVector& v) { return to_coords(apply_map(a, from_coords(X, v))); };
    EXPECT_LT(map_distance(module_map_from_linear(L, X, Y), a), 1e-12);
  }
}

TEST(Hmod, RightMultiplicationByNonCentralElementIsRejected) {
  const FdCStarAlgebra A({2});
  const HilbertModule X(A, {2});
  CMatrix c(2, 2);
  c << 0, 1, 0, 0;
  const AlgebraElement a(A, {c});
  const LinearMap L = [&](const CVector& v) { return to_coords(right_act(from_coords(X, v), a)); };
  EXPECT_THROW(module_map_from_linear(L, X, X), NotAModuleMap);
}

TEST(Hmod, ModuleMapsAreExactlyTheCommutingMaps) {
  // Brute force on small shapes: every coordinate map commuting with the
  // right action is blockwise left multiplication.
  SplitMix64 rng(7);
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::size_t m = 1; m <= 3; ++m) {
      const FdCStarAlgebra A({n});
      const HilbertModule X(A, {m});
      const auto d = static_cast<Eigen::Index>(m * n);
      CMatrix commutant_constraints(0, d * d);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const CMatrix E = right_unit_action(X, 0, r, s);
          // vec(M E - E M) = (E^T (x) I - I (x) E) vec(M).
          const CMatrix C = kron(E.transpose(), CMatrix::Identity(d, d)) - kron(CMatrix::Identity(d, d), E);
          CMatrix stacked(commutant_constraints.rows() + C.rows(), d * d);
          stacked << commutant_constraints, C;
          commutant_constraints = stacked;
        }
      const CMatrix K = kernel_basis(commutant_constraints);
      EXPECT_EQ(K.cols(), static_cast<Eigen::Index>(m * m));
      const CMatrix M = unvec(K * random_gaussian(rng, K.cols(), 1), d, d);
      const LinearMap L = [&](const CVector& v) { return CVector(M * v); };
      EXPECT_NO_THROW(module_map_from_linear(L, X, X));
      const CMatrix N = random_gaussian(rng, d, d);
      const LinearMap L2 = [&](const CVector& v) { return CVector(N * v); };
      if (n > 1) EXPECT_THROW(module_map_from_linear(L2, X, X), NotAModuleMap);
    }
}

TEST(Hmod, AmplifiedNormAtLevelTwo) {
  SplitMix64 rng(8);
  const auto [A, X] = random_setup(rng);
  std::vector<ModuleVector> e{random_vector(rng, X), ModuleVector::zero(X), ModuleVector::zero(X),
                              ModuleVector::zero(X)};
  EXPECT_NEAR(amplified_norm(std::span<const ModuleVector>(e), 2), norm(e[0]), 1e-12);
}
