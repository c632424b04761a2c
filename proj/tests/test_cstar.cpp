#include <gtest/gtest.h>

#include "modglue/cstar.hpp"
#include "modglue/errors.hpp"
#include "modglue/gen.hpp"

using namespace modglue;

namespace {

FdCStarAlgebra blocks_213() { return FdCStarAlgebra({2, 1, 3}); }

AlgebraElement diag_element(const FdCStarAlgebra& A, std::vector<Complex> scalars) {
  std::vector<CMatrix> blks;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    const auto n = static_cast<Eigen::Index>(A.dim(b));
    blks.push_back(scalars.at(b) * CMatrix::Identity(n, n));
  }
  return {A, std::move(blks)};
}

}  // namespace

TEST(Cstar, AlgebraShape) {
  const auto A = blocks_213();
  EXPECT_EQ(A.num_blocks(), 3u);
  EXPECT_EQ(A.dimension(), 4u + 1u + 9u);
  EXPECT_TRUE(A.is_full());
  EXPECT_THROW(FdCStarAlgebra(std::vector<std::size_t>{}), InvalidInput);
  EXPECT_THROW(FdCStarAlgebra({2, 0}), InvalidInput);
}

TEST(Cstar, RestrictAlgebra) {
  const auto A = blocks_213();
  EXPECT_EQ(restrict_algebra(A, {0, 1, 2}), A);
  const auto B = restrict_algebra(A, {1});
  ASSERT_EQ(B.num_blocks(), 1u);
  EXPECT_EQ(B.dim(0), 1u);
  EXPECT_EQ(B.label(0), 1u);
  EXPECT_EQ(restrict_algebra(A, {}).num_blocks(), 0u);
  EXPECT_THROW(restrict_algebra(A, {3}), InvalidInput);
}

TEST(Cstar, RestrictElementKeepsBlocks) {
  const auto A = blocks_213();
  const auto a = diag_element(A, {1.0, 3.0, 1.0});
  const auto r = restrict_element(a, {0, 1});
  ASSERT_EQ(r.blocks.size(), 2u);
  EXPECT_EQ(r.blocks[0], CMatrix::Identity(2, 2));
  EXPECT_EQ(r.blocks[1](0, 0), Complex(3.0));
  EXPECT_THROW(restrict_element(a, {5}), InvalidInput);
}

TEST(Cstar, RestrictionIsFunctorialAndMultiplicative) {
  SplitMix64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto A = random_algebra(rng, 6, 4);
    const auto a = random_element(rng, A), b = random_element(rng, A);
    LabelSet F, G;
    for (Label k : A.labels()) {
      if (rng.uniform() < 0.5) F.push_back(k);
      if (rng.uniform() < 0.5) G.push_back(k);
    }
    const auto FG = intersect(F, G);
    EXPECT_EQ(distance(restrict_element(restrict_element(a, F), FG), restrict_element(a, FG)), 0.0);
    EXPECT_EQ(distance(restrict_element(a * b, F), restrict_element(a, F) * restrict_element(b, F)), 0.0);
    EXPECT_EQ(distance(restrict_element(a.adjoint(), F), restrict_element(a, F).adjoint()), 0.0);
    double expected = 0;
    for (Label k : F) expected = std::max(expected, op_norm(a.blocks[*A.position(k)]));
    EXPECT_NEAR(restrict_element(a, F).norm(), expected, 1e-12);
    EXPECT_LE(restrict_element(a, F).norm(), a.norm() + 1e-12);
  }
}

TEST(Cstar, CoverValidation) {
  EXPECT_NO_THROW(ClosedCover(3, {{0, 1}, {1, 2}}));
  EXPECT_THROW(ClosedCover(3, {{0, 1}}), InvalidInput);
  EXPECT_THROW(ClosedCover(3, {{0, 3}, {1, 2}}), InvalidInput);
  EXPECT_NO_THROW(ClosedCover(2, {{0, 1}, {}}));
  const ClosedCover C(3, {{0, 1}, {1, 2}, {1}});
  EXPECT_EQ(C.overlap(0, 1), LabelSet({1}));
  EXPECT_EQ(C.overlap(0, 1, 2), LabelSet({1}));
  EXPECT_EQ(C.sets_containing(1), std::vector<std::size_t>({0, 1, 2}));
}

TEST(Cstar, EtaEmbedCopiesBlocks) {
  const auto A = blocks_213();
  const SumAlgebraB B(A, ClosedCover(3, {{0, 1}, {1, 2}}));
  const auto e = eta_embed(B, AlgebraElement::identity(A));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t b = 0; b < e.parts[i].blocks.size(); ++b) {
      const auto n = e.parts[i].blocks[b].rows();
      EXPECT_EQ(e.parts[i].blocks[b], CMatrix::Identity(n, n));
    }
  EXPECT_EQ(B.flat().num_blocks(), 4u);
  EXPECT_EQ(B.flat().dim(B.flat_label(1, 2)), 3u);
}

TEST(Cstar, EtaIsAnIsometricHomomorphism) {
  SplitMix64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const auto A = random_algebra(rng, 6, 4);
    const SumAlgebraB B(A, random_cover(rng, A.prim_size(), 4));
    const auto a = random_element(rng, A), a2 = random_element(rng, A);
    EXPECT_NEAR(norm(eta_embed(B, a)), a.norm(), 1e-12);
    EXPECT_LT(distance(eta_embed(B, a) * eta_embed(B, a2), eta_embed(B, a * a2)), 1e-12);
    EXPECT_TRUE(image_of_eta_characterization(B, eta_embed(B, a), 1e-12));
    // i -> |a|F_i| attains |a|.
    double best = 0;
    for (std::size_t i = 0; i < B.num_sets(); ++i)
      best = std::max(best, restrict_element(a, B.cover().set(i)).norm());
    EXPECT_NEAR(best, a.norm(), 1e-12);
  }
}

TEST(Cstar, PerturbedDuplicateLeavesImageOfEta) {
  const auto A = blocks_213();
  const SumAlgebraB B(A, ClosedCover(3, {{0, 1}, {1, 2}}));
  auto b = eta_embed(B, AlgebraElement::identity(A));
  EXPECT_TRUE(image_of_eta_characterization(B, b, 1e-12));
  b.parts[1].blocks[0](0, 0) += 1e-3;
  EXPECT_FALSE(image_of_eta_characterization(B, b, 1e-9));
  EXPECT_NEAR(eta_image_residual(B, b), 1e-3, 1e-12);
}

TEST(Cstar, ConstraintCountMatchesOverlapFormula) {
  SplitMix64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto A = random_algebra(rng, 6, 4);
    const SumAlgebraB B(A, random_cover(rng, A.prim_size(), 4));
    std::size_t expected = 0;
    for (std::size_t b = 0; b < A.num_blocks(); ++b)
      expected += A.dim(b) * A.dim(b) * (B.cover().sets_containing(A.label(b)).size() - 1);
    const CMatrix M = eta_constraint_matrix(B);
    EXPECT_EQ(numerical_rank(M), expected);
    // The kernel is the image of eta, one copy of A.
    EXPECT_EQ(static_cast<std::size_t>(kernel_basis(M).cols()), A.dimension());
  }
}

TEST(Cstar, FlattenRoundTrip) {
  SplitMix64 rng(8);
  const auto A = random_algebra(rng, 5, 3);
  const SumAlgebraB B(A, random_cover(rng, A.prim_size(), 3));
  const auto b = random_belement(rng, B);
  EXPECT_EQ(distance(B.unflatten(B.flatten(b)), b), 0.0);
  const auto a = random_element(rng, A);
  EXPECT_EQ(distance(element_from_coords(A, to_coords(a)), a), 0.0);
}
