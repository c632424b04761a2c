#include <gtest/gtest.h>

#include "modglue/errors.hpp"
#include "modglue/gen.hpp"
#include "modglue/glue.hpp"
#include "modglue/tensor.hpp"

using namespace modglue;

namespace {

struct Case {
  FdCStarAlgebra A;
  ClosedCover cover;
  HilbertModule X;
  GluingDatum D;
};

Case random_case(SplitMix64& rng, TwistMode mode) {
  auto A = random_algebra(rng, 5, 3);
  auto C = random_cover(rng, A.prim_size(), 4);
  auto X = random_module(rng, A, 3);
  auto D = random_gluing_datum(rng, X, C, mode);
  return {A, C, X, D};
}

std::vector<Complex> twisted_phases() { return {1.0, 1.0, -1.0}; }

}  // namespace

TEST(Glue, PullApartValidates) {
  SplitMix64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto v = validate_gluing_datum(pull_apart(c.X, c.cover), 1e-12);
    EXPECT_TRUE(v.valid() && v.cocycle);
    EXPECT_EQ(v.unitary_residual, 0.0);
    EXPECT_EQ(v.cocycle_residual, 0.0);
  }
}

TEST(Glue, PhaseDatumBreaksTheCocycleByTwo) {
  const auto inst = phase_instance(twisted_phases());
  const auto v = validate_gluing_datum(inst.datum, 1e-9);
  EXPECT_TRUE(v.unitary);
  EXPECT_TRUE(v.involutive);
  EXPECT_FALSE(v.cocycle);
  EXPECT_NEAR(v.cocycle_residual, 2.0, 1e-12);
}

TEST(Glue, NonIdentityDiagonalTransitionIsNotInvolutive) {
  auto inst = phase_instance(twisted_phases());
  auto zeta = inst.datum.zeta;
  zeta[0] = Complex(0, 1) * zeta[0];
  const GluingDatum D(inst.datum.z, zeta);
  const auto v = validate_gluing_datum(D, 1e-9);
  EXPECT_TRUE(v.unitary);
  EXPECT_FALSE(v.involutive);
  EXPECT_GT(v.identity_residual, 1.0);
  EXPECT_THROW(glue(D), InvalidInput);
}

TEST(Glue, NonUnitaryTransitionIsRejected) {
  auto inst = phase_instance(twisted_phases());
  auto zeta = inst.datum.zeta;
  zeta[1] = Complex(2.0) * zeta[1];
  zeta[3] = Complex(2.0) * zeta[3];
  const GluingDatum D(inst.datum.z, zeta);
  EXPECT_FALSE(validate_gluing_datum(D, 1e-9).unitary);
  EXPECT_THROW(glue(D), InvalidInput);
}

TEST(Glue, PullApartOfASmallModule) {
  const FdCStarAlgebra A({2, 1, 3});
  const HilbertModule X(A, {1, 2, 2});
  const ClosedCover C(3, {{0, 1}, {1, 2}});
  const auto D = pull_apart(X, C);
  EXPECT_EQ(D.z.parts[0].mult(), std::vector<std::size_t>({1, 2}));
  EXPECT_EQ(D.z.parts[1].mult(), std::vector<std::size_t>({2, 2}));
  const auto& z01 = D.transition(0, 1);
  ASSERT_EQ(z01.blocks.size(), 1u);
  EXPECT_EQ(z01.blocks[0], CMatrix::Identity(2, 2));
  EXPECT_EQ(map_distance(kappa(X, C, 0, 1), z01), 0.0);
}

TEST(Glue, PullApartIsAStarFunctor) {
  SplitMix64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto Y = random_module(rng, c.A, 3), W = random_module(rng, c.A, 3);
    const auto a = random_map(rng, c.X, Y), b = random_map(rng, W, c.X);
    EXPECT_EQ(morphism_distance(adjoint_of(pull_apart_map(a, c.cover)), pull_apart_map(adjoint_of(a), c.cover)), 0.0);
    EXPECT_EQ(morphism_distance(pull_apart_map(compose(a, b), c.cover),
                                compose(pull_apart_map(a, c.cover), pull_apart_map(b, c.cover))),
              0.0);
    EXPECT_EQ(intertwining_residual(pull_apart_map(a, c.cover), pull_apart(c.X, c.cover), pull_apart(Y, c.cover)), 0.0);
  }
}

TEST(Glue, CoherentDataGlueToTheOriginalMultiplicities) {
  SplitMix64 rng(3);
  for (int t = 0; t < 40; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto G = glue(c.D);
    EXPECT_EQ(G.module.mult(), c.X.mult());
    for (std::size_t b = 0; b < c.A.num_blocks(); ++b) {
      const CMatrix& E = G.embedding[b];
      const auto g = E.cols();
      EXPECT_LT((E.adjoint() * E - static_cast<double>(G.sets[b].size()) * CMatrix::Identity(g, g)).norm(), 1e-10);
      for (auto i : G.sets[b]) {
        const CMatrix S = G.slice(c.A.label(b), i);
        EXPECT_LT((S.adjoint() * S - CMatrix::Identity(g, g)).norm(), 1e-10);
      }
    }
  }
}

TEST(Glue, TwistedPhasesGlueToZero) {
  const auto inst = phase_instance(twisted_phases());
  const auto G = glue(inst.datum);
  EXPECT_EQ(G.module.mult(), std::vector<std::size_t>({0}));
}

TEST(Glue, TwoSetCoverKeepsMultiplicityForAnyUnitary) {
  SplitMix64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto A = random_algebra(rng, 5, 3);
    LabelSet F0, F1;
    for (Label k : A.labels()) {
      const double u = rng.uniform();
      if (u < 0.6) F0.push_back(k);
      if (u > 0.3 || !contains(F0, k)) F1.push_back(k);
    }
    if (F0.empty()) F0.push_back(0);
    const ClosedCover C(A.prim_size(), {F0, F1});
    const auto X = random_module(rng, A, 4);
    const auto D = random_gluing_datum(rng, X, C, TwistMode::random_unitary);
    EXPECT_EQ(glue(D).module.mult(), X.mult());
  }
}

TEST(Glue, GluedVectorsSatisfyTheEqualizerAndDescendInnerProducts) {
  SplitMix64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto G = glue(c.D);
    const auto g = random_vector(rng, G.module), h = random_vector(rng, G.module);
    const auto z = G.embed(c.D.z, g), w = G.embed(c.D.z, h);
    EXPECT_LT(distance(eta_map(c.D.z, z), delta_map(c.D, z)), 1e-10);
    const std::size_t N = c.cover.size();
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        const auto F = c.cover.overlap(i, j);
        EXPECT_LT(distance(restrict_element(inner_product(z.parts[i], w.parts[i]), F),
                           restrict_element(inner_product(z.parts[j], w.parts[j]), F)),
                  1e-10);
      }
    EXPECT_LT(distance(G.project(z), g), 1e-10);
  }
}

TEST(Glue, GlueMorphismIsAStarFunctor) {
  SplitMix64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto Y = random_module(rng, c.A, 3), W = random_module(rng, c.A, 3);
    const auto PX = pull_apart(c.X, c.cover), PY = pull_apart(Y, c.cover), PW = pull_apart(W, c.cover);
    const auto GX = glue(PX), GY = glue(PY), GW = glue(PW);
    const auto a = pull_apart_map(random_map(rng, c.X, Y), c.cover);
    const auto b = pull_apart_map(random_map(rng, W, c.X), c.cover);
    const auto Ga = glue_morphism(a, PX, GX, PY, GY);
    const auto Gb = glue_morphism(b, PW, GW, PX, GX);
    EXPECT_LT(map_distance(glue_morphism(adjoint_of(a), PY, GY, PX, GX), adjoint_of(Ga)), 1e-10);
    EXPECT_LT(map_distance(glue_morphism(compose(a, b), PW, GW, PY, GY), compose(Ga, Gb)), 1e-10);
    const GlueMorphism id = pull_apart_map(AdjointableMap::identity(c.X), c.cover);
    EXPECT_LT(map_distance(glue_morphism(id, PX, GX, PX, GX), AdjointableMap::identity(GX.module)), 1e-10);
  }
}

TEST(Glue, NonIntertwiningFamilyIsRejected) {
  SplitMix64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    if (c.cover.size() < 2) continue;
    GlueMorphism a;
    for (std::size_t i = 0; i < c.cover.size(); ++i) a.components.push_back(random_map(rng, c.D.z.parts[i], c.D.z.parts[i]));
    const auto G = glue(c.D);
    if (intertwining_residual(a, c.D, c.D) > 1e-6) EXPECT_THROW(glue_morphism(a, c.D, G, c.D, G), NotAMorphism);
  }
}

TEST(Glue, PhiIsUnitaryAndIsometric) {
  SplitMix64 rng(8);
  const auto c = random_case(rng, TwistMode::coherent);
  const auto P = phi_iso(c.X, c.cover);
  EXPECT_LT(unitarity_residual(P.phi), 1e-9);
  for (int s = 0; s < 200; ++s) {
    const auto x = random_vector(rng, c.X);
    EXPECT_NEAR(norm(apply_map(P.phi, x)), norm(x), 1e-9);
  }
  EXPECT_EQ(P.glued.module.dimension(), c.X.dimension());
}

TEST(Glue, PhiIsIdentityForSingleSet) {
  SplitMix64 rng(9);
  const auto A = random_algebra(rng, 4, 3);
  const auto X = random_module(rng, A, 3);
  const auto P = phi_iso(X, ClosedCover(A.prim_size(), {A.labels()}));
  EXPECT_LT(map_distance(P.phi, AdjointableMap::identity(X)), 1e-12);
}

TEST(Glue, EpsilonOnCoherentData) {
  SplitMix64 rng(10);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto e = epsilon_iso(c.D, glue(c.D));
    EXPECT_TRUE(e.unitary);
    EXPECT_LT(e.unitary_residual, 1e-9);
    EXPECT_LT(e.intertwining_residual, 1e-9);
  }
  const auto c = random_case(rng, TwistMode::coherent);
  const auto P = pull_apart(c.X, c.cover);
  const auto e = epsilon_iso(P, glue(P));
  EXPECT_LT(e.unitary_residual, 1e-12);
}

TEST(Glue, EpsilonOnTwistedPhasesHasDeficitOne) {
  const auto inst = phase_instance(twisted_phases());
  const auto e = epsilon_iso(inst.datum, glue(inst.datum));
  EXPECT_FALSE(e.unitary);
  EXPECT_EQ(e.deficit, std::vector<long>({1, 1, 1}));
}

TEST(Glue, DescentIdentitiesOnCoherentData) {
  SplitMix64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    std::vector<BVector> zs;
    for (int s = 0; s < 4; ++s) zs.push_back(random_bvector(rng, c.D.z));
    const auto r = descent_identities_check(c.D, glue(c.D), zs);
    EXPECT_LT(r.counit_residual, 1e-10);
    EXPECT_LT(r.coassociativity_residual, 1e-10);
    EXPECT_LT(r.kernel_angle, 1e-10);
    EXPECT_EQ(r.kernel_dim, r.glued_dim);
    EXPECT_EQ(r.kernel_leakage, 0.0);
    EXPECT_LT(r.tensor_kernel_angle, 1e-10);
    EXPECT_EQ(r.tensor_kernel_dim, r.glued_tensor_dim);
  }
}

TEST(Glue, DescentIdentitiesForSingleSetAreExact) {
  SplitMix64 rng(12);
  const auto A = random_algebra(rng, 4, 3);
  const auto X = random_module(rng, A, 3);
  const auto D = pull_apart(X, ClosedCover(A.prim_size(), {A.labels()}));
  std::vector<BVector> zs{random_bvector(rng, D.z)};
  const auto r = descent_identities_check(D, glue(D), zs);
  EXPECT_EQ(r.counit_residual, 0.0);
  EXPECT_EQ(r.coassociativity_residual, 0.0);
  EXPECT_EQ(r.kernel_dim, X.dimension());
}

TEST(Glue, DescentOnTwistedPhases) {
  const auto inst = phase_instance(twisted_phases());
  const auto G = glue(inst.datum);
  SplitMix64 rng(13);
  std::vector<BVector> zs{random_bvector(rng, inst.datum.z)};
  const auto r = descent_identities_check(inst.datum, G, zs);
  EXPECT_LT(r.counit_residual, 1e-12);
  EXPECT_EQ(r.kernel_dim, 0u);
  EXPECT_EQ(r.glued_dim, 0u);
  EXPECT_EQ(r.kernel_angle, 0.0);
  EXPECT_EQ(r.tensor_kernel_dim, 0u);
  EXPECT_EQ(r.glued_tensor_dim, 0u);
  EXPECT_GT(r.coassociativity_residual, 0.0);
}

TEST(Glue, TransitionEntriesRoundTrip) {
  SplitMix64 rng(14);
  const auto c = random_case(rng, TwistMode::random_unitary);
  const auto D2 = make_gluing_datum(c.D.z, transition_entries(c.D));
  for (std::size_t p = 0; p < c.D.zeta.size(); ++p) EXPECT_EQ(map_distance(D2.zeta[p], c.D.zeta[p]), 0.0);
  // Upper-triangular entries suffice: the rest is filled by adjoints and identities.
  std::vector<TransitionEntry> upper;
  for (const auto& e : transition_entries(c.D))
    if (e.i < e.j) upper.push_back(e);
  const auto D3 = make_gluing_datum(c.D.z, upper);
  for (std::size_t p = 0; p < c.D.zeta.size(); ++p) EXPECT_LT(map_distance(D3.zeta[p], c.D.zeta[p]), 1e-15);
}
