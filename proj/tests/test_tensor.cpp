#include <gtest/gtest.h>

#include "modglue/gen.hpp"
#include "modglue/glue.hpp"
#include "modglue/oracle.hpp"
#include "modglue/tensor.hpp"

using namespace modglue;

namespace {

struct Case {
  FdCStarAlgebra A;
  ClosedCover cover;
  HilbertModule X;
  GluingDatum D;
};

Case random_case(SplitMix64& rng, TwistMode mode, std::size_t max_blocks = 5, std::size_t max_dim = 3,
                 std::size_t max_sets = 4, std::size_t max_mult = 3) {
  auto A = random_algebra(rng, max_blocks, max_dim);
  auto C = random_cover(rng, A.prim_size(), max_sets);
  auto X = random_module(rng, A, max_mult);
  auto D = random_gluing_datum(rng, X, C, mode);
  return {A, C, X, D};
}

Case single_set_case(SplitMix64& rng) {
  auto A = random_algebra(rng, 4, 3);
  LabelSet all = A.labels();
  ClosedCover C(A.prim_size(), {all});
  auto X = random_module(rng, A, 3);
  auto D = random_gluing_datum(rng, X, C, TwistMode::coherent);
  return {A, C, X, D};
}

// Model map of a bilinear evaluator into the plain index alpha*dR + beta.
template <class F>
CMatrix model_matrix(Eigen::Index dL, Eigen::Index dR, Eigen::Index dM, F&& f) {
  CMatrix M(dM, dL * dR);
  for (Eigen::Index a = 0; a < dL; ++a)
    for (Eigen::Index b = 0; b < dR; ++b) M.col(a * dR + b) = f(a, b);
  return M;
}

}  // namespace

TEST(Tensor, PairAndTripleShapes) {
  SplitMix64 rng(1);
  const auto c = random_case(rng, TwistMode::coherent);
  const auto p = pair_zero(c.D.z);
  const auto t = triple_zero(c.D.z);
  const std::size_t N = c.cover.size();
  ASSERT_EQ(p.parts.size(), N * N);
  ASSERT_EQ(t.parts.size(), N * N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      EXPECT_EQ(p.at(i, j).module.algebra().labels(), c.cover.overlap(i, j));
      for (std::size_t l = 0; l < N; ++l)
        EXPECT_EQ(t.at(i, j, l).module.algebra().labels(), c.cover.overlap(i, j, l));
    }
}

TEST(Tensor, EtaIsIdentityForSingleSet) {
  SplitMix64 rng(2);
  const auto c = single_set_case(rng);
  const auto x = random_vector(rng, c.X);
  EXPECT_EQ(distance(eta_map(c.X, c.cover, x).parts[0], x), 0.0);
  const auto z = random_bvector(rng, c.D.z);
  EXPECT_EQ(distance(eta_map(c.D.z, z).at(0, 0), z.parts[0]), 0.0);
  // All three lifts agree with the single reshaping.
  const auto t = eta_map(c.D.z, z);
  const auto a = lift_to_triple(LiftKind::EtaTensorId, c.D, t);
  EXPECT_EQ(distance(a, lift_to_triple(LiftKind::IdTensorEtaB, c.D, t)), 0.0);
  EXPECT_LT(distance(a, lift_to_triple(LiftKind::DeltaTensorId, c.D, t)), 1e-12);
}

TEST(Tensor, EtaIsIsometricAtLevelsOneAndTwo) {
  SplitMix64 rng(3);
  for (int t = 0; t < 40; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto z = random_bvector(rng, c.D.z);
    EXPECT_NEAR(norm(eta_map(c.D.z, z)), norm(z), 1e-9);
    const auto x = random_vector(rng, c.X);
    EXPECT_NEAR(norm(eta_map(c.X, c.cover, x)), norm(x), 1e-9);
    std::vector<BVector> zs;
    std::vector<PairVector> ez;
    for (int e = 0; e < 4; ++e) {
      zs.push_back(random_bvector(rng, c.D.z));
      ez.push_back(eta_map(c.D.z, zs.back()));
    }
    EXPECT_NEAR(amplified_norm(std::span<const PairVector>(ez), 2), amplified_norm(std::span<const BVector>(zs), 2),
                1e-9);
  }
}

TEST(Tensor, PhiEmbedAndEpsilon) {
  SplitMix64 rng(4);
  const auto c = random_case(rng, TwistMode::coherent);
  const std::size_t N = c.cover.size();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto v = random_vector(rng, pair_zero(c.D.z).at(i, j).module);
      const auto t = phi_embed(c.D.z, i, j, v);
      EXPECT_EQ(distance(t.at(i, j), v), 0.0);
      EXPECT_NEAR(norm(t), norm(v), 1e-12);
      for (std::size_t p = 0; p < N; ++p)
        for (std::size_t q = 0; q < N; ++q)
          if (p != i || q != j) EXPECT_EQ(norm(t.at(p, q)), 0.0);
      const auto e = epsilon_map(t);
      if (i == j)
        EXPECT_EQ(distance(e.parts[i], v), 0.0);
      else
        EXPECT_EQ(norm(e), 0.0);
    }
  const auto z = random_bvector(rng, c.D.z);
  EXPECT_EQ(distance(epsilon_map(eta_map(c.D.z, z)), z), 0.0);
}

TEST(Tensor, DeltaOfPullApartIsEtaOnRestrictions) {
  SplitMix64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto P = pull_apart(c.X, c.cover);
    const auto z = eta_map(c.X, c.cover, random_vector(rng, c.X));
    EXPECT_EQ(distance(delta_map(P, z), eta_map(P.z, z)), 0.0);
    // delta(z)_ij = z_j|F_ij on the pull-apart.
    const auto w = random_bvector(rng, P.z);
    const auto dw = delta_map(P, w);
    const std::size_t N = c.cover.size();
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        EXPECT_EQ(distance(dw.at(i, j), restrict_vector(w.parts[j], c.cover.overlap(i, j))), 0.0);
  }
}

TEST(Tensor, DeltaIsBLinearIsometricAndSplitByEpsilon) {
  SplitMix64 rng(6);
  for (int t = 0; t < 40; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto z = random_bvector(rng, c.D.z);
    const auto b = random_belement(rng, c.D.algebra());
    EXPECT_LT(distance(delta_map(c.D, b_right_act(z, b)), pair_right_act(delta_map(c.D, z), b)), 1e-12);
    EXPECT_NEAR(norm(delta_map(c.D, z)), norm(z), 1e-9);
    EXPECT_LT(distance(epsilon_map(delta_map(c.D, z)), z), 1e-12);
  }
}

TEST(Tensor, CoassociativityOnCoherentData) {
  SplitMix64 rng(7);
  for (int t = 0; t < 40; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto dz = delta_map(c.D, random_bvector(rng, c.D.z));
    EXPECT_LT(distance(lift_to_triple(LiftKind::DeltaTensorId, c.D, dz), lift_to_triple(LiftKind::EtaTensorId, c.D, dz)),
              1e-12);
  }
}

// On twisted data (delta x id) delta - (eta x id) delta has component
// (U_ij U_jl - U_il) z_l at (i,j,l), so its size is the cocycle defect.
TEST(Tensor, TwistedCoassociativityDefectIsTheCocycleDefect) {
  SplitMix64 rng(8);
  int twisted = 0;
  for (int t = 0; t < 40; ++t) {
    const auto c = random_case(rng, TwistMode::random_unitary);
    const double cocycle = validate_gluing_datum(c.D, 1e-9).cocycle_residual;
    const std::size_t N = c.cover.size();
    double worst = 0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t l = 0; l < N; ++l)
          for (Label k : c.cover.overlap(i, j, l)) {
            const auto& Uij = c.D.transition(i, j);
            const auto& Ujl = c.D.transition(j, l);
            const auto& Uil = c.D.transition(i, l);
            const CMatrix W = Uij.blocks[*Uij.source.algebra().position(k)] *
                                  Ujl.blocks[*Ujl.source.algebra().position(k)] -
                              Uil.blocks[*Uil.source.algebra().position(k)];
            if (W.size() == 0) continue;
            Eigen::JacobiSVD<CMatrix> svd(W, Eigen::ComputeFullV);
            // z_l carries the top right singular vector of W in block k.
            BVector z = b_zero(c.D.z);
            auto& blk = z.parts[l].blocks[*z.parts[l].module.algebra().position(k)];
            blk.col(0) = svd.matrixV().col(0);
            const auto dz = delta_map(c.D, z);
            const auto defect = lift_to_triple(LiftKind::DeltaTensorId, c.D, dz) -
                                lift_to_triple(LiftKind::EtaTensorId, c.D, dz);
            EXPECT_NEAR(norm(defect.at(i, j, l)), op_norm(W), 1e-12);
            worst = std::max(worst, norm(defect));
          }
    EXPECT_NEAR(worst, cocycle, 1e-12);
    for (int s = 0; s < 5; ++s) {
      const auto z = random_bvector(rng, c.D.z);
      const auto dz = delta_map(c.D, z);
      const auto defect =
          lift_to_triple(LiftKind::DeltaTensorId, c.D, dz) - lift_to_triple(LiftKind::EtaTensorId, c.D, dz);
      EXPECT_LE(norm(defect), cocycle * norm(z) + 1e-12);
    }
    if (cocycle > 1e-6) ++twisted;
  }
  EXPECT_GT(twisted, 0);
}

TEST(Tensor, ImageOfEtaIsTheEqualizerKernel) {
  SplitMix64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_case(rng, TwistMode::coherent);
    const auto PX = pulled_apart_module(c.X, c.cover);
    const BVector shape = b_zero(PX);
    const auto d = static_cast<Eigen::Index>(family_dimension(shape));
    CMatrix M(static_cast<Eigen::Index>(family_dimension(pair_zero(PX))), d);
    for (Eigen::Index a = 0; a < d; ++a) {
      const auto s = family_from_coords(shape, CVector::Unit(d, a));
      M.col(a) = to_coords(eta_tensor_id(PX, s) - id_tensor_eta_b(PX, s));
    }
    const CMatrix K = kernel_basis(M);
    EXPECT_EQ(K.cols(), static_cast<Eigen::Index>(c.X.dimension()));
    const auto dx = static_cast<Eigen::Index>(c.X.dimension());
    CMatrix image(d, dx);
    for (Eigen::Index a = 0; a < dx; ++a)
      image.col(a) = to_coords(eta_map(c.X, c.cover, from_coords(c.X, CVector::Unit(dx, a))));
    EXPECT_LT(subspace_distance(K, range_basis(image)), 1e-9);
  }
}

TEST(Oracle, TensorWithTheAlgebraIsTheModule) {
  SplitMix64 rng(10);
  for (int t = 0; t < 10; ++t) {
    const auto A = random_algebra(rng, 3, 3);
    const auto X = random_module(rng, A, 3);
    const GenericBalancedTensor T(A, left_factor(X, A), right_factor(self_module(A), A, A.labels()));
    EXPECT_EQ(T.dimension(), static_cast<Eigen::Index>(X.dimension()));
    const auto dX = static_cast<Eigen::Index>(X.dimension());
    const auto dA = static_cast<Eigen::Index>(A.dimension());
    const CMatrix model = model_matrix(dX, dA, dX, [&](Eigen::Index a, Eigen::Index b) {
      return to_coords(right_act(from_coords(X, CVector::Unit(dX, a)), element_from_coords(A, CVector::Unit(dA, b))));
    });
    const auto cmp = compare_with_model(T, model, summed_form({X}, A, {A.labels()}));
    EXPECT_TRUE(cmp.agrees(1e-9)) << "relations " << cmp.relation_residual << " gram " << cmp.gram_residual;
  }
}

TEST(Oracle, PsiModelOfXTensorB) {
  SplitMix64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const auto A = random_algebra(rng, 3, 2);
    const auto C = random_cover(rng, A.prim_size(), 3);
    const auto X = random_module(rng, A, 2);
    const SumAlgebraB B(A, C);
    const GenericBalancedTensor T(A, left_factor(X, A), right_factor(B));
    const auto PX = pulled_apart_module(X, C);
    const auto dX = static_cast<Eigen::Index>(X.dimension());
    const auto dB = static_cast<Eigen::Index>(B.flat().dimension());
    const auto dP = static_cast<Eigen::Index>(PX.dimension());
    std::size_t expected = 0;
    for (std::size_t i = 0; i < C.size(); ++i)
      for (Label k : C.set(i)) expected += X.mult(*A.position(k)) * A.dim(*A.position(k));
    EXPECT_EQ(static_cast<std::size_t>(dP), expected);
    EXPECT_EQ(T.dimension(), dP);
    const CMatrix model = model_matrix(dX, dB, dP, [&](Eigen::Index a, Eigen::Index b) {
      const auto bb = B.unflatten(element_from_coords(B.flat(), CVector::Unit(dB, b)));
      return to_coords(psi_apply(X, B, from_coords(X, CVector::Unit(dX, a)), bb));
    });
    std::vector<std::vector<Label>> labels;
    for (std::size_t i = 0; i < C.size(); ++i) {
      std::vector<Label> l;
      for (Label k : C.set(i)) l.push_back(B.flat_label(i, k));
      labels.push_back(l);
    }
    const auto cmp = compare_with_model(T, model, summed_form(PX.parts, B.flat(), labels));
    EXPECT_TRUE(cmp.agrees(1e-9)) << "relations " << cmp.relation_residual << " gram " << cmp.gram_residual;
  }
}

TEST(Oracle, NuModelDimensions) {
  SplitMix64 rng(12);
  const FdCStarAlgebra A({2, 1, 2});
  const ClosedCover C(3, {{0, 1}, {1, 2}, {2}});
  const HilbertModule Y(restrict_algebra(A, C.set(0)), {2, 1});
  for (std::size_t j = 0; j < C.size(); ++j) {
    const LabelSet& Fj = C.set(j);
    const auto AFj = restrict_algebra(A, Fj);
    const GenericBalancedTensor T(A, left_factor(Y, A), right_factor(A, Fj));
    const auto Fij = intersect(Y.algebra().labels(), Fj);
    const auto target = restrict_module(Y, Fij);
    EXPECT_EQ(T.dimension(), static_cast<Eigen::Index>(target.dimension()));
    const auto dY = static_cast<Eigen::Index>(Y.dimension());
    const auto dF = static_cast<Eigen::Index>(AFj.dimension());
    const CMatrix model =
        model_matrix(dY, dF, static_cast<Eigen::Index>(target.dimension()), [&](Eigen::Index a, Eigen::Index b) {
          return to_coords(nu_apply(from_coords(Y, CVector::Unit(dY, a)), element_from_coords(AFj, CVector::Unit(dF, b)),
                                    Fj));
        });
    const auto cmp = compare_with_model(T, model, summed_form({target}, AFj, {Fij}));
    EXPECT_TRUE(cmp.agrees(1e-9)) << "j " << j;
  }
  // Disjoint sets give the zero module.
  const HilbertModule Z(restrict_algebra(A, C.set(2)), {1});
  const GenericBalancedTensor T0(A, left_factor(Z, A), right_factor(A, C.set(0)));
  EXPECT_EQ(T0.dimension(), 0);
}

TEST(Oracle, MatrixSpaceTensorOverOneByOne) {
  const FdCStarAlgebra M1({1});
  const HilbertModule X(M1, {2});
  const HilbertModule Y(FdCStarAlgebra({3}), {1});
  const GenericBalancedTensor T(M1, left_factor(X, M1), right_factor(Y, M1, {0}));
  EXPECT_EQ(T.plain_dim(), 6);
  EXPECT_EQ(T.dimension(), 6);
}

TEST(Oracle, PairAndTripleModelsAgree) {
  SplitMix64 rng(13);
  int checked = 0;
  for (int t = 0; t < 40 && checked < 8; ++t) {
    const auto c = random_case(rng, TwistMode::coherent, 3, 2, 3, 2);
    if (pair_plain_dim(c.D.z) > 200 || triple_plain_dim(c.D.z) > 200) continue;
    const auto pair = check_pair_model(c.D.z);
    EXPECT_TRUE(pair.comparison.agrees(1e-9));
    EXPECT_EQ(pair.comparison.oracle_dim, static_cast<Eigen::Index>(family_dimension(pair_zero(c.D.z))));
    const auto triple = check_triple_model(c.D.z, pair);
    EXPECT_TRUE(triple.comparison.agrees(1e-9));
    ++checked;
  }
  EXPECT_GT(checked, 0);
}
