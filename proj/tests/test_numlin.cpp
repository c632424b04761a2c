#include <gtest/gtest.h>

#include <cmath>

#include "modglue/errors.hpp"
#include "modglue/gen.hpp"
#include "modglue/numlin.hpp"

using namespace modglue;

namespace {

// Rank by Gaussian elimination with partial pivoting.
std::size_t row_reduction_rank(CMatrix M, double tol) {
  std::size_t rank = 0;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (Eigen::Index c = 0; c < M.cols() && static_cast<Eigen::Index>(rank) < M.rows(); ++c) {
    const auto r0 = static_cast<Eigen::Index>(rank);
    Eigen::Index piv = r0;
    for (Eigen::Index r = r0; r < M.rows(); ++r)
      if (std::abs(M(r, c)) > std::abs(M(piv, c))) piv = r;
    if (std::abs(M(piv, c)) <= tol * scale) continue;
    M.row(piv).swap(M.row(r0));
    for (Eigen::Index r = r0 + 1; r < M.rows(); ++r) M.row(r) -= (M(r, c) / M(r0, c)) * M.row(r0);
    ++rank;
  }
  return rank;
}

double power_iteration_norm(const CMatrix& M, int iters = 500) {
  CVector v = CVector::Ones(M.cols());
  double s = 0;
  for (int k = 0; k < iters; ++k) {
    CVector w = M.adjoint() * (M * v);
    const double n = w.norm();
    if (n == 0) return 0;
    v = w / n;
    s = std::sqrt(n);
  }
  return s;
}

CMatrix low_rank(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
  return random_gaussian(rng, rows, rank) * random_gaussian(rng, rank, cols);
}

}  // namespace

TEST(Numlin, RankOfKnownMatrices) {
  CMatrix M(2, 2);
  M << 1, 2, 2, 4;
  EXPECT_EQ(numerical_rank(M), 1u);
  EXPECT_EQ(kernel_basis(M).cols(), 1);
  EXPECT_EQ(numerical_rank(CMatrix::Identity(3, 3)), 3u);
  EXPECT_EQ(numerical_rank(CMatrix::Zero(3, 2)), 0u);
}

TEST(Numlin, KernelOfRankOneMatrixIsSpannedByOrthogonalVector) {
  CMatrix M(2, 2);
  M << 1, 2, 2, 4;
  const CMatrix K = kernel_basis(M);
  ASSERT_EQ(K.cols(), 1);
  CVector expected(2);
  expected << 2, -1;
  expected /= expected.norm();
  EXPECT_LT(subspace_distance(K, expected), 1e-12);
}

TEST(Numlin, RankAgreesWithRowReduction) {
  SplitMix64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto rows = static_cast<Eigen::Index>(rng.uniform_int(1, 9));
    const auto cols = static_cast<Eigen::Index>(rng.uniform_int(1, 9));
    const auto r = static_cast<Eigen::Index>(rng.uniform_int(0, std::min(rows, cols)));
    const CMatrix M = r == 0 ? CMatrix::Zero(rows, cols) : low_rank(rng, rows, cols, r);
    EXPECT_EQ(numerical_rank(M), row_reduction_rank(M, 1e-9)) << "trial " << t;
    EXPECT_EQ(numerical_rank(M), static_cast<std::size_t>(r));
  }
}

TEST(Numlin, KernelBasisIsOrthonormalAndAnnihilated) {
  SplitMix64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const CMatrix M = low_rank(rng, 6, 8, 3);
    const CMatrix K = kernel_basis(M);
    ASSERT_EQ(K.cols(), 5);
    EXPECT_LT((K.adjoint() * K - CMatrix::Identity(5, 5)).norm(), 1e-12);
    EXPECT_LT(op_norm(M * K), 1e-12 * std::max(1.0, op_norm(M)));
  }
}

TEST(Numlin, EmptyInputs) {
  EXPECT_EQ(kernel_basis(CMatrix(0, 3)).cols(), 3);
  EXPECT_EQ(kernel_basis(CMatrix(3, 0)).cols(), 0);
  EXPECT_EQ(op_norm(CMatrix(0, 0)), 0.0);
}

TEST(Numlin, OpNormMatchesPowerIteration) {
  SplitMix64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const CMatrix M = random_gaussian(rng, 5, 4);
    EXPECT_NEAR(op_norm(M), power_iteration_norm(M), 1e-9 * op_norm(M));
  }
}

TEST(Numlin, UnitarityChecks) {
  SplitMix64 rng(5);
  const CMatrix U = random_unitary(rng, 4);
  EXPECT_TRUE(is_unitary(U, 1e-12));
  EXPECT_FALSE(is_unitary(2.0 * U, 1e-3));
  const CMatrix V = U.leftCols(3);
  EXPECT_FALSE(is_unitary(V, 1e-3));
  EXPECT_TRUE(std::isinf(unitarity_residual(V)));
}

TEST(Numlin, NonFiniteEntriesAreRejected) {
  CMatrix M = CMatrix::Identity(2, 2);
  M(0, 1) = std::nan("");
  EXPECT_THROW(require_finite(M), InvalidInput);
}

TEST(Numlin, SubspaceDistance) {
  CMatrix e1 = CMatrix::Zero(3, 1), e2 = CMatrix::Zero(3, 1);
  e1(0, 0) = 1;
  e2(1, 0) = 1;
  EXPECT_NEAR(subspace_distance(e1, e1), 0.0, 1e-15);
  EXPECT_NEAR(subspace_distance(e1, e2), 1.0, 1e-15);
  CMatrix tilted(3, 1);
  tilted << std::cos(0.3), std::sin(0.3), 0;
  EXPECT_NEAR(subspace_distance(e1, tilted), std::sin(0.3), 1e-12);
  EXPECT_EQ(subspace_distance(e1, CMatrix::Identity(3, 2)), 1.0);
}

TEST(Numlin, KronAndVec) {
  SplitMix64 rng(9);
  const CMatrix A = random_gaussian(rng, 2, 3), X = random_gaussian(rng, 3, 4), B = random_gaussian(rng, 4, 2);
  // vec(A X B) = (B^T (x) A) vec(X).
  EXPECT_LT((vec(A * X * B) - kron(B.transpose(), A) * vec(X)).norm(), 1e-12);
  EXPECT_EQ(unvec(vec(X), 3, 4), X);
}

TEST(Numlin, DiagonalAndZeroKernels) {
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 1;
  const CMatrix K = kernel_basis(D);
  ASSERT_EQ(K.cols(), 1);
  EXPECT_NEAR(std::abs(K(1, 0)), 1.0, 1e-15);
  EXPECT_EQ(kernel_basis(CMatrix::Zero(2, 2)).cols(), 2);
}

TEST(Numlin, ProductOfThinFactorsHasKernelThree) {
  SplitMix64 rng(21);
  const CMatrix M = low_rank(rng, 3, 5, 2);
  EXPECT_EQ(kernel_basis(M).cols(), 3);
  EXPECT_EQ(5 - row_reduction_rank(M, 1e-9), 3u);
}

TEST(Numlin, NormsOfSimpleMatrices) {
  EXPECT_DOUBLE_EQ(op_norm(CMatrix::Identity(3, 3)), 1.0);
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 2;
  D(1, 1) = 1;
  EXPECT_NEAR(op_norm(D), 2.0, 1e-15);
}

TEST(Numlin, PhaseDiagonalIsUnitary) {
  for (double theta : {0.0, 0.7, 2.0, 3.1}) {
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0) = 1;
    D(1, 1) = std::polar(1.0, theta);
    EXPECT_TRUE(is_unitary(D, 1e-12));
  }
  EXPECT_TRUE(is_unitary(CMatrix::Identity(3, 3), 1e-12));
  EXPECT_FALSE(is_unitary(CMatrix::Identity(2, 3), 1e-12));
}

TEST(Numlin, RankNullityAndNormInvariants) {
  SplitMix64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const auto rows = static_cast<Eigen::Index>(rng.uniform_int(1, 7));
    const auto mid = static_cast<Eigen::Index>(rng.uniform_int(1, 7));
    const auto cols = static_cast<Eigen::Index>(rng.uniform_int(1, 7));
    const auto r = static_cast<Eigen::Index>(rng.uniform_int(1, std::min(rows, cols)));
    const CMatrix M = low_rank(rng, rows, cols, r);
    EXPECT_EQ(static_cast<std::size_t>(kernel_basis(M).cols()) + numerical_rank(M), static_cast<std::size_t>(cols));
    const CMatrix A = random_gaussian(rng, rows, mid), B = random_gaussian(rng, mid, cols);
    EXPECT_LE(op_norm(A * B), op_norm(A) * op_norm(B) * (1 + 1e-9));
    EXPECT_NEAR(op_norm(A.adjoint()), op_norm(A), 1e-9 * op_norm(A));
  }
}

TEST(Numlin, AbsoluteCutoffKernel) {
  CMatrix M = CMatrix::Zero(2, 2);
  M(0, 0) = 1e-17;
  EXPECT_EQ(kernel_basis(M).cols(), 1);
  EXPECT_EQ(kernel_basis_below(M, 1e-10).cols(), 2);
  M(1, 1) = 1;
  EXPECT_EQ(kernel_basis_below(M, 1e-10).cols(), 1);
}

// Equalizer constraints of four sets glued by V_p V_q^*: singular values are
// heavily repeated and the kernel has dimension m.
TEST(Numlin, KernelWithRepeatedSingularValues) {
  SplitMix64 rng(15);
  const Eigen::Index m = 4, sets = 4;
  std::vector<CMatrix> V;
  for (Eigen::Index p = 0; p < sets; ++p) V.push_back(random_unitary(rng, m));
  CMatrix C = CMatrix::Zero(sets * (sets - 1) * m, sets * m);
  Eigen::Index r = 0;
  for (Eigen::Index p = 0; p < sets; ++p)
    for (Eigen::Index q = 0; q < sets; ++q) {
      if (p == q) continue;
      C.block(r, p * m, m, m) = CMatrix::Identity(m, m);
      C.block(r, q * m, m, m) = -V[p] * V[q].adjoint();
      r += m;
    }
  const CMatrix K = kernel_basis(C);
  ASSERT_TRUE(K.allFinite());
  ASSERT_EQ(K.cols(), m);
  EXPECT_LT(op_norm(C * K), 1e-12);
  EXPECT_LT((K.adjoint() * K - CMatrix::Identity(m, m)).norm(), 1e-12);
  const auto s = singular_values(C);
  EXPECT_NEAR(s.front(), std::sqrt(2.0 * sets), 1e-12);
}
