#include "modglue/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modglue/errors.hpp"

namespace modglue {

void require_finite(const CMatrix& M, std::string_view what) {
  if (!M.allFinite()) {
    throw InvalidInput(std::string(what) + " has non-finite entries");
  }
}

std::vector<double> singular_values(const CMatrix& M) {
  require_finite(M);
  if (M.size() == 0) return {};
  Eigen::JacobiSVD<CMatrix> svd(M);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double op_norm(const CMatrix& M) {
  auto s = singular_values(M);
  return s.empty() ? 0.0 : s.front();
}

std::size_t numerical_rank(const CMatrix& M, double tol) {
  auto s = singular_values(M);
  if (s.empty() || s.front() == 0.0) return 0;
  const double cut = tol * s.front();
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [cut](double x) { return x > cut; }));
}

namespace {

CMatrix kernel_from_svd(const CMatrix& M, double value, bool relative) {
  require_finite(M);
  const Eigen::Index n = M.cols();
  if (M.rows() == 0 || n == 0) return CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = relative ? value * s(0) : value;
  Eigen::Index rank = 0;
  if (s(0) > 0.0)
    while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace

CMatrix kernel_basis(const CMatrix& M, double tol) {
  if (!(tol > 0)) throw InvalidInput("kernel_basis: tol must be positive");
  return kernel_from_svd(M, tol, true);
}

CMatrix kernel_basis_below(const CMatrix& M, double cut) { return kernel_from_svd(M, cut, false); }

CMatrix range_basis(const CMatrix& M, double tol) {
  require_finite(M);
  if (M.size() == 0) return CMatrix(M.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  if (s(0) > 0.0) {
    const double cut = tol * s(0);
    while (rank < s.size() && s(rank) > cut) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

double unitarity_residual(const CMatrix& M) {
  if (M.rows() != M.cols()) return std::numeric_limits<double>::infinity();
  if (M.size() == 0) return 0.0;
  const auto I = CMatrix::Identity(M.rows(), M.cols());
  return std::max(op_norm(M.adjoint() * M - I), op_norm(M * M.adjoint() - I));
}

bool is_unitary(const CMatrix& M, double tol) {
  return M.allFinite() && unitarity_residual(M) <= tol;
}

double subspace_distance(const CMatrix& Q1, const CMatrix& Q2) {
  if (Q1.rows() != Q2.rows()) throw InvalidInput("subspace_distance: ambient dimensions differ");
  if (Q1.cols() != Q2.cols()) return 1.0;
  if (Q1.cols() == 0) return 0.0;
  return std::min(1.0, op_norm(Q2 - Q1 * (Q1.adjoint() * Q2)));
}

CMatrix kron(const CMatrix& A, const CMatrix& B) {
  CMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

CVector vec(const CMatrix& M) {
  return Eigen::Map<const CVector>(M.data(), M.size());
}

CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw InvalidInput("unvec: length mismatch");
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

}  // namespace modglue
