#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace modglue {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Relative threshold below which a singular value counts as zero.
inline constexpr double kRankTol = 1e-10;

// Throws InvalidInput when M has a NaN or infinite entry.
void require_finite(const CMatrix& M, std::string_view what = "matrix");

// Singular values in decreasing order.
std::vector<double> singular_values(const CMatrix& M);

// Largest singular value; 0 for empty matrices.
double op_norm(const CMatrix& M);

// Number of singular values above tol * sigma_max.
std::size_t numerical_rank(const CMatrix& M, double tol = kRankTol);

// Orthonormal basis of ker M, one column per basis vector.
CMatrix kernel_basis(const CMatrix& M, double tol = kRankTol);
// Kernel with an absolute cutoff: singular values <= cut count as zero.
CMatrix kernel_basis_below(const CMatrix& M, double cut);

// Orthonormal basis of the column space of M.
CMatrix range_basis(const CMatrix& M, double tol = kRankTol);

// max(|M*M - I|, |MM* - I|); +inf for non-square M.
double unitarity_residual(const CMatrix& M);

bool is_unitary(const CMatrix& M, double tol);

// Sine of the largest principal angle between the spans of two matrices
// with orthonormal columns. Subspaces of different dimension are at distance 1.
double subspace_distance(const CMatrix& Q1, const CMatrix& Q2);

CMatrix kron(const CMatrix& A, const CMatrix& B);

// Column-major vectorization and its inverse.
CVector vec(const CMatrix& M);
CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols);

}  // namespace modglue
