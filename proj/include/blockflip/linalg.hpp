#pragma once

// Dense complex kernels for small bipartite systems: tensor structure,
// partial trace/transpose, Hermitian matrix functions, superoperators.
// Index convention everywhere: the first factor is the slow (outer) index,
// so the composite basis is |i⟩⊗|j⟩ ↦ i*m + j.

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace blockflip {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Default cap on composite dimension; everything here is dense O(d^3)-O(d^6).
inline constexpr int kMaxCompositeDim = 64;

// Eigenvalues of nominally-PSD inputs above this (in absolute value) count as
// genuinely negative; smaller ones are rounding debris and get clamped.
inline constexpr double kPsdClampTol = 1e-12;

struct BipartiteDims {
  int n = 1;  // dim of first factor
  int m = 1;  // dim of second factor
  int composite() const { return n * m; }
};

struct HermitianEig {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns, same order
};

struct MatrixNorms {
  double op;         // largest singular value
  double trace;      // sum of singular values
  double frobenius;
};

// A ⊗ B with the first factor on the outer index.
Matrix tensor(const Matrix& A, const Matrix& B);

// (Tr_1 X)_{rs} = sum_p X_{(p,r),(p,s)}
Matrix partial_trace_first(const Matrix& X, BipartiteDims dims);

// I_n ⊗ Y
Matrix embed_second(const Matrix& Y, BipartiteDims dims);

// (X^{T2})_{(p,r),(q,s)} = X_{(p,s),(q,r)}
Matrix partial_transpose_second(const Matrix& X, BipartiteDims dims);

// Symmetrizes and decomposes; rejects matrices that are not Hermitian within
// 1e-10 relative to max(1, ||A||).
HermitianEig herm_eig(const Matrix& A);

// PSD square root; eigenvalues in [-kPsdClampTol, 0) are clamped to zero,
// anything below that is an error.
Matrix herm_sqrt(const Matrix& A);

// Inverse square root of a positive definite matrix (min eigenvalue > kPsdClampTol).
Matrix herm_inv_sqrt(const Matrix& A);

MatrixNorms norms(const Matrix& A);

// Row-major vectorization, so column q*d+s of the result is vec(phi(|q⟩⟨s|)).
Matrix superoperator_matrix(const std::function<Matrix(const Matrix&)>& phi, int d);
Vector vec_row_major(const Matrix& A);
Matrix unvec_row_major(const Vector& v, int d);

// exp(t*A) by scaling and squaring of the Taylor series, t >= 0.
Matrix matrix_exp(const Matrix& A, double t);

}  // namespace blockflip
