#pragma once

// Block spin-flip machinery: the cocycle gamma = rho^{1/2} (Tr_1 rho)^{-1/2},
// the generalized conditional expectation E(A) = Tr_1(gamma^* A gamma) embedded
// back as I ⊗ (.), its Markov generator L = E - id, both semigroup pictures,
// and the Liouville inner product <<A,B>> = Tr(rho^{1/2} A^* rho^{1/2} B).

#include "blockflip/linalg.hpp"

namespace blockflip {

class DensityMatrix {
 public:
  // Strict gate: Hermitian, trace 1 and eigenvalues >= -1e-10. The stored
  // matrix is the symmetrized input.
  static DensityMatrix from_matrix(const Matrix& rho);

  // Looser gate (1e-8) for data arriving through text files; the state is
  // projected back onto the strict invariants (negative eigenvalues clamped,
  // trace renormalized).
  static DensityMatrix from_matrix_lenient(const Matrix& rho);

  const Matrix& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

 private:
  explicit DensityMatrix(Matrix rho) : rho_(std::move(rho)) {}
  Matrix rho_;
};

// Reference state plus every derived operator the dynamics needs. Immutable
// after build; min eigenvalue of rho must exceed kFaithfulTol.
struct SpinFlipModel {
  BipartiteDims dims;
  Matrix rho;
  Matrix rho_sqrt;
  Matrix reduced;           // Tr_1 rho
  Matrix reduced_inv_sqrt;
  Matrix gamma;
  HermitianEig reduced_eig;
};

inline constexpr double kFaithfulTol = 1e-10;

SpinFlipModel build_model(const DensityMatrix& rho, BipartiteDims dims,
                          int max_dim = kMaxCompositeDim);

// E(A), returned embedded: the result lies in I ⊗ B(H2).
Matrix cond_expectation(const SpinFlipModel& model, const Matrix& A);

// L(A) = E(A) - A
Matrix generator(const SpinFlipModel& model, const Matrix& A);

// T_t(A) = exp(tL)(A), evaluated through the exact superoperator exponential.
Matrix heisenberg_semigroup(const SpinFlipModel& model, const Matrix& A, double t);

// E^d(sigma) = gamma (I ⊗ Tr_1 sigma) gamma^*; trace preserving and
// completely positive by construction.
DensityMatrix dual_map(const SpinFlipModel& model, const DensityMatrix& sigma);

// T_t^d(sigma) = exp(t(E^d - id))(sigma); fixes the reference state.
DensityMatrix schrodinger_semigroup(const SpinFlipModel& model,
                                    const DensityMatrix& sigma, double t);

Complex liouville_inner(const SpinFlipModel& model, const Matrix& A, const Matrix& B);

}  // namespace blockflip
