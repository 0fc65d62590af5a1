#include "blockflip/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace blockflip {

namespace {

Matrix symmetrized(const Matrix& A) { return ((A + A.adjoint()) / 2.0).eval(); }

void check_density(const Matrix& rho, double tol, const char* who) {
  if (rho.rows() != rho.cols() || rho.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": square matrix required");
  if (!rho.allFinite())
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  const double scale = std::max(1.0, rho.norm());
  if ((rho - rho.adjoint()).norm() > tol * scale)
    throw std::invalid_argument(std::string(who) + ": not Hermitian within tolerance");
  if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
    throw std::invalid_argument(std::string(who) + ": trace must be 1");
}

}  // namespace

DensityMatrix DensityMatrix::from_matrix(const Matrix& rho) {
  check_density(rho, 1e-10, "DensityMatrix");
  Matrix sym = symmetrized(rho);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  return DensityMatrix(std::move(sym));
}

DensityMatrix DensityMatrix::from_matrix_lenient(const Matrix& rho) {
  check_density(rho, 1e-8, "DensityMatrix");
  HermitianEig eig = herm_eig(symmetrized(rho));
  RealVector w = eig.eigenvalues;
  if (w.minCoeff() < -1e-8)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::max(w(i), 0.0);
  w /= w.sum();
  Matrix clean = eig.eigenvectors * w.asDiagonal() * eig.eigenvectors.adjoint();
  return DensityMatrix(symmetrized(clean));
}

SpinFlipModel build_model(const DensityMatrix& rho, BipartiteDims dims, int max_dim) {
  if (dims.n < 1 || dims.m < 1)
    throw std::invalid_argument("build_model: dimensions must be positive");
  if (dims.composite() > max_dim)
    throw std::invalid_argument("build_model: composite dimension exceeds cap");
  if (rho.dim() != dims.composite())
    throw std::invalid_argument("build_model: state dim does not match n*m");

  HermitianEig full = herm_eig(rho.matrix());
  if (full.eigenvalues.minCoeff() <= kFaithfulTol)
    throw std::invalid_argument("build_model: reference state must be faithful");

  SpinFlipModel model;
  model.dims = dims;
  model.rho = rho.matrix();
  model.rho_sqrt = full.eigenvectors *
                   full.eigenvalues.cwiseSqrt().asDiagonal() *
                   full.eigenvectors.adjoint();
  model.reduced = partial_trace_first(model.rho, dims);
  model.reduced_eig = herm_eig(model.reduced);
  // min eig(Tr_1 rho) >= n * min eig(rho), so faithfulness already guarantees this
  if (model.reduced_eig.eigenvalues.minCoeff() <= kFaithfulTol)
    throw std::runtime_error("build_model: reduced state unexpectedly singular");
  model.reduced_inv_sqrt = herm_inv_sqrt(model.reduced);
  model.gamma = model.rho_sqrt * embed_second(model.reduced_inv_sqrt, dims);

  Matrix witness = partial_trace_first((model.gamma.adjoint() * model.gamma).eval(), dims);
  if ((witness - Matrix::Identity(dims.m, dims.m)).norm() > 1e-10)
    throw std::runtime_error("build_model: unitality witness Tr_1(gamma^* gamma) != I");
  return model;
}

Matrix cond_expectation(const SpinFlipModel& model, const Matrix& A) {
  if (A.rows() != model.dims.composite() || A.cols() != model.dims.composite())
    throw std::invalid_argument("cond_expectation: dimension mismatch");
  Matrix inner = model.gamma.adjoint() * A * model.gamma;
  return embed_second(partial_trace_first(inner, model.dims), model.dims);
}

Matrix generator(const SpinFlipModel& model, const Matrix& A) {
  return cond_expectation(model, A) - A;
}

Matrix heisenberg_semigroup(const SpinFlipModel& model, const Matrix& A, double t) {
  if (t < 0) throw std::invalid_argument("heisenberg_semigroup: t must be >= 0");
  if (A.rows() != model.dims.composite() || A.cols() != model.dims.composite())
    throw std::invalid_argument("heisenberg_semigroup: dimension mismatch");
  const int d = model.dims.composite();
  Matrix L = superoperator_matrix(
      [&](const Matrix& X) { return generator(model, X); }, d);
  return unvec_row_major(matrix_exp(L, t) * vec_row_major(A), d);
}

DensityMatrix dual_map(const SpinFlipModel& model, const DensityMatrix& sigma) {
  if (sigma.dim() != model.dims.composite())
    throw std::invalid_argument("dual_map: dimension mismatch");
  Matrix reduced_sigma = partial_trace_first(sigma.matrix(), model.dims);
  Matrix out = model.gamma * embed_second(reduced_sigma, model.dims) * model.gamma.adjoint();
  if (std::abs(out.trace().real() - 1.0) > 1e-11)
    throw std::runtime_error("dual_map: trace preservation violated");
  return DensityMatrix::from_matrix(((out + out.adjoint()) / 2.0).eval());
}

DensityMatrix schrodinger_semigroup(const SpinFlipModel& model,
                                    const DensityMatrix& sigma, double t) {
  if (t < 0) throw std::invalid_argument("schrodinger_semigroup: t must be >= 0");
  if (sigma.dim() != model.dims.composite())
    throw std::invalid_argument("schrodinger_semigroup: dimension mismatch");
  const int d = model.dims.composite();
  Matrix D = superoperator_matrix(
      [&](const Matrix& X) {
        return (model.gamma *
                embed_second(partial_trace_first(X, model.dims), model.dims) *
                model.gamma.adjoint() - X).eval();
      },
      d);
  Matrix out = unvec_row_major(matrix_exp(D, t) * vec_row_major(sigma.matrix()), d);
  out = (out + out.adjoint()) / 2.0;
  HermitianEig eig = herm_eig(out);
  RealVector w = eig.eigenvalues;
  if (w.minCoeff() < -1e-10)
    throw std::runtime_error("schrodinger_semigroup: evolved state not PSD");
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::max(w(i), 0.0);
  w /= w.sum();
  Matrix clean = eig.eigenvectors * w.asDiagonal() * eig.eigenvectors.adjoint();
  return DensityMatrix::from_matrix(((clean + clean.adjoint()) / 2.0).eval());
}

Complex liouville_inner(const SpinFlipModel& model, const Matrix& A, const Matrix& B) {
  const int d = model.dims.composite();
  if (A.rows() != d || A.cols() != d || B.rows() != d || B.cols() != d)
    throw std::invalid_argument("liouville_inner: dimension mismatch");
  return (model.rho_sqrt * A.adjoint() * model.rho_sqrt * B).trace();
}

}  // namespace blockflip
