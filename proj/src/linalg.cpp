#include "blockflip/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace blockflip {

namespace {

void require_square(const Matrix& A, const char* who) {
  if (A.rows() != A.cols())
    throw std::invalid_argument(std::string(who) + ": square matrix required");
  if (!A.allFinite())
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

void require_composite(const Matrix& X, BipartiteDims dims, const char* who) {
  require_square(X, who);
  if (dims.n < 1 || dims.m < 1)
    throw std::invalid_argument(std::string(who) + ": dimensions must be positive");
  if (X.rows() != dims.composite())
    throw std::invalid_argument(std::string(who) + ": matrix dim does not match n*m");
}

}  // namespace

Matrix tensor(const Matrix& A, const Matrix& B) {
  require_square(A, "tensor");
  require_square(B, "tensor");
  const auto n = A.rows(), m = B.rows();
  if (n * m > kMaxCompositeDim)
    throw std::invalid_argument("tensor: composite dimension exceeds cap");
  Matrix out(n * m, n * m);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < n; ++q)
      out.block(p * m, q * m, m, m) = A(p, q) * B;
  return out;
}

Matrix partial_trace_first(const Matrix& X, BipartiteDims dims) {
  require_composite(X, dims, "partial_trace_first");
  const int n = dims.n, m = dims.m;
  Matrix out = Matrix::Zero(m, m);
  for (int p = 0; p < n; ++p) out += X.block(p * m, p * m, m, m);
  return out;
}

Matrix embed_second(const Matrix& Y, BipartiteDims dims) {
  require_square(Y, "embed_second");
  if (Y.rows() != dims.m)
    throw std::invalid_argument("embed_second: operator dim does not match m");
  return tensor(Matrix::Identity(dims.n, dims.n), Y);
}

Matrix partial_transpose_second(const Matrix& X, BipartiteDims dims) {
  require_composite(X, dims, "partial_transpose_second");
  const int n = dims.n, m = dims.m;
  Matrix out(n * m, n * m);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      out.block(p * m, q * m, m, m) = X.block(p * m, q * m, m, m).transpose();
  return out;
}

HermitianEig herm_eig(const Matrix& A) {
  require_square(A, "herm_eig");
  const double scale = std::max(1.0, A.norm());
  if ((A - A.adjoint()).norm() > 1e-10 * scale)
    throw std::invalid_argument("herm_eig: matrix not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> es(((A + A.adjoint()) / 2.0).eval());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix herm_sqrt(const Matrix& A) {
  HermitianEig eig = herm_eig(A);
  RealVector w = eig.eigenvalues;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < -kPsdClampTol)
      throw std::invalid_argument("herm_sqrt: matrix not positive semidefinite");
    if (w(i) < 0) w(i) = 0;
  }
  return eig.eigenvectors * w.cwiseSqrt().asDiagonal() * eig.eigenvectors.adjoint();
}

Matrix herm_inv_sqrt(const Matrix& A) {
  HermitianEig eig = herm_eig(A);
  const RealVector& w = eig.eigenvalues;
  if (w.minCoeff() <= kPsdClampTol)
    throw std::invalid_argument("herm_inv_sqrt: matrix singular");
  RealVector inv = w.cwiseSqrt().cwiseInverse();
  return eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.adjoint();
}

MatrixNorms norms(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A);
  const RealVector& s = svd.singularValues();
  return {s.size() ? s(0) : 0.0, s.sum(), A.norm()};
}

Vector vec_row_major(const Matrix& A) {
  const auto d = A.rows();
  Vector v(d * A.cols());
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < A.cols(); ++b) v(a * A.cols() + b) = A(a, b);
  return v;
}

Matrix unvec_row_major(const Vector& v, int d) {
  Matrix A(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) A(a, b) = v(a * d + b);
  return A;
}

Matrix superoperator_matrix(const std::function<Matrix(const Matrix&)>& phi, int d) {
  if (d < 1) throw std::invalid_argument("superoperator_matrix: d must be positive");
  Matrix S(d * d, d * d);
  Matrix unit = Matrix::Zero(d, d);
  for (int q = 0; q < d; ++q)
    for (int s = 0; s < d; ++s) {
      unit(q, s) = 1.0;
      Matrix img = phi(unit);
      unit(q, s) = 0.0;
      if (img.rows() != d || img.cols() != d)
        throw std::invalid_argument("superoperator_matrix: map changed dimension");
      S.col(q * d + s) = vec_row_major(img);
    }
  return S;
}

Matrix matrix_exp(const Matrix& A, double t) {
  require_square(A, "matrix_exp");
  if (t < 0) throw std::invalid_argument("matrix_exp: t must be >= 0");
  const auto d = A.rows();
  Matrix B = t * A;
  // infinity norm as a cheap upper bound for the scaling decision
  const double nrm = B.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  B /= std::ldexp(1.0, s);
  Matrix R = Matrix::Identity(d, d);
  Matrix term = Matrix::Identity(d, d);
  for (int k = 1; k <= 48; ++k) {
    term = (B * term) / static_cast<double>(k);
    R += term;
    if (term.norm() <= 1e-18 * R.norm()) break;
  }
  for (int i = 0; i < s; ++i) R = R * R;
  return R;
}

}  // namespace blockflip
