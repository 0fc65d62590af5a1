#include "blockflip/states.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace blockflip {

namespace {

constexpr double kSimplexTol = 1e-12;

}  // namespace

BellDiagonalParams::BellDiagonalParams(std::array<double, 4> l) : lambdas(l) {
  double sum = 0;
  for (double v : lambdas) {
    if (!(v > 0)) throw std::invalid_argument("BellDiagonalParams: weights must be positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("BellDiagonalParams: weights must sum to 1");
}

DensityMatrix bell_reference(const BellDiagonalParams& params) {
  const auto& l = params.lambdas;
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = rho(3, 3) = (l[0] + l[3]) / 2.0;
  rho(0, 3) = rho(3, 0) = (l[0] - l[3]) / 2.0;
  rho(1, 1) = l[1];
  rho(2, 2) = l[2];
  return DensityMatrix::from_matrix(rho);
}

PptReport ppt_check(const DensityMatrix& rho, BipartiteDims dims) {
  Matrix pt = partial_transpose_second(rho.matrix(), dims);
  HermitianEig eig = herm_eig(pt);
  double abs_sum = eig.eigenvalues.cwiseAbs().sum();
  PptReport report;
  report.min_pt_eigenvalue = eig.eigenvalues.minCoeff();
  report.negativity = std::max(0.0, (abs_sum - 1.0) / 2.0);
  report.is_ppt = report.min_pt_eigenvalue >= -1e-10;
  return report;
}

Matrix SeparableDecomposition::assemble() const {
  validate();
  Matrix out = Matrix::Zero(dims.composite(), dims.composite());
  for (const auto& term : terms)
    out += term.weight * tensor(term.factor_I.matrix(), term.factor_II.matrix());
  return out;
}

void SeparableDecomposition::validate() const {
  if (terms.empty())
    throw std::invalid_argument("SeparableDecomposition: at least one term required");
  double sum = 0;
  for (const auto& term : terms) {
    if (!(term.weight > 0))
      throw std::invalid_argument("SeparableDecomposition: weights must be positive");
    if (term.factor_I.dim() != dims.n || term.factor_II.dim() != dims.m)
      throw std::invalid_argument("SeparableDecomposition: factor dimension mismatch");
    sum += term.weight;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("SeparableDecomposition: weights must sum to 1");
}

Vector ClosedFormDual::y(int i) const {
  if (i < 0 || i > 3) throw std::invalid_argument("ClosedFormDual::y: index out of range");
  Vector v = Vector::Zero(4);
  switch (i) {
    case 0: v(0) = eta_plus;  v(3) = kappa_plus;  break;
    case 1: v(1) = 1.0; break;
    case 2: v(2) = 1.0; break;
    case 3: v(0) = eta_minus; v(3) = kappa_minus; break;
  }
  return v;
}

Matrix ClosedFormDual::reconstruct() const {
  Matrix out = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    Vector v = y(i);
    out += lambdas_tilde[static_cast<std::size_t>(i)] * (v * v.adjoint());
  }
  return out;
}

ClosedFormDual closed_form_dual(const BellDiagonalParams& params, double a,
                                bool unnormalized) {
  const auto& l = params.lambdas;
  if (std::abs(l[1] - l[2]) > 1e-12)
    throw std::invalid_argument("closed_form_dual: requires lambda2 = lambda3");
  if (!(l[0] > l[3] + 1e-10))
    throw std::invalid_argument("closed form undefined: requires lambda1 > lambda4");
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("closed_form_dual: a must lie in (0,1)");

  const double b = 1.0 - a;
  const double sp = std::sqrt(l[0]) + std::sqrt(l[3]);
  const double sm = std::sqrt(l[0]) - std::sqrt(l[3]);
  const double factor = unnormalized ? 1.0 : 0.25;

  ClosedFormDual cfd;
  cfd.normalized = !unnormalized;
  cfd.chi = 1.0 / ((l[0] + l[3]) / 2.0 + l[1]);
  cfd.A = factor * (a * sp * sp + b * sm * sm);
  cfd.B = factor * (l[0] - l[3]);
  cfd.C = factor * (a * sm * sm + b * sp * sp);
  cfd.X = std::sqrt((cfd.A - cfd.C) * (cfd.A - cfd.C) + 4.0 * cfd.B * cfd.B);

  const double lam_plus = (cfd.A + cfd.C + cfd.X) / 2.0;
  const double lam_minus = (cfd.A + cfd.C - cfd.X) / 2.0;
  cfd.lambdas_tilde = {cfd.chi * lam_plus, cfd.chi * b * l[1], cfd.chi * a * l[2],
                       cfd.chi * lam_minus};

  const double dp = std::sqrt(cfd.X * cfd.X - (cfd.A - cfd.C) * cfd.X);
  const double dm = std::sqrt(cfd.X * cfd.X + (cfd.A - cfd.C) * cfd.X);
  const double r2 = std::sqrt(2.0);
  cfd.eta_plus = r2 * cfd.B / dp;
  cfd.eta_minus = r2 * cfd.B / dm;
  cfd.kappa_plus = (-(cfd.A - cfd.C) + cfd.X) / (r2 * dp);
  cfd.kappa_minus = (-(cfd.A - cfd.C) - cfd.X) / (r2 * dm);
  return cfd;
}

double separation_bound(const ClosedFormDual& cfd) {
  return cfd.lambdas_tilde[0] * cfd.eta_plus * cfd.kappa_plus +
         cfd.lambdas_tilde[3] * cfd.eta_minus * cfd.kappa_minus;
}

std::vector<OnsetRow> entanglement_onset(const BellDiagonalParams& params, double a,
                                         const DensityMatrix& sigma_I,
                                         const std::vector<double>& t_grid) {
  if (!(a >= 0.0 && a <= 1.0))
    throw std::invalid_argument("entanglement_onset: a must lie in [0,1]");
  if (sigma_I.dim() != 2)
    throw std::invalid_argument("entanglement_onset: sigma_I must be a qubit state");
  for (double t : t_grid)
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("entanglement_onset: grid points must lie in [0,1]");

  const BipartiteDims dims{2, 2};
  SpinFlipModel model = build_model(bell_reference(params), dims);
  Matrix sigma_II = Matrix::Zero(2, 2);
  sigma_II(0, 0) = a;
  sigma_II(1, 1) = 1.0 - a;
  DensityMatrix sigma = DensityMatrix::from_matrix(tensor(sigma_I.matrix(), sigma_II));
  DensityMatrix pushed = dual_map(model, sigma);

  std::vector<OnsetRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    Matrix mix = (1.0 - t) * sigma.matrix() + t * pushed.matrix();
    PptReport mr = ppt_check(DensityMatrix::from_matrix(mix), dims);
    PptReport er = ppt_check(schrodinger_semigroup(model, sigma, t), dims);
    rows.push_back({t, mr.negativity, mr.is_ppt, er.negativity, er.is_ppt});
  }
  return rows;
}

SeparableDecomposition random_separable(BipartiteDims dims, int num_terms,
                                        std::uint64_t seed) {
  if (num_terms < 1)
    throw std::invalid_argument("random_separable: num_terms must be >= 1");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> weights(static_cast<std::size_t>(num_terms));
  double wsum = 0;
  for (auto& w : weights) {
    w = expo(rng);
    wsum += w;
  }

  auto random_density = [&](int d) {
    Matrix G(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) G(r, c) = Complex(gauss(rng), gauss(rng));
    Matrix W = G * G.adjoint();
    W /= W.trace().real();
    return DensityMatrix::from_matrix(((W + W.adjoint()) / 2.0).eval());
  };

  SeparableDecomposition dec;
  dec.dims = dims;
  dec.terms.reserve(weights.size());
  for (double w : weights)
    dec.terms.push_back({w / wsum, random_density(dims.n), random_density(dims.m)});
  return dec;
}

bool decomposition_equivalence(const SeparableDecomposition& d1,
                               const SeparableDecomposition& d2) {
  if (d1.dims.n != d2.dims.n || d1.dims.m != d2.dims.m)
    throw std::invalid_argument("decomposition_equivalence: dimension mismatch");
  return norms(d1.assemble() - d2.assemble()).trace <= 1e-10;
}

}  // namespace blockflip
