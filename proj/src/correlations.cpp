#include "blockflip/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace blockflip {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Eigenvalue index clusters, ascending input, gap threshold kDegeneracyTol.
std::vector<std::vector<int>> cluster_indices(const RealVector& values) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < values.size(); ++i) {
    if (i > 0 && values(i) - values(i - 1) < kDegeneracyTol)
      clusters.back().push_back(i);
    else
      clusters.push_back({i});
  }
  return clusters;
}

// Common eigenbasis of a pairwise-commuting Hermitian family by block
// refinement; for non-commuting input it still returns an orthonormal basis.
Matrix simultaneous_eigenbasis(const std::vector<Matrix>& family, int dim) {
  Matrix Q = Matrix::Identity(dim, dim);
  std::vector<std::vector<int>> blocks{std::vector<int>(static_cast<std::size_t>(dim))};
  for (int i = 0; i < dim; ++i) blocks[0][static_cast<std::size_t>(i)] = i;

  for (const Matrix& member : family) {
    std::vector<std::vector<int>> refined;
    for (const auto& block : blocks) {
      const int b = static_cast<int>(block.size());
      if (b == 1) {
        refined.push_back(block);
        continue;
      }
      Matrix cols(dim, b);
      for (int c = 0; c < b; ++c) cols.col(c) = Q.col(block[static_cast<std::size_t>(c)]);
      Matrix sub = cols.adjoint() * member * cols;
      HermitianEig eig = herm_eig(((sub + sub.adjoint()) / 2.0).eval());
      Matrix rotated = cols * eig.eigenvectors;
      for (int c = 0; c < b; ++c) Q.col(block[static_cast<std::size_t>(c)]) = rotated.col(c);
      for (const auto& sub_block : cluster_indices(eig.eigenvalues)) {
        std::vector<int> cell;
        cell.reserve(sub_block.size());
        for (int local : sub_block) cell.push_back(block[static_cast<std::size_t>(local)]);
        refined.push_back(std::move(cell));
      }
    }
    blocks = std::move(refined);
  }
  return Q;
}

bool pairwise_commuting(const std::vector<Matrix>& family) {
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      if ((family[i] * family[j] - family[j] * family[i]).norm() > 1e-10) return false;
  return true;
}

double criterion_residual(const Matrix& rho, const Matrix& rho_sqrt,
                          const RealVector& reduced_eigenvalues,
                          const Matrix& reduced_eigenvectors, BipartiteDims dims) {
  const int n = dims.n, m = dims.m;
  if (reduced_eigenvalues.minCoeff() <= kPsdClampTol)
    throw std::invalid_argument("factorization_criterion: reduced state singular");
  Matrix S = tensor(Matrix::Identity(n, n), reduced_eigenvectors);
  Matrix rp = S.adjoint() * rho * S;
  Matrix rs = S.adjoint() * rho_sqrt * S;
  auto at = [m](int a, int b) { return a * m + b; };
  double worst = 0.0;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          Complex s = 0;
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < m; ++q) s += rs(at(p, j), at(k, q)) * rs(at(l, q), at(p, i));
          double ratio = std::sqrt(reduced_eigenvalues(j) / reduced_eigenvalues(i));
          worst = std::max(worst, std::abs(rp(at(l, j), at(k, i)) - s * ratio));
        }
  return worst;
}

// Uniformly random full-rank density matrix from a complex Gaussian Gram matrix.
DensityMatrix gram_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) G(r, c) = Complex(gauss(rng), gauss(rng));
  Matrix W = G * G.adjoint();
  W /= W.trace().real();
  return DensityMatrix::from_matrix(((W + W.adjoint()) / 2.0).eval());
}

// Random mixture of projectors onto a common random orthonormal basis of the
// second factor; optionally forces the first two weights equal so the reduced
// state is degenerate.
SeparableDecomposition random_second_abelian(BipartiteDims dims, std::uint64_t seed,
                                             bool equal_pair) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(dims.m, dims.m);
  for (int r = 0; r < dims.m; ++r)
    for (int c = 0; c < dims.m; ++c) G(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();

  std::uniform_real_distribution<double> unif(0.2, 1.0);
  std::vector<double> w(static_cast<std::size_t>(dims.m));
  for (auto& v : w) v = unif(rng);
  if (equal_pair && dims.m >= 2) w[1] = w[0];
  double wsum = 0;
  for (double v : w) wsum += v;

  SeparableDecomposition dec;
  dec.dims = dims;
  for (int s = 0; s < dims.m; ++s) {
    Matrix proj = Q.col(s) * Q.col(s).adjoint();
    dec.terms.push_back({w[static_cast<std::size_t>(s)] / wsum, gram_density(dims.n, rng),
                         DensityMatrix::from_matrix(((proj + proj.adjoint()) / 2.0).eval())});
  }
  return dec;
}

}  // namespace

Complex correlation(const SpinFlipModel& model, const ObservablePair& pair) {
  const int n = model.dims.n, m = model.dims.m;
  if (pair.F.rows() != n || pair.F.cols() != n || pair.G.rows() != m || pair.G.cols() != m)
    throw std::invalid_argument("correlation: observable dimension mismatch");
  if (!pair.F.allFinite() || !pair.G.allFinite())
    throw std::invalid_argument("correlation: non-finite observable entries");
  const RealVector& aa = model.reduced_eig.eigenvalues;
  if (aa.minCoeff() <= kPsdClampTol)
    throw std::invalid_argument("correlation: reduced state singular");
  const Matrix& U = model.reduced_eig.eigenvectors;
  Matrix S = tensor(Matrix::Identity(n, n), U);
  Matrix rs = S.adjoint() * model.rho_sqrt * S;
  Matrix Gp = U.adjoint() * pair.G * U;
  auto at = [m](int a, int b) { return a * m + b; };
  Complex total = 0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          Complex s = 0;
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < m; ++q) s += rs(at(p, j), at(k, q)) * rs(at(l, q), at(p, i));
          total += s * std::sqrt(aa(j) / aa(i)) * pair.F(k, l) * Gp(i, j);
        }
  return total;
}

Complex factorized_value(const SeparableDecomposition& decomp, const ObservablePair& pair) {
  decomp.validate();
  if (pair.F.rows() != decomp.dims.n || pair.F.cols() != decomp.dims.n ||
      pair.G.rows() != decomp.dims.m || pair.G.cols() != decomp.dims.m)
    throw std::invalid_argument("factorized_value: observable dimension mismatch");
  Complex total = 0;
  for (const auto& term : decomp.terms)
    total += term.weight * (term.factor_I.matrix() * pair.F).trace() *
             (term.factor_II.matrix() * pair.G).trace();
  return total;
}

double factorization_criterion(const SpinFlipModel& model) {
  return criterion_residual(model.rho, model.rho_sqrt, model.reduced_eig.eigenvalues,
                            model.reduced_eig.eigenvectors, model.dims);
}

double factorization_criterion(const Matrix& rho, BipartiteDims dims) {
  if (rho.rows() != dims.composite() || rho.cols() != dims.composite())
    throw std::invalid_argument("factorization_criterion: dimension mismatch");
  Matrix rho_sqrt = herm_sqrt(rho);
  HermitianEig reduced = herm_eig(partial_trace_first(rho, dims));
  return criterion_residual(rho, rho_sqrt, reduced.eigenvalues, reduced.eigenvectors, dims);
}

QuasiAbelianDiagnosis quasi_abelian_diagnose(const std::vector<DensityMatrix>& family,
                                             const std::vector<double>& weights) {
  if (family.empty() || family.size() != weights.size())
    throw std::invalid_argument("quasi_abelian_diagnose: family/weights size mismatch");
  const int d = family.front().dim();
  double wsum = 0;
  for (double w : weights) {
    if (!(w > 0)) throw std::invalid_argument("quasi_abelian_diagnose: weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("quasi_abelian_diagnose: weights must sum to 1");
  Matrix avg = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family[i].dim() != d)
      throw std::invalid_argument("quasi_abelian_diagnose: family dimension mismatch");
    avg += weights[i] * family[i].matrix();
  }

  HermitianEig eig = herm_eig(avg);
  QuasiAbelianDiagnosis diag;
  diag.partition = cluster_indices(eig.eigenvalues);
  diag.K = static_cast<int>(diag.partition.size());
  diag.is_quasi_abelian = true;

  std::vector<int> cell_of(static_cast<std::size_t>(d));
  for (std::size_t c = 0; c < diag.partition.size(); ++c)
    for (int idx : diag.partition[c]) cell_of[static_cast<std::size_t>(idx)] = static_cast<int>(c);

  for (const auto& member : family) {
    Matrix M = eig.eigenvectors.adjoint() * member.matrix() * eig.eigenvectors;
    for (int k = 0; k < d && diag.is_quasi_abelian; ++k)
      for (int l = 0; l < d; ++l)
        if (cell_of[static_cast<std::size_t>(k)] != cell_of[static_cast<std::size_t>(l)] &&
            std::abs(M(k, l)) > 1e-10) {
          diag.is_quasi_abelian = false;
          break;
        }
    if (!diag.is_quasi_abelian) break;
  }
  return diag;
}

SeparableDecomposition abelian_decomposition_from_zeros(const DensityMatrix& rho,
                                                        BipartiteDims dims, Side side,
                                                        const Matrix& basis, double tol) {
  const int n = dims.n, m = dims.m;
  if (rho.dim() != dims.composite())
    throw std::invalid_argument("abelian_decomposition_from_zeros: dimension mismatch");
  const int bd = (side == Side::I) ? n : m;
  if (basis.rows() != bd || basis.cols() != bd)
    throw std::invalid_argument("abelian_decomposition_from_zeros: basis dimension mismatch");
  if ((basis.adjoint() * basis - Matrix::Identity(bd, bd)).norm() > 1e-8)
    throw std::invalid_argument("abelian_decomposition_from_zeros: basis not orthonormal");

  Matrix S = (side == Side::I) ? tensor(basis, Matrix::Identity(m, m))
                               : tensor(Matrix::Identity(n, n), basis);
  Matrix rp = S.adjoint() * rho.matrix() * S;
  auto at = [m](int a, int b) { return a * m + b; };

  double off = 0.0;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          bool diagonal_block = (side == Side::I) ? (k == l) : (j == i);
          if (!diagonal_block) off = std::max(off, std::abs(rp(at(l, j), at(k, i))));
        }
  if (off > tol)
    throw std::invalid_argument("off-diagonal block structure present");

  SeparableDecomposition dec;
  dec.dims = dims;
  std::vector<double> kept_weights;
  std::vector<Matrix> kept_blocks;
  std::vector<int> kept_cols;
  for (int s = 0; s < bd; ++s) {
    double lam = 0.0;
    Matrix block = (side == Side::I) ? Matrix(m, m) : Matrix(n, n);
    if (side == Side::I) {
      for (int p = 0; p < m; ++p) lam += rp(at(s, p), at(s, p)).real();
      if (lam <= 1e-12) continue;
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) block(j, i) = rp(at(s, j), at(s, i)) / lam;
    } else {
      for (int p = 0; p < n; ++p) lam += rp(at(p, s), at(p, s)).real();
      if (lam <= 1e-12) continue;
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) block(l, k) = rp(at(l, s), at(k, s)) / lam;
    }
    kept_weights.push_back(lam);
    kept_blocks.push_back(std::move(block));
    kept_cols.push_back(s);
  }

  double total = 0.0;
  for (double w : kept_weights) total += w;
  for (std::size_t idx = 0; idx < kept_weights.size(); ++idx) {
    Matrix proj = basis.col(kept_cols[idx]) * basis.col(kept_cols[idx]).adjoint();
    DensityMatrix rank_one =
        DensityMatrix::from_matrix_lenient(((proj + proj.adjoint()) / 2.0).eval());
    DensityMatrix block = DensityMatrix::from_matrix_lenient(kept_blocks[idx]);
    if (side == Side::I)
      dec.terms.push_back({kept_weights[idx] / total, rank_one, block});
    else
      dec.terms.push_back({kept_weights[idx] / total, block, rank_one});
  }
  dec.validate();
  return dec;
}

Matrix sqrt_separable(const SeparableDecomposition& decomp) {
  decomp.validate();
  std::vector<Matrix> first, second;
  for (const auto& term : decomp.terms) {
    first.push_back(term.factor_I.matrix());
    second.push_back(term.factor_II.matrix());
  }
  DensityMatrix rho = DensityMatrix::from_matrix(decomp.assemble());

  Side side;
  if (pairwise_commuting(first))
    side = Side::I;
  else if (pairwise_commuting(second))
    side = Side::II;
  else
    throw std::invalid_argument("sqrt_separable: no pairwise-commuting factor family");

  const int bd = (side == Side::I) ? decomp.dims.n : decomp.dims.m;
  Matrix Q = simultaneous_eigenbasis(side == Side::I ? first : second, bd);
  SeparableDecomposition canonical =
      abelian_decomposition_from_zeros(rho, decomp.dims, side, Q, 1e-9);

  Matrix out = Matrix::Zero(decomp.dims.composite(), decomp.dims.composite());
  for (const auto& term : canonical.terms) {
    double root = std::sqrt(term.weight);
    if (side == Side::I)
      out += root * tensor(term.factor_I.matrix(), herm_sqrt(term.factor_II.matrix()));
    else
      out += root * tensor(herm_sqrt(term.factor_I.matrix()), term.factor_II.matrix());
  }
  return out;
}

SeparableDecomposition perturb_nondegenerate(const SeparableDecomposition& decomp,
                                             double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0)) throw std::invalid_argument("perturb_nondegenerate: epsilon must be > 0");
  decomp.validate();
  const int n = decomp.dims.n, m = decomp.dims.m;
  std::mt19937_64 rng(seed);

  SeparableDecomposition out = decomp;
  double budget = epsilon / 2.0;
  for (int pass = 0; pass <= m; ++pass) {
    Matrix reduced = partial_trace_first(out.assemble(), out.dims);
    HermitianEig eig = herm_eig(reduced);
    if (eig.eigenvalues.minCoeff() <= kPsdClampTol)
      throw std::invalid_argument("perturb_nondegenerate: reduced state singular");
    auto clusters = cluster_indices(eig.eigenvalues);

    std::vector<std::vector<int>> degenerate;
    for (const auto& c : clusters)
      if (c.size() > 1) degenerate.push_back(c);
    if (degenerate.empty()) return out;
    if (pass == m) break;

    double eta = budget;
    for (std::size_t c = 1; c < clusters.size(); ++c)
      eta = std::min(eta, eig.eigenvalues(clusters[c].front()) -
                              eig.eigenvalues(clusters[c - 1].back()));
    eta *= 0.25;

    // Pick the new projector inside the first degenerate eigenspace, refined by
    // the second-factor family so an existing common eigenstructure survives.
    const auto& cell = degenerate.front();
    const int b = static_cast<int>(cell.size());
    Matrix span(m, b);
    for (int c = 0; c < b; ++c) span.col(c) = eig.eigenvectors.col(cell[static_cast<std::size_t>(c)]);
    std::vector<Matrix> restricted;
    restricted.reserve(out.terms.size());
    for (const auto& term : out.terms) {
      Matrix M = span.adjoint() * term.factor_II.matrix() * span;
      restricted.push_back(((M + M.adjoint()) / 2.0).eval());
    }
    Matrix W = simultaneous_eigenbasis(restricted, b);
    std::uniform_int_distribution<int> pick_dist(0, b - 1);
    Vector v = span * W.col(pick_dist(rng));
    Matrix proj = v * v.adjoint();

    for (auto& term : out.terms) term.weight *= (1.0 - eta);
    out.terms.push_back(
        {eta, DensityMatrix::from_matrix(Matrix::Identity(n, n) / double(n)),
         DensityMatrix::from_matrix(((proj + proj.adjoint()) / 2.0).eval())});
    budget /= 2.0;
  }
  throw std::runtime_error("perturb_nondegenerate: did not converge");
}

SeparableDecomposition perturb_nonfactorizable(const SeparableDecomposition& decomp,
                                               double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("perturb_nonfactorizable: epsilon must be > 0");
  decomp.validate();
  const int n = decomp.dims.n, m = decomp.dims.m;
  if (n < 2 || m < 2)
    throw std::invalid_argument("perturb_nonfactorizable: needs at least two levels per factor");

  Matrix rho = decomp.assemble();
  if (factorization_criterion(rho, decomp.dims) > kFactorizationTol) return decomp;

  HermitianEig eig = herm_eig(partial_trace_first(rho, decomp.dims));
  for (int i = 1; i < m; ++i)
    if (eig.eigenvalues(i) - eig.eigenvalues(i - 1) <= kDegeneracyTol)
      throw std::invalid_argument(
          "perturb_nonfactorizable: reduced spectrum degenerate; "
          "apply perturb_nondegenerate first");

  Matrix U(m, m);  // reduced eigenbasis, eigenvalues decreasing
  for (int i = 0; i < m; ++i) U.col(i) = eig.eigenvectors.col(m - 1 - i);
  abelian_decomposition_from_zeros(DensityMatrix::from_matrix(rho), decomp.dims, Side::II,
                                   U, kFactorizationTol);

  const double eta = epsilon / 4.0;
  Matrix p1 = U.col(0) * U.col(0).adjoint();
  Matrix p2 = U.col(1) * U.col(1).adjoint();
  Matrix cross = Complex(0, 1) * (U.col(0) * U.col(1).adjoint() - U.col(1) * U.col(0).adjoint());
  Matrix twist_plus = (p1 + p2) / 2.0 + cross / 4.0;
  Matrix twist_minus = (p1 + p2) / 2.0 - cross / 4.0;
  Matrix e1 = Matrix::Zero(n, n), e2 = Matrix::Zero(n, n);
  e1(0, 0) = 1.0;
  e2(1, 1) = 1.0;

  SeparableDecomposition out = decomp;
  for (auto& term : out.terms) term.weight *= (1.0 - eta);
  out.terms.push_back({eta / 2.0, DensityMatrix::from_matrix(e1),
                       DensityMatrix::from_matrix(((twist_plus + twist_plus.adjoint()) / 2.0).eval())});
  out.terms.push_back({eta / 2.0, DensityMatrix::from_matrix(e2),
                       DensityMatrix::from_matrix(((twist_minus + twist_minus.adjoint()) / 2.0).eval())});
  return out;
}

DensityExperimentStats density_experiment(BipartiteDims dims, int num_trials,
                                          double epsilon, std::uint64_t seed) {
  if (dims.n != 2 || dims.m < 2)
    throw std::invalid_argument("density_experiment: dims must be 2 x m with m >= 2");
  if (num_trials < 0)
    throw std::invalid_argument("density_experiment: num_trials must be >= 0");
  if (!(epsilon > 0)) throw std::invalid_argument("density_experiment: epsilon must be > 0");

  DensityExperimentStats stats;
  stats.trials = num_trials;
  for (int t = 0; t < num_trials; ++t) {
    std::uint64_t gen_seed = splitmix64(seed + 2ull * static_cast<std::uint64_t>(t));
    std::uint64_t pick_seed = splitmix64(seed + 2ull * static_cast<std::uint64_t>(t) + 1ull);

    SeparableDecomposition dec = [&] {
      switch (t % 3) {
        case 0: return random_separable(dims, 1 + (t / 3) % 4, gen_seed);
        case 1: return random_second_abelian(dims, gen_seed, false);
        default: return random_second_abelian(dims, gen_seed, true);
      }
    }();

    Matrix rho = dec.assemble();
    SeparableDecomposition stage1 = perturb_nondegenerate(dec, epsilon / 2.0, pick_seed);
    SeparableDecomposition stage2 = perturb_nonfactorizable(stage1, epsilon / 2.0);
    Matrix rhat = stage2.assemble();

    double residual = factorization_criterion(rhat, dims);
    double distance = norms(rhat - rho).op;
    if (residual > 1e-8 && distance < epsilon) ++stats.successes;
    stats.min_residual = std::min(stats.min_residual, residual);
    stats.max_distance = std::max(stats.max_distance, distance);
  }
  stats.fraction = num_trials > 0 ? double(stats.successes) / double(num_trials) : 1.0;
  return stats;
}

std::vector<Complex> correlation_series_terms(const SpinFlipModel& model,
                                              const ObservablePair& pair, int order) {
  if (order < 0 || order > 8)
    throw std::invalid_argument("correlation_series_terms: order must lie in [0, 8]");
  const int n = model.dims.n, m = model.dims.m;
  if (pair.F.rows() != n || pair.F.cols() != n || pair.G.rows() != m || pair.G.cols() != m)
    throw std::invalid_argument("correlation_series_terms: observable dimension mismatch");

  Matrix f = tensor(pair.F, Matrix::Identity(m, m));
  Matrix g = tensor(Matrix::Identity(n, n), pair.G);
  Complex omega_g = (model.rho * g).trace();

  std::vector<Complex> terms;
  terms.reserve(static_cast<std::size_t>(order) + 1);
  Matrix Xk = f;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) Xk = (cond_expectation(model, Xk) - Xk).eval();
    terms.push_back((model.rho * g * Xk).trace() - omega_g * (model.rho * Xk).trace());
  }
  return terms;
}

CorrelationReport correlation_report(const SeparableDecomposition& decomp,
                                     const ObservablePair& pair) {
  SpinFlipModel model = build_model(DensityMatrix::from_matrix(decomp.assemble()), decomp.dims);
  CorrelationReport report;
  report.correlation_value = correlation(model, pair);
  report.factorized_value = blockflip::factorized_value(decomp, pair);
  report.residual = factorization_criterion(model);

  report.reduced_nondegenerate = true;
  for (int i = 1; i < model.dims.m; ++i)
    if (model.reduced_eig.eigenvalues(i) - model.reduced_eig.eigenvalues(i - 1) <=
        kDegeneracyTol)
      report.reduced_nondegenerate = false;

  std::vector<DensityMatrix> family;
  std::vector<double> weights;
  for (const auto& term : decomp.terms) {
    family.push_back(term.factor_II);
    weights.push_back(term.weight);
  }
  QuasiAbelianDiagnosis diag = quasi_abelian_diagnose(family, weights);
  if (diag.is_quasi_abelian) report.k_quasi_abelian_II = diag.K;
  return report;
}

}  // namespace blockflip
