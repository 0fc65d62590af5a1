// Acceptance gate: one numbered criterion per invocation, one verdict line on
// stdout, exit count = number of failed checks. Criterion list:
//   1 Markov/duality suite        5 structure theorems
//   2 closed-form spectral data   6 separable square root
//   3 entanglement production     7 density of non-factorizing neighbors
//   4 criterion/probe equivalence 8 series vs semigroup
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <vector>

#include "blockflip/correlations.hpp"
#include "blockflip/dynamics.hpp"
#include "blockflip/io.hpp"
#include "blockflip/linalg.hpp"
#include "blockflip/states.hpp"

using namespace blockflip;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = Complex(dist(gen), dist(gen));
  return out;
}

Matrix random_hermitian(int dim, std::mt19937_64& gen) {
  Matrix a = random_matrix(dim, dim, gen);
  return (a + a.adjoint()).eval() / 2.0;
}

Matrix random_density_matrix(int dim, std::mt19937_64& gen) {
  Matrix a = random_matrix(dim, dim, gen);
  Matrix p = a * a.adjoint();
  return p / p.trace();
}

DensityMatrix random_faithful(int dim, std::mt19937_64& gen) {
  Matrix a = random_matrix(dim, dim, gen);
  Matrix p = a * a.adjoint() + 0.05 * Matrix::Identity(dim, dim);
  return DensityMatrix::from_matrix(p / p.trace());
}

Matrix random_unitary(int dim, std::mt19937_64& gen) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(dim, dim, gen));
  return Matrix(qr.householderQ());
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

int verdict(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s (%s)\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  return pass ? 0 : 1;
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------- criterion 1

int criterion_markov_duality() {
  const BipartiteDims dims_list[3] = {{2, 2}, {2, 3}, {3, 3}};
  double worst_unital = 0, worst_trace = 0, worst_dual = 0, worst_selfadj = 0,
         worst_fix = 0;
  std::mt19937_64 gen(515151);

  for (int k = 0; k < 200; ++k) {
    BipartiteDims dims = dims_list[k % 3];
    int d = dims.composite();
    SpinFlipModel model = build_model(random_faithful(d, gen), dims);

    worst_unital = std::max(
        worst_unital,
        max_abs(cond_expectation(model, Matrix::Identity(d, d)) - Matrix::Identity(d, d)));

    Matrix sigma = random_density_matrix(d, gen);
    Matrix raw_dual = model.gamma *
                      embed_second(partial_trace_first(sigma, dims), dims) *
                      model.gamma.adjoint();
    worst_trace = std::max(worst_trace, std::abs(raw_dual.trace() - Complex(1, 0)));

    DensityMatrix sigma_dm = DensityMatrix::from_matrix_lenient(sigma);
    Matrix a = random_matrix(d, d, gen);
    Matrix b = random_matrix(d, d, gen);
    Complex lhs = (dual_map(model, sigma_dm).matrix() * a).trace();
    Complex rhs = (sigma_dm.matrix() * cond_expectation(model, a)).trace();
    worst_dual = std::max(worst_dual, std::abs(lhs - rhs));

    Complex la = liouville_inner(model, generator(model, a), b);
    Complex lb = liouville_inner(model, a, generator(model, b));
    worst_selfadj = std::max(worst_selfadj, std::abs(la - lb));

    DensityMatrix rho_dm = DensityMatrix::from_matrix(model.rho);
    for (double t : {0.1, 1.0, 10.0}) {
      worst_fix = std::max(
          worst_fix, max_abs(schrodinger_semigroup(model, rho_dm, t).matrix() - model.rho));
    }
  }

  bool pass = worst_unital <= 1e-10 && worst_trace <= 1e-11 &&
              worst_dual <= 1e-10 && worst_selfadj <= 1e-10 && worst_fix <= 1e-9;
  return verdict(1, pass,
                 "200 models at (2,2),(2,3),(3,3); unital " + fmt(worst_unital) +
                     ", trace " + fmt(worst_trace) + ", duality " + fmt(worst_dual) +
                     ", self-adjoint " + fmt(worst_selfadj) + ", fixed point " +
                     fmt(worst_fix));
}

// ---------------------------------------------------------------- criterion 2

int criterion_closed_form() {
  std::mt19937_64 gen(626262);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_rec = 0, worst_margin = 0;

  for (int k = 0; k < 100; ++k) {
    double x1 = 0.3 + 0.7 * u(gen);
    double x2 = 0.05 + 0.55 * u(gen);
    double x4 = 0.02 + (0.85 * x1 - 0.02) * u(gen);
    double norm = x1 + 2 * x2 + x4;
    BellDiagonalParams params({x1 / norm, x2 / norm, x2 / norm, x4 / norm});
    double a = 0.05 + 0.9 * u(gen);

    ClosedFormDual cfd = closed_form_dual(params, a);
    SpinFlipModel model = build_model(bell_reference(params), {2, 2});
    Matrix sI = random_density_matrix(2, gen);
    Matrix diag_a = Matrix::Zero(2, 2);
    diag_a(0, 0) = a;
    diag_a(1, 1) = 1.0 - a;
    DensityMatrix sigma = DensityMatrix::from_matrix_lenient(tensor(sI, diag_a));
    worst_rec = std::max(worst_rec,
                         max_abs(cfd.reconstruct() - dual_map(model, sigma).matrix()));

    ClosedFormDual raw = closed_form_dual(params, a, true);
    double sum = raw.lambdas_tilde[0] + raw.lambdas_tilde[1] +
                 raw.lambdas_tilde[2] + raw.lambdas_tilde[3];
    double expected_overshoot = 3.0 * (params.lambdas[0] + params.lambdas[3]);
    worst_margin = std::max(worst_margin, std::abs(sum - 1.0 - expected_overshoot));
  }

  bool pass = worst_rec <= 1e-10 && worst_margin <= 1e-12;
  return verdict(2, pass,
                 "100-point grid; reconstruction error " + fmt(worst_rec) +
                     "; uncorrected-coefficient overshoot matches 3(l1+l4) within " +
                     fmt(worst_margin));
}

// ---------------------------------------------------------------- criterion 3

int criterion_entanglement_production() {
  const double golden = 0.21048349392520038;
  BellDiagonalParams params({0.7, 0.1, 0.1, 0.1});
  DensityMatrix half = DensityMatrix::from_matrix(Matrix::Identity(2, 2) / 2.0);

  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(static_cast<double>(k) / 20.0);
  std::vector<OnsetRow> rows = entanglement_onset(params, 0.9, half, grid);

  double endpoint = rows.back().mix_negativity;
  bool golden_ok = std::abs(endpoint - golden) <= 1e-11 && endpoint > 1e-3;

  int ppt_count = 0;
  double first_entangled = -1.0;
  for (const OnsetRow& row : rows) {
    if (row.mix_negativity > 0.0) {
      if (first_entangled < 0.0) first_entangled = row.t;
    } else {
      ++ppt_count;
    }
  }
  bool all_entangled = ppt_count == 0;

  bool pass = golden_ok && all_entangled;
  std::string detail =
      "negativity of the dual image " + fmt(endpoint) + " vs golden " + fmt(golden);
  if (!all_entangled) {
    detail += "; interpolated mix stays PPT at " + std::to_string(ppt_count) +
              " of 20 grid times, first entangled t = " + fmt(first_entangled) +
              " (claim demands > 0 for all t)";
  }
  return verdict(3, pass, detail);
}

// ---------------------------------------------------------------- criterion 4

int criterion_probe_equivalence() {
  int counterexamples = 0;
  double min_residual_nf = 1e300, max_residual_f = 0;
  double min_gap_nf = 1e300, max_gap_f = 0;

  for (int k = 0; k < 500; ++k) {
    BipartiteDims dims = (k % 2 == 0) ? BipartiteDims{2, 2} : BipartiteDims{2, 3};
    SeparableDecomposition dec = random_separable(dims, 1 + k % 4, 884000 + k);
    Matrix rho = dec.assemble();
    double residual = factorization_criterion(rho, dims);

    SpinFlipModel model = build_model(DensityMatrix::from_matrix_lenient(rho), dims);
    Matrix u = model.reduced_eig.eigenvectors;
    double gap = 0.0;
    for (int r = 0; r < dims.n; ++r)
      for (int c = 0; c < dims.n; ++c)
        for (int i = 0; i < dims.m; ++i)
          for (int j = 0; j < dims.m; ++j) {
            Matrix f = Matrix::Zero(dims.n, dims.n);
            f(r, c) = 1.0;
            Matrix g = u.col(i) * u.col(j).adjoint();
            Complex corr = correlation(model, {f, g});
            Complex fact = factorized_value(dec, {f, g});
            gap = std::max(gap, std::abs(corr - fact));
          }

    bool res_says = residual <= 1e-10;
    bool gap_says = gap <= 1e-9;
    if (res_says != gap_says) ++counterexamples;
    if (res_says) {
      max_residual_f = std::max(max_residual_f, residual);
      max_gap_f = std::max(max_gap_f, gap);
    } else {
      min_residual_nf = std::min(min_residual_nf, residual);
      min_gap_nf = std::min(min_gap_nf, gap);
    }
  }

  bool pass = counterexamples == 0;
  return verdict(4, pass,
                 "500 states; counterexamples " + std::to_string(counterexamples) +
                     "; factorizing side residual <= " + fmt(max_residual_f) +
                     " gap <= " + fmt(max_gap_f) + "; non-factorizing side residual >= " +
                     fmt(min_residual_nf) + " gap >= " + fmt(min_gap_nf));
}

// ---------------------------------------------------------------- criterion 5

// two or three second-factor members sharing the average's block structure:
// blkdiag(c1 I2 + H_i, c2) with weighted H sum zero, plus diagonal first factors
SeparableDecomposition structured_family(int members, std::mt19937_64& gen) {
  const double c1 = 0.3, c2 = 0.4;
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<Matrix> hs;
  Matrix h1 = random_hermitian(2, gen);
  h1 -= h1.trace() / 2.0 * Matrix::Identity(2, 2);
  h1 *= 0.08 / std::max(0.08, norms(h1).op);
  if (members == 2) {
    hs = {h1, Matrix(-h1)};
  } else {
    Matrix h2 = random_hermitian(2, gen);
    h2 -= h2.trace() / 2.0 * Matrix::Identity(2, 2);
    h2 *= 0.08 / std::max(0.08, norms(h2).op);
    hs = {h1, h2, Matrix(-h1 - h2)};
  }

  SeparableDecomposition dec;
  dec.dims = {2, 3};
  double w = 1.0 / members;
  for (const Matrix& h : hs) {
    Matrix tau = Matrix::Zero(3, 3);
    tau.topLeftCorner(2, 2) = c1 * Matrix::Identity(2, 2) + h;
    tau(2, 2) = c2;
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = u(gen);
    d(1, 1) = u(gen);
    d /= d.trace();
    dec.terms.push_back({w, DensityMatrix::from_matrix(d),
                         DensityMatrix::from_matrix_lenient(tau)});
  }
  return dec;
}

int criterion_structure_theorems() {
  std::mt19937_64 gen(737373);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // (a) abelian-I + quasi-abelian-II constructions factorize, and the canonical
  //     first-side decomposition exposes a quasi-abelian second-side family
  int bad_a = 0;
  double worst_a = 0;
  for (int k = 0; k < 100; ++k) {
    SeparableDecomposition dec = structured_family(k < 50 ? 2 : 3, gen);
    Matrix rho = dec.assemble();
    double residual = factorization_criterion(rho, dec.dims);
    worst_a = std::max(worst_a, residual);

    std::vector<DensityMatrix> family;
    std::vector<double> weights;
    for (const auto& term : dec.terms) {
      family.push_back(term.factor_II);
      weights.push_back(term.weight);
    }
    QuasiAbelianDiagnosis given = quasi_abelian_diagnose(family, weights);

    SeparableDecomposition canonical = abelian_decomposition_from_zeros(
        DensityMatrix::from_matrix_lenient(rho), dec.dims, Side::I,
        Matrix::Identity(2, 2));
    std::vector<DensityMatrix> cfamily;
    std::vector<double> cweights;
    for (const auto& term : canonical.terms) {
      cfamily.push_back(term.factor_II);
      cweights.push_back(term.weight);
    }
    QuasiAbelianDiagnosis canon = quasi_abelian_diagnose(cfamily, cweights);

    if (residual > 1e-10 || !given.is_quasi_abelian || !canon.is_quasi_abelian ||
        given.K != 2 || canon.K != 2)
      ++bad_a;
  }

  // (b) abelian-I + non-quasi-abelian-II families must not factorize
  int bad_b = 0;
  double min_b = 1e300;
  for (int k = 0; k < 100; ++k) {
    Matrix t1, t2;
    do {
      t1 = random_density_matrix(2, gen);
      t2 = random_density_matrix(2, gen);
    } while (norms(t1 * t2 - t2 * t1).frobenius < 0.01);
    double p = 0.25 + 0.5 * u(gen);
    Matrix e1 = Matrix::Zero(2, 2), e2 = Matrix::Zero(2, 2);
    e1(0, 0) = 1.0;
    e2(1, 1) = 1.0;
    SeparableDecomposition dec;
    dec.dims = {2, 2};
    dec.terms.push_back({p, DensityMatrix::from_matrix(e1),
                         DensityMatrix::from_matrix_lenient(t1)});
    dec.terms.push_back({1.0 - p, DensityMatrix::from_matrix(e2),
                         DensityMatrix::from_matrix_lenient(t2)});
    double residual = factorization_criterion(dec.assemble(), dec.dims);
    min_b = std::min(min_b, residual);

    QuasiAbelianDiagnosis diag = quasi_abelian_diagnose(
        {dec.terms[0].factor_II, dec.terms[1].factor_II}, {p, 1.0 - p});
    if (residual <= 1e-10 || diag.is_quasi_abelian) ++bad_b;
  }

  // (c) nondegenerate reduced spectrum: factorization iff the second-side
  //     zero-block structure exists in the reduced eigenbasis
  int bad_c = 0;
  for (int k = 0; k < 100; ++k) {
    BipartiteDims dims = (k % 2 == 0) ? BipartiteDims{2, 2} : BipartiteDims{2, 3};
    bool should_factorize = k < 50;

    SeparableDecomposition dec;
    if (should_factorize) {
      dec.dims = dims;
      Matrix q = random_unitary(dims.m, gen);
      std::vector<double> w(dims.m);
      double gap;
      do {
        double sum = 0;
        for (double& x : w) {
          x = 0.2 + 0.8 * u(gen);
          sum += x;
        }
        gap = 1e300;
        for (double& x : w) x /= sum;
        std::vector<double> sorted = w;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 1; i < sorted.size(); ++i)
          gap = std::min(gap, sorted[i] - sorted[i - 1]);
      } while (gap < 1e-3);
      for (int s = 0; s < dims.m; ++s) {
        dec.terms.push_back(
            {w[s],
             DensityMatrix::from_matrix_lenient(random_density_matrix(dims.n, gen)),
             DensityMatrix::from_matrix_lenient(
                 (q.col(s) * q.col(s).adjoint()).eval())});
      }
    } else {
      dec = random_separable(dims, 2 + k % 3, 737000 + k);
    }

    Matrix rho = dec.assemble();
    HermitianEig red = herm_eig(partial_trace_first(rho, dims));
    double min_gap = 1e300;
    for (int i = 1; i < dims.m; ++i)
      min_gap = std::min(min_gap, red.eigenvalues(i) - red.eigenvalues(i - 1));
    if (min_gap < 1e-6) {
      ++bad_c;  // ensemble must deliver nondegenerate instances
      continue;
    }

    double residual = factorization_criterion(rho, dims);
    bool zeros_exist = true;
    try {
      abelian_decomposition_from_zeros(DensityMatrix::from_matrix_lenient(rho),
                                       dims, Side::II, red.eigenvectors,
                                       kFactorizationTol);
    } catch (const std::invalid_argument&) {
      zeros_exist = false;
    }
    if ((residual <= 1e-10) != zeros_exist) ++bad_c;
    if (should_factorize != zeros_exist) ++bad_c;
  }

  bool pass = bad_a == 0 && bad_b == 0 && bad_c == 0;
  return verdict(5, pass,
                 "quasi-abelian constructions: " + std::to_string(bad_a) +
                     " bad, worst residual " + fmt(worst_a) +
                     "; non-quasi-abelian: " + std::to_string(bad_b) +
                     " bad, min residual " + fmt(min_b) +
                     "; zero-block equivalence: " + std::to_string(bad_c) + " bad");
}

// ---------------------------------------------------------------- criterion 6

int criterion_sqrt_separable() {
  std::mt19937_64 gen(848484);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::exponential_distribution<double> ex(1.0);
  double worst_square = 0, worst_vs_direct = 0;
  int bad_ppt = 0;

  for (int k = 0; k < 100; ++k) {
    BipartiteDims dims = (k % 2 == 0) ? BipartiteDims{2, 2} : BipartiteDims{2, 3};
    Matrix q = random_unitary(dims.m, gen);
    int num_terms = dims.m + 1;
    std::vector<double> w(num_terms);
    double sum = 0;
    for (double& x : w) {
      x = ex(gen) + 1e-3;
      sum += x;
    }
    for (double& x : w) x /= sum;

    SeparableDecomposition dec;
    dec.dims = dims;
    for (int s = 0; s < num_terms; ++s) {
      Vector dvals(dims.m);
      double dsum = 0;
      for (int i = 0; i < dims.m; ++i) {
        dvals(i) = u(gen);
        dsum += dvals(i).real();
      }
      Matrix tau = Matrix::Zero(dims.m, dims.m);
      for (int i = 0; i < dims.m; ++i)
        tau += dvals(i).real() / dsum * (q.col(i) * q.col(i).adjoint());
      dec.terms.push_back(
          {w[s], DensityMatrix::from_matrix_lenient(random_density_matrix(dims.n, gen)),
           DensityMatrix::from_matrix_lenient(tau)});
    }

    Matrix rho = dec.assemble();
    Matrix bar = sqrt_separable(dec);
    worst_square = std::max(worst_square, max_abs(bar * bar - rho));
    worst_vs_direct = std::max(worst_vs_direct, max_abs(bar - herm_sqrt(rho)));
    DensityMatrix normalized =
        DensityMatrix::from_matrix_lenient(bar / bar.trace().real());
    if (!ppt_check(normalized, dims).is_ppt) ++bad_ppt;
  }

  bool pass = worst_square <= 1e-9 && worst_vs_direct <= 1e-9 && bad_ppt == 0;
  return verdict(6, pass,
                 "100 instances; square error " + fmt(worst_square) +
                     ", distance to the direct root " + fmt(worst_vs_direct) +
                     ", PPT failures " + std::to_string(bad_ppt));
}

// ---------------------------------------------------------------- criterion 7

int criterion_density() {
  int failures = 0;
  std::string detail;
  for (double eps : {1e-2, 1e-4}) {
    DensityExperimentStats stats = density_experiment({2, 2}, 100, eps, 424242);
    bool ok = stats.fraction == 1.0 && stats.max_distance < eps &&
              stats.min_residual > 1e-8;
    if (!ok) ++failures;
    if (!detail.empty()) detail += "; ";
    detail += "eps " + fmt(eps) + ": fraction " + fmt(stats.fraction) +
              ", min residual " + fmt(stats.min_residual) + ", max distance " +
              fmt(stats.max_distance);
  }
  return verdict(7, failures == 0, "100 trials each; " + detail);
}

// ---------------------------------------------------------------- criterion 8

int criterion_series() {
  std::mt19937_64 gen(959595);
  const BipartiteDims dims_list[3] = {{2, 2}, {2, 3}, {3, 3}};
  double worst = 0, worst_t = 0;

  for (int k = 0; k < 50; ++k) {
    BipartiteDims dims = dims_list[k % 3];
    SpinFlipModel model = build_model(random_faithful(dims.composite(), gen), dims);
    Matrix fr = random_hermitian(dims.n, gen);
    Matrix gr = random_hermitian(dims.m, gen);
    ObservablePair pair{fr / norms(fr).op, gr / norms(gr).op};
    std::vector<Complex> terms = correlation_series_terms(model, pair, 8);

    Matrix f = tensor(pair.F, Matrix::Identity(dims.m, dims.m));
    Matrix g = embed_second(pair.G, dims);
    Complex omega_g = (model.rho * g).trace();

    for (double t : {0.1, 0.25, 0.5, 0.75, 1.0}) {
      Complex partial = 0.0;
      double factorial = 1.0;
      for (int j = 0; j < static_cast<int>(terms.size()); ++j) {
        if (j > 0) factorial *= j;
        partial += std::pow(t, j) / factorial * terms[j];
      }
      Matrix ft = heisenberg_semigroup(model, f, t);
      Complex exact =
          (model.rho * g * ft).trace() - omega_g * (model.rho * ft).trace();
      double err = std::abs(partial - exact);
      if (err > worst) {
        worst = err;
        worst_t = t;
      }
    }
  }

  bool pass = worst <= 1e-8;
  return verdict(8, pass,
                 "50 triples, t in {0.1,0.25,0.5,0.75,1}; worst deviation " +
                     fmt(worst) + " at t = " + fmt(worst_t) +
                     (pass ? "" : "; order-8 truncation cannot reach 1e-8 near t = 1"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..8>\n");
    return 2;
  }
  int criterion = std::atoi(argv[1]);
  try {
    switch (criterion) {
      case 1: return criterion_markov_duality();
      case 2: return criterion_closed_form();
      case 3: return criterion_entanglement_production();
      case 4: return criterion_probe_equivalence();
      case 5: return criterion_structure_theorems();
      case 6: return criterion_sqrt_separable();
      case 7: return criterion_density();
      case 8: return criterion_series();
      default:
        std::fprintf(stderr, "usage: acceptance <criterion 1..8>\n");
        return 2;
    }
  } catch (const std::exception& e) {
    return verdict(criterion, false, std::string("exception: ") + e.what());
  }
}
