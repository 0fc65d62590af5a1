#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "blockflip/dynamics.hpp"
#include "blockflip/linalg.hpp"

namespace blockflip {

// Four positive weights on the reference basis
//   x1 = (e1 tensor e1 + e2 tensor e2)/sqrt(2),  x2 = e1 tensor e2,
//   x3 = e2 tensor e1,                           x4 = (e1 tensor e1 - e2 tensor e2)/sqrt(2).
struct BellDiagonalParams {
  std::array<double, 4> lambdas;

  explicit BellDiagonalParams(std::array<double, 4> l);
};

DensityMatrix bell_reference(const BellDiagonalParams& params);

struct PptReport {
  bool is_ppt;
  double min_pt_eigenvalue;
  double negativity;
};

// Partial-transpose test; negativity = (trace norm of the partial transpose - 1)/2.
PptReport ppt_check(const DensityMatrix& rho, BipartiteDims dims);

struct SeparableTerm {
  double weight;
  DensityMatrix factor_I;
  DensityMatrix factor_II;
};

struct SeparableDecomposition {
  BipartiteDims dims;
  std::vector<SeparableTerm> terms;

  Matrix assemble() const;
  // Throws std::invalid_argument when weights or factor dimensions are inconsistent.
  void validate() const;
};

// Spectral data of the dual map's action on product states sigma_I tensor diag(a, 1-a)
// over the reference family with lambda2 = lambda3. The result does not depend on sigma_I.
struct ClosedFormDual {
  std::array<double, 4> lambdas_tilde;
  double eta_plus = 0, eta_minus = 0;
  double kappa_plus = 0, kappa_minus = 0;
  double chi = 0;
  double A = 0, B = 0, C = 0, X = 0;
  bool normalized = true;

  Vector y(int i) const;       // eigenvectors y_0..y_3, orthonormal
  Matrix reconstruct() const;  // sum_i lambda_tilde_i |y_i><y_i|
};

// Set unnormalized to reproduce the coefficient variant without the 1/4 factor on
// (A, B, C); its lambda_tilde sum overshoots 1 by exactly 3*(lambda1+lambda4) and is
// kept only as a regression reference.
ClosedFormDual closed_form_dual(const BellDiagonalParams& params, double a,
                                bool unnormalized = false);

// lambda_tilde_1 * eta_plus * kappa_plus + lambda_tilde_4 * eta_minus * kappa_minus;
// positive lower-bound witness for the distance from the separable set.
double separation_bound(const ClosedFormDual& cfd);

struct OnsetRow {
  double t;
  double mix_negativity;
  bool mix_is_ppt;
  double exact_negativity;
  bool exact_is_ppt;
};

// For sigma = sigma_I tensor diag(a, 1-a): entanglement data of the linear
// interpolation (1-t) sigma + t E^d(sigma) and of the exact evolution at each grid t.
std::vector<OnsetRow> entanglement_onset(const BellDiagonalParams& params, double a,
                                         const DensityMatrix& sigma_I,
                                         const std::vector<double>& t_grid);

// Deterministic in seed: flat simplex weights, factors as normalized complex
// Gaussian Gram matrices (full rank almost surely).
SeparableDecomposition random_separable(BipartiteDims dims, int num_terms,
                                        std::uint64_t seed);

// True iff the assembled states agree in trace norm within 1e-10.
bool decomposition_equivalence(const SeparableDecomposition& d1,
                               const SeparableDecomposition& d2);

}  // namespace blockflip
