#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "blockflip/dynamics.hpp"
#include "blockflip/linalg.hpp"
#include "blockflip/states.hpp"

namespace blockflip {

// Residual threshold below which a state is treated as having a factorizing
// two-point correlation function. The CLI exposes an override (BLOCKFLIP_TOL).
inline constexpr double kFactorizationTol = 1e-9;

// Tolerance for grouping eigenvalues into degeneracy cells.
inline constexpr double kDegeneracyTol = 1e-10;

struct ObservablePair {
  Matrix F;  // observable on the first factor
  Matrix G;  // observable on the second factor
};

// Two-point value <E(F tensor 1) (1 tensor G)>_rho evaluated by the explicit
// spectral sum in the eigenbasis of the reduced state; equals Tr(rho E(f) g).
Complex correlation(const SpinFlipModel& model, const ObservablePair& pair);

// sum_i w_i Tr(rho_i^I F) Tr(rho_i^II G); independent of the choice of decomposition.
Complex factorized_value(const SeparableDecomposition& decomp, const ObservablePair& pair);

// Max-norm residual of the entrywise factorization identity in the reduced
// eigenbasis; residual <= kFactorizationTol iff the correlation function
// factorizes for every observable pair. Requires an invertible reduced state.
double factorization_criterion(const SpinFlipModel& model);
double factorization_criterion(const Matrix& rho, BipartiteDims dims);

struct QuasiAbelianDiagnosis {
  bool is_quasi_abelian = false;
  int K = 0;                             // number of degeneracy cells of the average state
  std::vector<std::vector<int>> partition;  // eigenvalue index cells, ascending order
};

// Checks that every family member commutes with the spectral projectors of the
// weighted average; fields are filled even when the check fails.
QuasiAbelianDiagnosis quasi_abelian_diagnose(const std::vector<DensityMatrix>& family,
                                             const std::vector<double>& weights);

enum class Side { I, II };

// Reads off the canonical decomposition of a state whose matrix, expressed in
// the given basis on the chosen side, has no off-diagonal blocks there. Column
// s of basis becomes the rank-one factor of term s.
SeparableDecomposition abelian_decomposition_from_zeros(const DensityMatrix& rho,
                                                        BipartiteDims dims, Side side,
                                                        const Matrix& basis,
                                                        double tol = kDegeneracyTol);

// For a decomposition with a pairwise-commuting factor family on one side:
// a manifestly separable PSD square root assembled blockwise. Squares back to
// the assembled state.
Matrix sqrt_separable(const SeparableDecomposition& decomp);

// Appends small maximally-mixed-tensor-projector terms until the reduced state
// has a nondegenerate spectrum; operator distance stays below epsilon.
SeparableDecomposition perturb_nondegenerate(const SeparableDecomposition& decomp,
                                             double epsilon, std::uint64_t seed);

// For a factorizing input with nondegenerate reduced spectrum: appends the
// two-term twist that breaks factorization while moving the state by less than
// epsilon in operator norm. Non-factorizing inputs are returned unchanged.
SeparableDecomposition perturb_nonfactorizable(const SeparableDecomposition& decomp,
                                               double epsilon);

struct DensityExperimentStats {
  int trials = 0;
  int successes = 0;
  double fraction = 1.0;
  double min_residual = std::numeric_limits<double>::infinity();
  double max_distance = 0.0;
};

// Monte-Carlo check that every separable state admits an arbitrarily close
// non-factorizing separable neighbor: random inputs, both perturbations with a
// split epsilon budget, success = (residual > 1e-8 and distance < epsilon).
DensityExperimentStats density_experiment(BipartiteDims dims, int num_trials,
                                          double epsilon, std::uint64_t seed);

// Taylor terms of t -> <g T_t(f)> - <g><T_t(f)>: element 0 is the static
// truncated correlation, element k the k-th generator moment. order <= 8.
std::vector<Complex> correlation_series_terms(const SpinFlipModel& model,
                                              const ObservablePair& pair, int order);

struct CorrelationReport {
  Complex correlation_value;
  Complex factorized_value;
  double residual = 0.0;
  std::optional<int> k_quasi_abelian_II;
  bool reduced_nondegenerate = false;
};

CorrelationReport correlation_report(const SeparableDecomposition& decomp,
                                     const ObservablePair& pair);

}  // namespace blockflip
