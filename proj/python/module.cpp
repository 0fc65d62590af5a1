// Python surface: thin bindings over the C++ core, matrices exchanged as
// numpy complex arrays.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blockflip/correlations.hpp"
#include "blockflip/dynamics.hpp"
#include "blockflip/linalg.hpp"
#include "blockflip/states.hpp"

namespace py = pybind11;
using namespace blockflip;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum block spin-flip dynamics on bipartite systems";

  py::class_<BipartiteDims>(m, "BipartiteDims")
      .def(py::init([](int n, int mm) { return BipartiteDims{n, mm}; }),
           py::arg("n"), py::arg("m"))
      .def_readonly("n", &BipartiteDims::n)
      .def_readonly("m", &BipartiteDims::m)
      .def("composite", &BipartiteDims::composite)
      .def("__repr__", [](const BipartiteDims& d) {
        return "BipartiteDims(" + std::to_string(d.n) + ", " + std::to_string(d.m) + ")";
      });

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def_static("from_matrix", &DensityMatrix::from_matrix, py::arg("rho"))
      .def_static("from_matrix_lenient", &DensityMatrix::from_matrix_lenient,
                  py::arg("rho"))
      .def_property_readonly("matrix",
                             [](const DensityMatrix& d) { return d.matrix(); })
      .def("dim", &DensityMatrix::dim);

  py::class_<SpinFlipModel>(m, "SpinFlipModel")
      .def_readonly("dims", &SpinFlipModel::dims)
      .def_readonly("rho", &SpinFlipModel::rho)
      .def_readonly("rho_sqrt", &SpinFlipModel::rho_sqrt)
      .def_readonly("reduced", &SpinFlipModel::reduced)
      .def_readonly("gamma", &SpinFlipModel::gamma);

  // State-taking entry points also accept plain matrices; the strict
  // density-matrix gates still run on the converted value.
  m.def("build_model", &build_model, py::arg("rho"), py::arg("dims"),
        py::arg("max_dim") = kMaxCompositeDim);
  m.def(
      "build_model",
      [](const Matrix& rho, const BipartiteDims& dims, int max_dim) {
        return build_model(DensityMatrix::from_matrix(rho), dims, max_dim);
      },
      py::arg("rho"), py::arg("dims"), py::arg("max_dim") = kMaxCompositeDim);
  m.def("cond_expectation", &cond_expectation, py::arg("model"), py::arg("a"));
  m.def("generator", &generator, py::arg("model"), py::arg("a"));
  m.def("heisenberg_semigroup", &heisenberg_semigroup, py::arg("model"),
        py::arg("a"), py::arg("t"));
  m.def("dual_map", &dual_map, py::arg("model"), py::arg("sigma"));
  m.def(
      "dual_map",
      [](const SpinFlipModel& model, const Matrix& sigma) {
        return dual_map(model, DensityMatrix::from_matrix(sigma));
      },
      py::arg("model"), py::arg("sigma"));
  m.def("schrodinger_semigroup", &schrodinger_semigroup, py::arg("model"),
        py::arg("sigma"), py::arg("t"));
  m.def(
      "schrodinger_semigroup",
      [](const SpinFlipModel& model, const Matrix& sigma, double t) {
        return schrodinger_semigroup(model, DensityMatrix::from_matrix(sigma), t);
      },
      py::arg("model"), py::arg("sigma"), py::arg("t"));
  m.def("liouville_inner", &liouville_inner, py::arg("model"), py::arg("a"),
        py::arg("b"));

  py::class_<BellDiagonalParams>(m, "BellDiagonalParams")
      .def(py::init<std::array<double, 4>>(), py::arg("lambdas"))
      .def_readonly("lambdas", &BellDiagonalParams::lambdas);

  m.def("bell_reference", &bell_reference, py::arg("params"));

  py::class_<PptReport>(m, "PptReport")
      .def_readonly("is_ppt", &PptReport::is_ppt)
      .def_readonly("min_pt_eigenvalue", &PptReport::min_pt_eigenvalue)
      .def_readonly("negativity", &PptReport::negativity);

  m.def("ppt_check", &ppt_check, py::arg("rho"), py::arg("dims"));
  m.def(
      "ppt_check",
      [](const Matrix& rho, const BipartiteDims& dims) {
        return ppt_check(DensityMatrix::from_matrix(rho), dims);
      },
      py::arg("rho"), py::arg("dims"));

  py::class_<SeparableTerm>(m, "SeparableTerm")
      .def_readonly("weight", &SeparableTerm::weight)
      .def_readonly("factor_I", &SeparableTerm::factor_I)
      .def_readonly("factor_II", &SeparableTerm::factor_II);

  py::class_<SeparableDecomposition>(m, "SeparableDecomposition")
      .def(py::init([](BipartiteDims dims,
                       const std::vector<std::tuple<double, Matrix, Matrix>>& terms) {
             SeparableDecomposition d;
             d.dims = dims;
             for (const auto& [w, a, b] : terms)
               d.terms.push_back({w, DensityMatrix::from_matrix_lenient(a),
                                  DensityMatrix::from_matrix_lenient(b)});
             d.validate();
             return d;
           }),
           py::arg("dims"), py::arg("terms"))
      .def_readonly("dims", &SeparableDecomposition::dims)
      .def_readonly("terms", &SeparableDecomposition::terms)
      .def("assemble", &SeparableDecomposition::assemble)
      .def("validate", &SeparableDecomposition::validate);

  py::class_<ClosedFormDual>(m, "ClosedFormDual")
      .def_readonly("lambdas_tilde", &ClosedFormDual::lambdas_tilde)
      .def_readonly("eta_plus", &ClosedFormDual::eta_plus)
      .def_readonly("eta_minus", &ClosedFormDual::eta_minus)
      .def_readonly("kappa_plus", &ClosedFormDual::kappa_plus)
      .def_readonly("kappa_minus", &ClosedFormDual::kappa_minus)
      .def_readonly("chi", &ClosedFormDual::chi)
      .def_readonly("normalized", &ClosedFormDual::normalized)
      .def("y", &ClosedFormDual::y, py::arg("i"))
      .def("reconstruct", &ClosedFormDual::reconstruct);

  m.def("closed_form_dual", &closed_form_dual, py::arg("params"), py::arg("a"),
        py::arg("unnormalized") = false);
  m.def("separation_bound", &separation_bound, py::arg("cfd"));

  py::class_<OnsetRow>(m, "OnsetRow")
      .def_readonly("t", &OnsetRow::t)
      .def_readonly("mix_negativity", &OnsetRow::mix_negativity)
      .def_readonly("mix_is_ppt", &OnsetRow::mix_is_ppt)
      .def_readonly("exact_negativity", &OnsetRow::exact_negativity)
      .def_readonly("exact_is_ppt", &OnsetRow::exact_is_ppt);

  m.def("entanglement_onset", &entanglement_onset, py::arg("params"), py::arg("a"),
        py::arg("sigma_I"), py::arg("t_grid"));
  m.def(
      "entanglement_onset",
      [](const BellDiagonalParams& params, double a, const Matrix& sigma_I,
         const std::vector<double>& t_grid) {
        return entanglement_onset(params, a, DensityMatrix::from_matrix(sigma_I),
                                  t_grid);
      },
      py::arg("params"), py::arg("a"), py::arg("sigma_I"), py::arg("t_grid"));
  m.def("random_separable", &random_separable, py::arg("dims"),
        py::arg("num_terms"), py::arg("seed"));
  m.def("decomposition_equivalence", &decomposition_equivalence, py::arg("d1"),
        py::arg("d2"));

  py::enum_<Side>(m, "Side").value("I", Side::I).value("II", Side::II);

  m.def(
      "correlation",
      [](const SpinFlipModel& model, const Matrix& f, const Matrix& g) {
        return correlation(model, {f, g});
      },
      py::arg("model"), py::arg("F"), py::arg("G"));
  m.def(
      "factorized_value",
      [](const SeparableDecomposition& d, const Matrix& f, const Matrix& g) {
        return factorized_value(d, {f, g});
      },
      py::arg("decomposition"), py::arg("F"), py::arg("G"));
  m.def(
      "factorization_criterion",
      [](const Matrix& rho, BipartiteDims dims) {
        return factorization_criterion(rho, dims);
      },
      py::arg("rho"), py::arg("dims"));

  py::class_<QuasiAbelianDiagnosis>(m, "QuasiAbelianDiagnosis")
      .def_readonly("is_quasi_abelian", &QuasiAbelianDiagnosis::is_quasi_abelian)
      .def_readonly("K", &QuasiAbelianDiagnosis::K)
      .def_readonly("partition", &QuasiAbelianDiagnosis::partition);

  m.def("quasi_abelian_diagnose", &quasi_abelian_diagnose, py::arg("family"),
        py::arg("weights"));
  m.def("abelian_decomposition_from_zeros", &abelian_decomposition_from_zeros,
        py::arg("rho"), py::arg("dims"), py::arg("side"), py::arg("basis"),
        py::arg("tol") = kDegeneracyTol);
  m.def("sqrt_separable", &sqrt_separable, py::arg("decomposition"));
  m.def("perturb_nondegenerate", &perturb_nondegenerate, py::arg("decomposition"),
        py::arg("epsilon"), py::arg("seed"));
  m.def("perturb_nonfactorizable", &perturb_nonfactorizable,
        py::arg("decomposition"), py::arg("epsilon"));

  py::class_<DensityExperimentStats>(m, "DensityExperimentStats")
      .def_readonly("trials", &DensityExperimentStats::trials)
      .def_readonly("successes", &DensityExperimentStats::successes)
      .def_readonly("fraction", &DensityExperimentStats::fraction)
      .def_readonly("min_residual", &DensityExperimentStats::min_residual)
      .def_readonly("max_distance", &DensityExperimentStats::max_distance);

  m.def("density_experiment", &density_experiment, py::arg("dims"),
        py::arg("num_trials"), py::arg("epsilon"), py::arg("seed"));
  m.def(
      "correlation_series_terms",
      [](const SpinFlipModel& model, const Matrix& f, const Matrix& g, int order) {
        return correlation_series_terms(model, {f, g}, order);
      },
      py::arg("model"), py::arg("F"), py::arg("G"), py::arg("order"));

  py::class_<CorrelationReport>(m, "CorrelationReport")
      .def_readonly("correlation_value", &CorrelationReport::correlation_value)
      .def_readonly("factorized_value", &CorrelationReport::factorized_value)
      .def_readonly("residual", &CorrelationReport::residual)
      .def_readonly("k_quasi_abelian_II", &CorrelationReport::k_quasi_abelian_II)
      .def_readonly("reduced_nondegenerate", &CorrelationReport::reduced_nondegenerate);

  m.def(
      "correlation_report",
      [](const SeparableDecomposition& d, const Matrix& f, const Matrix& g) {
        return correlation_report(d, {f, g});
      },
      py::arg("decomposition"), py::arg("F"), py::arg("G"));
}
