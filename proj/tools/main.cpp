#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blockflip/correlations.hpp"
#include "blockflip/dynamics.hpp"
#include "blockflip/io.hpp"
#include "blockflip/linalg.hpp"
#include "blockflip/states.hpp"

namespace bf = blockflip;

namespace {

// argv[0] is dropped so reports do not depend on the binary's path.
std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) out += ' ';
    out += argv[i];
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": cannot parse number '" + tok + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

bf::BipartiteDims parse_dims(const std::string& text) {
  auto x = text.find('x');
  if (x == std::string::npos) x = text.find('X');
  if (x == std::string::npos)
    throw std::invalid_argument("--dims: expected NxM, got '" + text + "'");
  try {
    int n = std::stoi(text.substr(0, x));
    int m = std::stoi(text.substr(x + 1));
    if (n < 1 || m < 1) throw std::invalid_argument("");
    return bf::BipartiteDims{n, m};
  } catch (const std::exception&) {
    throw std::invalid_argument("--dims: expected NxM with positive integers, got '" + text + "'");
  }
}

// Observable spec: I | X | Y | Z | unit:K,L | diag:V1,...,VD | inline JSON
// [[re,im],...] with D*D row-major pairs.
bf::Matrix parse_observable(const std::string& spec, int dim, const char* name) {
  const bf::Complex i1(0, 1);
  if (spec == "I") return bf::Matrix::Identity(dim, dim);
  if (spec == "X" || spec == "Y" || spec == "Z") {
    if (dim != 2)
      throw std::invalid_argument(std::string(name) + ": Pauli names need a 2-level factor");
    bf::Matrix p = bf::Matrix::Zero(2, 2);
    if (spec == "X") p(0, 1) = p(1, 0) = 1;
    if (spec == "Y") { p(0, 1) = -i1; p(1, 0) = i1; }
    if (spec == "Z") { p(0, 0) = 1; p(1, 1) = -1; }
    return p;
  }
  if (spec.rfind("unit:", 0) == 0) {
    auto idx = parse_double_list(spec.substr(5), name);
    if (idx.size() != 2)
      throw std::invalid_argument(std::string(name) + ": unit:K,L needs two indices");
    int k = static_cast<int>(idx[0]), l = static_cast<int>(idx[1]);
    if (k < 0 || l < 0 || k >= dim || l >= dim)
      throw std::invalid_argument(std::string(name) + ": unit index out of range");
    bf::Matrix u = bf::Matrix::Zero(dim, dim);
    u(k, l) = 1;
    return u;
  }
  if (spec.rfind("diag:", 0) == 0) {
    auto vals = parse_double_list(spec.substr(5), name);
    if (static_cast<int>(vals.size()) != dim)
      throw std::invalid_argument(std::string(name) + ": diag needs " + std::to_string(dim) +
                                  " values");
    bf::Matrix d = bf::Matrix::Zero(dim, dim);
    for (int r = 0; r < dim; ++r) d(r, r) = vals[static_cast<std::size_t>(r)];
    return d;
  }
  if (!spec.empty() && spec.front() == '[') {
    nlohmann::json arr;
    try {
      arr = nlohmann::json::parse(spec);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string(name) + ": inline matrix parse error: " + e.what());
    }
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(dim) * dim)
      throw std::invalid_argument(std::string(name) + ": inline matrix needs " +
                                  std::to_string(dim * dim) + " [re, im] pairs");
    bf::Matrix M(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        const auto& cell = arr[static_cast<std::size_t>(r) * dim + c];
        if (!cell.is_array() || cell.size() != 2)
          throw std::invalid_argument(std::string(name) + ": entries must be [re, im] pairs");
        M(r, c) = bf::Complex(cell[0].get<double>(), cell[1].get<double>());
      }
    return M;
  }
  throw std::invalid_argument(std::string(name) +
                              ": expected I, X, Y, Z, unit:K,L, diag:..., or inline [[re,im],...]");
}

std::string load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string spectrum_string(const bf::RealVector& values) {
  std::string out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += bf::format_double(values(i));
  }
  return out;
}

std::vector<double> time_grid(double t_max, int steps) {
  if (steps < 1) throw std::invalid_argument("--steps must be >= 1");
  if (!(t_max > 0)) throw std::invalid_argument("--t-max must be > 0");
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) grid[static_cast<std::size_t>(i)] = t_max * i / steps;
  return grid;
}

// Demo and correlate stream the report plus a CSV table to stdout or --out.
struct OutputTarget {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      if (!file) throw std::invalid_argument("cannot write " + path);
      os = &file;
    }
  }
};

int run_demo(const std::string& command, const std::string& lambdas_str, double a,
             double t_max, int steps, const std::string& out_path) {
  auto lam = parse_double_list(lambdas_str, "--lambdas");
  if (lam.size() != 4) throw std::invalid_argument("--lambdas: need exactly 4 values");
  if (!(t_max <= 1.0))
    throw std::invalid_argument("--t-max: interpolation grid must stay within [0,1]");
  bf::BellDiagonalParams params({lam[0], lam[1], lam[2], lam[3]});

  bf::DensityMatrix sigma_I =
      bf::DensityMatrix::from_matrix(bf::Matrix::Identity(2, 2) / 2.0);
  auto grid = time_grid(t_max, steps);
  auto rows = bf::entanglement_onset(params, a, sigma_I, grid);

  bf::RunReport report;
  report.command = command;
  report.input_digest = bf::digest_bytes(lambdas_str + "|" + bf::format_double(a));
  report.add("lambdas", lambdas_str);
  report.add("a", a);
  report.add("t_max", t_max);
  report.add("steps", std::to_string(steps));

  if (std::abs(lam[1] - lam[2]) <= 1e-12 && lam[0] > lam[3] + 1e-10 && a > 0 && a < 1) {
    bf::SpinFlipModel model =
        bf::build_model(bf::bell_reference(params), bf::BipartiteDims{2, 2});
    bf::Matrix sigma_II = bf::Matrix::Zero(2, 2);
    sigma_II(0, 0) = a;
    sigma_II(1, 1) = 1 - a;
    bf::DensityMatrix sigma = bf::DensityMatrix::from_matrix(
        bf::tensor(sigma_I.matrix(), sigma_II));
    bf::Matrix pushed = bf::dual_map(model, sigma).matrix();
    bf::ClosedFormDual cfd = bf::closed_form_dual(params, a);
    double deviation = (cfd.reconstruct() - pushed).cwiseAbs().maxCoeff();
    report.add("closed_form_max_deviation", deviation);
    report.add("separation_bound", bf::separation_bound(cfd));
  }

  OutputTarget target(out_path);
  report.print(*target.os);
  *target.os << "t,mix_negativity,mix_is_ppt,exact_negativity,exact_is_ppt\n";
  for (const auto& row : rows)
    *target.os << bf::format_double(row.t) << ',' << bf::format_double(row.mix_negativity)
               << ',' << (row.mix_is_ppt ? 1 : 0) << ','
               << bf::format_double(row.exact_negativity) << ','
               << (row.exact_is_ppt ? 1 : 0) << '\n';
  return 0;
}

int run_check(const std::string& command, const std::string& state_path, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("--tol must be > 0");
  std::string text = load_file(state_path);
  bf::StateFile sf = bf::parse_state_json(text);
  bf::DensityMatrix state = sf.state();

  double residual = bf::factorization_criterion(state.matrix(), sf.dims);
  bf::HermitianEig reduced = bf::herm_eig(bf::partial_trace_first(state.matrix(), sf.dims));
  bool nondegenerate = true;
  for (Eigen::Index i = 1; i < reduced.eigenvalues.size(); ++i)
    if (reduced.eigenvalues(i) - reduced.eigenvalues(i - 1) <= bf::kDegeneracyTol)
      nondegenerate = false;

  bf::RunReport report;
  report.command = command;
  report.input_digest = bf::digest_bytes(text);
  report.tolerance = tol;
  report.add("residual", residual);
  report.add("factorizes", residual <= tol ? "true" : "false");
  report.add("reduced_spectrum", spectrum_string(reduced.eigenvalues));
  report.add("reduced_nondegenerate", nondegenerate ? "true" : "false");

  if (sf.decomposition) {
    std::vector<bf::DensityMatrix> fam_I, fam_II;
    std::vector<double> weights;
    for (const auto& term : sf.decomposition->terms) {
      fam_I.push_back(term.factor_I);
      fam_II.push_back(term.factor_II);
      weights.push_back(term.weight);
    }
    bf::QuasiAbelianDiagnosis d1 = bf::quasi_abelian_diagnose(fam_I, weights);
    bf::QuasiAbelianDiagnosis d2 = bf::quasi_abelian_diagnose(fam_II, weights);
    report.add("quasi_abelian_I", d1.is_quasi_abelian ? "true" : "false");
    report.add("quasi_abelian_I_cells", std::to_string(d1.K));
    report.add("quasi_abelian_II", d2.is_quasi_abelian ? "true" : "false");
    report.add("quasi_abelian_II_cells", std::to_string(d2.K));
  }

  report.print(std::cout);
  return residual <= tol ? 0 : 1;
}

int run_perturb(const std::string& command, const std::string& state_path,
                const std::string& mode, double epsilon, std::uint64_t seed,
                const std::string& out_path) {
  std::string text = load_file(state_path);
  bf::StateFile sf = bf::parse_state_json(text);

  bf::SeparableDecomposition dec = [&] {
    if (sf.decomposition) return *sf.decomposition;
    // Matrix input: recover the canonical second-side decomposition; states
    // without that structure cannot be perturbed inside the separable set.
    bf::DensityMatrix state = sf.state();
    bf::HermitianEig reduced =
        bf::herm_eig(bf::partial_trace_first(state.matrix(), sf.dims));
    bf::Matrix U(sf.dims.m, sf.dims.m);
    for (int i = 0; i < sf.dims.m; ++i)
      U.col(i) = reduced.eigenvectors.col(sf.dims.m - 1 - i);
    try {
      return bf::abelian_decomposition_from_zeros(state, sf.dims, bf::Side::II, U,
                                                  bf::kFactorizationTol);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(
          "matrix input admits no canonical decomposition; provide terms");
    }
  }();

  bf::Matrix before = dec.assemble();
  bf::SeparableDecomposition perturbed = [&] {
    if (mode == "nondegenerate") return bf::perturb_nondegenerate(dec, epsilon, seed);
    if (mode == "nonfactorizable") return bf::perturb_nonfactorizable(dec, epsilon);
    throw std::invalid_argument("--mode must be nondegenerate or nonfactorizable");
  }();
  bf::Matrix after = perturbed.assemble();

  bf::MatrixNorms delta = bf::norms(after - before);
  bf::RealVector spec_before =
      bf::herm_eig(bf::partial_trace_first(before, sf.dims)).eigenvalues;
  bf::RealVector spec_after =
      bf::herm_eig(bf::partial_trace_first(after, sf.dims)).eigenvalues;

  bf::RunReport report;
  report.command = command;
  report.input_digest = bf::digest_bytes(text);
  report.seed = seed;
  report.add("mode", mode);
  report.add("epsilon", epsilon);
  report.add("op_distance", delta.op);
  report.add("trace_distance", delta.trace);
  report.add("reduced_spectrum_before", spectrum_string(spec_before));
  report.add("reduced_spectrum_after", spectrum_string(spec_after));
  report.add("residual_after", bf::factorization_criterion(after, sf.dims));

  bf::StateFile out_sf;
  out_sf.dims = sf.dims;
  out_sf.decomposition = perturbed;
  bf::write_state_file(out_path, out_sf);
  report.add("out", out_path);

  report.print(std::cout);
  return 0;
}

int run_correlate(const std::string& command, const std::string& state_path,
                  const std::string& f_spec, const std::string& g_spec, int order,
                  double t_max, int steps, const std::string& out_path) {
  std::string text = load_file(state_path);
  bf::StateFile sf = bf::parse_state_json(text);
  bf::SpinFlipModel model = bf::build_model(sf.state(), sf.dims);

  bf::ObservablePair pair{parse_observable(f_spec, sf.dims.n, "--F"),
                          parse_observable(g_spec, sf.dims.m, "--G")};
  auto terms = bf::correlation_series_terms(model, pair, order);
  auto grid = time_grid(t_max, steps);

  bf::RunReport report;
  report.command = command;
  report.input_digest = bf::digest_bytes(text);
  report.add("order", std::to_string(order));
  report.add("correlation_value", [&] {
    bf::Complex c = bf::correlation(model, pair);
    return bf::format_double(c.real()) + " " + bf::format_double(c.imag());
  }());
  if (sf.decomposition) {
    bf::Complex fv = bf::factorized_value(*sf.decomposition, pair);
    report.add("factorized_value",
               bf::format_double(fv.real()) + " " + bf::format_double(fv.imag()));
  }
  for (std::size_t k = 0; k < terms.size(); ++k)
    report.add("C_" + std::to_string(k), bf::format_double(terms[k].real()) + " " +
                                             bf::format_double(terms[k].imag()));

  bf::Matrix f = bf::tensor(pair.F, bf::Matrix::Identity(sf.dims.m, sf.dims.m));
  bf::Matrix g = bf::tensor(bf::Matrix::Identity(sf.dims.n, sf.dims.n), pair.G);
  bf::Complex omega_g = (model.rho * g).trace();

  OutputTarget target(out_path);
  report.print(*target.os);
  *target.os << "t,series_re,series_im,exact_re,exact_im\n";
  for (double t : grid) {
    bf::Complex series = 0;
    double coeff = 1.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (k > 0) coeff *= t / static_cast<double>(k);
      series += coeff * terms[k];
    }
    bf::Matrix evolved = bf::heisenberg_semigroup(model, f, t);
    bf::Complex exact =
        (model.rho * g * evolved).trace() - omega_g * (model.rho * evolved).trace();
    *target.os << bf::format_double(t) << ',' << bf::format_double(series.real()) << ','
               << bf::format_double(series.imag()) << ',' << bf::format_double(exact.real())
               << ',' << bf::format_double(exact.imag()) << '\n';
  }
  return 0;
}

int run_density(const std::string& command, const std::string& dims_str, int trials,
                double epsilon, std::uint64_t seed) {
  bf::BipartiteDims dims = parse_dims(dims_str);
  auto start = std::chrono::steady_clock::now();
  bf::DensityExperimentStats stats = bf::density_experiment(dims, trials, epsilon, seed);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bf::RunReport report;
  report.command = command;
  report.input_digest = bf::digest_bytes(dims_str + "|" + std::to_string(trials) + "|" +
                                         bf::format_double(epsilon));
  report.seed = seed;
  report.add("dims", dims_str);
  report.add("trials", std::to_string(stats.trials));
  report.add("epsilon", epsilon);
  report.add("successes", std::to_string(stats.successes));
  report.add("fraction", stats.fraction);
  if (stats.trials > 0) {
    report.add("min_residual", stats.min_residual);
    report.add("max_distance", stats.max_distance);
  }
  report.print(std::cout);
  // Wall time goes to stderr so stdout stays byte-identical for a fixed seed.
  std::cerr << "# runtime_seconds " << bf::format_double(elapsed) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blockflip: block spin-flip dynamics on bipartite quantum systems"};
  app.require_subcommand(1);
  std::string command = join_args(argc, argv);

  auto* demo = app.add_subcommand(
      "demo", "Entanglement production along the reference-family dual dynamics (CSV)");
  std::string demo_lambdas = "0.7,0.1,0.1,0.1";
  double demo_a = 0.9, demo_tmax = 1.0;
  int demo_steps = 20;
  std::string demo_out;
  demo->add_option("--lambdas", demo_lambdas, "Four reference weights, comma separated")
      ->capture_default_str();
  demo->add_option("--a", demo_a, "Second-factor weight of the initial product state")
      ->capture_default_str();
  demo->add_option("--t-max", demo_tmax, "Grid endpoint in [0,1]")->capture_default_str();
  demo->add_option("--steps", demo_steps, "Number of grid steps")->capture_default_str();
  demo->add_option("--out", demo_out, "Write report and CSV to this file");

  auto* check = app.add_subcommand(
      "check", "Factorization criterion for a state file (exit 0 yes, 1 no, 2 invalid)");
  std::string check_state, check_tol_unused;
  double check_tol = bf::kFactorizationTol;
  check->add_option("state", check_state, "State JSON file")->required();
  check->add_option("--tol", check_tol, "Residual threshold")
      ->envname("BLOCKFLIP_TOL")
      ->capture_default_str();

  auto* perturb = app.add_subcommand(
      "perturb", "Apply a small separable perturbation and write the result");
  std::string pert_state, pert_mode, pert_out;
  double pert_eps = 0.01;
  std::uint64_t pert_seed = 0;
  perturb->add_option("state", pert_state, "State JSON file")->required();
  perturb->add_option("--mode", pert_mode, "nondegenerate | nonfactorizable")->required();
  perturb->add_option("--epsilon", pert_eps, "Perturbation budget")->required();
  perturb->add_option("--seed", pert_seed, "RNG seed (nondegenerate mode)")
      ->capture_default_str();
  perturb->add_option("--out", pert_out, "Output state JSON file")->required();

  auto* correlate = app.add_subcommand(
      "correlate", "Correlation series terms and exact evolution for two observables (CSV)");
  std::string corr_state, corr_f, corr_g, corr_out;
  int corr_order = 8, corr_steps = 4;
  double corr_tmax = 1.0;
  correlate->add_option("state", corr_state, "State JSON file")->required();
  correlate->add_option("--F", corr_f, "First-factor observable spec")->required();
  correlate->add_option("--G", corr_g, "Second-factor observable spec")->required();
  correlate->add_option("--order", corr_order, "Series truncation order, at most 8")
      ->capture_default_str();
  correlate->add_option("--t-max", corr_tmax, "Grid endpoint")->capture_default_str();
  correlate->add_option("--steps", corr_steps, "Number of grid steps")->capture_default_str();
  correlate->add_option("--out", corr_out, "Write report and CSV to this file");

  auto* density = app.add_subcommand(
      "density", "Monte-Carlo density check: perturb random separable states");
  std::string dens_dims = "2x2";
  int dens_trials = 100;
  double dens_eps = 0.01;
  std::uint64_t dens_seed = 7;
  density->add_option("--dims", dens_dims, "Bipartite dimensions NxM")->capture_default_str();
  density->add_option("--trials", dens_trials, "Number of trials")->capture_default_str();
  density->add_option("--epsilon", dens_eps, "Perturbation budget per trial")
      ->capture_default_str();
  density->add_option("--seed", dens_seed, "Master seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (demo->parsed())
      return run_demo(command, demo_lambdas, demo_a, demo_tmax, demo_steps, demo_out);
    if (check->parsed()) return run_check(command, check_state, check_tol);
    if (perturb->parsed())
      return run_perturb(command, pert_state, pert_mode, pert_eps, pert_seed, pert_out);
    if (correlate->parsed())
      return run_correlate(command, corr_state, corr_f, corr_g, corr_order, corr_tmax,
                           corr_steps, corr_out);
    if (density->parsed())
      return run_density(command, dens_dims, dens_trials, dens_eps, dens_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
