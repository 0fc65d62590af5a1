#include "blockflip/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace blockflip {

namespace {

using nlohmann::json;

Matrix entries_to_matrix(const json& arr, int rows, int cols, const char* field) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument(std::string("StateFile: ") + field + " must hold " +
                                std::to_string(rows * cols) + " [re, im] pairs");
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const json& cell = arr[static_cast<std::size_t>(r) * cols + c];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number())
        throw std::invalid_argument(std::string("StateFile: ") + field +
                                    " entries must be [re, im] number pairs");
      double re = cell[0].get<double>(), im = cell[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im))
        throw std::invalid_argument(std::string("StateFile: ") + field +
                                    " entries must be finite");
      out(r, c) = Complex(re, im);
    }
  return out;
}

json matrix_to_entries(const Matrix& M) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      arr.push_back(json::array({M(r, c).real(), M(r, c).imag()}));
  return arr;
}

}  // namespace

DensityMatrix StateFile::state() const {
  if (matrix) return *matrix;
  if (decomposition) return DensityMatrix::from_matrix(decomposition->assemble());
  throw std::invalid_argument("StateFile: empty");
}

StateFile parse_state_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("StateFile: JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("StateFile: top level must be an object");
  if (!doc.contains("dims") || !doc["dims"].is_object() ||
      !doc["dims"].contains("n") || !doc["dims"].contains("m"))
    throw std::invalid_argument("StateFile: missing dims {n, m}");

  StateFile sf;
  sf.dims.n = doc["dims"]["n"].get<int>();
  sf.dims.m = doc["dims"]["m"].get<int>();
  if (sf.dims.n < 1 || sf.dims.m < 1)
    throw std::invalid_argument("StateFile: dims must be positive");
  if (sf.dims.composite() > kMaxCompositeDim)
    throw std::invalid_argument("StateFile: composite dimension exceeds cap");

  const bool has_matrix = doc.contains("matrix");
  const bool has_terms = doc.contains("terms");
  if (has_matrix == has_terms)
    throw std::invalid_argument("StateFile: provide exactly one of matrix or terms");

  const int d = sf.dims.composite();
  if (has_matrix) {
    Matrix M = entries_to_matrix(doc["matrix"], d, d, "matrix");
    sf.matrix = DensityMatrix::from_matrix_lenient(M);
    return sf;
  }

  if (!doc["terms"].is_array() || doc["terms"].empty())
    throw std::invalid_argument("StateFile: terms must be a non-empty array");
  SeparableDecomposition dec;
  dec.dims = sf.dims;
  double wsum = 0;
  for (const json& t : doc["terms"]) {
    if (!t.is_object() || !t.contains("weight") || !t.contains("rho_I") || !t.contains("rho_II"))
      throw std::invalid_argument("StateFile: each term needs weight, rho_I, rho_II");
    double w = t["weight"].get<double>();
    if (!(w > 0) || !std::isfinite(w))
      throw std::invalid_argument("StateFile: term weights must be positive");
    wsum += w;
    dec.terms.push_back(
        {w, DensityMatrix::from_matrix_lenient(entries_to_matrix(t["rho_I"], sf.dims.n,
                                                                 sf.dims.n, "rho_I")),
         DensityMatrix::from_matrix_lenient(entries_to_matrix(t["rho_II"], sf.dims.m,
                                                              sf.dims.m, "rho_II"))});
  }
  if (std::abs(wsum - 1.0) > 1e-8)
    throw std::invalid_argument("StateFile: term weights must sum to 1");
  for (auto& term : dec.terms) term.weight /= wsum;
  dec.validate();
  sf.decomposition = std::move(dec);
  return sf;
}

StateFile read_state_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("StateFile: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_state_json(buf.str());
}

std::string state_to_json(const StateFile& sf) {
  json doc;
  doc["dims"] = {{"n", sf.dims.n}, {"m", sf.dims.m}};
  if (sf.matrix) {
    doc["matrix"] = matrix_to_entries(sf.matrix->matrix());
  } else if (sf.decomposition) {
    json terms = json::array();
    for (const auto& term : sf.decomposition->terms)
      terms.push_back({{"weight", term.weight},
                       {"rho_I", matrix_to_entries(term.factor_I.matrix())},
                       {"rho_II", matrix_to_entries(term.factor_II.matrix())}});
    doc["terms"] = std::move(terms);
  } else {
    throw std::invalid_argument("StateFile: empty");
  }
  return doc.dump(2) + "\n";
}

void write_state_file(const std::string& path, const StateFile& sf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("StateFile: cannot write " + path);
  out << state_to_json(sf);
}

std::string digest_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << "fnv1a:" << std::hex << h;
  return os.str();
}

void RunReport::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void RunReport::add(const std::string& key, double value) {
  entries.emplace_back(key, format_double(value));
}

void RunReport::print(std::ostream& os) const {
  os << "# command " << command << "\n";
  if (!input_digest.empty()) os << "# input_digest " << input_digest << "\n";
  if (tolerance) os << "# tol " << format_double(*tolerance) << "\n";
  if (seed) os << "# seed " << *seed << "\n";
  for (const auto& [key, value] : entries) os << "# " << key << " " << value << "\n";
}

std::string format_double(double value) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << value;
  return os.str();
}

}  // namespace blockflip
