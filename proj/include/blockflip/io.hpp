#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "blockflip/dynamics.hpp"
#include "blockflip/linalg.hpp"
#include "blockflip/states.hpp"

namespace blockflip {

// JSON state container: {"dims": {"n": .., "m": ..}, "matrix": [[re, im], ...]}
// with row-major entries, or "terms": [{"weight": w, "rho_I": [...], "rho_II":
// [...]}, ...]. Exactly one of matrix/decomposition is set after parsing.
// File-level gates are looser (1e-8) than the in-memory invariants; parsed
// states are projected back onto the exact constraint set.
struct StateFile {
  BipartiteDims dims{0, 0};
  std::optional<DensityMatrix> matrix;
  std::optional<SeparableDecomposition> decomposition;

  DensityMatrix state() const;  // matrix, or the assembled decomposition
};

StateFile parse_state_json(const std::string& text);
StateFile read_state_file(const std::string& path);

std::string state_to_json(const StateFile& sf);
void write_state_file(const std::string& path, const StateFile& sf);

// FNV-1a 64-bit digest of raw bytes, hex-encoded; identifies inputs in reports.
std::string digest_bytes(const std::string& bytes);

// Ordered key/value results plus run metadata, printed as '#'-prefixed lines.
struct RunReport {
  std::string command;
  std::string input_digest;
  std::vector<std::pair<std::string, std::string>> entries;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void print(std::ostream& os) const;
};

// 17-significant-digit decimal rendering used across reports and CSV cells.
std::string format_double(double value);

}  // namespace blockflip
