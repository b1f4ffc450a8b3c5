#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scamscript {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// A sequence of observed symbols (top-topic ids), one per scammer utterance.
using SymbolSequence = std::vector<int>;
/// A sequence of hidden-state ids aligned with a SymbolSequence.
using StateSequence = std::vector<int>;

/// Broad failure categories. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  Parse,        // malformed input text
  Validation,   // well-formed input violating an invariant
  MissingInput, // required data absent (file, emotions, assignments)
  Config,       // bad or conflicting configuration
  Domain,       // request infeasible for the data (folds, sizes, ranges)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

/// Mixes a base seed with a stream index into an independent 64-bit seed
/// (splitmix64 finalizer). Used for per-restart, per-fold and
/// per-transcript random streams so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// FNV-1a over raw bytes; stable across platforms, used for manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

/// Index of the maximum entry, lowest index on ties.
template <typename Derived>
Eigen::Index argmax_lowest(const Eigen::DenseBase<Derived>& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

/// Row-stochastic check: nonnegative entries, each row summing to 1 ± tol.
template <typename Derived>
bool is_row_stochastic(const Eigen::MatrixBase<Derived>& m, double tol) {
  if ((m.array() < 0).any()) return false;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (std::abs(static_cast<double>(m.row(r).sum()) - 1.0) > tol) return false;
  }
  return true;
}

}  // namespace scamscript
