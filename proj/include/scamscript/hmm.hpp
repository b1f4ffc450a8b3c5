#pragma once

// Categorical hidden Markov models over top-topic symbol sequences: scaled
// forward filtering, Viterbi decoding and multi-sequence Baum-Welch with
// seeded random restarts. Algorithms are templated on the scalar type;
// `Hmm` is the double-precision model used throughout the pipeline.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scamscript/common.hpp"
#include "scamscript/parallel.hpp"
#include "scamscript/random.hpp"

namespace scamscript {

struct TrainLog {
  int iterations = 0;
  double log_likelihood = std::numeric_limits<double>::quiet_NaN();
  int restart = -1;
  std::uint64_t seed = 0;
  /// Training log-likelihood before each EM update, then the final value.
  std::vector<double> trace;
};

template <typename Scalar>
struct CategoricalHmm {
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  VectorType start;       // n
  MatrixType transition;  // n x n, rows are distributions
  MatrixType emission;    // n x M, rows are distributions
  TrainLog train_log;

  Eigen::Index n_states() const { return transition.rows(); }
  Eigen::Index n_symbols() const { return emission.cols(); }

  /// Throws Validation unless shapes agree and pi, T and E rows are
  /// distributions to within `tol`.
  void validate(double tol = 1e-9) const {
    const Eigen::Index n = transition.rows();
    if (n < 1 || emission.cols() < 1) throw Error(ErrorKind::Validation, "empty HMM");
    if (start.size() != n || transition.cols() != n || emission.rows() != n) {
      throw Error(ErrorKind::Validation, "HMM parameter shapes disagree");
    }
    if (!is_row_stochastic(start.transpose(), tol)) {
      throw Error(ErrorKind::Validation, "start distribution is not a simplex");
    }
    if (!is_row_stochastic(transition, tol)) {
      throw Error(ErrorKind::Validation, "transition rows are not distributions");
    }
    if (!is_row_stochastic(emission, tol)) {
      throw Error(ErrorKind::Validation, "emission rows are not distributions");
    }
  }
};

using Hmm = CategoricalHmm<double>;

template <typename Scalar>
void check_symbols(const CategoricalHmm<Scalar>& model, std::span<const int> symbols) {
  if (symbols.empty()) throw Error(ErrorKind::Domain, "empty symbol sequence");
  for (int s : symbols) {
    if (s < 0 || s >= model.n_symbols()) {
      throw Error(ErrorKind::Domain, "symbol " + std::to_string(s) + " outside [0, " +
                                         std::to_string(model.n_symbols()) + ")");
    }
  }
}

/// Scaled forward pass. Row t of `filtered` is P(state_t | symbols[0..t]);
/// `scale(t)` is P(symbol_t | symbols[0..t-1]). When an observation is
/// impossible the pass stops, `log_likelihood` is -inf and later rows are
/// left zero.
template <typename Scalar>
struct ForwardPass {
  typename CategoricalHmm<Scalar>::MatrixType filtered;
  typename CategoricalHmm<Scalar>::VectorType scale;
  Scalar log_likelihood = 0;
};

template <typename Scalar>
ForwardPass<Scalar> forward(const CategoricalHmm<Scalar>& model, std::span<const int> symbols) {
  check_symbols(model, symbols);
  const Eigen::Index len = static_cast<Eigen::Index>(symbols.size());
  const Eigen::Index n = model.n_states();
  ForwardPass<Scalar> pass;
  pass.filtered.setZero(len, n);
  pass.scale.setZero(len);
  typename CategoricalHmm<Scalar>::VectorType alpha =
      model.start.cwiseProduct(model.emission.col(symbols[0]));
  for (Eigen::Index t = 0;; ++t) {
    const Scalar c = alpha.sum();
    pass.scale(t) = c;
    if (!(c > 0)) {
      pass.log_likelihood = -std::numeric_limits<Scalar>::infinity();
      return pass;
    }
    alpha /= c;
    pass.filtered.row(t) = alpha.transpose();
    pass.log_likelihood += std::log(c);
    if (t + 1 == len) break;
    alpha = (model.transition.transpose() * alpha).cwiseProduct(model.emission.col(symbols[t + 1]));
  }
  return pass;
}

/// log P(symbols | model); -inf when the sequence is impossible.
template <typename Scalar>
Scalar forward_log_likelihood(const CategoricalHmm<Scalar>& model, std::span<const int> symbols) {
  return forward(model, symbols).log_likelihood;
}

template <typename Scalar>
Scalar total_log_likelihood(const CategoricalHmm<Scalar>& model,
                            const std::vector<SymbolSequence>& sequences) {
  Scalar total = 0;
  for (const auto& s : sequences) {
    if (!s.empty()) total += forward_log_likelihood(model, std::span<const int>(s));
  }
  return total;
}

/// Streaming filter: feed one symbol at a time, read P(state_t | prefix).
template <typename Scalar>
class ForwardFilter {
 public:
  using VectorType = typename CategoricalHmm<Scalar>::VectorType;

  explicit ForwardFilter(const CategoricalHmm<Scalar>& model) : model_(&model) {}

  const VectorType& update(int symbol) {
    const int one[] = {symbol};
    check_symbols(*model_, std::span<const int>(one));
    VectorType next = steps_ == 0 ? VectorType(model_->start)
                                  : VectorType(model_->transition.transpose() * posterior_);
    next = next.cwiseProduct(model_->emission.col(symbol));
    const Scalar c = next.sum();
    if (!(c > 0)) {
      throw Error(ErrorKind::Domain,
                  "symbol " + std::to_string(symbol) + " is impossible under the model");
    }
    posterior_ = next / c;
    log_likelihood_ += std::log(c);
    ++steps_;
    return posterior_;
  }

  const VectorType& posterior() const { return posterior_; }
  std::size_t steps() const { return steps_; }
  Scalar log_likelihood() const { return log_likelihood_; }
  void reset() {
    posterior_ = VectorType();
    steps_ = 0;
    log_likelihood_ = 0;
  }

 private:
  const CategoricalHmm<Scalar>* model_;
  VectorType posterior_;
  std::size_t steps_ = 0;
  Scalar log_likelihood_ = 0;
};

template <typename Scalar>
struct ViterbiPath {
  StateSequence path;
  Scalar log_probability = 0;
};

/// Most probable state path. Among optimal paths the lexicographically
/// smallest is returned: a backward max-product pass scores every suffix,
/// then the path is built front to back taking the lowest state index that
/// attains the optimum at each step (ties within 1e-12 relative).
template <typename Scalar>
ViterbiPath<Scalar> viterbi(const CategoricalHmm<Scalar>& model, std::span<const int> symbols) {
  using MatrixType = typename CategoricalHmm<Scalar>::MatrixType;
  check_symbols(model, symbols);
  const Eigen::Index len = static_cast<Eigen::Index>(symbols.size());
  const Eigen::Index n = model.n_states();
  const MatrixType log_t = model.transition.array().log().matrix();
  const MatrixType log_e = model.emission.array().log().matrix();
  const auto log_pi = model.start.array().log().matrix().eval();

  // suffix(t, i): best log-probability of symbols t+1.. given state i at t.
  MatrixType suffix = MatrixType::Zero(len, n);
  for (Eigen::Index t = len - 2; t >= 0; --t) {
    const auto next = (log_e.col(symbols[t + 1]) + suffix.row(t + 1).transpose()).eval();
    for (Eigen::Index i = 0; i < n; ++i) {
      suffix(t, i) = (log_t.row(i).transpose() + next).maxCoeff();
    }
  }

  auto pick = [](const auto& scores) {
    const Scalar best = scores.maxCoeff();
    const Scalar slack = std::isfinite(best) ? Scalar(1e-12) * std::max(Scalar(1), std::abs(best))
                                             : Scalar(0);
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      if (scores(i) >= best - slack) return std::pair<Eigen::Index, Scalar>{i, best};
    }
    return std::pair<Eigen::Index, Scalar>{0, best};
  };

  ViterbiPath<Scalar> result;
  result.path.resize(static_cast<std::size_t>(len));
  const auto first = (log_pi + log_e.col(symbols[0]) + suffix.row(0).transpose()).eval();
  auto [state, best] = pick(first);
  result.log_probability = best;
  result.path[0] = static_cast<int>(state);
  for (Eigen::Index t = 1; t < len; ++t) {
    const auto scores =
        (log_t.row(state).transpose() + log_e.col(symbols[t]) + suffix.row(t).transpose()).eval();
    state = pick(scores).first;
    result.path[static_cast<std::size_t>(t)] = static_cast<int>(state);
  }
  return result;
}

struct BaumWelchConfig {
  int restarts = 50;
  int max_iter = 200;
  double tol = 1e-4;     // relative log-likelihood improvement
  double floor = 1e-10;  // minimum probability after each M-step
  std::uint64_t seed = 0;
  int workers = 1;
};

namespace detail {

template <typename Matrix>
void normalize_rows_with_floor(Matrix& m, double floor) {
  using Scalar = typename Matrix::Scalar;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Scalar s = m.row(r).sum();
    if (s > 0) {
      m.row(r) /= s;
    } else {
      m.row(r).setConstant(Scalar(1) / static_cast<Scalar>(m.cols()));
    }
    if (m.row(r).minCoeff() < floor) {
      m.row(r) = m.row(r).cwiseMax(static_cast<Scalar>(floor));
      m.row(r) /= m.row(r).sum();
    }
  }
}

/// Expected sufficient statistics of one E-step plus the data log-likelihood.
template <typename Scalar>
struct EStep {
  typename CategoricalHmm<Scalar>::VectorType start;
  typename CategoricalHmm<Scalar>::MatrixType transition;
  typename CategoricalHmm<Scalar>::MatrixType emission;
  Scalar log_likelihood = 0;
};

template <typename Scalar>
EStep<Scalar> expectation(const CategoricalHmm<Scalar>& model,
                          const std::vector<SymbolSequence>& sequences) {
  using VectorType = typename CategoricalHmm<Scalar>::VectorType;
  using MatrixType = typename CategoricalHmm<Scalar>::MatrixType;
  const Eigen::Index n = model.n_states();
  EStep<Scalar> acc;
  acc.start = VectorType::Zero(n);
  acc.emission = MatrixType::Zero(n, model.n_symbols());
  MatrixType outer = MatrixType::Zero(n, n);
  for (const auto& seq : sequences) {
    if (seq.empty()) continue;
    const auto pass = forward(model, std::span<const int>(seq));
    acc.log_likelihood += pass.log_likelihood;
    if (!std::isfinite(pass.log_likelihood)) continue;
    const Eigen::Index len = static_cast<Eigen::Index>(seq.size());
    VectorType beta = VectorType::Ones(n);
    for (Eigen::Index t = len - 1; t >= 0; --t) {
      const VectorType gamma = pass.filtered.row(t).transpose().cwiseProduct(beta);
      acc.emission.col(seq[t]) += gamma;
      if (t == 0) {
        acc.start += gamma;
        break;
      }
      const VectorType weighted = model.emission.col(seq[t]).cwiseProduct(beta) / pass.scale(t);
      outer.noalias() += pass.filtered.row(t - 1).transpose() * weighted.transpose();
      beta = model.transition * weighted;
    }
  }
  acc.transition = model.transition.cwiseProduct(outer);
  return acc;
}

template <typename Scalar>
CategoricalHmm<Scalar> random_model(Eigen::Index n_states, Eigen::Index n_symbols, Rng& rng) {
  CategoricalHmm<Scalar> model;
  model.start = dirichlet_flat<Scalar>(n_states, rng);
  model.transition.resize(n_states, n_states);
  model.emission.resize(n_states, n_symbols);
  for (Eigen::Index i = 0; i < n_states; ++i) {
    model.transition.row(i) = dirichlet_flat<Scalar>(n_states, rng).transpose();
  }
  for (Eigen::Index i = 0; i < n_states; ++i) {
    model.emission.row(i) = dirichlet_flat<Scalar>(n_symbols, rng).transpose();
  }
  return model;
}

}  // namespace detail

/// Runs EM from the model as given until the relative log-likelihood
/// improvement drops below `config.tol` or `config.max_iter` updates.
template <typename Scalar>
CategoricalHmm<Scalar> em_refine(CategoricalHmm<Scalar> model,
                                 const std::vector<SymbolSequence>& sequences,
                                 const BaumWelchConfig& config) {
  TrainLog& log = model.train_log;
  log.trace.clear();
  log.iterations = 0;
  Scalar previous = 0;
  bool converged = false;
  for (int it = 0; it < config.max_iter; ++it) {
    auto stats = detail::expectation(model, sequences);
    log.trace.push_back(static_cast<double>(stats.log_likelihood));
    if (it > 0 && stats.log_likelihood - previous <
                      static_cast<Scalar>(config.tol) * std::abs(previous)) {
      converged = true;
      break;
    }
    previous = stats.log_likelihood;
    typename CategoricalHmm<Scalar>::MatrixType start_row = stats.start.transpose();
    detail::normalize_rows_with_floor(start_row, config.floor);
    model.start = start_row.transpose();
    model.transition = stats.transition;
    detail::normalize_rows_with_floor(model.transition, config.floor);
    model.emission = stats.emission;
    detail::normalize_rows_with_floor(model.emission, config.floor);
    ++log.iterations;
  }
  if (!converged) log.trace.push_back(static_cast<double>(total_log_likelihood(model, sequences)));
  log.log_likelihood = log.trace.back();
  return model;
}

/// One seeded restart: Dirichlet(1) initialization of pi, T and E rows, then EM.
template <typename Scalar>
CategoricalHmm<Scalar> baum_welch_restart(const std::vector<SymbolSequence>& sequences,
                                          Eigen::Index n_states, Eigen::Index n_symbols,
                                          const BaumWelchConfig& config, int restart) {
  Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(restart)));
  auto model = detail::random_model<Scalar>(n_states, n_symbols, rng);
  model = em_refine(std::move(model), sequences, config);
  model.train_log.restart = restart;
  model.train_log.seed = config.seed;
  return model;
}

/// Multi-sequence Baum-Welch with `config.restarts` random starts; returns
/// the restart with the highest final training log-likelihood (lowest
/// restart index on ties). Output is independent of `config.workers`.
template <typename Scalar = double>
CategoricalHmm<Scalar> baum_welch(const std::vector<SymbolSequence>& sequences,
                                  Eigen::Index n_states, Eigen::Index n_symbols,
                                  const BaumWelchConfig& config) {
  if (n_states < 1) throw Error(ErrorKind::Config, "n_states must be >= 1");
  if (n_symbols < 1) throw Error(ErrorKind::Config, "n_symbols must be >= 1");
  if (config.restarts < 1) throw Error(ErrorKind::Config, "restarts must be >= 1");
  if (config.max_iter < 1) throw Error(ErrorKind::Config, "max_iter must be >= 1");
  std::vector<SymbolSequence> data;
  for (const auto& s : sequences) {
    if (s.empty()) continue;
    for (int x : s) {
      if (x < 0 || x >= n_symbols) {
        throw Error(ErrorKind::Domain, "symbol " + std::to_string(x) + " outside [0, " +
                                           std::to_string(n_symbols) + ")");
      }
    }
    data.push_back(s);
  }
  if (data.empty()) throw Error(ErrorKind::Domain, "no non-empty sequences to train on");

  std::vector<CategoricalHmm<Scalar>> fits(static_cast<std::size_t>(config.restarts));
  parallel_for(fits.size(), config.workers, [&](std::size_t r) {
    fits[r] = baum_welch_restart<Scalar>(data, n_states, n_symbols, config, static_cast<int>(r));
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < fits.size(); ++r) {
    if (fits[r].train_log.log_likelihood > fits[best].train_log.log_likelihood) best = r;
  }
  return std::move(fits[best]);
}

// ---------------------------------------------------------------------------
// Double-precision tooling (src/hmm.cpp).

struct SelectionConfig {
  std::vector<int> candidates;
  int folds = 5;
  /// 1 = best mean held-out log-likelihood; 2 = second best, and so on.
  int choose_rank = 1;
  BaumWelchConfig em;
};

struct ModelSelectionReport {
  std::vector<int> candidates;
  Matrix heldout_ll;  // candidates x folds, summed over held-out sequences
  Matrix train_ll;    // candidates x folds, summed over training sequences
  Vector mean_heldout_ll;
  /// Candidate indices ordered by mean held-out log-likelihood, best first.
  std::vector<std::size_t> ranking;
  int chosen = 0;
  int chosen_rank = 1;
  bool overridden() const { return chosen_rank != 1; }
};

/// k-fold cross-validated choice of the state count. Every (candidate, fold)
/// model is trained with the full restart protocol using a seed derived from
/// `config.em.seed`; work is spread over `config.em.workers`.
ModelSelectionReport select_n_states(const std::vector<SymbolSequence>& sequences,
                                     Eigen::Index n_symbols, const SelectionConfig& config);

struct GraphEdge {
  int from = 0;
  int to = 0;
  double probability = 0.0;
};

struct TransitionGraph {
  std::vector<std::string> labels;  // per state, may be empty strings
  std::vector<GraphEdge> edges;
  /// Absent for single-state models.
  std::optional<double> threshold;
};

/// Average off-diagonal probability after discounting self-loops:
/// (1 - trace(T)/n) / (n - 1); requires n >= 2.
double transition_threshold(const Matrix& transition);

/// Edges i -> j (i != j) with T(i,j) strictly above the threshold (or
/// `min_prob` when supplied). Comparisons use a 1e-12 margin so entries that
/// equal the threshold up to round-off are excluded.
TransitionGraph transition_graph(const Hmm& model, const std::vector<std::string>& labels = {},
                                 std::optional<double> min_prob = std::nullopt);
std::string to_dot(const TransitionGraph& graph);

struct TopicWeight {
  int topic = 0;
  double probability = 0.0;
};

/// Per state, the top_k emission symbols by probability (index-ascending on ties).
std::vector<std::vector<TopicWeight>> state_topic_summary(const Hmm& model, int top_k = 3);
void write_state_topics_csv(std::ostream& out, const std::vector<std::vector<TopicWeight>>& summary,
                            const std::vector<std::string>& state_labels,
                            const std::vector<std::string>& topic_labels);

/// Versioned text format; numbers written with 17 significant digits.
void write_hmm(std::ostream& out, const Hmm& model);
Hmm read_hmm(std::istream& in);
void save_hmm(const std::string& path, const Hmm& model);
Hmm load_hmm(const std::string& path);

}  // namespace scamscript
