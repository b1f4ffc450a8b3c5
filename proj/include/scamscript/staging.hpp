#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "scamscript/corpus.hpp"
#include "scamscript/hmm.hpp"

namespace scamscript {

/// Per position: the state itself plus the nearest differing state before
/// and after it (when they exist). Sets are sorted ascending.
std::vector<std::vector<int>> relaxed_target_sets(std::span<const int> states);

struct StagePrediction {
  int state = 0;
  Vector posterior;
};

/// Forward-filter argmax of P(state_t | prefix), lowest index on ties.
StagePrediction predict_stage(const Hmm& model, std::span<const int> prefix);

/// Produces a causal per-position state prediction for one transcript's
/// scammer symbols.
using StagePredictor = std::function<StateSequence(std::span<const int> symbols)>;

/// Builds a predictor for one fold from the training-side transcripts
/// (their symbols and gold states).
using StagePredictorFactory = std::function<StagePredictor(
    const std::vector<SymbolSequence>& train_symbols, const std::vector<StateSequence>& train_gold)>;

/// Streaming forward filtering with a fixed model; ignores the fold split.
StagePredictorFactory filter_predictor(const Hmm& model);

/// Supervised count-based HMM estimated from the training folds' gold
/// states (start, transition and emission counts plus `smoothing`), then
/// forward filtering.
StagePredictorFactory supervised_filter_predictor(int n_states, int n_symbols,
                                                  double smoothing = 1.0);

/// Non-causal oracle: Viterbi over the whole sequence with `model`, which
/// reproduces the gold labels exactly.
StagePredictorFactory oracle_predictor(const Hmm& model);

/// Uniform random guesses over `n_states`.
StagePredictorFactory random_predictor(int n_states, std::uint64_t seed);

struct FoldResult {
  std::size_t transcripts = 0;
  std::size_t utterances = 0;
  double strict_accuracy = 0.0;
  double relaxed_accuracy = 0.0;
  double relaxed_baseline = 0.0;  // mean |relaxed set| / n
};

struct StageEvaluation {
  std::string scam_type;
  int n_states = 0;
  double strict_accuracy = 0.0;
  double relaxed_accuracy = 0.0;
  double strict_baseline = 0.0;
  double relaxed_baseline = 0.0;
  double strict_margin = 0.0;
  double relaxed_margin = 0.0;
  std::vector<FoldResult> folds;
};

/// Baselines and margins for given accuracies: strict baseline 1/n,
/// margin = accuracy - baseline.
StageEvaluation stage_row(int n_states, double strict_accuracy, double relaxed_accuracy,
                          double relaxed_baseline);

struct StagingConfig {
  int folds = 6;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Cross-validated streaming stage prediction for one scam type. Gold
/// labels are Viterbi states of `model` (the all-data model); transcripts
/// are split into folds, each fold's predictor is built from the remaining
/// folds, and accuracies are averaged over folds.
StageEvaluation evaluate_staging(const Corpus& corpus, const Hmm& model,
                                 const StagingConfig& config,
                                 const StagePredictorFactory& predictor);

/// Convenience overload using `filter_predictor(model)`.
StageEvaluation evaluate_staging(const Corpus& corpus, const Hmm& model,
                                 const StagingConfig& config);

void write_stage_csv(std::ostream& out, const std::vector<StageEvaluation>& rows);
std::string stage_table_text(const std::vector<StageEvaluation>& rows);

}  // namespace scamscript
