#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scamscript/corpus.hpp"
#include "scamscript/topics.hpp"

namespace scamscript {

/// Binary multinomial bag-of-tokens model, target scam type vs. the rest,
/// over concatenated scammer utterances.
struct TypeClassifier {
  std::string target;
  Vocabulary vocabulary;
  Matrix log_prob;  // 2 x V; row 0 = target class, row 1 = rest
  double log_prior_target = 0.0;
  double log_prior_rest = 0.0;
  double smoothing = 1.0;

  double prior_log_odds() const { return log_prior_target - log_prior_rest; }
  /// Sum of per-token log-probability ratios; tokens outside the vocabulary
  /// contribute nothing.
  double text_log_odds(std::string_view text) const;
};

/// Trains on each transcript's first `max_utterances` scammer utterances
/// (all of them when absent). Class priors are transcript frequencies.
TypeClassifier train_type_classifier(const Corpus& corpus, const std::string& scam_type,
                                     double smoothing = 1.0,
                                     std::optional<int> max_utterances = std::nullopt);

struct TypePrediction {
  bool positive = false;
  double log_odds = 0.0;
};

/// Uses the first min(k, available) scammer utterances; positive iff the
/// log-odds exceed zero.
TypePrediction predict_type(const TypeClassifier& classifier, const Transcript& transcript, int k);
TypePrediction predict_type(const TypeClassifier& classifier,
                            const std::vector<std::string>& scammer_utterances, int k);

struct ProgressiveConfig {
  int k_max = 10;
  int folds = 7;
  /// Per-type fold counts, e.g. {"reward", 4}.
  std::map<std::string, int> fold_overrides;
  /// Types to evaluate; all types in the corpus when empty.
  std::vector<std::string> types;
  double smoothing = 1.0;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct F1Row {
  std::string scam_type;
  int k = 0;
  int fold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ProgressiveResult {
  std::vector<F1Row> rows;  // ordered by type, k, fold
  /// Mean F1 over folds, indexed [k - 1].
  std::map<std::string, std::vector<double>> mean_f1;
};

/// Positive-class precision, recall and F1 (0 when undefined).
F1Row binary_scores(const std::vector<bool>& truth, const std::vector<bool>& predicted);

/// Cross-validated F1 curves: for each evaluated type, folds stratified
/// over scam types are drawn once and reused for every k; at each k a
/// classifier is trained on the training folds truncated to k utterances
/// and tested on held-out transcripts truncated the same way.
ProgressiveResult evaluate_progressive(const Corpus& corpus, const ProgressiveConfig& config);

void write_f1_csv(std::ostream& out, const ProgressiveResult& result);
void write_f1_mean_csv(std::ostream& out, const ProgressiveResult& result);

}  // namespace scamscript
