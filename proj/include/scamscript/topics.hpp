#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scamscript/common.hpp"
#include "scamscript/corpus.hpp"

namespace scamscript {

/// Lowercases and splits on anything but ASCII letters, digits, apostrophes
/// and non-ASCII bytes; leading/trailing apostrophes are trimmed.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Tokens must be unique; `doc_freq` is parallel to `tokens`.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::int64_t> doc_freq);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token_at(std::size_t i) const { return tokens_.at(i); }
  std::int64_t doc_freq(std::size_t i) const { return doc_freq_.at(i); }
  std::optional<int> lookup(std::string_view token) const;
  /// Ids of the in-vocabulary tokens of `text`, in order.
  std::vector<int> encode(std::string_view text) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> doc_freq_;
  std::unordered_map<std::string, int> index_;
};

/// Keeps tokens with document frequency >= min_doc_freq that are not
/// stopwords, ordered by frequency (desc) then lexicographically. Throws
/// Domain when nothing survives.
Vocabulary build_vocabulary(const std::vector<std::string>& documents, int min_doc_freq,
                            const std::vector<std::string>& stopwords = {});

/// Texts of all scammer utterances in corpus order.
std::vector<std::string> scammer_texts(const Corpus& corpus);

struct TopicModelConfig {
  int topics = 50;
  /// Symmetric document-topic prior; non-positive means 50 / topics.
  double alpha = 0.0;
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 0;

  double effective_alpha() const { return alpha > 0 ? alpha : 50.0 / topics; }
};

/// Latent-Dirichlet topic model fitted by collapsed Gibbs sampling. Counts
/// are those of the final sweep.
struct TopicModel {
  int n_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  Vocabulary vocabulary;
  IntMatrix topic_word;  // K x V
  IntVector topic_totals;
  int iterations = 0;
  std::uint64_t seed = 0;
  /// Final token-level topic assignments of the training documents.
  std::vector<std::vector<int>> token_topics;
  std::vector<std::string> warnings;

  /// Row k: (n_kw + beta) / (n_k + V beta).
  Matrix word_distributions() const;
  /// Top `n` word ids of topic k by count (ties: lower id first).
  std::vector<int> top_words(int topic, int n) const;
};

TopicModel train_topic_model(const std::vector<std::vector<int>>& documents, Vocabulary vocabulary,
                             const TopicModelConfig& config);

/// Encodes the scammer utterances with `vocabulary` and trains on them.
TopicModel train_topic_model(const Corpus& corpus, Vocabulary vocabulary,
                             const TopicModelConfig& config);

struct TopicAssignment {
  std::string transcript_id;
  int utterance_index = 0;
  Vector distribution;
  int top_topic = 0;
  bool oov = false;
};

/// Held-out topic distribution of a token list by fixed-point iteration
/// with the topic-word distributions held fixed:
///   theta_k = (alpha + sum_i r_ik) / (N + K alpha),
///   r_ik = phi_k,w_i theta_k / sum_j phi_j,w_i theta_j.
Vector infer_distribution(const TopicModel& model, std::span<const int> tokens);

/// Topic distribution and top topic for raw text. Text with no
/// in-vocabulary tokens gets the uniform distribution, top topic 0 and the
/// oov flag.
TopicAssignment infer_assignment(const TopicModel& model, std::string_view text);

/// Assignments for every scammer utterance in corpus order.
std::vector<TopicAssignment> assign_corpus(const TopicModel& model, const Corpus& corpus,
                                           int workers = 1);

/// Writes each assignment's top topic into its utterance. Throws
/// MissingInput when a scammer utterance is left without an assignment, or
/// Validation when an assignment names an unknown utterance.
Corpus apply_assignments(Corpus corpus, const std::vector<TopicAssignment>& assignments);

void write_assignments(std::ostream& out, const std::vector<TopicAssignment>& assignments);
/// Parses assignment records, verifying that each distribution is a simplex
/// (sum 1 ± 1e-6, nonnegative) and that top_topic is its argmax.
std::vector<TopicAssignment> read_assignments(std::istream& in);

void save_topic_model(const std::string& path, const TopicModel& model);
TopicModel load_topic_model(const std::string& path);

/// NPMI of a word pair from document frequencies over `n_docs` documents.
/// Pairs that never co-occur score -1; pairs present in every document
/// score 1; otherwise log(p_ij / (p_i p_j)) / -log p_ij with p_ij smoothed
/// by 1e-12, clamped to [-1, 1].
double npmi(std::int64_t df_i, std::int64_t df_j, std::int64_t df_ij, std::int64_t n_docs);

struct CoherenceReport {
  std::vector<double> per_topic;
  double mean = 0.0;
};

/// Mean NPMI over all pairs of each topic's top_n words, with documents
/// (utterances) as the co-occurrence window.
CoherenceReport coherence_npmi(const TopicModel& model,
                               const std::vector<std::vector<int>>& documents, int top_n = 10);

/// Extrapolated rank-biased overlap of two rankings evaluated to depth
/// k = min(|a|, |b|):
///   X_k/k p^k + (1-p)/p sum_{d=1..k} X_d/d p^d,
/// where X_d is the overlap of the two depth-d prefixes.
double rank_biased_overlap(std::span<const int> a, std::span<const int> b, double p);

/// 1 - mean pairwise RBO over all pairs of ranked lists.
double diversity_irbo(const std::vector<std::vector<int>>& rankings, double p = 0.9);
double diversity_irbo(const TopicModel& model, int top_n = 10, double p = 0.9);

struct TopicFrequencyTable {
  std::vector<std::string> scam_types;
  Matrix frequency;  // types x K, mean topic probability per scammer utterance
  std::vector<std::int64_t> utterance_counts;
  double average = 0.0;    // 1 / K
  double threshold = 0.0;  // 1.5 / K

  bool highlighted(std::size_t type, int topic) const {
    return frequency(static_cast<Eigen::Index>(type), topic) > threshold;
  }
};

TopicFrequencyTable topic_frequency_table(const std::vector<TopicAssignment>& assignments,
                                          const Corpus& corpus);
void write_topic_frequency_csv(std::ostream& out, const TopicFrequencyTable& table);

/// Per topic: top words and up to `samples` scammer utterances with the
/// highest probability for it, to support manual topic labeling.
void write_topic_summary_csv(std::ostream& out, const TopicModel& model,
                             const std::vector<TopicAssignment>& assignments, const Corpus& corpus,
                             int top_n = 10, int samples = 3);

}  // namespace scamscript
