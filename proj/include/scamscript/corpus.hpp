#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scamscript/common.hpp"

namespace scamscript {

using Json = nlohmann::ordered_json;

enum class Role { Scammer, Baiter };

std::string_view to_string(Role role);
Role parse_role(std::string_view text);

/// Ekman's six basic emotions plus neutral, in this fixed column order.
inline constexpr std::array<std::string_view, 7> kEmotionNames = {
    "anger", "disgust", "fear", "joy", "neutral", "sadness", "surprise"};
inline constexpr std::size_t kEmotionCount = kEmotionNames.size();

struct EmotionVector {
  std::array<double, kEmotionCount> scores{};

  double sum() const;
  /// Throws Validation when a score leaves [0,1], or when `normalized` is set
  /// and the scores do not sum to 1 ± 1e-3.
  void validate(bool normalized) const;
};

struct Utterance {
  Role role = Role::Scammer;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::optional<EmotionVector> emotions;
  std::optional<int> topic;
  std::optional<int> state;
  Json extra = Json::object();  // unknown fields, preserved on round-trip

  double duration() const { return end_s - start_s; }
};

struct Transcript {
  std::string id;
  std::string scam_type;
  std::optional<std::string> source_channel;
  std::vector<Utterance> utterances;
  Json extra = Json::object();

  std::size_t scammer_count() const;
};

struct Corpus {
  std::vector<Transcript> transcripts;

  std::size_t size() const { return transcripts.size(); }
  bool empty() const { return transcripts.empty(); }
  const Transcript& at(std::string_view id) const;
  /// Transcripts whose scam_type equals `type`, order preserved.
  Corpus of_type(std::string_view type) const;
  /// Sorted distinct scam types.
  std::vector<std::string> scam_types() const;
};

struct LoadOptions {
  /// Applied to scam_type at load time (e.g. "gift card" -> "reward").
  std::map<std::string, std::string> relabel;
  /// When set, every emotion vector must also sum to 1 ± 1e-3.
  bool emotions_normalized = false;
};

Corpus load_corpus(const std::string& path, const LoadOptions& options = {});
Corpus parse_corpus(std::istream& in, const LoadOptions& options = {});
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::string& path, const Corpus& corpus);

/// Checks every transcript/utterance invariant; throws Validation naming the
/// transcript id and utterance index.
void validate(const Transcript& transcript, bool emotions_normalized = false);

/// Whitespace-token count of raw text, no punctuation stripping.
std::size_t word_count(std::string_view text);

struct RoleStats {
  double duration_s = 0.0;
  std::int64_t words = 0;
  /// words / duration_s; absent when duration is zero.
  std::optional<double> word_rate() const;
};

struct TypeStats {
  std::string scam_type;
  std::int64_t call_count = 0;
  RoleStats scammer;
  RoleStats baiter;
  /// Pearson correlation of per-call (scammer, baiter) word rates, over calls
  /// where both are defined; absent with fewer than two such calls or zero
  /// variance.
  std::optional<double> rate_correlation;

  double total_duration_s() const { return scammer.duration_s + baiter.duration_s; }
  std::int64_t total_words() const { return scammer.words + baiter.words; }
};

struct CallRates {
  std::string transcript_id;
  std::string scam_type;
  std::optional<double> scammer_rate;
  std::optional<double> baiter_rate;
};

struct CorpusStats {
  std::vector<TypeStats> by_type;  // sorted by scam_type
  TypeStats total;                 // scam_type "Total"
  std::vector<CallRates> calls;
};

CorpusStats corpus_stats(const Corpus& corpus);
void write_stats_csv(std::ostream& out, const CorpusStats& stats);

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Partitions transcript ids into k disjoint folds. Within each stratum
/// (scam_type when `stratify`, else the whole corpus) ids are shuffled with
/// `seed` and dealt round-robin, continuing the fold cursor across strata,
/// so per-stratum fold sizes differ by at most one.
std::vector<std::vector<std::string>> stratified_folds(const Corpus& corpus, int k,
                                                       std::uint64_t seed, bool stratify);

/// Index-level variant: partitions [0, count) into k folds.
std::vector<std::vector<std::size_t>> index_folds(std::size_t count, int k, std::uint64_t seed);

}  // namespace scamscript
