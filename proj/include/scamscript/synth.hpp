#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "scamscript/corpus.hpp"
#include "scamscript/hmm.hpp"
#include "scamscript/random.hpp"

namespace scamscript {

/// Ground-truth generative model for synthetic transcripts: a state chain,
/// per-state topic emissions, per-topic word distributions and per-state
/// emotion profiles.
struct SynthSpec {
  Vector start;          // n
  Matrix transition;     // n x n
  Matrix emission;       // n x K (topics)
  Matrix topic_words;    // K x V
  std::vector<std::string> words;  // V; defaults to "w0", "w1", ...
  Matrix emotion_profiles;         // n x 7, or empty for no emotions
  double emotion_noise = 0.05;     // half-width of additive uniform noise
  bool emotions_normalized = false;
  int n_transcripts = 100;
  int min_length = 10;  // scammer utterances per transcript
  int max_length = 30;
  int min_words = 5;    // words per scammer utterance
  int max_words = 15;
  std::vector<std::string> scam_types{"synthetic"};  // assigned round-robin
  bool baiter_turns = true;
  double words_per_second = 2.5;
  std::uint64_t seed = 0;

  int n_states() const { return static_cast<int>(transition.rows()); }
  int n_topics() const { return static_cast<int>(emission.cols()); }
  /// Throws Validation on malformed shapes or non-simplex distributions.
  void validate() const;
};

struct GroundTruth {
  std::string transcript_id;
  StateSequence states;  // per scammer utterance
  std::vector<int> topics;
};

struct SynthCorpus {
  Corpus corpus;
  std::vector<GroundTruth> truth;
};

/// Deterministic per seed; transcript i uses the stream derive_seed(seed, i).
SynthCorpus generate_corpus(const SynthSpec& spec, int workers = 1);

StateSequence sample_state_path(const Vector& start, const Matrix& transition, int length, Rng& rng);

struct SampledSequence {
  StateSequence states;
  SymbolSequence symbols;
};

/// Draws `count` state/symbol sequences of `length` directly from an HMM.
std::vector<SampledSequence> sample_hmm(const Hmm& model, int count, int length, std::uint64_t seed);

/// Well-separated preset: each state owns `topics_per_state` topics (with
/// `leak` emission mass spread over the others), each topic owns
/// `words_per_topic` exclusive words, and the chain mostly stays or moves
/// forward (`stay` self-loop, `advance` to the next state).
SynthSpec separated_spec(int n_states, int topics_per_state = 2, int words_per_topic = 8,
                         double stay = 0.6, double advance = 0.3, double leak = 0.02);

SynthSpec read_synth_spec(std::istream& in);
SynthSpec load_synth_spec(const std::string& path);
void write_synth_spec(std::ostream& out, const SynthSpec& spec);
void write_ground_truth(std::ostream& out, const std::vector<GroundTruth>& truth);

}  // namespace scamscript
