#pragma once

#include <vector>

#include "scamscript/corpus.hpp"
#include "scamscript/hmm.hpp"

namespace scamscript {

/// Top-topic symbols of each transcript's scammer utterances, in order.
/// Throws MissingInput naming the first scammer utterance without a topic.
std::vector<SymbolSequence> scammer_sequences(const Corpus& corpus);

/// Viterbi-decodes every transcript's scammer symbols and writes the state
/// into each scammer utterance. Baiter utterances are left untouched.
Corpus decode_corpus(const Hmm& model, Corpus corpus);

/// Decoded states of each transcript's scammer utterances, in order.
/// Throws MissingInput when a scammer utterance has no state.
std::vector<StateSequence> scammer_states(const Corpus& corpus);

}  // namespace scamscript
