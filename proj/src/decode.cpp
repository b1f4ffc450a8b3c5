#include "scamscript/decode.hpp"

namespace scamscript {

std::vector<SymbolSequence> scammer_sequences(const Corpus& corpus) {
  std::vector<SymbolSequence> out;
  out.reserve(corpus.size());
  for (const auto& t : corpus.transcripts) {
    SymbolSequence seq;
    for (std::size_t i = 0; i < t.utterances.size(); ++i) {
      const auto& u = t.utterances[i];
      if (u.role != Role::Scammer) continue;
      if (!u.topic) {
        throw Error(ErrorKind::MissingInput, "transcript '" + t.id + "' utterance " +
                                                 std::to_string(i) + " has no topic assignment");
      }
      seq.push_back(*u.topic);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

Corpus decode_corpus(const Hmm& model, Corpus corpus) {
  const auto sequences = scammer_sequences(corpus);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    if (sequences[k].empty()) continue;
    const auto path = viterbi(model, std::span<const int>(sequences[k])).path;
    std::size_t pos = 0;
    for (auto& u : corpus.transcripts[k].utterances) {
      if (u.role == Role::Scammer) u.state = path[pos++];
    }
  }
  return corpus;
}

std::vector<StateSequence> scammer_states(const Corpus& corpus) {
  std::vector<StateSequence> out;
  out.reserve(corpus.size());
  for (const auto& t : corpus.transcripts) {
    StateSequence seq;
    for (std::size_t i = 0; i < t.utterances.size(); ++i) {
      const auto& u = t.utterances[i];
      if (u.role != Role::Scammer) continue;
      if (!u.state) {
        throw Error(ErrorKind::MissingInput, "transcript '" + t.id + "' utterance " +
                                                 std::to_string(i) + " has no decoded state");
      }
      seq.push_back(*u.state);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace scamscript
