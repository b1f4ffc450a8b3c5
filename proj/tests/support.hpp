#pragma once

// Fixtures and brute-force oracles shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "scamscript/agreement.hpp"
#include "scamscript/corpus.hpp"
#include "scamscript/hmm.hpp"
#include "scamscript/random.hpp"
#include "scamscript/synth.hpp"
#include "scamscript/topics.hpp"

namespace fixtures {

using namespace scamscript;

inline Utterance utterance(Role role, double start, double end, std::string text,
                           std::optional<int> topic = std::nullopt) {
  Utterance u;
  u.role = role;
  u.start_s = start;
  u.end_s = end;
  u.text = std::move(text);
  u.topic = topic;
  return u;
}

inline Transcript transcript(std::string id, std::string type, std::vector<Utterance> utterances) {
  Transcript t;
  t.id = std::move(id);
  t.scam_type = std::move(type);
  t.utterances = std::move(utterances);
  return t;
}

inline Hmm make_hmm(const Vector& start, const Matrix& transition, const Matrix& emission) {
  Hmm m;
  m.start = start;
  m.transition = transition;
  m.emission = emission;
  return m;
}

/// pi = [0.6, 0.4], T = [[0.7, 0.3], [0.4, 0.6]], E = [[0.9, 0.1], [0.2, 0.8]].
inline Hmm toy_model() {
  Vector pi(2);
  pi << 0.6, 0.4;
  Matrix t(2, 2), e(2, 2);
  t << 0.7, 0.3, 0.4, 0.6;
  e << 0.9, 0.1, 0.2, 0.8;
  return make_hmm(pi, t, e);
}

/// n-state left-to-right chain with point-mass emissions: state i emits
/// symbol i and always moves to i + 1 (the last state loops).
inline Hmm chain_model(int n) {
  Vector pi = Vector::Zero(n);
  pi(0) = 1.0;
  Matrix t = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) t(i, std::min(i + 1, n - 1)) = 1.0;
  return make_hmm(pi, t, Matrix::Identity(n, n));
}

struct Enumeration {
  double likelihood = 0.0;
  double best_log_probability = -std::numeric_limits<double>::infinity();
  StateSequence best_path;
};

/// Sums and maximizes the joint probability over all n^L state paths,
/// visited in lexicographic order; the first path attaining the maximum
/// (within 1e-12 relative) is kept.
inline Enumeration enumerate_paths(const Hmm& m, std::span<const int> symbols) {
  const int n = static_cast<int>(m.n_states());
  const std::size_t len = symbols.size();
  Enumeration out;
  StateSequence path(len, 0);
  double best = -1.0;
  for (;;) {
    double p = m.start(path[0]) * m.emission(path[0], symbols[0]);
    for (std::size_t t = 1; t < len; ++t) {
      p *= m.transition(path[t - 1], path[t]) * m.emission(path[t], symbols[t]);
    }
    out.likelihood += p;
    if (p > best * (1.0 + 1e-12) || best < 0) {
      best = p;
      out.best_path = path;
    }
    std::size_t pos = len;
    while (pos > 0) {
      --pos;
      if (++path[pos] < n) break;
      path[pos] = 0;
      if (pos == 0) {
        out.best_log_probability = std::log(best);
        return out;
      }
    }
  }
}

/// Random model; with `sparsity` > 0 some entries are zeroed (each row keeps
/// at least one positive entry).
inline Hmm random_hmm(int n, int m, Rng& rng, double sparsity = 0.0) {
  auto row = [&](int width) {
    Vector v = dirichlet_flat<double>(width, rng);
    if (sparsity > 0) {
      const auto keep = static_cast<Eigen::Index>(uniform_below(rng, static_cast<std::size_t>(width)));
      for (Eigen::Index j = 0; j < width; ++j) {
        if (j != keep && uniform01(rng) < sparsity) v(j) = 0.0;
      }
      v /= v.sum();
    }
    return v;
  };
  Hmm h;
  h.start = row(n);
  h.transition.resize(n, n);
  h.emission.resize(n, m);
  for (int i = 0; i < n; ++i) {
    h.transition.row(i) = row(n).transpose();
    h.emission.row(i) = row(m).transpose();
  }
  return h;
}

/// Minimum over state permutations of the largest L1 distance between
/// corresponding rows of the permuted estimate and the truth.
inline double best_permutation_row_l1(const Matrix& truth, const Matrix& estimate) {
  const auto n = truth.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        d += std::abs(truth(i, j) - estimate(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]));
      }
      worst = std::max(worst, d);
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// One transcript per symbol sequence, scammer utterances only, topics set.
inline Corpus symbol_corpus(const std::vector<SymbolSequence>& sequences, const std::string& type = "t") {
  Corpus c;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    std::vector<Utterance> us;
    double clock = 0;
    for (int s : sequences[i]) {
      us.push_back(utterance(Role::Scammer, clock, clock + 1, "w" + std::to_string(s), s));
      clock += 1;
    }
    c.transcripts.push_back(transcript("c" + std::to_string(i), type, std::move(us)));
  }
  return c;
}

/// Transcripts of each type whose scammer utterances all carry the type's
/// marker token ("zeta<type>"). Filler words depend only on the utterance
/// position, so they carry no class signal.
inline Corpus separable_type_corpus(const std::vector<std::string>& types, int per_type, int utterances) {
  static const char* filler[] = {"hello", "sir", "your", "account", "please", "call", "now", "okay"};
  Corpus c;
  for (const auto& type : types) {
    for (int i = 0; i < per_type; ++i) {
      std::vector<Utterance> us;
      for (int u = 0; u < utterances; ++u) {
        std::string text = "zeta" + type;
        for (int w = 0; w < 4; ++w) text += std::string(" ") + filler[(3 * u + w) % 8];
        us.push_back(utterance(Role::Scammer, 2.0 * u, 2.0 * u + 1, text));
        us.push_back(utterance(Role::Baiter, 2.0 * u + 1, 2.0 * u + 2, "what"));
      }
      c.transcripts.push_back(transcript(type + "-" + std::to_string(i), type, std::move(us)));
    }
  }
  return c;
}

/// Transcripts of 3-8 word scammer utterances drawn uniformly from a
/// `vocab`-word vocabulary, with shuffled balanced labels "a" and "b": the
/// text carries no class signal. A broad vocabulary and short utterances keep
/// naive Bayes decisions from shifting together across a test fold.
inline Corpus label_free_corpus(int transcripts, int utterances, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> labels;
  for (int i = 0; i < transcripts; ++i) labels.push_back(i % 2 ? "a" : "b");
  shuffle(labels, rng);
  Corpus c;
  for (int i = 0; i < transcripts; ++i) {
    std::vector<Utterance> us;
    for (int u = 0; u < utterances; ++u) {
      std::string text;
      const auto words = 3 + uniform_below(rng, 6);
      for (std::size_t w = 0; w < words; ++w) {
        text += (w ? " v" : "v") + std::to_string(uniform_below(rng, static_cast<std::size_t>(vocab)));
      }
      us.push_back(utterance(Role::Scammer, 2.0 * u, 2.0 * u + 1, text));
    }
    c.transcripts.push_back(transcript("n" + std::to_string(i), labels[static_cast<std::size_t>(i)], std::move(us)));
  }
  return c;
}

// Two disjoint vocabularies: documents draw only A-words or only B-words.
inline std::vector<std::string> disjoint_documents(int per_side, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> docs;
  for (int d = 0; d < 2 * per_side; ++d) {
    const char prefix = d % 2 == 0 ? 'a' : 'b';
    std::string text;
    for (int w = 0; w < 8; ++w) {
      text += std::string(text.empty() ? "" : " ") + prefix + "word" + std::to_string(uniform_below(rng, 12));
    }
    docs.push_back(text);
  }
  return docs;
}

inline std::vector<std::vector<int>> encode_all(const Vocabulary& v, const std::vector<std::string>& docs) {
  std::vector<std::vector<int>> out;
  for (const auto& d : docs) out.push_back(v.encode(d));
  return out;
}

// Direct pairwise form of nominal alpha: observed disagreement over all
// within-unit ordered pairs weighted by 1/(m_u - 1), expected from the
// pooled value counts.
inline double alpha_oracle(const std::vector<std::vector<std::string>>& units) {
  double n = 0, observed = 0;
  std::map<std::string, double> counts;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    const double m = static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      counts[u[i]] += 1;
      n += 1;
      for (std::size_t j = 0; j < u.size(); ++j) {
        if (i != j && u[i] != u[j]) observed += 1 / (m - 1);
      }
    }
  }
  double expected = 0;
  for (const auto& [a, na] : counts) {
    for (const auto& [b, nb] : counts) {
      if (a != b) expected += na * nb;
    }
  }
  return 1 - (observed / n) / (expected / (n * (n - 1)));
}

inline double kappa_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string, std::map<std::string, double>> confusion;
  for (std::size_t i = 0; i < a.size(); ++i) confusion[a[i]][b[i]] += 1;
  const double n = static_cast<double>(a.size());
  std::map<std::string, double> rows, cols;
  double diag = 0;
  for (const auto& [r, row] : confusion) {
    for (const auto& [c, v] : row) {
      rows[r] += v;
      cols[c] += v;
      if (r == c) diag += v;
    }
  }
  double pe = 0;
  for (const auto& [r, v] : rows) pe += v / n * (cols.count(r) ? cols[r] / n : 0);
  return (diag / n - pe) / (1 - pe);
}

struct AnnotatorFixture {
  std::vector<std::string> reference;
  std::vector<Choice> votes;
};

/// 60 items over 3-8 states. The first choice is right with probability in
/// [0.4, 0.8]; an annotator who is wrong usually offers a second choice that
/// is right 70% of the time, one who is right rarely offers one. Relaxed
/// kappa is at least strict kappa exactly when second-choice hits reach
/// (1 - p_o) / (1 - p_e) of their chance rate, which this keeps comfortably.
inline AnnotatorFixture annotator_fixture(Rng& rng) {
  const auto states = 3 + uniform_below(rng, 6);
  const double p_first = 0.4 + 0.4 * uniform01(rng);
  auto label = [](std::size_t s) { return "s" + std::to_string(s); };
  auto other = [&](std::size_t not_this) {
    const std::size_t s = uniform_below(rng, states - 1);
    return s >= not_this ? s + 1 : s;
  };
  AnnotatorFixture f;
  for (int item = 0; item < 60; ++item) {
    const std::size_t truth = uniform_below(rng, states);
    f.reference.push_back(label(truth));
    const bool right = uniform01(rng) < p_first;
    const std::size_t first = right ? truth : other(truth);
    std::optional<std::string> second;
    if (uniform01(rng) < (right ? 0.3 : 0.9)) second = label(!right && uniform01(rng) < 0.7 ? truth : other(first));
    f.votes.push_back({label(first), second});
  }
  return f;
}

struct SynthData {
  Corpus corpus;
  Hmm model;
  int n;
};

/// Separated-preset corpus without baiter turns; every utterance carries its
/// true topic, and `model` is the generating chain.
inline SynthData separated(int n, int transcripts, std::uint64_t seed) {
  SynthSpec spec = separated_spec(n);
  spec.n_transcripts = transcripts;
  spec.seed = seed;
  spec.baiter_turns = false;
  auto synth = generate_corpus(spec);
  for (std::size_t i = 0; i < synth.truth.size(); ++i) {
    auto& us = synth.corpus.transcripts[i].utterances;
    for (std::size_t u = 0; u < us.size(); ++u) us[u].topic = synth.truth[i].topics[u];
  }
  Hmm truth;
  truth.start = spec.start;
  truth.transition = spec.transition;
  truth.emission = spec.emission;
  return {synth.corpus, truth, n};
}

}  // namespace fixtures
