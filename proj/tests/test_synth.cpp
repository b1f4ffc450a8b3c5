#include <doctest.h>

#include <sstream>

#include "scamscript/corpus.hpp"
#include "scamscript/synth.hpp"
#include "support.hpp"

using namespace scamscript;

TEST_CASE("generation is deterministic and independent of workers") {
  SynthSpec spec = separated_spec(3);
  spec.n_transcripts = 12;
  spec.seed = 21;
  spec.scam_types = {"a", "b"};
  const auto x = generate_corpus(spec, 1);
  const auto y = generate_corpus(spec, 4);
  std::ostringstream ax, ay;
  write_corpus(ax, x.corpus);
  write_corpus(ay, y.corpus);
  CHECK(ax.str() == ay.str());
  std::ostringstream tx, ty;
  write_ground_truth(tx, x.truth);
  write_ground_truth(ty, y.truth);
  CHECK(tx.str() == ty.str());
  CHECK(x.corpus.transcripts[1].scam_type == "b");
  spec.seed = 22;
  std::ostringstream az;
  write_corpus(az, generate_corpus(spec).corpus);
  CHECK(az.str() != ax.str());
}

TEST_CASE("point-mass chain forces the path") {
  const Hmm chain = fixtures::chain_model(4);
  for (const auto& s : sample_hmm(chain, 5, 7, 3)) {
    CHECK(s.states == StateSequence{0, 1, 2, 3, 3, 3, 3});
    CHECK(s.symbols == SymbolSequence{0, 1, 2, 3, 3, 3, 3});
  }
}

TEST_CASE("empirical transitions fit the generating matrix") {
  // Pearson chi-square summed over rows; 10^4 transitions. Critical values at
  // p = 0.01 for n(n-1) degrees of freedom.
  struct Case {
    int n;
    double critical;
  };
  Rng rng(5);
  for (const Case c : {Case{2, 9.2103}, Case{3, 16.8119}, Case{4, 26.217}}) {
    const Hmm m = fixtures::random_hmm(c.n, 3, rng);
    const auto samples = sample_hmm(m, 100, 101, 40 + static_cast<std::uint64_t>(c.n));
    Matrix counts = Matrix::Zero(c.n, c.n);
    for (const auto& s : samples) {
      for (std::size_t t = 1; t < s.states.size(); ++t) counts(s.states[t - 1], s.states[t]) += 1;
    }
    REQUIRE(counts.sum() == 10000);
    double chi2 = 0;
    for (int i = 0; i < c.n; ++i) {
      const double row = counts.row(i).sum();
      for (int j = 0; j < c.n; ++j) {
        const double expected = row * m.transition(i, j);
        chi2 += (counts(i, j) - expected) * (counts(i, j) - expected) / expected;
      }
    }
    CHECK(chi2 < c.critical);
  }
}

TEST_CASE("ground truth is consistent with the corpus") {
  SynthSpec spec = separated_spec(3, 2, 5, 0.6, 0.3, 0.0);
  spec.n_transcripts = 30;
  spec.seed = 4;
  spec.min_words = 3;
  spec.max_words = 6;
  const auto synth = generate_corpus(spec);
  REQUIRE(synth.truth.size() == 30);
  for (std::size_t i = 0; i < synth.truth.size(); ++i) {
    const auto& t = synth.corpus.transcripts[i];
    const auto& g = synth.truth[i];
    CHECK(g.transcript_id == t.id);
    std::vector<std::size_t> scammer;
    for (std::size_t u = 0; u < t.utterances.size(); ++u) {
      if (t.utterances[u].role == Role::Scammer) scammer.push_back(u);
    }
    REQUIRE(scammer.size() == g.states.size());
    REQUIRE(g.topics.size() == g.states.size());
    CHECK(static_cast<int>(g.states.size()) >= spec.min_length);
    CHECK(static_cast<int>(g.states.size()) <= spec.max_length);
    for (std::size_t u = 0; u < g.states.size(); ++u) {
      // Without leak, a state only emits its own topics.
      CHECK(spec.emission(g.states[u], g.topics[u]) > 0);
      const auto& utt = t.utterances[scammer[u]];
      const auto words = word_count(utt.text);
      CHECK(words >= static_cast<std::size_t>(spec.min_words));
      CHECK(words <= static_cast<std::size_t>(spec.max_words));
      // Topic k owns words [5k, 5k + 5).
      std::istringstream in(utt.text);
      for (std::string w; in >> w;) {
        const int id = std::stoi(w.substr(1));
        CHECK(id / 5 == g.topics[u]);
      }
    }
    CHECK_NOTHROW(validate(t));
  }
}

TEST_CASE("spec round trip and validation") {
  SynthSpec spec = separated_spec(2);
  spec.n_transcripts = 7;
  spec.seed = 99;
  spec.scam_types = {"x", "y"};
  std::ostringstream out;
  write_synth_spec(out, spec);
  std::istringstream in(out.str());
  const SynthSpec back = read_synth_spec(in);
  CHECK(back.transition.isApprox(spec.transition, 0));
  CHECK(back.emission.isApprox(spec.emission, 0));
  CHECK(back.topic_words.isApprox(spec.topic_words, 0));
  CHECK(back.n_transcripts == 7);
  CHECK(back.seed == 99);
  CHECK(back.scam_types == spec.scam_types);
  std::ostringstream again;
  write_synth_spec(again, back);
  CHECK(again.str() == out.str());

  SynthSpec bad = spec;
  bad.transition(0, 0) += 0.1;
  try {
    bad.validate();
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
  }
  bad = spec;
  bad.max_words = 1;
  CHECK_THROWS_AS(generate_corpus(bad), Error);
  std::istringstream garbage("{\"start\": [1]}");
  CHECK_THROWS_AS(read_synth_spec(garbage), Error);
}
