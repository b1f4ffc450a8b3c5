#include "scamscript/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "scamscript/parallel.hpp"

namespace scamscript {

namespace {

void require_simplex_rows(const Matrix& m, const char* what) {
  if (!is_row_stochastic(m, 1e-9)) {
    throw Error(ErrorKind::Validation, std::string(what) + " rows must be distributions");
  }
}

const char* const kBaiterWords[] = {"okay", "yes", "sure", "what", "hmm", "really",
                                    "hello", "wait", "right", "no"};

std::string word_at(const SynthSpec& spec, Eigen::Index w) {
  return spec.words.empty() ? "w" + std::to_string(w) : spec.words[static_cast<std::size_t>(w)];
}

Transcript generate_one(const SynthSpec& spec, std::size_t index, GroundTruth& truth) {
  Rng rng(derive_seed(spec.seed, index));
  char id[32];
  std::snprintf(id, sizeof id, "synth-%05zu", index);
  Transcript t;
  t.id = id;
  t.scam_type = spec.scam_types[index % spec.scam_types.size()];
  truth.transcript_id = t.id;

  const int length =
      spec.min_length + static_cast<int>(uniform_below(rng, static_cast<std::size_t>(
                                                                spec.max_length - spec.min_length + 1)));
  truth.states = sample_state_path(spec.start, spec.transition, length, rng);
  double clock = 0.0;
  for (int s : truth.states) {
    const int topic = static_cast<int>(sample_categorical(spec.emission.row(s), rng));
    truth.topics.push_back(topic);
    const int n_words =
        spec.min_words + static_cast<int>(uniform_below(rng, static_cast<std::size_t>(
                                                                 spec.max_words - spec.min_words + 1)));
    Utterance u;
    u.role = Role::Scammer;
    for (int i = 0; i < n_words; ++i) {
      if (i) u.text += ' ';
      u.text += word_at(spec, sample_categorical(spec.topic_words.row(topic), rng));
    }
    u.start_s = clock;
    u.end_s = clock + n_words / spec.words_per_second;
    clock = u.end_s + 0.5;
    if (spec.emotion_profiles.size() > 0) {
      EmotionVector e;
      for (std::size_t k = 0; k < kEmotionCount; ++k) {
        const double noise = (2.0 * uniform01(rng) - 1.0) * spec.emotion_noise;
        e.scores[k] = std::clamp(spec.emotion_profiles(s, static_cast<Eigen::Index>(k)) + noise, 0.0, 1.0);
      }
      if (spec.emotions_normalized) {
        const double sum = e.sum();
        for (auto& v : e.scores) v = sum > 0 ? v / sum : 1.0 / kEmotionCount;
      }
      u.emotions = e;
    }
    t.utterances.push_back(std::move(u));
    if (spec.baiter_turns) {
      Utterance b;
      b.role = Role::Baiter;
      const int words = 1 + static_cast<int>(uniform_below(rng, 4));
      for (int i = 0; i < words; ++i) {
        if (i) b.text += ' ';
        b.text += kBaiterWords[uniform_below(rng, std::size(kBaiterWords))];
      }
      b.start_s = clock;
      b.end_s = clock + words / spec.words_per_second;
      clock = b.end_s + 0.5;
      if (spec.emotion_profiles.size() > 0) {
        EmotionVector e;
        e.scores.fill(spec.emotions_normalized ? 1.0 / kEmotionCount : 0.1);
        b.emotions = e;
      }
      t.utterances.push_back(std::move(b));
    }
  }
  return t;
}

}  // namespace

void SynthSpec::validate() const {
  const Eigen::Index n = transition.rows();
  if (n < 1 || transition.cols() != n || start.size() != n || emission.rows() != n) {
    throw Error(ErrorKind::Validation, "synth spec: state dimensions disagree");
  }
  if (emission.cols() < 1 || topic_words.rows() != emission.cols() || topic_words.cols() < 1) {
    throw Error(ErrorKind::Validation, "synth spec: topic dimensions disagree");
  }
  require_simplex_rows(start.transpose(), "start");
  require_simplex_rows(transition, "transition");
  require_simplex_rows(emission, "emission");
  require_simplex_rows(topic_words, "topic_words");
  if (!words.empty() && static_cast<Eigen::Index>(words.size()) != topic_words.cols()) {
    throw Error(ErrorKind::Validation, "synth spec: word list length differs from topic_words");
  }
  if (emotion_profiles.size() > 0) {
    if (emotion_profiles.rows() != n || emotion_profiles.cols() != static_cast<Eigen::Index>(kEmotionCount)) {
      throw Error(ErrorKind::Validation, "synth spec: emotion_profiles must be n_states x 7");
    }
    if ((emotion_profiles.array() < 0).any() || (emotion_profiles.array() > 1).any()) {
      throw Error(ErrorKind::Validation, "synth spec: emotion profiles must lie in [0,1]");
    }
  }
  if (n_transcripts < 1 || min_length < 1 || max_length < min_length || min_words < 1 ||
      max_words < min_words || scam_types.empty() || !(words_per_second > 0) ||
      emotion_noise < 0) {
    throw Error(ErrorKind::Validation, "synth spec: invalid sizes");
  }
}

StateSequence sample_state_path(const Vector& start, const Matrix& transition, int length, Rng& rng) {
  StateSequence path;
  path.reserve(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t) {
    const Eigen::Index s = t == 0 ? sample_categorical(start, rng)
                                  : sample_categorical(transition.row(path.back()), rng);
    path.push_back(static_cast<int>(s));
  }
  return path;
}

SynthCorpus generate_corpus(const SynthSpec& spec, int workers) {
  spec.validate();
  SynthCorpus out;
  const auto n = static_cast<std::size_t>(spec.n_transcripts);
  out.corpus.transcripts.resize(n);
  out.truth.resize(n);
  parallel_for(n, workers, [&](std::size_t i) {
    out.corpus.transcripts[i] = generate_one(spec, i, out.truth[i]);
  });
  return out;
}

std::vector<SampledSequence> sample_hmm(const Hmm& model, int count, int length, std::uint64_t seed) {
  model.validate();
  std::vector<SampledSequence> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    auto& s = out[static_cast<std::size_t>(i)];
    s.states = sample_state_path(model.start, model.transition, length, rng);
    for (int z : s.states) s.symbols.push_back(static_cast<int>(sample_categorical(model.emission.row(z), rng)));
  }
  return out;
}

SynthSpec separated_spec(int n_states, int topics_per_state, int words_per_topic, double stay,
                         double advance, double leak) {
  if (n_states < 1 || topics_per_state < 1 || words_per_topic < 1) {
    throw Error(ErrorKind::Config, "separated spec needs positive sizes");
  }
  SynthSpec spec;
  const int K = n_states * topics_per_state;
  const int V = K * words_per_topic;
  spec.start = Vector::Constant(n_states, n_states > 1 ? 0.2 / (n_states - 1) : 1.0);
  spec.start(0) = n_states > 1 ? 0.8 : 1.0;
  spec.transition = Matrix::Zero(n_states, n_states);
  for (int i = 0; i < n_states; ++i) {
    if (n_states == 1) {
      spec.transition(i, i) = 1.0;
      continue;
    }
    const double rest = n_states > 2 ? (1.0 - stay - advance) / (n_states - 2) : 0.0;
    for (int j = 0; j < n_states; ++j) spec.transition(i, j) = rest;
    spec.transition(i, i) = stay;
    spec.transition(i, (i + 1) % n_states) = n_states > 2 ? advance : 1.0 - stay;
  }
  spec.emission = Matrix::Constant(n_states, K, K > topics_per_state ? leak / (K - topics_per_state) : 0.0);
  for (int i = 0; i < n_states; ++i) {
    for (int k = 0; k < topics_per_state; ++k) {
      spec.emission(i, i * topics_per_state + k) =
          (K > topics_per_state ? 1.0 - leak : 1.0) / topics_per_state;
    }
  }
  spec.topic_words = Matrix::Zero(K, V);
  for (int k = 0; k < K; ++k) {
    spec.topic_words.block(k, k * words_per_topic, 1, words_per_topic).setConstant(1.0 / words_per_topic);
  }
  spec.emotion_profiles = Matrix::Constant(n_states, kEmotionCount, 0.1);
  for (int i = 0; i < n_states; ++i) {
    spec.emotion_profiles(i, i % static_cast<int>(kEmotionCount)) = 0.5;
  }
  return spec;
}

namespace {

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, std::string("synth spec: ") + what + " must be an array");
  if (j.empty()) return Matrix();
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = j.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorKind::Parse, std::string("synth spec: ragged ") + what);
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

}  // namespace

SynthSpec read_synth_spec(std::istream& in) {
  SynthSpec spec;
  try {
    const Json j = Json::parse(in);
    const auto start = j.at("start").get<std::vector<double>>();
    spec.start = Eigen::Map<const Vector>(start.data(), static_cast<Eigen::Index>(start.size()));
    spec.transition = matrix_from(j.at("transition"), "transition");
    spec.emission = matrix_from(j.at("emission"), "emission");
    spec.topic_words = matrix_from(j.at("topic_words"), "topic_words");
    spec.words = j.value("words", std::vector<std::string>{});
    if (j.contains("emotion_profiles")) {
      spec.emotion_profiles = matrix_from(j.at("emotion_profiles"), "emotion_profiles");
    }
    spec.emotion_noise = j.value("emotion_noise", spec.emotion_noise);
    spec.emotions_normalized = j.value("emotions_normalized", spec.emotions_normalized);
    spec.n_transcripts = j.value("n_transcripts", spec.n_transcripts);
    spec.min_length = j.value("min_length", spec.min_length);
    spec.max_length = j.value("max_length", spec.max_length);
    spec.min_words = j.value("min_words", spec.min_words);
    spec.max_words = j.value("max_words", spec.max_words);
    spec.scam_types = j.value("scam_types", spec.scam_types);
    spec.baiter_turns = j.value("baiter_turns", spec.baiter_turns);
    spec.words_per_second = j.value("words_per_second", spec.words_per_second);
    spec.seed = j.value("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("synth spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot read synth spec '" + path + "'");
  return read_synth_spec(in);
}

void write_synth_spec(std::ostream& out, const SynthSpec& spec) {
  Json j;
  j["start"] = std::vector<double>(spec.start.data(), spec.start.data() + spec.start.size());
  j["transition"] = matrix_json(spec.transition);
  j["emission"] = matrix_json(spec.emission);
  j["topic_words"] = matrix_json(spec.topic_words);
  if (!spec.words.empty()) j["words"] = spec.words;
  if (spec.emotion_profiles.size() > 0) j["emotion_profiles"] = matrix_json(spec.emotion_profiles);
  j["emotion_noise"] = spec.emotion_noise;
  j["emotions_normalized"] = spec.emotions_normalized;
  j["n_transcripts"] = spec.n_transcripts;
  j["min_length"] = spec.min_length;
  j["max_length"] = spec.max_length;
  j["min_words"] = spec.min_words;
  j["max_words"] = spec.max_words;
  j["scam_types"] = spec.scam_types;
  j["baiter_turns"] = spec.baiter_turns;
  j["words_per_second"] = spec.words_per_second;
  j["seed"] = spec.seed;
  out << j.dump(2) << '\n';
}

void write_ground_truth(std::ostream& out, const std::vector<GroundTruth>& truth) {
  for (const auto& g : truth) {
    Json j;
    j["transcript_id"] = g.transcript_id;
    j["states"] = g.states;
    j["topics"] = g.topics;
    out << j.dump() << '\n';
  }
}

}  // namespace scamscript
