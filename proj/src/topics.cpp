#include "scamscript/topics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "scamscript/csv.hpp"
#include "scamscript/parallel.hpp"
#include "scamscript/random.hpp"

namespace scamscript {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    const auto first = current.find_first_not_of('\'');
    const auto last = current.find_last_not_of('\'');
    if (first != std::string::npos) tokens.push_back(current.substr(first, last - first + 1));
    current.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '\'' || c >= 0x80) {
      current += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::int64_t> doc_freq)
    : tokens_(std::move(tokens)), doc_freq_(std::move(doc_freq)) {
  if (doc_freq_.size() != tokens_.size()) {
    throw Error(ErrorKind::Validation, "vocabulary frequency list has the wrong length");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw Error(ErrorKind::Validation, "duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

std::optional<int> Vocabulary::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& tok : tokenize(text)) {
    if (auto id = lookup(tok)) ids.push_back(*id);
  }
  return ids;
}

Vocabulary build_vocabulary(const std::vector<std::string>& documents, int min_doc_freq,
                            const std::vector<std::string>& stopwords) {
  if (min_doc_freq < 1) throw Error(ErrorKind::Config, "min_doc_freq must be >= 1");
  const std::set<std::string> stop(stopwords.begin(), stopwords.end());
  std::map<std::string, std::int64_t> df;
  for (const auto& doc : documents) {
    auto toks = tokenize(doc);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (auto& t : toks) ++df[t];
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [tok, f] : df) {
    if (f >= min_doc_freq && !stop.count(tok)) kept.emplace_back(tok, f);
  }
  if (kept.empty()) throw Error(ErrorKind::Domain, "vocabulary is empty after filtering");
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  std::vector<std::int64_t> freqs;
  for (auto& [tok, f] : kept) {
    tokens.push_back(tok);
    freqs.push_back(f);
  }
  return Vocabulary(std::move(tokens), std::move(freqs));
}

std::vector<std::string> scammer_texts(const Corpus& corpus) {
  std::vector<std::string> texts;
  for (const auto& t : corpus.transcripts) {
    for (const auto& u : t.utterances) {
      if (u.role == Role::Scammer) texts.push_back(u.text);
    }
  }
  return texts;
}

Matrix TopicModel::word_distributions() const {
  const double vb = beta * static_cast<double>(vocabulary.size());
  Matrix phi = topic_word.cast<double>().array() + beta;
  for (Eigen::Index k = 0; k < phi.rows(); ++k) {
    phi.row(k) /= static_cast<double>(topic_totals(k)) + vb;
  }
  return phi;
}

std::vector<int> TopicModel::top_words(int topic, int n) const {
  std::vector<int> ids(vocabulary.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](int a, int b) { return topic_word(topic, a) > topic_word(topic, b); });
  ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(std::max(0, n))));
  return ids;
}

TopicModel train_topic_model(const std::vector<std::vector<int>>& documents, Vocabulary vocabulary,
                             const TopicModelConfig& config) {
  if (config.topics < 1) throw Error(ErrorKind::Config, "topic count must be >= 1");
  if (config.iterations < 1) throw Error(ErrorKind::Config, "iterations must be >= 1");
  if (!(config.beta > 0)) throw Error(ErrorKind::Config, "beta must be > 0");
  const int K = config.topics;
  const auto V = static_cast<Eigen::Index>(vocabulary.size());
  TopicModel model;
  model.n_topics = K;
  model.alpha = config.effective_alpha();
  model.beta = config.beta;
  model.iterations = config.iterations;
  model.seed = config.seed;
  model.topic_word = IntMatrix::Zero(K, V);
  model.topic_totals = IntVector::Zero(K);

  std::set<int> distinct;
  for (const auto& doc : documents) {
    for (int w : doc) {
      if (w < 0 || w >= V) throw Error(ErrorKind::Domain, "token id outside the vocabulary");
      distinct.insert(w);
    }
  }
  if (static_cast<std::size_t>(K) > distinct.size()) {
    model.warnings.push_back("topic count " + std::to_string(K) + " exceeds the " +
                             std::to_string(distinct.size()) + " distinct tokens in the data");
  }

  Rng rng(config.seed);
  IntMatrix doc_topic = IntMatrix::Zero(static_cast<Eigen::Index>(documents.size()), K);
  model.token_topics.resize(documents.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    auto& z = model.token_topics[d];
    z.resize(documents[d].size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = static_cast<int>(uniform_below(rng, static_cast<std::size_t>(K)));
      doc_topic(static_cast<Eigen::Index>(d), z[i]) += 1;
      model.topic_word(z[i], documents[d][i]) += 1;
      model.topic_totals(z[i]) += 1;
    }
  }

  const double alpha = model.alpha;
  const double beta = model.beta;
  const double vb = beta * static_cast<double>(V);
  Vector weights(K);
  for (int it = 0; it < config.iterations; ++it) {
    for (std::size_t d = 0; d < documents.size(); ++d) {
      const auto row = static_cast<Eigen::Index>(d);
      auto& z = model.token_topics[d];
      for (std::size_t i = 0; i < z.size(); ++i) {
        const int w = documents[d][i];
        const int old = z[i];
        doc_topic(row, old) -= 1;
        model.topic_word(old, w) -= 1;
        model.topic_totals(old) -= 1;
        for (int k = 0; k < K; ++k) {
          weights(k) = (static_cast<double>(doc_topic(row, k)) + alpha) *
                       (static_cast<double>(model.topic_word(k, w)) + beta) /
                       (static_cast<double>(model.topic_totals(k)) + vb);
        }
        const int fresh = static_cast<int>(sample_categorical(weights, rng));
        z[i] = fresh;
        doc_topic(row, fresh) += 1;
        model.topic_word(fresh, w) += 1;
        model.topic_totals(fresh) += 1;
      }
    }
  }
  model.vocabulary = std::move(vocabulary);
  return model;
}

TopicModel train_topic_model(const Corpus& corpus, Vocabulary vocabulary,
                             const TopicModelConfig& config) {
  std::vector<std::vector<int>> docs;
  for (const auto& text : scammer_texts(corpus)) docs.push_back(vocabulary.encode(text));
  return train_topic_model(docs, std::move(vocabulary), config);
}

namespace {

Vector infer_with(const Matrix& phi, double alpha, std::span<const int> tokens) {
  const auto K = phi.rows();
  Vector theta = Vector::Constant(K, 1.0 / static_cast<double>(K));
  if (tokens.empty()) return theta;
  const double denom = static_cast<double>(tokens.size()) + static_cast<double>(K) * alpha;
  for (int it = 0; it < 500; ++it) {
    Vector acc = Vector::Constant(K, alpha);
    for (int w : tokens) {
      const Vector r = phi.col(w).cwiseProduct(theta);
      acc += r / r.sum();
    }
    const Vector next = acc / denom;
    const double change = (next - theta).cwiseAbs().sum();
    theta = next;
    if (change < 1e-12) break;
  }
  return theta / theta.sum();
}

TopicAssignment assign_with(const TopicModel& model, const Matrix& phi, std::string_view text) {
  TopicAssignment a;
  const auto ids = model.vocabulary.encode(text);
  a.oov = ids.empty();
  a.distribution = infer_with(phi, model.alpha, ids);
  a.top_topic = a.oov ? 0 : static_cast<int>(argmax_lowest(a.distribution));
  return a;
}

}  // namespace

Vector infer_distribution(const TopicModel& model, std::span<const int> tokens) {
  return infer_with(model.word_distributions(), model.alpha, tokens);
}

TopicAssignment infer_assignment(const TopicModel& model, std::string_view text) {
  return assign_with(model, model.word_distributions(), text);
}

std::vector<TopicAssignment> assign_corpus(const TopicModel& model, const Corpus& corpus,
                                           int workers) {
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    const auto& utts = corpus.transcripts[t].utterances;
    for (std::size_t i = 0; i < utts.size(); ++i) {
      if (utts[i].role == Role::Scammer) keys.emplace_back(t, i);
    }
  }
  const Matrix phi = model.word_distributions();
  std::vector<TopicAssignment> out(keys.size());
  parallel_for(keys.size(), workers, [&](std::size_t k) {
    const auto& t = corpus.transcripts[keys[k].first];
    out[k] = assign_with(model, phi, t.utterances[keys[k].second].text);
    out[k].transcript_id = t.id;
    out[k].utterance_index = static_cast<int>(keys[k].second);
  });
  return out;
}

Corpus apply_assignments(Corpus corpus, const std::vector<TopicAssignment>& assignments) {
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_id[corpus.transcripts[i].id] = i;
  for (const auto& a : assignments) {
    auto it = by_id.find(a.transcript_id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::Validation, "assignment for unknown transcript '" + a.transcript_id + "'");
    }
    auto& utts = corpus.transcripts[it->second].utterances;
    if (a.utterance_index < 0 || static_cast<std::size_t>(a.utterance_index) >= utts.size()) {
      throw Error(ErrorKind::Validation, "assignment for transcript '" + a.transcript_id +
                                             "' names missing utterance " +
                                             std::to_string(a.utterance_index));
    }
    utts[static_cast<std::size_t>(a.utterance_index)].topic = a.top_topic;
  }
  for (const auto& t : corpus.transcripts) {
    for (std::size_t i = 0; i < t.utterances.size(); ++i) {
      if (t.utterances[i].role == Role::Scammer && !t.utterances[i].topic) {
        throw Error(ErrorKind::MissingInput, "transcript '" + t.id + "' utterance " +
                                                 std::to_string(i) + " has no topic assignment");
      }
    }
  }
  return corpus;
}

void write_assignments(std::ostream& out, const std::vector<TopicAssignment>& assignments) {
  for (const auto& a : assignments) {
    Json j;
    j["transcript_id"] = a.transcript_id;
    j["utterance_index"] = a.utterance_index;
    j["distribution"] = std::vector<double>(a.distribution.data(),
                                            a.distribution.data() + a.distribution.size());
    j["top_topic"] = a.top_topic;
    if (a.oov) j["oov"] = true;
    out << j.dump() << '\n';
  }
}

std::vector<TopicAssignment> read_assignments(std::istream& in) {
  std::vector<TopicAssignment> out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<Eigen::Index> width;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = "assignments line " + std::to_string(line_no) + ": ";
    TopicAssignment a;
    try {
      const Json j = Json::parse(line);
      a.transcript_id = j.at("transcript_id").get<std::string>();
      a.utterance_index = j.at("utterance_index").get<int>();
      const auto dist = j.at("distribution").get<std::vector<double>>();
      a.distribution = Eigen::Map<const Vector>(dist.data(), static_cast<Eigen::Index>(dist.size()));
      a.top_topic = j.at("top_topic").get<int>();
      a.oov = j.value("oov", false);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, at + e.what());
    }
    if (a.distribution.size() == 0) throw Error(ErrorKind::Validation, at + "empty distribution");
    if (width && *width != a.distribution.size()) {
      throw Error(ErrorKind::Validation, at + "distribution length differs from earlier records");
    }
    width = a.distribution.size();
    if ((a.distribution.array() < 0).any() || std::abs(a.distribution.sum() - 1.0) > 1e-6) {
      throw Error(ErrorKind::Validation, at + "distribution is not a simplex");
    }
    if (!a.oov && a.top_topic != static_cast<int>(argmax_lowest(a.distribution))) {
      throw Error(ErrorKind::Validation, at + "top_topic is not the distribution's argmax");
    }
    if (a.top_topic < 0 || a.top_topic >= a.distribution.size()) {
      throw Error(ErrorKind::Validation, at + "top_topic out of range");
    }
    out.push_back(std::move(a));
  }
  return out;
}

void save_topic_model(const std::string& path, const TopicModel& model) {
  Json j;
  j["format"] = "lda-gibbs";
  j["version"] = 1;
  j["topics"] = model.n_topics;
  j["alpha"] = model.alpha;
  j["beta"] = model.beta;
  j["iterations"] = model.iterations;
  j["seed"] = model.seed;
  j["vocabulary"] = model.vocabulary.tokens();
  std::vector<std::int64_t> df;
  for (std::size_t i = 0; i < model.vocabulary.size(); ++i) df.push_back(model.vocabulary.doc_freq(i));
  j["doc_freq"] = df;
  Json rows = Json::array();
  for (Eigen::Index k = 0; k < model.topic_word.rows(); ++k) {
    std::vector<std::int64_t> row(model.topic_word.cols());
    for (Eigen::Index w = 0; w < model.topic_word.cols(); ++w) row[w] = model.topic_word(k, w);
    rows.push_back(row);
  }
  j["topic_word"] = rows;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::MissingInput, "cannot write '" + path + "'");
  out << j.dump() << '\n';
}

TopicModel load_topic_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot read topic model '" + path + "'");
  TopicModel model;
  try {
    const Json j = Json::parse(in);
    if (j.at("format") != "lda-gibbs" || j.at("version") != 1) {
      throw Error(ErrorKind::Parse, "unsupported topic model format");
    }
    model.n_topics = j.at("topics").get<int>();
    model.alpha = j.at("alpha").get<double>();
    model.beta = j.at("beta").get<double>();
    model.iterations = j.at("iterations").get<int>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>(),
                                  j.at("doc_freq").get<std::vector<std::int64_t>>());
    const auto& rows = j.at("topic_word");
    const auto V = static_cast<Eigen::Index>(model.vocabulary.size());
    if (static_cast<int>(rows.size()) != model.n_topics) {
      throw Error(ErrorKind::Parse, "topic_word row count differs from topic count");
    }
    model.topic_word.resize(model.n_topics, V);
    for (int k = 0; k < model.n_topics; ++k) {
      const auto row = rows[static_cast<std::size_t>(k)].get<std::vector<std::int64_t>>();
      if (static_cast<Eigen::Index>(row.size()) != V) {
        throw Error(ErrorKind::Parse, "topic_word row length differs from vocabulary size");
      }
      for (Eigen::Index w = 0; w < V; ++w) model.topic_word(k, w) = row[static_cast<std::size_t>(w)];
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "topic model '" + path + "': " + e.what());
  }
  model.topic_totals = model.topic_word.rowwise().sum();
  return model;
}

double npmi(std::int64_t df_i, std::int64_t df_j, std::int64_t df_ij, std::int64_t n_docs) {
  if (df_ij <= 0) return -1.0;
  if (df_ij >= n_docs) return 1.0;
  const double n = static_cast<double>(n_docs);
  const double p_i = df_i / n;
  const double p_j = df_j / n;
  const double p_ij = df_ij / n + 1e-12;
  const double value = std::log(p_ij / (p_i * p_j)) / -std::log(p_ij);
  return std::clamp(value, -1.0, 1.0);
}

CoherenceReport coherence_npmi(const TopicModel& model,
                               const std::vector<std::vector<int>>& documents, int top_n) {
  if (top_n < 2 || static_cast<std::size_t>(top_n) > model.vocabulary.size()) {
    throw Error(ErrorKind::Domain, "top_n must lie in [2, vocabulary size]");
  }
  std::vector<std::vector<int>> sets;
  for (const auto& d : documents) {
    auto s = d;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sets.push_back(std::move(s));
  }
  const auto n_docs = static_cast<std::int64_t>(sets.size());
  if (n_docs == 0) throw Error(ErrorKind::Domain, "no documents for coherence");
  auto contains = [](const std::vector<int>& s, int w) {
    return std::binary_search(s.begin(), s.end(), w);
  };
  CoherenceReport report;
  for (int k = 0; k < model.n_topics; ++k) {
    const auto top = model.top_words(k, top_n);
    std::vector<std::int64_t> df(top.size(), 0);
    std::vector<std::vector<std::int64_t>> co(top.size(), std::vector<std::int64_t>(top.size(), 0));
    for (const auto& s : sets) {
      std::vector<std::size_t> present;
      for (std::size_t a = 0; a < top.size(); ++a) {
        if (contains(s, top[a])) present.push_back(a);
      }
      for (std::size_t a : present) ++df[a];
      for (std::size_t x = 0; x < present.size(); ++x) {
        for (std::size_t y = x + 1; y < present.size(); ++y) ++co[present[x]][present[y]];
      }
    }
    double sum = 0;
    int pairs = 0;
    for (std::size_t a = 0; a < top.size(); ++a) {
      for (std::size_t b = a + 1; b < top.size(); ++b) {
        sum += npmi(df[a], df[b], co[a][b], n_docs);
        ++pairs;
      }
    }
    report.per_topic.push_back(sum / pairs);
  }
  report.mean = std::accumulate(report.per_topic.begin(), report.per_topic.end(), 0.0) /
                static_cast<double>(report.per_topic.size());
  return report;
}

double rank_biased_overlap(std::span<const int> a, std::span<const int> b, double p) {
  if (!(p > 0 && p < 1)) throw Error(ErrorKind::Config, "RBO persistence must lie in (0, 1)");
  const std::size_t k = std::min(a.size(), b.size());
  if (k == 0) return 0.0;
  std::set<int> seen_a, seen_b;
  double overlap = 0;
  double sum = 0;
  double weight = 1;
  for (std::size_t d = 1; d <= k; ++d) {
    const int x = a[d - 1];
    const int y = b[d - 1];
    if (x == y) {
      overlap += 1;
    } else {
      if (seen_b.count(x)) overlap += 1;
      if (seen_a.count(y)) overlap += 1;
    }
    seen_a.insert(x);
    seen_b.insert(y);
    weight *= p;
    sum += overlap / static_cast<double>(d) * weight;
  }
  return overlap / static_cast<double>(k) * weight + (1 - p) / p * sum;
}

double diversity_irbo(const std::vector<std::vector<int>>& rankings, double p) {
  if (rankings.size() < 2) throw Error(ErrorKind::Domain, "diversity needs at least two topics");
  double total = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    for (std::size_t j = i + 1; j < rankings.size(); ++j) {
      total += rank_biased_overlap(rankings[i], rankings[j], p);
      ++pairs;
    }
  }
  return 1.0 - total / static_cast<double>(pairs);
}

double diversity_irbo(const TopicModel& model, int top_n, double p) {
  std::vector<std::vector<int>> rankings;
  for (int k = 0; k < model.n_topics; ++k) rankings.push_back(model.top_words(k, top_n));
  return diversity_irbo(rankings, p);
}

TopicFrequencyTable topic_frequency_table(const std::vector<TopicAssignment>& assignments,
                                          const Corpus& corpus) {
  TopicFrequencyTable table;
  if (assignments.empty()) return table;
  const auto K = assignments.front().distribution.size();
  std::map<std::string, std::string> type_of;
  for (const auto& t : corpus.transcripts) type_of[t.id] = t.scam_type;
  table.scam_types = corpus.scam_types();
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < table.scam_types.size(); ++i) row_of[table.scam_types[i]] = i;
  table.frequency = Matrix::Zero(static_cast<Eigen::Index>(table.scam_types.size()), K);
  table.utterance_counts.assign(table.scam_types.size(), 0);
  for (const auto& a : assignments) {
    auto it = type_of.find(a.transcript_id);
    if (it == type_of.end()) {
      throw Error(ErrorKind::Validation, "assignment for unknown transcript '" + a.transcript_id + "'");
    }
    if (a.distribution.size() != K) {
      throw Error(ErrorKind::Validation, "assignments disagree on the topic count");
    }
    const std::size_t row = row_of.at(it->second);
    table.frequency.row(static_cast<Eigen::Index>(row)) += a.distribution.transpose();
    ++table.utterance_counts[row];
  }
  for (std::size_t r = 0; r < table.scam_types.size(); ++r) {
    if (table.utterance_counts[r] > 0) {
      table.frequency.row(static_cast<Eigen::Index>(r)) /=
          static_cast<double>(table.utterance_counts[r]);
    }
  }
  table.average = 1.0 / static_cast<double>(K);
  table.threshold = 1.5 * table.average;
  return table;
}

void write_topic_frequency_csv(std::ostream& out, const TopicFrequencyTable& table) {
  std::vector<std::string> header{"topic"};
  for (const auto& t : table.scam_types) header.push_back(t);
  header.push_back("highlighted");
  csv::write_row(out, header);
  for (Eigen::Index k = 0; k < table.frequency.cols(); ++k) {
    std::vector<std::string> row{std::to_string(k)};
    std::string marks;
    for (std::size_t t = 0; t < table.scam_types.size(); ++t) {
      row.push_back(csv::number(table.frequency(static_cast<Eigen::Index>(t), k), 3));
      if (table.highlighted(t, static_cast<int>(k))) {
        if (!marks.empty()) marks += ';';
        marks += table.scam_types[t];
      }
    }
    row.push_back(marks);
    csv::write_row(out, row);
  }
}

void write_topic_summary_csv(std::ostream& out, const TopicModel& model,
                             const std::vector<TopicAssignment>& assignments, const Corpus& corpus,
                             int top_n, int samples) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus.transcripts[i].id] = i;
  csv::write_row(out, {"topic", "top_words", "sample_utterances"});
  for (int k = 0; k < model.n_topics; ++k) {
    std::string words;
    for (int w : model.top_words(k, top_n)) {
      if (!words.empty()) words += ' ';
      words += model.vocabulary.token_at(static_cast<std::size_t>(w));
    }
    std::vector<std::size_t> order(assignments.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return assignments[a].distribution(k) > assignments[b].distribution(k);
    });
    std::string texts;
    for (std::size_t s = 0; s < order.size() && s < static_cast<std::size_t>(samples); ++s) {
      const auto& a = assignments[order[s]];
      auto it = index.find(a.transcript_id);
      if (it == index.end()) continue;
      if (!texts.empty()) texts += " | ";
      texts += corpus.transcripts[it->second].utterances[static_cast<std::size_t>(a.utterance_index)].text;
    }
    csv::write_row(out, {std::to_string(k), words, texts});
  }
}

}  // namespace scamscript
