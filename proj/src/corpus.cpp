#include "scamscript/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "scamscript/csv.hpp"
#include "scamscript/random.hpp"

namespace scamscript {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string where(const std::string& id, std::size_t utt) {
  return "transcript '" + id + "' utterance " + std::to_string(utt);
}

EmotionVector parse_emotions(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "\"emotions\" must be an object");
  EmotionVector e;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    auto it = j.find(std::string(kEmotionNames[i]));
    if (it == j.end() || !it->is_number()) {
      throw Error(ErrorKind::Parse,
                  "\"emotions\" lacks numeric \"" + std::string(kEmotionNames[i]) + "\"");
    }
    e.scores[i] = it->get<double>();
  }
  return e;
}

template <typename T>
T required(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::Parse, std::string("missing field \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Parse, std::string("field \"") + key + "\" has the wrong type");
  }
}

Utterance parse_utterance(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "utterance must be an object");
  Utterance u;
  u.role = parse_role(required<std::string>(j, "speaker"));
  u.start_s = required<double>(j, "start_s");
  u.end_s = required<double>(j, "end_s");
  u.text = required<std::string>(j, "text");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "speaker" || key == "start_s" || key == "end_s" || key == "text") continue;
    if (key == "emotions") {
      if (!it->is_null()) u.emotions = parse_emotions(*it);
    } else if (key == "topic") {
      if (!it->is_null()) u.topic = required<int>(j, "topic");
    } else if (key == "state") {
      if (!it->is_null()) u.state = required<int>(j, "state");
    } else {
      u.extra[key] = *it;
    }
  }
  return u;
}

Transcript parse_transcript(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "record must be a JSON object");
  Transcript t;
  t.id = required<std::string>(j, "id");
  t.scam_type = required<std::string>(j, "scam_type");
  auto utts = j.find("utterances");
  if (utts == j.end() || !utts->is_array()) {
    throw Error(ErrorKind::Parse, "missing array \"utterances\"");
  }
  for (const auto& u : *utts) t.utterances.push_back(parse_utterance(u));
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "id" || key == "scam_type" || key == "utterances") continue;
    if (key == "source_channel") {
      if (!it->is_null()) t.source_channel = required<std::string>(j, "source_channel");
    } else {
      t.extra[key] = *it;
    }
  }
  return t;
}

Json to_json(const Utterance& u) {
  Json j;
  j["speaker"] = std::string(to_string(u.role));
  j["start_s"] = u.start_s;
  j["end_s"] = u.end_s;
  j["text"] = u.text;
  if (u.emotions) {
    Json e;
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
      e[std::string(kEmotionNames[i])] = u.emotions->scores[i];
    }
    j["emotions"] = e;
  }
  if (u.topic) j["topic"] = *u.topic;
  if (u.state) j["state"] = *u.state;
  for (auto it = u.extra.begin(); it != u.extra.end(); ++it) j[it.key()] = *it;
  return j;
}

Json to_json(const Transcript& t) {
  Json j;
  j["id"] = t.id;
  j["scam_type"] = t.scam_type;
  if (t.source_channel) j["source_channel"] = *t.source_channel;
  Json utts = Json::array();
  for (const auto& u : t.utterances) utts.push_back(to_json(u));
  j["utterances"] = utts;
  for (auto it = t.extra.begin(); it != t.extra.end(); ++it) j[it.key()] = *it;
  return j;
}

}  // namespace

std::string_view to_string(Role role) {
  return role == Role::Scammer ? "scammer" : "baiter";
}

Role parse_role(std::string_view text) {
  if (text == "scammer") return Role::Scammer;
  if (text == "baiter") return Role::Baiter;
  throw Error(ErrorKind::Parse, "unknown speaker role '" + std::string(text) + "'");
}

double EmotionVector::sum() const {
  return std::accumulate(scores.begin(), scores.end(), 0.0);
}

void EmotionVector::validate(bool normalized) const {
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) {
      throw Error(ErrorKind::Validation,
                  "emotion score '" + std::string(kEmotionNames[i]) + "' outside [0,1]");
    }
  }
  if (normalized && std::abs(sum() - 1.0) > 1e-3) {
    throw Error(ErrorKind::Validation, "normalized emotion scores do not sum to 1");
  }
}

std::size_t Transcript::scammer_count() const {
  return static_cast<std::size_t>(std::count_if(
      utterances.begin(), utterances.end(), [](const Utterance& u) { return u.role == Role::Scammer; }));
}

const Transcript& Corpus::at(std::string_view id) const {
  for (const auto& t : transcripts) {
    if (t.id == id) return t;
  }
  throw Error(ErrorKind::MissingInput, "no transcript '" + std::string(id) + "'");
}

Corpus Corpus::of_type(std::string_view type) const {
  Corpus out;
  for (const auto& t : transcripts) {
    if (t.scam_type == type) out.transcripts.push_back(t);
  }
  return out;
}

std::vector<std::string> Corpus::scam_types() const {
  std::vector<std::string> types;
  for (const auto& t : transcripts) types.push_back(t.scam_type);
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  return types;
}

void validate(const Transcript& t, bool emotions_normalized) {
  if (t.id.empty()) throw Error(ErrorKind::Validation, "transcript with empty id");
  for (std::size_t i = 0; i < t.utterances.size(); ++i) {
    const Utterance& u = t.utterances[i];
    if (!(u.start_s >= 0.0)) {
      throw Error(ErrorKind::Validation, where(t.id, i) + ": start_s must be >= 0");
    }
    if (!(u.end_s >= u.start_s)) {
      throw Error(ErrorKind::Validation, where(t.id, i) + ": end_s < start_s");
    }
    if (blank(u.text)) {
      throw Error(ErrorKind::Validation, where(t.id, i) + ": empty text");
    }
    if (i > 0 && u.start_s < t.utterances[i - 1].start_s) {
      throw Error(ErrorKind::Validation, where(t.id, i) + ": start_s decreases");
    }
    if (u.emotions) {
      try {
        u.emotions->validate(emotions_normalized);
      } catch (const Error& e) {
        throw Error(ErrorKind::Validation, where(t.id, i) + ": " + e.what());
      }
    }
  }
  if (t.scammer_count() == 0) {
    throw Error(ErrorKind::Validation, "transcript '" + t.id + "' has no scammer utterances");
  }
}

Corpus parse_corpus(std::istream& in, const LoadOptions& options) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    Transcript t;
    try {
      t = parse_transcript(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (auto it = options.relabel.find(t.scam_type); it != options.relabel.end()) {
      t.scam_type = it->second;
    }
    validate(t, options.emotions_normalized);
    auto [pos, inserted] = first_line.emplace(t.id, line_no);
    if (!inserted) {
      throw Error(ErrorKind::Validation, "duplicate transcript id '" + t.id + "' on lines " +
                                             std::to_string(pos->second) + " and " +
                                             std::to_string(line_no));
    }
    corpus.transcripts.push_back(std::move(t));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot read corpus '" + path + "'");
  return parse_corpus(in, options);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& t : corpus.transcripts) out << to_json(t).dump() << '\n';
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::MissingInput, "cannot write '" + path + "'");
  write_corpus(out, corpus);
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c);
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

std::optional<double> RoleStats::word_rate() const {
  if (duration_s > 0.0) return static_cast<double>(words) / duration_s;
  return std::nullopt;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.begin() + n, 0.0) / n;
  const double my = std::accumulate(y.begin(), y.begin() + n, 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  std::map<std::string, TypeStats> by_type;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> pairs;
  std::vector<double> all_x, all_y;
  stats.total.scam_type = "Total";

  for (const auto& t : corpus.transcripts) {
    RoleStats scammer, baiter;
    for (const auto& u : t.utterances) {
      RoleStats& r = u.role == Role::Scammer ? scammer : baiter;
      r.duration_s += u.duration();
      r.words += static_cast<std::int64_t>(word_count(u.text));
    }
    TypeStats& ts = by_type[t.scam_type];
    ts.scam_type = t.scam_type;
    for (TypeStats* agg : {&ts, &stats.total}) {
      agg->call_count += 1;
      agg->scammer.duration_s += scammer.duration_s;
      agg->scammer.words += scammer.words;
      agg->baiter.duration_s += baiter.duration_s;
      agg->baiter.words += baiter.words;
    }
    CallRates call{t.id, t.scam_type, scammer.word_rate(), baiter.word_rate()};
    if (call.scammer_rate && call.baiter_rate) {
      pairs[t.scam_type].first.push_back(*call.scammer_rate);
      pairs[t.scam_type].second.push_back(*call.baiter_rate);
      all_x.push_back(*call.scammer_rate);
      all_y.push_back(*call.baiter_rate);
    }
    stats.calls.push_back(std::move(call));
  }
  for (auto& [type, ts] : by_type) {
    if (auto it = pairs.find(type); it != pairs.end()) {
      ts.rate_correlation = pearson(it->second.first, it->second.second);
    }
    stats.by_type.push_back(ts);
  }
  stats.total.rate_correlation = pearson(all_x, all_y);
  return stats;
}

void write_stats_csv(std::ostream& out, const CorpusStats& stats) {
  csv::write_row(out, {"scam_type", "calls", "total_duration_s", "scammer_duration_s",
                       "baiter_duration_s", "total_words", "scammer_words", "baiter_words",
                       "scammer_words_per_s", "baiter_words_per_s", "rate_correlation"});
  auto row = [&](const TypeStats& ts) {
    csv::write_row(out, {ts.scam_type, std::to_string(ts.call_count),
                         csv::number(ts.total_duration_s(), 3),
                         csv::number(ts.scammer.duration_s, 3),
                         csv::number(ts.baiter.duration_s, 3), std::to_string(ts.total_words()),
                         std::to_string(ts.scammer.words), std::to_string(ts.baiter.words),
                         csv::number(ts.scammer.word_rate(), 2),
                         csv::number(ts.baiter.word_rate(), 2),
                         csv::number(ts.rate_correlation, 4)});
  };
  for (const auto& ts : stats.by_type) row(ts);
  if (!stats.by_type.empty()) row(stats.total);
}

std::vector<std::vector<std::size_t>> index_folds(std::size_t count, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::Domain, "fold count must be >= 2");
  if (static_cast<std::size_t>(k) > count) {
    throw Error(ErrorKind::Domain, "fold count " + std::to_string(k) + " exceeds item count " +
                                       std::to_string(count));
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < count; ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::vector<std::string>> stratified_folds(const Corpus& corpus, int k,
                                                       std::uint64_t seed, bool stratify) {
  if (k < 2) throw Error(ErrorKind::Domain, "fold count must be >= 2");
  if (static_cast<std::size_t>(k) > corpus.size()) {
    throw Error(ErrorKind::Domain, "fold count " + std::to_string(k) +
                                       " exceeds transcript count " +
                                       std::to_string(corpus.size()));
  }
  std::map<std::string, std::vector<std::string>> strata;
  for (const auto& t : corpus.transcripts) {
    strata[stratify ? t.scam_type : std::string{}].push_back(t.id);
  }
  Rng rng(seed);
  std::vector<std::vector<std::string>> folds(k);
  std::size_t cursor = 0;
  for (auto& [name, ids] : strata) {
    std::sort(ids.begin(), ids.end());
    shuffle(ids, rng);
    for (const auto& id : ids) folds[cursor++ % k].push_back(id);
  }
  return folds;
}

}  // namespace scamscript
