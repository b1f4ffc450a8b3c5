#include "scamscript/typing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "scamscript/csv.hpp"
#include "scamscript/parallel.hpp"

namespace scamscript {

namespace {

std::vector<std::string> first_scammer_texts(const Transcript& t, std::optional<int> limit) {
  std::vector<std::string> texts;
  for (const auto& u : t.utterances) {
    if (limit && static_cast<int>(texts.size()) >= *limit) break;
    if (u.role == Role::Scammer) texts.push_back(u.text);
  }
  return texts;
}

}  // namespace

double TypeClassifier::text_log_odds(std::string_view text) const {
  double score = 0.0;
  for (int w : vocabulary.encode(text)) score += log_prob(0, w) - log_prob(1, w);
  return score;
}

TypeClassifier train_type_classifier(const Corpus& corpus, const std::string& scam_type,
                                     double smoothing, std::optional<int> max_utterances) {
  if (!(smoothing > 0)) throw Error(ErrorKind::Config, "smoothing must be > 0");
  std::size_t positives = 0;
  for (const auto& t : corpus.transcripts) positives += t.scam_type == scam_type;
  const std::size_t negatives = corpus.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorKind::Domain, "type classifier for '" + scam_type +
                                       "' needs transcripts of both the type and other types");
  }

  std::vector<std::vector<std::string>> texts;
  std::vector<std::string> flat;
  for (const auto& t : corpus.transcripts) {
    texts.push_back(first_scammer_texts(t, max_utterances));
    for (const auto& s : texts.back()) flat.push_back(s);
  }
  TypeClassifier c;
  c.target = scam_type;
  c.smoothing = smoothing;
  c.vocabulary = build_vocabulary(flat, 1);
  const auto V = static_cast<Eigen::Index>(c.vocabulary.size());
  Matrix counts = Matrix::Constant(2, V, smoothing);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Eigen::Index cls = corpus.transcripts[i].scam_type == scam_type ? 0 : 1;
    for (const auto& s : texts[i]) {
      for (int w : c.vocabulary.encode(s)) counts(cls, w) += 1;
    }
  }
  c.log_prob.resize(2, V);
  for (Eigen::Index r = 0; r < 2; ++r) {
    c.log_prob.row(r) = (counts.row(r) / counts.row(r).sum()).array().log();
  }
  const double total = static_cast<double>(corpus.size());
  c.log_prior_target = std::log(static_cast<double>(positives) / total);
  c.log_prior_rest = std::log(static_cast<double>(negatives) / total);
  return c;
}

TypePrediction predict_type(const TypeClassifier& classifier,
                            const std::vector<std::string>& scammer_utterances, int k) {
  if (k < 1) throw Error(ErrorKind::Domain, "k must be >= 1");
  TypePrediction p;
  p.log_odds = classifier.prior_log_odds();
  const std::size_t used = std::min(scammer_utterances.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < used; ++i) p.log_odds += classifier.text_log_odds(scammer_utterances[i]);
  p.positive = p.log_odds > 0.0;
  return p;
}

TypePrediction predict_type(const TypeClassifier& classifier, const Transcript& transcript, int k) {
  if (transcript.scammer_count() == 0) {
    throw Error(ErrorKind::Validation, "transcript '" + transcript.id + "' has no scammer utterances");
  }
  return predict_type(classifier, first_scammer_texts(transcript, std::nullopt), k);
}

F1Row binary_scores(const std::vector<bool>& truth, const std::vector<bool>& predicted) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    tp += truth[i] && predicted[i];
    fp += !truth[i] && predicted[i];
    fn += truth[i] && !predicted[i];
  }
  F1Row r;
  r.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

ProgressiveResult evaluate_progressive(const Corpus& corpus, const ProgressiveConfig& config) {
  if (config.k_max < 1) throw Error(ErrorKind::Config, "k_max must be >= 1");
  std::vector<std::string> types = config.types.empty() ? corpus.scam_types() : config.types;
  if (corpus.scam_types().size() < 2) {
    throw Error(ErrorKind::Domain, "type prediction needs at least two scam types");
  }
  struct Job {
    std::string type;
    int fold;
    std::vector<std::string> held_ids;
  };
  std::vector<Job> jobs;
  std::vector<int> fold_count;
  for (const auto& type : types) {
    const auto it = config.fold_overrides.find(type);
    const int k = it == config.fold_overrides.end() ? config.folds : it->second;
    std::size_t members = 0;
    for (const auto& t : corpus.transcripts) members += t.scam_type == type;
    if (members < static_cast<std::size_t>(k)) {
      throw Error(ErrorKind::Domain, "scam type '" + type + "' has " + std::to_string(members) +
                                         " transcripts, too few for " + std::to_string(k) +
                                         " folds");
    }
    const auto folds = stratified_folds(corpus, k, derive_seed(config.seed, fnv1a64(type)), true);
    for (int f = 0; f < k; ++f) jobs.push_back({type, f, folds[static_cast<std::size_t>(f)]});
  }

  std::vector<std::vector<F1Row>> job_rows(jobs.size());
  parallel_for(jobs.size(), config.workers, [&](std::size_t j) {
    const Job& job = jobs[j];
    const std::set<std::string> held(job.held_ids.begin(), job.held_ids.end());
    Corpus train, test;
    for (const auto& t : corpus.transcripts) (held.count(t.id) ? test : train).transcripts.push_back(t);
    std::vector<bool> truth;
    for (const auto& t : test.transcripts) truth.push_back(t.scam_type == job.type);
    for (int k = 1; k <= config.k_max; ++k) {
      const auto clf = train_type_classifier(train, job.type, config.smoothing, k);
      std::vector<bool> predicted;
      for (const auto& t : test.transcripts) predicted.push_back(predict_type(clf, t, k).positive);
      F1Row row = binary_scores(truth, predicted);
      row.scam_type = job.type;
      row.k = k;
      row.fold = job.fold;
      job_rows[j].push_back(row);
    }
  });

  ProgressiveResult result;
  for (const auto& type : types) {
    std::vector<F1Row> rows;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].type == type) rows.insert(rows.end(), job_rows[j].begin(), job_rows[j].end());
    }
    std::stable_sort(rows.begin(), rows.end(), [](const F1Row& a, const F1Row& b) {
      return a.k != b.k ? a.k < b.k : a.fold < b.fold;
    });
    std::vector<double> sums(static_cast<std::size_t>(config.k_max), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(config.k_max), 0);
    for (const auto& r : rows) {
      sums[static_cast<std::size_t>(r.k - 1)] += r.f1;
      counts[static_cast<std::size_t>(r.k - 1)] += 1;
    }
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] /= counts[i];
    result.mean_f1[type] = sums;
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  return result;
}

void write_f1_csv(std::ostream& out, const ProgressiveResult& result) {
  csv::write_row(out, {"type", "k", "fold", "precision", "recall", "f1"});
  for (const auto& r : result.rows) {
    csv::write_row(out, {r.scam_type, std::to_string(r.k), std::to_string(r.fold),
                         csv::number(r.precision, 4), csv::number(r.recall, 4),
                         csv::number(r.f1, 4)});
  }
}

void write_f1_mean_csv(std::ostream& out, const ProgressiveResult& result) {
  csv::write_row(out, {"type", "k", "mean_f1"});
  for (const auto& [type, curve] : result.mean_f1) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
      csv::write_row(out, {type, std::to_string(i + 1), csv::number(curve[i], 4)});
    }
  }
}

}  // namespace scamscript
