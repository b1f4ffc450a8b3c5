#include "scamscript/staging.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

#include "scamscript/csv.hpp"
#include "scamscript/decode.hpp"
#include "scamscript/parallel.hpp"
#include "scamscript/random.hpp"

namespace scamscript {

std::vector<std::vector<int>> relaxed_target_sets(std::span<const int> states) {
  // Maximal runs of equal states; the nearest differing neighbours of any
  // position are the states of the adjacent runs.
  std::vector<std::size_t> run_of(states.size());
  std::vector<int> run_state;
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (t == 0 || states[t] != states[t - 1]) run_state.push_back(states[t]);
    run_of[t] = run_state.size() - 1;
  }
  std::vector<std::vector<int>> sets(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    auto& s = sets[t];
    s.push_back(states[t]);
    const std::size_t r = run_of[t];
    if (r > 0) s.push_back(run_state[r - 1]);
    if (r + 1 < run_state.size()) s.push_back(run_state[r + 1]);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return sets;
}

StagePrediction predict_stage(const Hmm& model, std::span<const int> prefix) {
  if (prefix.empty()) throw Error(ErrorKind::Domain, "empty utterance prefix");
  ForwardFilter<double> filter(model);
  for (int s : prefix) filter.update(s);
  StagePrediction p;
  p.posterior = filter.posterior();
  p.state = static_cast<int>(argmax_lowest(p.posterior));
  return p;
}

namespace {

StateSequence filter_states(const Hmm& model, std::span<const int> symbols) {
  ForwardFilter<double> filter(model);
  StateSequence out;
  out.reserve(symbols.size());
  for (int s : symbols) out.push_back(static_cast<int>(argmax_lowest(filter.update(s))));
  return out;
}

}  // namespace

StagePredictorFactory filter_predictor(const Hmm& model) {
  auto shared = std::make_shared<const Hmm>(model);
  return [shared](const std::vector<SymbolSequence>&, const std::vector<StateSequence>&) {
    return StagePredictor([shared](std::span<const int> symbols) {
      return filter_states(*shared, symbols);
    });
  };
}

StagePredictorFactory supervised_filter_predictor(int n_states, int n_symbols, double smoothing) {
  if (n_states < 1 || n_symbols < 1 || !(smoothing > 0)) {
    throw Error(ErrorKind::Config, "supervised predictor needs positive sizes and smoothing");
  }
  return [=](const std::vector<SymbolSequence>& symbols, const std::vector<StateSequence>& gold) {
    auto model = std::make_shared<Hmm>();
    model->start = Vector::Constant(n_states, smoothing);
    model->transition = Matrix::Constant(n_states, n_states, smoothing);
    model->emission = Matrix::Constant(n_states, n_symbols, smoothing);
    for (std::size_t k = 0; k < symbols.size(); ++k) {
      const auto& x = symbols[k];
      const auto& z = gold[k];
      for (std::size_t t = 0; t < x.size(); ++t) {
        if (z[t] < 0 || z[t] >= n_states || x[t] < 0 || x[t] >= n_symbols) {
          throw Error(ErrorKind::Domain, "training label outside the predictor's range");
        }
        if (t == 0) model->start(z[t]) += 1;
        else model->transition(z[t - 1], z[t]) += 1;
        model->emission(z[t], x[t]) += 1;
      }
    }
    model->start /= model->start.sum();
    for (Eigen::Index i = 0; i < n_states; ++i) {
      model->transition.row(i) /= model->transition.row(i).sum();
      model->emission.row(i) /= model->emission.row(i).sum();
    }
    return StagePredictor([model](std::span<const int> x) { return filter_states(*model, x); });
  };
}

StagePredictorFactory oracle_predictor(const Hmm& model) {
  auto shared = std::make_shared<const Hmm>(model);
  return [shared](const std::vector<SymbolSequence>&, const std::vector<StateSequence>&) {
    return StagePredictor([shared](std::span<const int> symbols) {
      return viterbi(*shared, symbols).path;
    });
  };
}

StagePredictorFactory random_predictor(int n_states, std::uint64_t seed) {
  if (n_states < 1) throw Error(ErrorKind::Config, "n_states must be >= 1");
  return [=](const std::vector<SymbolSequence>&, const std::vector<StateSequence>&) {
    return StagePredictor([=](std::span<const int> symbols) {
      // Seeded from the sequence content so results do not depend on
      // evaluation order.
      std::string key(reinterpret_cast<const char*>(symbols.data()), symbols.size_bytes());
      Rng rng(derive_seed(seed, fnv1a64(key)));
      StateSequence out(symbols.size());
      for (auto& s : out) s = static_cast<int>(uniform_below(rng, static_cast<std::size_t>(n_states)));
      return out;
    });
  };
}

StageEvaluation stage_row(int n_states, double strict_accuracy, double relaxed_accuracy,
                          double relaxed_baseline) {
  if (n_states < 1) throw Error(ErrorKind::Domain, "n_states must be >= 1");
  StageEvaluation row;
  row.n_states = n_states;
  row.strict_accuracy = strict_accuracy;
  row.relaxed_accuracy = relaxed_accuracy;
  row.strict_baseline = 1.0 / n_states;
  row.relaxed_baseline = relaxed_baseline;
  row.strict_margin = row.strict_accuracy - row.strict_baseline;
  row.relaxed_margin = row.relaxed_accuracy - row.relaxed_baseline;
  return row;
}

StageEvaluation evaluate_staging(const Corpus& corpus, const Hmm& model,
                                 const StagingConfig& config,
                                 const StagePredictorFactory& predictor) {
  const auto types = corpus.scam_types();
  if (types.size() > 1) {
    throw Error(ErrorKind::Domain, "stage evaluation expects transcripts of a single scam type");
  }
  if (corpus.size() < static_cast<std::size_t>(config.folds)) {
    throw Error(ErrorKind::Domain, "fewer transcripts (" + std::to_string(corpus.size()) +
                                       ") than folds (" + std::to_string(config.folds) + ")");
  }
  const auto symbols = scammer_sequences(corpus);
  std::vector<StateSequence> gold;
  for (const auto& s : symbols) gold.push_back(viterbi(model, std::span<const int>(s)).path);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus.transcripts[i].id] = i;
  const auto fold_ids = stratified_folds(corpus, config.folds, config.seed, false);
  const auto n = static_cast<int>(model.n_states());

  std::vector<FoldResult> folds(fold_ids.size());
  parallel_for(fold_ids.size(), config.workers, [&](std::size_t f) {
    std::vector<bool> held(corpus.size(), false);
    for (const auto& id : fold_ids[f]) held[index.at(id)] = true;
    std::vector<SymbolSequence> train_x;
    std::vector<StateSequence> train_z;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (!held[i]) {
        train_x.push_back(symbols[i]);
        train_z.push_back(gold[i]);
      }
    }
    const StagePredictor predict = predictor(train_x, train_z);
    FoldResult& r = folds[f];
    std::size_t strict = 0, relaxed = 0, set_sizes = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (!held[i]) continue;
      ++r.transcripts;
      const auto pred = predict(std::span<const int>(symbols[i]));
      if (pred.size() != gold[i].size()) {
        throw Error(ErrorKind::Domain, "predictor returned a sequence of the wrong length");
      }
      const auto sets = relaxed_target_sets(std::span<const int>(gold[i]));
      for (std::size_t t = 0; t < pred.size(); ++t) {
        ++r.utterances;
        strict += pred[t] == gold[i][t];
        relaxed += std::binary_search(sets[t].begin(), sets[t].end(), pred[t]);
        set_sizes += sets[t].size();
      }
    }
    if (r.utterances > 0) {
      const double u = static_cast<double>(r.utterances);
      r.strict_accuracy = static_cast<double>(strict) / u;
      r.relaxed_accuracy = static_cast<double>(relaxed) / u;
      r.relaxed_baseline = static_cast<double>(set_sizes) / u / n;
    }
  });

  double strict = 0, relaxed = 0, baseline = 0;
  for (const auto& r : folds) {
    strict += r.strict_accuracy;
    relaxed += r.relaxed_accuracy;
    baseline += r.relaxed_baseline;
  }
  const double k = static_cast<double>(folds.size());
  StageEvaluation eval = stage_row(n, strict / k, relaxed / k, baseline / k);
  eval.scam_type = types.empty() ? std::string{} : types.front();
  eval.folds = std::move(folds);
  return eval;
}

StageEvaluation evaluate_staging(const Corpus& corpus, const Hmm& model,
                                 const StagingConfig& config) {
  return evaluate_staging(corpus, model, config, filter_predictor(model));
}

namespace {

std::vector<std::string> stage_fields(const StageEvaluation& r) {
  auto signed_number = [](double v) {
    std::string s = csv::number(v, 2);
    return (v >= 0 && s[0] != '-') ? "+" + s : s;
  };
  return {r.scam_type, std::to_string(r.n_states), csv::number(r.relaxed_accuracy, 2),
          signed_number(r.relaxed_margin), csv::number(r.strict_accuracy, 2),
          signed_number(r.strict_margin)};
}

}  // namespace

void write_stage_csv(std::ostream& out, const std::vector<StageEvaluation>& rows) {
  csv::write_row(out, {"type", "Stages", "Relaxed", "MarginRelaxed", "Strict", "MarginStrict"});
  for (const auto& r : rows) csv::write_row(out, stage_fields(r));
}

std::string stage_table_text(const std::vector<StageEvaluation>& rows) {
  std::vector<std::vector<std::string>> table{
      {"", "Stages", "Relaxed", "Margin", "Strict", "Margin"}};
  for (const auto& r : rows) table.push_back(stage_fields(r));
  return csv::aligned(table);
}

}  // namespace scamscript
