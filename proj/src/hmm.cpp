#include "scamscript/hmm.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "scamscript/corpus.hpp"
#include "scamscript/csv.hpp"

namespace scamscript {

ModelSelectionReport select_n_states(const std::vector<SymbolSequence>& sequences,
                                     Eigen::Index n_symbols, const SelectionConfig& config) {
  if (config.candidates.empty()) throw Error(ErrorKind::Config, "no candidate state counts");
  for (int c : config.candidates) {
    if (c < 1) throw Error(ErrorKind::Config, "candidate state counts must be >= 1");
  }
  const std::size_t n_cand = config.candidates.size();
  if (config.choose_rank < 1 || static_cast<std::size_t>(config.choose_rank) > n_cand) {
    throw Error(ErrorKind::Config, "choose_rank must lie in [1, number of candidates]");
  }
  std::vector<SymbolSequence> data;
  for (const auto& s : sequences) {
    if (!s.empty()) data.push_back(s);
  }
  if (data.size() < static_cast<std::size_t>(std::max(2, config.folds))) {
    throw Error(ErrorKind::Domain, "need at least " + std::to_string(config.folds) +
                                       " non-empty sequences for " +
                                       std::to_string(config.folds) + "-fold selection");
  }
  const auto folds = index_folds(data.size(), config.folds, derive_seed(config.em.seed, 0xf01d));

  ModelSelectionReport report;
  report.candidates = config.candidates;
  report.heldout_ll.resize(static_cast<Eigen::Index>(n_cand), config.folds);
  report.train_ll.resize(static_cast<Eigen::Index>(n_cand), config.folds);

  const std::size_t jobs = n_cand * static_cast<std::size_t>(config.folds);
  parallel_for(jobs, config.em.workers, [&](std::size_t job) {
    const std::size_t c = job / config.folds;
    const std::size_t f = job % config.folds;
    std::vector<SymbolSequence> train, held;
    std::vector<bool> is_held(data.size(), false);
    for (std::size_t i : folds[f]) is_held[i] = true;
    for (std::size_t i = 0; i < data.size(); ++i) (is_held[i] ? held : train).push_back(data[i]);
    BaumWelchConfig em = config.em;
    em.workers = 1;
    em.seed = derive_seed(config.em.seed, job + 1);
    const Hmm model = baum_welch(train, config.candidates[c], n_symbols, em);
    report.heldout_ll(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(f)) =
        total_log_likelihood(model, held);
    report.train_ll(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(f)) =
        model.train_log.log_likelihood;
  });

  report.mean_heldout_ll = report.heldout_ll.rowwise().mean();
  report.ranking.resize(n_cand);
  std::iota(report.ranking.begin(), report.ranking.end(), 0);
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
    return report.mean_heldout_ll(static_cast<Eigen::Index>(a)) >
           report.mean_heldout_ll(static_cast<Eigen::Index>(b));
  });
  report.chosen_rank = config.choose_rank;
  report.chosen = config.candidates[report.ranking[static_cast<std::size_t>(config.choose_rank - 1)]];
  return report;
}

double transition_threshold(const Matrix& transition) {
  const double n = static_cast<double>(transition.rows());
  if (transition.rows() < 2) throw Error(ErrorKind::Domain, "threshold needs at least two states");
  return (1.0 - transition.trace() / n) / (n - 1.0);
}

TransitionGraph transition_graph(const Hmm& model, const std::vector<std::string>& labels,
                                 std::optional<double> min_prob) {
  const Eigen::Index n = model.n_states();
  TransitionGraph graph;
  graph.labels.assign(static_cast<std::size_t>(n), std::string{});
  for (std::size_t i = 0; i < labels.size() && i < graph.labels.size(); ++i) {
    graph.labels[i] = labels[i];
  }
  if (min_prob) {
    graph.threshold = *min_prob;
  } else if (n >= 2) {
    graph.threshold = transition_threshold(model.transition);
  }
  if (!graph.threshold) return graph;
  const double cut = *graph.threshold + 1e-12;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && model.transition(i, j) > cut) {
        graph.edges.push_back({static_cast<int>(i), static_cast<int>(j), model.transition(i, j)});
      }
    }
  }
  return graph;
}

namespace {

std::string node_name(const TransitionGraph& graph, std::size_t i) {
  std::string name = "s" + std::to_string(i);
  if (!graph.labels[i].empty()) name += ":" + graph.labels[i];
  std::string quoted = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') quoted += '\\';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string to_dot(const TransitionGraph& graph) {
  std::ostringstream out;
  out << "digraph hmm {\n";
  if (graph.threshold) {
    out << "  label=\"threshold=" << csv::number(*graph.threshold, 3) << "\";\n";
  }
  for (std::size_t i = 0; i < graph.labels.size(); ++i) out << "  " << node_name(graph, i) << ";\n";
  for (const auto& e : graph.edges) {
    out << "  " << node_name(graph, static_cast<std::size_t>(e.from)) << " -> "
        << node_name(graph, static_cast<std::size_t>(e.to)) << " [label=\""
        << csv::number(e.probability, 3) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::vector<std::vector<TopicWeight>> state_topic_summary(const Hmm& model, int top_k) {
  if (top_k < 1 || top_k > model.n_symbols()) {
    throw Error(ErrorKind::Domain, "top_k must lie in [1, " + std::to_string(model.n_symbols()) + "]");
  }
  std::vector<std::vector<TopicWeight>> summary;
  for (Eigen::Index s = 0; s < model.n_states(); ++s) {
    std::vector<int> order(static_cast<std::size_t>(model.n_symbols()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return model.emission(s, a) > model.emission(s, b);
    });
    std::vector<TopicWeight> row;
    for (int k = 0; k < top_k; ++k) {
      const double p = model.emission(s, order[static_cast<std::size_t>(k)]);
      // A point-mass row lists only its support.
      if (k > 0 && p <= 0.0) break;
      row.push_back({order[static_cast<std::size_t>(k)], p});
    }
    summary.push_back(std::move(row));
  }
  return summary;
}

void write_state_topics_csv(std::ostream& out, const std::vector<std::vector<TopicWeight>>& summary,
                            const std::vector<std::string>& state_labels,
                            const std::vector<std::string>& topic_labels) {
  csv::write_row(out, {"state", "state_label", "rank", "topic", "topic_label", "probability"});
  for (std::size_t s = 0; s < summary.size(); ++s) {
    for (std::size_t r = 0; r < summary[s].size(); ++r) {
      const auto& w = summary[s][r];
      const auto t = static_cast<std::size_t>(w.topic);
      csv::write_row(out, {std::to_string(s), s < state_labels.size() ? state_labels[s] : "",
                           std::to_string(r + 1), std::to_string(w.topic),
                           t < topic_labels.size() ? topic_labels[t] : "",
                           csv::number(w.probability, 3)});
    }
  }
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Derived>
void write_row(std::ostream& out, const char* tag, const Eigen::MatrixBase<Derived>& row) {
  out << tag;
  for (Eigen::Index i = 0; i < row.size(); ++i) out << ' ' << g17(row(i));
  out << '\n';
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw Error(ErrorKind::Parse, "HMM file: expected '" + word + "', found '" + got + "'");
  }
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v;
  if (!(in >> v)) throw Error(ErrorKind::Parse, std::string("HMM file: bad value for ") + what);
  return v;
}

double read_number(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw Error(ErrorKind::Parse, "HMM file: truncated");
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "HMM file: bad number '" + tok + "'");
  }
}

}  // namespace

void write_hmm(std::ostream& out, const Hmm& model) {
  out << "categorical-hmm 1\n";
  out << "states " << model.n_states() << '\n';
  out << "symbols " << model.n_symbols() << '\n';
  write_row(out, "start", model.start);
  for (Eigen::Index i = 0; i < model.n_states(); ++i) {
    write_row(out, "transition", model.transition.row(i));
  }
  for (Eigen::Index i = 0; i < model.n_states(); ++i) {
    write_row(out, "emission", model.emission.row(i));
  }
  const auto& log = model.train_log;
  out << "train_log iterations " << log.iterations << " log_likelihood " << g17(log.log_likelihood)
      << " restart " << log.restart << " seed " << log.seed << '\n';
}

Hmm read_hmm(std::istream& in) {
  expect(in, "categorical-hmm");
  const int version = read_value<int>(in, "version");
  if (version != 1) throw Error(ErrorKind::Parse, "unsupported HMM file version " + std::to_string(version));
  expect(in, "states");
  const auto n = read_value<Eigen::Index>(in, "states");
  expect(in, "symbols");
  const auto m = read_value<Eigen::Index>(in, "symbols");
  if (n < 1 || m < 1) throw Error(ErrorKind::Parse, "HMM file: non-positive dimensions");
  Hmm model;
  model.start.resize(n);
  model.transition.resize(n, n);
  model.emission.resize(n, m);
  expect(in, "start");
  for (Eigen::Index i = 0; i < n; ++i) model.start(i) = read_number(in);
  for (Eigen::Index i = 0; i < n; ++i) {
    expect(in, "transition");
    for (Eigen::Index j = 0; j < n; ++j) model.transition(i, j) = read_number(in);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    expect(in, "emission");
    for (Eigen::Index j = 0; j < m; ++j) model.emission(i, j) = read_number(in);
  }
  expect(in, "train_log");
  expect(in, "iterations");
  model.train_log.iterations = read_value<int>(in, "iterations");
  expect(in, "log_likelihood");
  model.train_log.log_likelihood = read_number(in);
  expect(in, "restart");
  model.train_log.restart = read_value<int>(in, "restart");
  expect(in, "seed");
  model.train_log.seed = read_value<std::uint64_t>(in, "seed");
  model.validate(1e-6);
  return model;
}

void save_hmm(const std::string& path, const Hmm& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::MissingInput, "cannot write '" + path + "'");
  write_hmm(out, model);
}

Hmm load_hmm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot read HMM '" + path + "'");
  return read_hmm(in);
}

}  // namespace scamscript
