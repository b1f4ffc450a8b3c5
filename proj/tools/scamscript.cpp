// scamscript: command-line pipeline for mining scam-call scripts.
//
// Every subcommand reads its declared inputs, writes outputs into --out and
// records a manifest (<subcommand>.manifest.json) with the effective
// settings hash, the seed and input/output digests.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scamscript/agreement.hpp"
#include "scamscript/corpus.hpp"
#include "scamscript/csv.hpp"
#include "scamscript/decode.hpp"
#include "scamscript/emotions.hpp"
#include "scamscript/hmm.hpp"
#include "scamscript/staging.hpp"
#include "scamscript/synth.hpp"
#include "scamscript/topics.hpp"
#include "scamscript/typing.hpp"

namespace fs = std::filesystem;
using namespace scamscript;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kMissingInput = 3,
  kSchema = 4,
  kValidation = 5,
  kConfig = 6,
  kDomain = 7,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingInput: return kMissingInput;
    case ErrorKind::Parse: return kSchema;
    case ErrorKind::Validation: return kValidation;
    case ErrorKind::Config: return kConfig;
    case ErrorKind::Domain: return kDomain;
  }
  return kInternal;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    const auto dash = part.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const int lo = std::stoi(part.substr(0, dash));
        const int hi = std::stoi(part.substr(dash + 1));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      } else if (!part.empty()) {
        out.push_back(std::stoi(part));
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "bad integer list '" + text + "'");
    }
  }
  return out;
}

/// Effective settings for one subcommand: flag values win over the
/// subcommand's config section, which wins over top-level config keys.
class Settings {
 public:
  Settings(CLI::App* cmd, const Json& config) : cmd_(cmd), config_(config) {}

  template <typename T>
  void resolve(const std::string& key, T& value, bool hashed = true) {
    if (!given(key)) {
      if (const Json* j = lookup(key)) {
        try {
          value = j->get<T>();
        } catch (const nlohmann::json::exception&) {
          throw Error(ErrorKind::Config, "config key '" + key + "' has the wrong type");
        }
      }
    }
    if (hashed) effective_[key] = value;
  }

  std::uint64_t seed(std::uint64_t flag_value) {
    if (!given("seed") && !lookup("seed")) {
      throw Error(ErrorKind::Config, cmd_->get_name() + " is stochastic and requires --seed");
    }
    seed_ = flag_value;
    resolve("seed", seed_);
    return seed_;
  }

  bool given(const std::string& key) const {
    const auto* opt = cmd_->get_option_no_throw("--" + key);
    return opt && opt->count() > 0;
  }

  const Json& effective() const { return effective_; }
  std::uint64_t seed_value() const { return seed_; }

 private:
  const Json* lookup(const std::string& key) const {
    if (!config_.is_object()) return nullptr;
    auto sec = config_.find(cmd_->get_name());
    if (sec != config_.end() && sec->is_object()) {
      auto it = sec->find(key);
      if (it != sec->end()) return &*it;
    }
    auto it = config_.find(key);
    return it == config_.end() ? nullptr : &*it;
  }

  CLI::App* cmd_;
  const Json& config_;
  Json effective_ = Json::object();
  std::uint64_t seed_ = 0;
};

/// Collects inputs/outputs and writes the manifest.
class Run {
 public:
  Run(std::string command, std::string out_dir) : command_(std::move(command)), out_(std::move(out_dir)) {
    fs::create_directories(out_);
  }

  std::string input(const std::string& path) {
    if (path.empty()) throw Error(ErrorKind::MissingInput, command_ + ": missing required input path");
    if (!fs::exists(path)) throw Error(ErrorKind::MissingInput, "input '" + path + "' does not exist");
    inputs_.push_back({{"path", path}, {"digest", hex64(fnv1a64(read_file(path)))}});
    return path;
  }

  std::string output_path(const std::string& name) const { return (fs::path(out_) / name).string(); }

  void write(const std::string& name, const std::string& content) {
    const std::string path = output_path(name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::MissingInput, "cannot write '" + path + "'");
    out << content;
    outputs_.push_back({{"path", name}, {"digest", hex64(fnv1a64(content))}});
  }

  void finish(const Settings& settings, bool stochastic) {
    Json m;
    m["subcommand"] = command_;
    m["config_hash"] = hex64(fnv1a64(settings.effective().dump()));
    m["settings"] = settings.effective();
    if (stochastic) m["seed"] = settings.seed_value();
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m["created_utc"] = stamp;
    std::ofstream out(output_path(command_ + ".manifest.json"));
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::string out_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
};

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

Corpus filter_type(const Corpus& corpus, const std::string& type) {
  if (type.empty()) return corpus;
  Corpus out = corpus.of_type(type);
  if (out.empty()) throw Error(ErrorKind::Domain, "no transcripts of scam type '" + type + "'");
  return out;
}

int symbol_count(const std::vector<SymbolSequence>& seqs, int requested) {
  int max_symbol = -1;
  for (const auto& s : seqs) {
    for (int x : s) max_symbol = std::max(max_symbol, x);
  }
  if (requested > 0) {
    if (max_symbol >= requested) {
      throw Error(ErrorKind::Config, "--symbols " + std::to_string(requested) +
                                         " is smaller than the largest topic id + 1");
    }
    return requested;
  }
  if (max_symbol < 0) throw Error(ErrorKind::Domain, "no topic symbols in the corpus");
  return max_symbol + 1;
}

struct Common {
  std::string config_path;
  std::string out = ".";
  int workers = 1;
  std::uint64_t seed = 0;
};

struct Command {
  CLI::App* app;
  std::function<void(Settings&, Run&)> body;
  bool stochastic;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "Run config (JSON)");
  cmd->add_option("--out", common.out, "Output directory");
  cmd->add_option("--workers", common.workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", common.seed, "Random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine scripted structure from diarized scam-call transcripts"};
  app.require_subcommand(1);
  static Common common;
  std::vector<Command> commands;

  // ingest ------------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("ingest", "Validate and normalize a transcript file");
    add_common(cmd, common);
    static std::string input, relabel_path;
    static bool normalized = false;
    cmd->add_option("--input", input, "Transcript file (JSON lines)");
    cmd->add_option("--relabel", relabel_path, "JSON object mapping scam types to new labels");
    cmd->add_flag("--emotions-normalized", normalized, "Require emotion scores to sum to 1");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("input", input);
      s.resolve("relabel", relabel_path);
      s.resolve("emotions-normalized", normalized);
      LoadOptions options;
      options.emotions_normalized = normalized;
      if (!relabel_path.empty()) {
        try {
          options.relabel = Json::parse(read_file(run.input(relabel_path))).get<std::map<std::string, std::string>>();
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::Parse, "relabel map: " + std::string(e.what()));
        }
      }
      const Corpus corpus = load_corpus(run.input(input), options);
      run.write("corpus.jsonl", render([&](std::ostream& o) { write_corpus(o, corpus); }));
      std::size_t utts = 0;
      for (const auto& t : corpus.transcripts) utts += t.utterances.size();
      std::cout << corpus.size() << " transcripts, " << utts << " utterances\n";
    }, false});
  }

  // stats -------------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("stats", "Per-type/per-role duration, word and word-rate table");
    add_common(cmd, common);
    static std::string corpus_path;
    cmd->add_option("--corpus", corpus_path, "Transcript file");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("corpus", corpus_path);
      const auto stats = corpus_stats(load_corpus(run.input(corpus_path)));
      run.write("stats.csv", render([&](std::ostream& o) { write_stats_csv(o, stats); }));
      run.write("call_rates.csv", render([&](std::ostream& o) {
        csv::write_row(o, {"transcript_id", "scam_type", "scammer_words_per_s", "baiter_words_per_s"});
        for (const auto& c : stats.calls) {
          csv::write_row(o, {c.transcript_id, c.scam_type, csv::number(c.scammer_rate, 4),
                             csv::number(c.baiter_rate, 4)});
        }
      }));
    }, false});
  }

  // topics-train ------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("topics-train", "Fit a Gibbs-sampled topic model on scammer utterances");
    add_common(cmd, common);
    static std::string corpus_path, stopwords_path;
    static int topics = 50, iterations = 1000, min_doc_freq = 2;
    static double alpha = 0.0, beta = 0.01;
    cmd->add_option("--corpus", corpus_path, "Transcript file");
    cmd->add_option("--topics", topics, "Topic count K");
    cmd->add_option("--alpha", alpha, "Document-topic prior (default 50/K)");
    cmd->add_option("--beta", beta, "Topic-word prior");
    cmd->add_option("--iterations", iterations, "Gibbs sweeps");
    cmd->add_option("--min-doc-freq", min_doc_freq, "Minimum document frequency");
    cmd->add_option("--stopwords", stopwords_path, "Stopword list, one per line");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("corpus", corpus_path);
      s.resolve("topics", topics);
      s.resolve("alpha", alpha);
      s.resolve("beta", beta);
      s.resolve("iterations", iterations);
      s.resolve("min-doc-freq", min_doc_freq);
      s.resolve("stopwords", stopwords_path);
      TopicModelConfig config{topics, alpha, beta, iterations, s.seed(common.seed)};
      const Corpus corpus = load_corpus(run.input(corpus_path));
      std::vector<std::string> stop;
      if (!stopwords_path.empty()) stop = read_lines(run.input(stopwords_path));
      auto vocab = build_vocabulary(scammer_texts(corpus), min_doc_freq, stop);
      const TopicModel model = train_topic_model(corpus, std::move(vocab), config);
      for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
      save_topic_model(run.output_path("topic_model.json"), model);
      run.write("topic_words.csv", render([&](std::ostream& o) {
        csv::write_row(o, {"topic", "top_words"});
        for (int k = 0; k < model.n_topics; ++k) {
          std::string words;
          for (int w : model.top_words(k, 10)) {
            words += (words.empty() ? "" : " ") + model.vocabulary.token_at(static_cast<std::size_t>(w));
          }
          csv::write_row(o, {std::to_string(k), words});
        }
      }));
    }, true});
  }

  // topics-assign -----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("topics-assign", "Assign topic distributions to scammer utterances");
    add_common(cmd, common);
    static std::string corpus_path, model_path, import_path;
    cmd->add_option("--corpus", corpus_path, "Transcript file");
    cmd->add_option("--model", model_path, "Topic model from topics-train");
    cmd->add_option("--import", import_path, "Externally computed assignments (JSON lines)");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("corpus", corpus_path);
      s.resolve("model", model_path);
      s.resolve("import", import_path);
      if (model_path.empty() == import_path.empty()) {
        throw Error(ErrorKind::Config, "topics-assign needs exactly one of --model or --import");
      }
      const Corpus corpus = load_corpus(run.input(corpus_path));
      std::vector<TopicAssignment> assignments;
      if (!import_path.empty()) {
        std::ifstream in(run.input(import_path));
        assignments = read_assignments(in);
      } else {
        assignments = assign_corpus(load_topic_model(run.input(model_path)), corpus,
                                    common.workers);
      }
      const Corpus tagged = apply_assignments(corpus, assignments);
      run.write("assignments.jsonl", render([&](std::ostream& o) { write_assignments(o, assignments); }));
      run.write("corpus.jsonl", render([&](std::ostream& o) { write_corpus(o, tagged); }));
    }, false});
  }

  // topics-metrics ----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("topics-metrics", "NPMI coherence, IRBO diversity and topic frequency tables");
    add_common(cmd, common);
    static std::string corpus_path, model_path, assignments_path;
    static int top_n = 10;
    static double rbo_p = 0.9;
    cmd->add_option("--corpus", corpus_path, "Transcript file");
    cmd->add_option("--model", model_path, "Topic model");
    cmd->add_option("--assignments", assignments_path, "Assignments (default: infer with the model)");
    cmd->add_option("--top-n", top_n, "Top words per topic");
    cmd->add_option("--rbo-p", rbo_p, "RBO persistence");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("corpus", corpus_path);
      s.resolve("model", model_path);
      s.resolve("assignments", assignments_path);
      s.resolve("top-n", top_n);
      s.resolve("rbo-p", rbo_p);
      const Corpus corpus = load_corpus(run.input(corpus_path));
      const TopicModel model = load_topic_model(run.input(model_path));
      std::vector<TopicAssignment> assignments;
      if (!assignments_path.empty()) {
        std::ifstream in(run.input(assignments_path));
        assignments = read_assignments(in);
      } else {
        assignments = assign_corpus(model, corpus, common.workers);
      }
      std::vector<std::vector<int>> docs;
      for (const auto& text : scammer_texts(corpus)) docs.push_back(model.vocabulary.encode(text));
      const auto coherence = coherence_npmi(model, docs, top_n);
      const double diversity = model.n_topics >= 2 ? diversity_irbo(model, top_n, rbo_p)
                                                   : std::numeric_limits<double>::quiet_NaN();
      run.write("topic_metrics.csv", render([&](std::ostream& o) {
        csv::write_row(o, {"topic", "npmi"});
        for (std::size_t k = 0; k < coherence.per_topic.size(); ++k) {
          csv::write_row(o, {std::to_string(k), csv::number(coherence.per_topic[k], 4)});
        }
        csv::write_row(o, {"mean_npmi", csv::number(coherence.mean, 4)});
        csv::write_row(o, {"diversity_irbo", csv::number(diversity, 4)});
      }));
      const auto table = topic_frequency_table(assignments, corpus);
      run.write("topic_frequency.csv", render([&](std::ostream& o) { write_topic_frequency_csv(o, table); }));
      run.write("topic_summary.csv", render([&](std::ostream& o) {
        write_topic_summary_csv(o, model, assignments, corpus, top_n);
      }));
      std::cout << "mean NPMI " << csv::number(coherence.mean, 4) << ", IRBO diversity "
                << csv::number(diversity, 4) << '\n';
    }, false});
  }

  // hmm-select / hmm-train share the EM settings ------------------------------
  static std::string hmm_corpus, hmm_type, candidates_text = "2-8";
  static int hmm_states = 2, restarts = 50, max_iter = 200, folds_sel = 5, rank = 1, symbols = 0;
  static double tol = 1e-4;
  auto add_em = [&](CLI::App* cmd) {
    cmd->add_option("--corpus", hmm_corpus, "Transcript file with topic assignments");
    cmd->add_option("--scam-type", hmm_type, "Restrict to one scam type");
    cmd->add_option("--restarts", restarts, "Random restarts per fit");
    cmd->add_option("--max-iter", max_iter, "EM iterations per restart");
    cmd->add_option("--tol", tol, "Relative log-likelihood tolerance");
    cmd->add_option("--symbols", symbols, "Symbol count M (default: largest topic id + 1)");
  };
  auto resolve_em = [](Settings& s) {
    s.resolve("corpus", hmm_corpus);
    s.resolve("scam-type", hmm_type);
    s.resolve("restarts", restarts);
    s.resolve("max-iter", max_iter);
    s.resolve("tol", tol);
    s.resolve("symbols", symbols);
  };
  {
    auto* cmd = app.add_subcommand("hmm-select", "Cross-validated choice of the HMM state count, then a final all-data fit");
    add_common(cmd, common);
    add_em(cmd);
    cmd->add_option("--candidates", candidates_text, "State counts, e.g. 2-8 or 3,5,7");
    cmd->add_option("--folds", folds_sel, "Cross-validation folds");
    cmd->add_option("--rank", rank, "Pick the rank-th best candidate (1 = best)");
    commands.push_back({cmd, [resolve_em](Settings& s, Run& run) {
      resolve_em(s);
      s.resolve("candidates", candidates_text);
      s.resolve("folds", folds_sel);
      s.resolve("rank", rank);
      const std::uint64_t seed = s.seed(common.seed);
      const Corpus corpus = filter_type(load_corpus(run.input(hmm_corpus)), hmm_type);
      const auto seqs = scammer_sequences(corpus);
      const int m = symbol_count(seqs, symbols);
      SelectionConfig config;
      config.candidates = parse_int_list(candidates_text);
      config.folds = folds_sel;
      config.choose_rank = rank;
      config.em = {restarts, max_iter, tol, 1e-10, seed, common.workers};
      const auto report = select_n_states(seqs, m, config);
      run.write("selection.csv", render([&](std::ostream& o) {
        std::vector<std::string> header{"states"};
        for (int f = 0; f < config.folds; ++f) header.push_back("heldout_ll_fold" + std::to_string(f));
        for (const char* h : {"mean_heldout_ll", "mean_train_ll", "rank", "chosen"}) header.emplace_back(h);
        csv::write_row(o, header);
        for (std::size_t c = 0; c < report.candidates.size(); ++c) {
          const auto row = static_cast<Eigen::Index>(c);
          std::vector<std::string> fields{std::to_string(report.candidates[c])};
          for (int f = 0; f < config.folds; ++f) fields.push_back(csv::number(report.heldout_ll(row, f), 4));
          fields.push_back(csv::number(report.mean_heldout_ll(row), 4));
          fields.push_back(csv::number(report.train_ll.row(row).mean(), 4));
          const auto r = std::find(report.ranking.begin(), report.ranking.end(), c) - report.ranking.begin();
          fields.push_back(std::to_string(r + 1));
          fields.push_back(report.candidates[c] == report.chosen ? "yes" : "");
          csv::write_row(o, fields);
        }
      }));
      BaumWelchConfig final_em{restarts, max_iter, tol, 1e-10, derive_seed(seed, 0xf17a1), common.workers};
      const Hmm model = baum_welch(seqs, report.chosen, m, final_em);
      run.write("hmm.txt", render([&](std::ostream& o) { write_hmm(o, model); }));
      std::cout << "chosen states: " << report.chosen
                << (report.overridden() ? " (rank override)" : "") << '\n';
    }, true});
  }
  {
    auto* cmd = app.add_subcommand("hmm-train", "Fit a categorical HMM with random restarts");
    add_common(cmd, common);
    add_em(cmd);
    cmd->add_option("--states", hmm_states, "State count");
    commands.push_back({cmd, [resolve_em](Settings& s, Run& run) {
      resolve_em(s);
      s.resolve("states", hmm_states);
      const std::uint64_t seed = s.seed(common.seed);
      const Corpus corpus = filter_type(load_corpus(run.input(hmm_corpus)), hmm_type);
      const auto seqs = scammer_sequences(corpus);
      const int m = symbol_count(seqs, symbols);
      const Hmm model = baum_welch(seqs, hmm_states, m, {restarts, max_iter, tol, 1e-10, seed, common.workers});
      run.write("hmm.txt", render([&](std::ostream& o) { write_hmm(o, model); }));
      std::cout << "log-likelihood " << model.train_log.log_likelihood << " (restart "
                << model.train_log.restart << ")\n";
    }, true});
  }

  // hmm-decode --------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("hmm-decode", "Attach Viterbi states to scammer utterances");
    add_common(cmd, common);
    static std::string corpus_path, model_path, type;
    cmd->add_option("--corpus", corpus_path, "Transcript file with topic assignments");
    cmd->add_option("--model", model_path, "HMM file");
    cmd->add_option("--scam-type", type, "Restrict to one scam type");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("corpus", corpus_path);
      s.resolve("model", model_path);
      s.resolve("scam-type", type);
      const Hmm model = load_hmm(run.input(model_path));
      const Corpus decoded = decode_corpus(model, filter_type(load_corpus(run.input(corpus_path)), type));
      run.write("corpus.jsonl", render([&](std::ostream& o) { write_corpus(o, decoded); }));
    }, false});
  }

  // hmm-graph ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("hmm-graph", "Thresholded transition graph (DOT) and state topic summary");
    add_common(cmd, common);
    static std::string model_path, labels_path, topic_labels_path;
    static double min_prob = -1.0;
    static int top_k = 3;
    cmd->add_option("--model", model_path, "HMM file");
    cmd->add_option("--labels", labels_path, "State labels, one per line");
    cmd->add_option("--topic-labels", topic_labels_path, "Topic labels, one per line");
    cmd->add_option("--min-prob", min_prob, "Fixed edge threshold instead of the trace rule");
    cmd->add_option("--top-k", top_k, "Topics listed per state");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("model", model_path);
      s.resolve("labels", labels_path);
      s.resolve("topic-labels", topic_labels_path);
      s.resolve("min-prob", min_prob);
      s.resolve("top-k", top_k);
      const Hmm model = load_hmm(run.input(model_path));
      std::vector<std::string> labels, topic_labels;
      if (!labels_path.empty()) labels = read_lines(run.input(labels_path));
      if (!topic_labels_path.empty()) topic_labels = read_lines(run.input(topic_labels_path));
      const auto graph = transition_graph(model, labels, min_prob >= 0 ? std::optional<double>(min_prob) : std::nullopt);
      run.write("graph.dot", to_dot(graph));
      const int k = std::min<int>(top_k, static_cast<int>(model.n_symbols()));
      run.write("state_topics.csv", render([&](std::ostream& o) {
        write_state_topics_csv(o, state_topic_summary(model, k), labels, topic_labels);
      }));
      if (graph.threshold) std::cout << "threshold=" << csv::number(*graph.threshold, 3) << '\n';
    }, false});
  }

  // stage-eval --------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("stage-eval", "Streaming stage prediction accuracy (strict and relaxed)");
    add_common(cmd, common);
    static std::string corpus_path, model_path, type, predictor = "filter";
    static int folds = 6;
    cmd->add_option("--corpus", corpus_path, "Transcript file with topic assignments");
    cmd->add_option("--model", model_path, "All-data HMM for the scam type");
    cmd->add_option("--scam-type", type, "Scam type to evaluate");
    cmd->add_option("--folds", folds, "Cross-validation folds");
    cmd->add_option("--predictor", predictor, "filter | supervised | oracle | random");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("corpus", corpus_path);
      s.resolve("model", model_path);
      s.resolve("scam-type", type);
      s.resolve("folds", folds);
      s.resolve("predictor", predictor);
      const std::uint64_t seed = s.seed(common.seed);
      const Hmm model = load_hmm(run.input(model_path));
      Corpus corpus = filter_type(load_corpus(run.input(corpus_path)), type);
      if (corpus.scam_types().size() > 1) {
        throw Error(ErrorKind::Config, "corpus holds several scam types; pass --scam-type");
      }
      StagePredictorFactory factory;
      if (predictor == "filter") factory = filter_predictor(model);
      else if (predictor == "supervised")
        factory = supervised_filter_predictor(static_cast<int>(model.n_states()), static_cast<int>(model.n_symbols()));
      else if (predictor == "oracle") factory = oracle_predictor(model);
      else if (predictor == "random") factory = random_predictor(static_cast<int>(model.n_states()), seed);
      else throw Error(ErrorKind::Config, "unknown predictor '" + predictor + "'");
      const auto eval = evaluate_staging(corpus, model, {folds, seed, common.workers}, factory);
      run.write("stage_eval.csv", render([&](std::ostream& o) { write_stage_csv(o, {eval}); }));
      run.write("stage_eval.txt", stage_table_text({eval}));
      run.write("stage_folds.csv", render([&](std::ostream& o) {
        csv::write_row(o, {"fold", "transcripts", "utterances", "strict", "relaxed", "relaxed_baseline"});
        for (std::size_t f = 0; f < eval.folds.size(); ++f) {
          const auto& r = eval.folds[f];
          csv::write_row(o, {std::to_string(f), std::to_string(r.transcripts), std::to_string(r.utterances),
                             csv::number(r.strict_accuracy, 4), csv::number(r.relaxed_accuracy, 4),
                             csv::number(r.relaxed_baseline, 4)});
        }
      }));
      std::cout << stage_table_text({eval});
    }, true});
  }

  // type-eval ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("type-eval", "Progressive-utterance scam type prediction (F1 curves)");
    add_common(cmd, common);
    static std::string corpus_path;
    static int k_max = 10, folds = 7;
    static double smoothing = 1.0;
    static std::vector<std::string> overrides, types;
    cmd->add_option("--corpus", corpus_path, "Transcript file");
    cmd->add_option("--k-max", k_max, "Largest number of utterances");
    cmd->add_option("--folds", folds, "Default fold count");
    cmd->add_option("--fold-override", overrides, "TYPE=FOLDS, e.g. reward=4");
    cmd->add_option("--types", types, "Types to evaluate (default: all)");
    cmd->add_option("--smoothing", smoothing, "Additive smoothing");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("corpus", corpus_path);
      s.resolve("k-max", k_max);
      s.resolve("folds", folds);
      s.resolve("fold-override", overrides);
      s.resolve("types", types);
      s.resolve("smoothing", smoothing);
      ProgressiveConfig config;
      config.k_max = k_max;
      config.folds = folds;
      config.types = types;
      config.smoothing = smoothing;
      config.seed = s.seed(common.seed);
      config.workers = common.workers;
      for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Config, "bad --fold-override '" + o + "'");
        config.fold_overrides[o.substr(0, eq)] = parse_int_list(o.substr(eq + 1)).at(0);
      }
      const auto result = evaluate_progressive(load_corpus(run.input(corpus_path)), config);
      run.write("f1_curve.csv", render([&](std::ostream& o) { write_f1_csv(o, result); }));
      run.write("f1_mean.csv", render([&](std::ostream& o) { write_f1_mean_csv(o, result); }));
    }, true});
  }

  // emotion-heatmap ---------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("emotion-heatmap", "Per-state emotion heat map and emotion distributions");
    add_common(cmd, common);
    static std::string corpus_path, type, mode = "ratio", labels_path;
    static int states = 0;
    cmd->add_option("--corpus", corpus_path, "Transcript file with emotions and decoded states");
    cmd->add_option("--scam-type", type, "Restrict to one scam type");
    cmd->add_option("--mode", mode, "ratio | difference");
    cmd->add_option("--states", states, "State count (default: largest state + 1)");
    cmd->add_option("--labels", labels_path, "State labels, one per line");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("corpus", corpus_path);
      s.resolve("scam-type", type);
      s.resolve("mode", mode);
      s.resolve("states", states);
      s.resolve("labels", labels_path);
      if (mode != "ratio" && mode != "difference") throw Error(ErrorKind::Config, "unknown mode '" + mode + "'");
      const Corpus all = load_corpus(run.input(corpus_path));
      const Corpus corpus = filter_type(all, type);
      std::vector<std::string> labels;
      if (!labels_path.empty()) labels = read_lines(run.input(labels_path));
      const Matrix heat = state_emotion_heatmap(
          corpus, mode == "ratio" ? HeatmapMode::Ratio : HeatmapMode::Difference,
          states > 0 ? std::optional<int>(states) : std::nullopt);
      run.write("heatmap.csv", render([&](std::ostream& o) { write_heatmap_csv(o, heat, labels); }));
      run.write("emotions_by_type.csv", render([&](std::ostream& o) {
        write_distribution_csv(o, emotion_distribution(all, EmotionGrouping::ScamType, Role::Scammer));
      }));
      run.write("emotions_by_role.csv", render([&](std::ostream& o) {
        write_distribution_csv(o, emotion_distribution(all, EmotionGrouping::Role));
      }));
    }, false});
  }

  // agreement ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("agreement", "Annotator alpha and kappa against a reference labeling");
    add_common(cmd, common);
    static std::vector<std::string> files;
    static std::string reference = "hmm";
    cmd->add_option("--annotations", files, "Annotation files (one row per file)");
    cmd->add_option("--reference-annotator", reference, "Annotator name holding the reference labels");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("annotations", files);
      s.resolve("reference-annotator", reference);
      if (files.empty()) throw Error(ErrorKind::MissingInput, "agreement needs --annotations");
      std::vector<std::pair<std::string, AgreementReport>> rows;
      for (const auto& f : files) {
        rows.emplace_back(fs::path(f).stem().string(), agreement_report(load_annotations(run.input(f)), reference));
      }
      run.write("agreement.csv", render([&](std::ostream& o) { write_agreement_csv(o, rows); }));
    }, false});
  }

  // synth-generate ----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("synth-generate", "Generate a synthetic corpus from a known generative model");
    add_common(cmd, common);
    static std::string spec_path;
    static int states = 0, transcripts = 100;
    static std::vector<std::string> types;
    cmd->add_option("--spec", spec_path, "Generator spec (JSON)");
    cmd->add_option("--states", states, "Use the well-separated preset with this many states");
    cmd->add_option("--transcripts", transcripts, "Transcript count (preset only)");
    cmd->add_option("--types", types, "Scam type labels, assigned round-robin (preset only)");
    commands.push_back({cmd, [](Settings& s, Run& run) {
      s.resolve("spec", spec_path);
      s.resolve("states", states);
      s.resolve("transcripts", transcripts);
      s.resolve("types", types);
      const std::uint64_t seed = s.seed(common.seed);
      if (spec_path.empty() == (states <= 0)) {
        throw Error(ErrorKind::Config, "synth-generate needs exactly one of --spec or --states");
      }
      SynthSpec spec = spec_path.empty() ? separated_spec(states) : load_synth_spec(run.input(spec_path));
      if (spec_path.empty()) {
        spec.n_transcripts = transcripts;
        if (!types.empty()) spec.scam_types = types;
      }
      spec.seed = seed;
      const auto synth = generate_corpus(spec, common.workers);
      run.write("corpus.jsonl", render([&](std::ostream& o) { write_corpus(o, synth.corpus); }));
      run.write("ground_truth.jsonl", render([&](std::ostream& o) { write_ground_truth(o, synth.truth); }));
      run.write("synth_spec.json", render([&](std::ostream& o) { write_synth_spec(o, spec); }));
    }, true});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  for (auto& command : commands) {
    if (!command.app->parsed()) continue;
    const std::string name = command.app->get_name();
    try {
      Json config = Json::object();
      if (!common.config_path.empty()) {
        try {
          config = Json::parse(read_file(common.config_path));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::Config, "config '" + common.config_path + "': " + e.what());
        }
        if (!config.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
      }
      Settings settings(command.app, config);
      settings.resolve("out", common.out, false);
      settings.resolve("workers", common.workers, false);
      if (common.workers < 1) throw Error(ErrorKind::Config, "--workers must be >= 1");
      Run run(name, common.out);
      command.body(settings, run);
      run.finish(settings, command.stochastic);
      return kOk;
    } catch (const Error& e) {
      std::cerr << name << ": " << to_string(e.kind()) << ": " << e.what() << '\n';
      return exit_code(e.kind());
    } catch (const std::exception& e) {
      std::cerr << name << ": internal error: " << e.what() << '\n';
      return kInternal;
    }
  }
  return kUsage;
}
