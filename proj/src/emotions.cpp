#include "scamscript/emotions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "scamscript/csv.hpp"

namespace scamscript {

namespace {

void require_emotions(const Corpus& corpus, std::optional<Role> role_filter) {
  std::vector<std::string> missing;
  for (const auto& t : corpus.transcripts) {
    for (const auto& u : t.utterances) {
      if (role_filter && u.role != *role_filter) continue;
      if (!u.emotions) {
        missing.push_back(t.id);
        break;
      }
    }
  }
  if (missing.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
  if (missing.size() > 20) list += ", ...";
  throw Error(ErrorKind::MissingInput, "emotions missing in " + std::to_string(missing.size()) +
                                           " transcript(s): " + list);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<EmotionGroup> emotion_distribution(const Corpus& corpus, EmotionGrouping group_by,
                                               std::optional<Role> role_filter) {
  require_emotions(corpus, role_filter);
  std::map<std::string, std::array<std::vector<double>, kEmotionCount>> values;
  for (const auto& t : corpus.transcripts) {
    for (const auto& u : t.utterances) {
      if (role_filter && u.role != *role_filter) continue;
      const std::string key =
          group_by == EmotionGrouping::ScamType ? t.scam_type : std::string(to_string(u.role));
      auto& slot = values[key];
      for (std::size_t e = 0; e < kEmotionCount; ++e) slot[e].push_back(u.emotions->scores[e]);
    }
  }
  std::vector<EmotionGroup> groups;
  for (auto& [key, columns] : values) {
    EmotionGroup g;
    g.key = key;
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      const auto& v = columns[e];
      EmotionSummary& s = g.emotions[e];
      s.count = v.size();
      s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      s.q1 = quantile(v, 0.25);
      s.median = quantile(v, 0.5);
      s.q3 = quantile(v, 0.75);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

Matrix state_emotion_heatmap(const Corpus& corpus, HeatmapMode mode, std::optional<int> n_states) {
  require_emotions(corpus, Role::Scammer);
  int states = n_states.value_or(0);
  for (const auto& t : corpus.transcripts) {
    for (std::size_t i = 0; i < t.utterances.size(); ++i) {
      const auto& u = t.utterances[i];
      if (u.role != Role::Scammer) continue;
      if (!u.state) {
        throw Error(ErrorKind::MissingInput, "transcript '" + t.id + "' utterance " +
                                                 std::to_string(i) + " has no decoded state");
      }
      if (*u.state < 0 || (n_states && *u.state >= *n_states)) {
        throw Error(ErrorKind::Domain, "decoded state " + std::to_string(*u.state) + " out of range");
      }
      if (!n_states) states = std::max(states, *u.state + 1);
    }
  }
  const auto E = static_cast<Eigen::Index>(kEmotionCount);
  Matrix sums = Matrix::Zero(states, E);
  Vector counts = Vector::Zero(states);
  std::array<std::vector<double>, kEmotionCount> all;
  for (const auto& t : corpus.transcripts) {
    for (const auto& u : t.utterances) {
      if (u.role != Role::Scammer) continue;
      counts(*u.state) += 1;
      for (std::size_t e = 0; e < kEmotionCount; ++e) {
        sums(*u.state, static_cast<Eigen::Index>(e)) += u.emotions->scores[e];
        all[e].push_back(u.emotions->scores[e]);
      }
    }
  }
  Matrix heat = Matrix::Constant(states, E, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    const double median = std::max(quantile(all[e], 0.5), 1e-6);
    for (Eigen::Index s = 0; s < states; ++s) {
      if (counts(s) == 0) continue;
      const double mean = sums(s, static_cast<Eigen::Index>(e)) / counts(s);
      heat(s, static_cast<Eigen::Index>(e)) = mode == HeatmapMode::Ratio ? mean / median : mean - median;
    }
  }
  return heat;
}

void write_heatmap_csv(std::ostream& out, const Matrix& heatmap,
                       const std::vector<std::string>& state_labels) {
  std::vector<std::string> header{"state"};
  for (auto name : kEmotionNames) header.emplace_back(name);
  csv::write_row(out, header);
  for (Eigen::Index s = 0; s < heatmap.rows(); ++s) {
    const auto idx = static_cast<std::size_t>(s);
    std::vector<std::string> row{idx < state_labels.size() && !state_labels[idx].empty()
                                     ? state_labels[idx]
                                     : "s" + std::to_string(s)};
    for (Eigen::Index e = 0; e < heatmap.cols(); ++e) row.push_back(csv::number(heatmap(s, e), 3));
    csv::write_row(out, row);
  }
}

void write_distribution_csv(std::ostream& out, const std::vector<EmotionGroup>& groups) {
  csv::write_row(out, {"group", "emotion", "count", "mean", "q1", "median", "q3"});
  for (const auto& g : groups) {
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      const auto& s = g.emotions[e];
      csv::write_row(out, {g.key, std::string(kEmotionNames[e]), std::to_string(s.count),
                           csv::number(s.mean, 4), csv::number(s.q1, 4), csv::number(s.median, 4),
                           csv::number(s.q3, 4)});
    }
  }
}

}  // namespace scamscript
