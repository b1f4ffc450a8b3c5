#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scamscript/corpus.hpp"

namespace scamscript {

enum class EmotionGrouping { ScamType, Role };

struct EmotionSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct EmotionGroup {
  std::string key;
  std::array<EmotionSummary, kEmotionCount> emotions;
};

/// Linear-interpolation quantile (numpy's default) of unsorted values.
double quantile(std::vector<double> values, double q);

/// Per-group per-emotion mean and quartiles. `role_filter` restricts the
/// utterances considered. Throws MissingInput listing the transcripts that
/// have utterances without emotion scores.
std::vector<EmotionGroup> emotion_distribution(const Corpus& corpus, EmotionGrouping group_by,
                                               std::optional<Role> role_filter = std::nullopt);

enum class HeatmapMode {
  Ratio,       // mean(state) / median(all)
  Difference,  // mean(state) - median(all)
};

/// n_states x 7 matrix over scammer utterances: each state's mean score
/// relative to the median over all scammer utterances (median floored at
/// 1e-6). States without utterances have NaN rows. `n_states` defaults to
/// the largest decoded state + 1.
Matrix state_emotion_heatmap(const Corpus& corpus, HeatmapMode mode = HeatmapMode::Ratio,
                             std::optional<int> n_states = std::nullopt);

void write_heatmap_csv(std::ostream& out, const Matrix& heatmap,
                       const std::vector<std::string>& state_labels = {});
void write_distribution_csv(std::ostream& out, const std::vector<EmotionGroup>& groups);

}  // namespace scamscript
