#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "scamscript/common.hpp"

namespace scamscript {

/// An annotator's label for one item, with an optional distinct second choice.
struct Choice {
  std::string first;
  std::optional<std::string> second;

  bool matches(const std::string& label) const {
    return label == first || (second && label == *second);
  }
};

class AnnotationSet {
 public:
  /// Throws Validation on a repeated (item, annotator) pair or on a second
  /// choice equal to the first.
  void add(const std::string& item, const std::string& annotator, Choice choice);

  const std::vector<std::string>& items() const { return items_; }
  const std::vector<std::string>& annotators() const { return annotators_; }
  const Choice* find(const std::string& item, const std::string& annotator) const;
  /// Copy without one annotator (e.g. to separate a model reference).
  AnnotationSet without(const std::string& annotator) const;

 private:
  std::vector<std::string> items_;
  std::vector<std::string> annotators_;
  std::map<std::pair<std::string, std::string>, Choice> choices_;
};

/// Line-delimited {"item_id", "annotator", "first", "second"?}; labels may
/// be strings or integers.
AnnotationSet read_annotations(std::istream& in);
AnnotationSet load_annotations(const std::string& path);

/// Nominal Krippendorff's alpha from the coincidence matrix, over units
/// given as the list of values assigned to each unit. Units with fewer than
/// two values are not pairable and are ignored. Throws Domain when no unit
/// is pairable or when all pairable values are identical (no variation).
double krippendorff_alpha_nominal(const std::vector<std::vector<std::string>>& units);

/// Alpha over first choices of every annotator.
double krippendorff_alpha_nominal(const AnnotationSet& annotations);

struct KappaResult {
  double kappa = 0.0;
  double observed = 0.0;  // raw (relaxed) percent agreement
  double expected = 0.0;
  std::size_t items = 0;
};

/// Strict Cohen's kappa: (p_o - p_e) / (1 - p_e) with p_e from the two
/// label marginals.
KappaResult cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Relaxed kappa against a reference labeling: an item agrees when the
/// reference label equals either choice. Expected agreement uses the same
/// matching rule under independence: p_e = sum_c p_ref(c) q(c), where q(c)
/// is the fraction of items whose choice set contains c.
KappaResult cohen_kappa(const std::vector<std::string>& reference, const std::vector<Choice>& votes);

struct VotedItem {
  std::string item_id;
  std::optional<Choice> vote;  // absent when the tie is unresolved
};

/// Per item, the label most annotators chose first. Ties are broken by
/// counting the tied labels among second choices; a remaining tie leaves
/// the item unresolved. The voted second choice is the most mentioned other
/// label (first or second choices; lexicographic on ties), when any.
std::vector<VotedItem> majority_vote(const AnnotationSet& annotations);

/// Agreement summary: human alpha, strict and relaxed kappa of the
/// voted labels against the reference annotator.
struct AgreementReport {
  std::size_t utterances = 0;
  std::size_t states = 0;  // distinct reference labels
  double alpha = 0.0;
  KappaResult strict;
  KappaResult relaxed;
  std::size_t unresolved = 0;
};

AgreementReport agreement_report(const AnnotationSet& annotations,
                                 const std::string& reference_annotator);
void write_agreement_csv(std::ostream& out, const std::vector<std::pair<std::string, AgreementReport>>& rows);

}  // namespace scamscript
