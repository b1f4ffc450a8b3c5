#include "scamscript/agreement.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "scamscript/csv.hpp"

namespace scamscript {

void AnnotationSet::add(const std::string& item, const std::string& annotator, Choice choice) {
  if (choice.second && *choice.second == choice.first) {
    throw Error(ErrorKind::Validation, "item '" + item + "' annotator '" + annotator +
                                           "': second choice repeats the first");
  }
  if (!choices_.emplace(std::make_pair(item, annotator), std::move(choice)).second) {
    throw Error(ErrorKind::Validation,
                "item '" + item + "' annotated twice by '" + annotator + "'");
  }
  if (std::find(items_.begin(), items_.end(), item) == items_.end()) items_.push_back(item);
  if (std::find(annotators_.begin(), annotators_.end(), annotator) == annotators_.end()) {
    annotators_.push_back(annotator);
  }
}

const Choice* AnnotationSet::find(const std::string& item, const std::string& annotator) const {
  auto it = choices_.find({item, annotator});
  return it == choices_.end() ? nullptr : &it->second;
}

AnnotationSet AnnotationSet::without(const std::string& annotator) const {
  AnnotationSet out;
  for (const auto& item : items_) {
    for (const auto& a : annotators_) {
      if (a == annotator) continue;
      if (const Choice* c = find(item, a)) out.add(item, a, *c);
    }
  }
  return out;
}

namespace {

std::string label_of(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorKind::Parse, std::string("\"") + key + "\" must be a string or integer");
}

}  // namespace

AnnotationSet read_annotations(std::istream& in) {
  AnnotationSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = "annotations line " + std::to_string(line_no) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      Choice c{label_of(j, "first"), std::nullopt};
      if (j.contains("second") && !j.at("second").is_null()) c.second = label_of(j, "second");
      set.add(label_of(j, "item_id"), j.at("annotator").get<std::string>(), std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, at + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), at + e.what());
    }
  }
  return set;
}

AnnotationSet load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot read annotations '" + path + "'");
  return read_annotations(in);
}

double krippendorff_alpha_nominal(const std::vector<std::vector<std::string>>& units) {
  // Coincidence matrix o[c][k] = sum_u (number of ordered c-k value pairs
  // in u) / (m_u - 1); n_c its row sums.
  std::map<std::string, std::map<std::string, double>> o;
  for (const auto& values : units) {
    const std::size_t m = values.size();
    if (m < 2) continue;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) o[values[i]][values[j]] += 1.0 / static_cast<double>(m - 1);
      }
    }
  }
  if (o.empty()) throw Error(ErrorKind::Domain, "alpha is undefined: no item has two labels");
  std::map<std::string, double> n_c;
  double n = 0, disagree = 0;
  for (const auto& [c, row] : o) {
    for (const auto& [k, v] : row) {
      n_c[c] += v;
      n += v;
      if (c != k) disagree += v;
    }
  }
  double expected = 0;
  for (const auto& [c, nc] : n_c) {
    for (const auto& [k, nk] : n_c) {
      if (c != k) expected += nc * nk;
    }
  }
  if (expected <= 0) throw Error(ErrorKind::Domain, "alpha is undefined: all labels identical");
  return 1.0 - (n - 1.0) * disagree / expected;
}

double krippendorff_alpha_nominal(const AnnotationSet& annotations) {
  if (annotations.annotators().size() < 2) {
    throw Error(ErrorKind::Domain, "alpha needs at least two annotators");
  }
  std::vector<std::vector<std::string>> units;
  for (const auto& item : annotations.items()) {
    std::vector<std::string> values;
    for (const auto& a : annotations.annotators()) {
      if (const Choice* c = annotations.find(item, a)) values.push_back(c->first);
    }
    units.push_back(std::move(values));
  }
  return krippendorff_alpha_nominal(units);
}

namespace {

KappaResult finish(double observed, double expected, std::size_t items) {
  KappaResult r;
  r.observed = observed;
  r.expected = expected;
  r.items = items;
  if (expected >= 1.0) {
    if (observed >= 1.0) {
      r.kappa = 1.0;
      return r;
    }
    throw Error(ErrorKind::Domain, "kappa is undefined: expected agreement is 1");
  }
  r.kappa = (observed - expected) / (1.0 - expected);
  return r;
}

}  // namespace

KappaResult cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Domain, "kappa needs equal-length labelings");
  if (a.empty()) throw Error(ErrorKind::Domain, "kappa needs at least one item");
  const double n = static_cast<double>(a.size());
  std::map<std::string, double> pa, pb;
  double agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1 / n;
    pb[b[i]] += 1 / n;
    agree += a[i] == b[i];
  }
  double expected = 0;
  for (const auto& [c, p] : pa) {
    if (auto it = pb.find(c); it != pb.end()) expected += p * it->second;
  }
  return finish(agree / n, expected, a.size());
}

KappaResult cohen_kappa(const std::vector<std::string>& reference, const std::vector<Choice>& votes) {
  if (reference.size() != votes.size()) {
    throw Error(ErrorKind::Domain, "kappa needs equal-length labelings");
  }
  if (reference.empty()) throw Error(ErrorKind::Domain, "kappa needs at least one item");
  const double n = static_cast<double>(reference.size());
  std::map<std::string, double> p_ref, q;
  double agree = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    p_ref[reference[i]] += 1 / n;
    q[votes[i].first] += 1 / n;
    if (votes[i].second) q[*votes[i].second] += 1 / n;
    agree += votes[i].matches(reference[i]);
  }
  double expected = 0;
  for (const auto& [c, p] : p_ref) {
    if (auto it = q.find(c); it != q.end()) expected += p * it->second;
  }
  return finish(agree / n, std::min(expected, 1.0), reference.size());
}

std::vector<VotedItem> majority_vote(const AnnotationSet& annotations) {
  std::vector<VotedItem> out;
  for (const auto& item : annotations.items()) {
    std::map<std::string, int> firsts, seconds, mentions;
    for (const auto& a : annotations.annotators()) {
      const Choice* c = annotations.find(item, a);
      if (!c) continue;
      ++firsts[c->first];
      ++mentions[c->first];
      if (c->second) {
        ++seconds[*c->second];
        ++mentions[*c->second];
      }
    }
    VotedItem v{item, std::nullopt};
    int top = 0;
    for (const auto& [label, count] : firsts) top = std::max(top, count);
    std::vector<std::string> tied;
    for (const auto& [label, count] : firsts) {
      if (count == top) tied.push_back(label);
    }
    if (tied.size() > 1) {
      int best = -1;
      std::vector<std::string> still;
      for (const auto& label : tied) {
        const int s = seconds.count(label) ? seconds.at(label) : 0;
        if (s > best) {
          best = s;
          still = {label};
        } else if (s == best) {
          still.push_back(label);
        }
      }
      tied = std::move(still);
    }
    if (tied.size() == 1) {
      Choice choice{tied.front(), std::nullopt};
      int runner = 0;
      for (const auto& [label, count] : mentions) {
        if (label != choice.first && count > runner) {
          runner = count;
          choice.second = label;
        }
      }
      v.vote = std::move(choice);
    }
    out.push_back(std::move(v));
  }
  return out;
}

AgreementReport agreement_report(const AnnotationSet& annotations,
                                 const std::string& reference_annotator) {
  const auto& names = annotations.annotators();
  if (std::find(names.begin(), names.end(), reference_annotator) == names.end()) {
    throw Error(ErrorKind::MissingInput, "no annotations from reference '" + reference_annotator + "'");
  }
  const AnnotationSet humans = annotations.without(reference_annotator);
  AgreementReport report;
  report.utterances = humans.items().size();
  report.alpha = krippendorff_alpha_nominal(humans);
  std::vector<std::string> ref, strict_votes;
  std::vector<Choice> votes;
  std::set<std::string> states;
  for (const auto& v : majority_vote(humans)) {
    const Choice* r = annotations.find(v.item_id, reference_annotator);
    if (!r) continue;
    states.insert(r->first);
    if (!v.vote) {
      ++report.unresolved;
      continue;
    }
    ref.push_back(r->first);
    strict_votes.push_back(v.vote->first);
    votes.push_back(*v.vote);
  }
  report.states = states.size();
  report.strict = cohen_kappa(ref, strict_votes);
  report.relaxed = cohen_kappa(ref, votes);
  return report;
}

void write_agreement_csv(std::ostream& out,
                         const std::vector<std::pair<std::string, AgreementReport>>& rows) {
  csv::write_row(out, {"set", "Utterances", "States", "Alpha", "KappaStrict", "KappaRelaxed",
                       "RelaxedAgreement", "Unresolved"});
  for (const auto& [name, r] : rows) {
    csv::write_row(out, {name, std::to_string(r.utterances), std::to_string(r.states),
                         csv::number(r.alpha, 2), csv::number(r.strict.kappa, 2),
                         csv::number(r.relaxed.kappa, 2), csv::number(r.relaxed.observed, 2),
                         std::to_string(r.unresolved)});
  }
}

}  // namespace scamscript
