#include <doctest.h>

#include <map>
#include <sstream>

#include "scamscript/agreement.hpp"
#include "scamscript/random.hpp"
#include "support.hpp"

using namespace scamscript;

TEST_CASE("perfect agreement") {
  CHECK(krippendorff_alpha_nominal({{"a", "a", "a"}, {"b", "b"}, {"c", "c", "c"}}) == 1.0);
  CHECK(cohen_kappa({"a", "b", "a"}, {"a", "b", "a"}).kappa == 1.0);
  CHECK(cohen_kappa({"a", "b", "a"}, std::vector<Choice>{{"a", {}}, {"c", "b"}, {"a", {}}}).kappa == 1.0);
}

TEST_CASE("hand-computed alpha fixture") {
  // 3 annotators, 4 items; the last item has one missing label.
  const std::vector<std::vector<std::string>> units{{"A", "A", "A"}, {"A", "B", "A"}, {"B", "B", "B"}, {"C", "C"}};
  // Coincidences AA=4, AB=BA=1, BB=3, CC=2: alpha = 1 - 10*2/76 = 14/19.
  CHECK(krippendorff_alpha_nominal(units) == doctest::Approx(14.0 / 19.0).epsilon(1e-12));
  CHECK(std::abs(krippendorff_alpha_nominal(units) - fixtures::alpha_oracle(units)) < 1e-9);
}

TEST_CASE("alpha from annotation sets uses first choices") {
  AnnotationSet s;
  s.add("1", "x", {"A", "B"});
  s.add("1", "y", {"A", {}});
  s.add("2", "x", {"B", {}});
  s.add("2", "y", {"A", "B"});
  s.add("3", "x", {"B", {}});
  CHECK(krippendorff_alpha_nominal(s) == doctest::Approx(fixtures::alpha_oracle({{"A", "A"}, {"B", "A"}, {"B"}})));
}

TEST_CASE("alpha is undefined without pairable variation") {
  CHECK_THROWS_AS(krippendorff_alpha_nominal({{"a"}, {"b"}}), Error);
  CHECK_THROWS_AS(krippendorff_alpha_nominal({{"a", "a"}, {"a", "a"}}), Error);
  AnnotationSet one;
  one.add("1", "x", {"A", {}});
  CHECK_THROWS_AS(krippendorff_alpha_nominal(one), Error);
}

TEST_CASE("alpha is invariant under relabeling") {
  Rng rng(3);
  const std::vector<std::string> labels{"a", "b", "c", "d"};
  const std::map<std::string, std::string> perm{{"a", "c"}, {"b", "d"}, {"c", "b"}, {"d", "a"}};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<std::string>> units, renamed;
    for (int u = 0; u < 10; ++u) {
      std::vector<std::string> unit;
      for (std::size_t m = 1 + uniform_below(rng, 4); m > 0; --m) unit.push_back(labels[uniform_below(rng, 4)]);
      units.push_back(unit);
      for (auto& v : unit) v = perm.at(v);
      renamed.push_back(unit);
    }
    try {
      const double a = krippendorff_alpha_nominal(units);
      CHECK(a == doctest::Approx(krippendorff_alpha_nominal(renamed)).epsilon(1e-12));
      CHECK(a == doctest::Approx(fixtures::alpha_oracle(units)).epsilon(1e-9));
    } catch (const Error&) {
      CHECK_THROWS_AS(krippendorff_alpha_nominal(renamed), Error);
    }
  }
}

TEST_CASE("hand-computed kappa fixture") {
  // One disagreement in four: p_o = 3/4, p_e = 0.5*0.75 + 0.5*0.25 = 1/2.
  const std::vector<std::string> a{"A", "A", "B", "B"}, b{"A", "A", "B", "A"};
  const auto k = cohen_kappa(a, b);
  CHECK(k.kappa == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(k.kappa - fixtures::kappa_oracle(a, b)) < 1e-9);
  CHECK(k.observed == 0.75);
  CHECK(k.expected == 0.5);
}

TEST_CASE("kappa input errors") {
  CHECK_THROWS_AS(cohen_kappa(std::vector<std::string>{"a"}, std::vector<std::string>{"a", "b"}), Error);
  CHECK_THROWS_AS(cohen_kappa(std::vector<std::string>{}, std::vector<std::string>{}), Error);
}

TEST_CASE("independent labelings give kappa near zero") {
  Rng rng(8);
  const std::vector<std::string> labels{"a", "b", "c"};
  const double marginal[] = {0.5, 0.3, 0.2};
  std::vector<std::string> x, y;
  auto draw = [&] {
    double u = uniform01(rng);
    for (int i = 0; i < 3; ++i) {
      if (u < marginal[i]) return labels[static_cast<std::size_t>(i)];
      u -= marginal[i];
    }
    return labels[2];
  };
  for (int i = 0; i < 20000; ++i) {
    x.push_back(draw());
    y.push_back(draw());
  }
  CHECK(std::abs(cohen_kappa(x, y).kappa) < 0.05);
}

TEST_CASE("relaxed kappa counts second-choice matches") {
  const std::vector<std::string> ref{"A", "B", "A", "C"};
  const std::vector<Choice> votes{{"A", {}}, {"C", "B"}, {"B", {}}, {"C", "A"}};
  const auto r = cohen_kappa(ref, votes);
  CHECK(r.observed == 0.75);
  // q: A 2/4, B 2/4, C 2/4; p_ref: A 1/2, B 1/4, C 1/4 -> p_e = 0.5.
  CHECK(r.expected == doctest::Approx(0.5));
  CHECK(r.kappa == doctest::Approx(0.5));
  std::vector<std::string> firsts;
  for (const auto& v : votes) firsts.push_back(v.first);
  CHECK(r.kappa >= cohen_kappa(ref, firsts).kappa);
}

TEST_CASE("relaxed kappa is at least strict kappa for informative second choices") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = fixtures::annotator_fixture(rng);
    std::vector<std::string> firsts;
    for (const auto& v : f.votes) firsts.push_back(v.first);
    const auto relaxed = cohen_kappa(f.reference, f.votes);
    const auto strict = cohen_kappa(f.reference, firsts);
    CHECK(relaxed.observed >= strict.observed);
    CHECK(relaxed.expected >= strict.expected);
    CHECK(relaxed.kappa >= strict.kappa);
  }
}

TEST_CASE("majority vote") {
  AnnotationSet s;
  for (const char* a : {"x", "y", "z"}) s.add("unanimous", a, {"A", {}});
  s.add("split", "x", {"A", {}});
  s.add("split", "y", {"A", {}});
  s.add("split", "z", {"B", {}});
  s.add("three", "x", {"A", {}});
  s.add("three", "y", {"B", "C"});
  s.add("three", "z", {"C", {}});
  s.add("stuck", "x", {"A", {}});
  s.add("stuck", "y", {"B", {}});
  s.add("stuck", "z", {"C", {}});
  const auto v = majority_vote(s);
  REQUIRE(v.size() == 4);
  CHECK(v[0].vote->first == "A");
  CHECK(v[1].vote->first == "A");
  CHECK(v[1].vote->second == "B");
  CHECK(v[2].vote->first == "C");
  CHECK_FALSE(v[3].vote.has_value());
}

TEST_CASE("annotation validation") {
  AnnotationSet s;
  s.add("1", "x", {"A", {}});
  CHECK_THROWS_AS(s.add("1", "x", {"B", {}}), Error);
  CHECK_THROWS_AS(s.add("2", "x", {"B", "B"}), Error);
  std::istringstream in(R"({"item_id":"u1","annotator":"x","first":3,"second":4})"
                        "\n"
                        R"({"item_id":"u1","annotator":"hmm","first":"3"})"
                        "\n");
  const auto set = read_annotations(in);
  CHECK(set.find("u1", "x")->second == "4");
  std::istringstream bad(R"({"item_id":"u1","first":3})");
  CHECK_THROWS_AS(read_annotations(bad), Error);
}

TEST_CASE("agreement report excludes the reference from alpha") {
  AnnotationSet s;
  const std::vector<std::string> ref{"0", "1", "2", "1", "0", "2"};
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const std::string item = "u" + std::to_string(i);
    s.add(item, "hmm", {ref[i], {}});
    s.add(item, "ann1", {ref[i], {}});
    s.add(item, "ann2", {i == 2 ? "0" : ref[i], i == 2 ? std::optional<std::string>("2") : std::nullopt});
  }
  const auto r = agreement_report(s, "hmm");
  CHECK(r.utterances == 6);
  CHECK(r.states == 3);
  CHECK(r.unresolved == 0);
  CHECK(r.alpha == doctest::Approx(fixtures::alpha_oracle({{"0", "0"}, {"1", "1"}, {"2", "0"}, {"1", "1"}, {"0", "0"}, {"2", "2"}})));
  CHECK(r.strict.kappa == 1.0);
  CHECK_THROWS_AS(agreement_report(s, "nobody"), Error);
  std::ostringstream out;
  write_agreement_csv(out, {{"refund", r}});
  CHECK(out.str().rfind("set,Utterances,States,Alpha,KappaStrict,KappaRelaxed", 0) == 0);
}
