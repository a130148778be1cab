#include "histrec/metrics.hpp"

#include <doctest.h>

#include <functional>
#include <random>

#include "histrec/errors.hpp"
#include "histrec/text.hpp"
#include "test_support.hpp"

using namespace histrec;
using metrics::json;

namespace {

// The edit-distance recurrence evaluated directly; kept independent of the
// production DP so it can act as an oracle.
std::size_t recursive_levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> memo((a.size() + 1) * (b.size() + 1), -1);
  const std::size_t stride = b.size() + 1;
  std::function<int(std::size_t, std::size_t)> f = [&](std::size_t i, std::size_t j) -> int {
    int& slot = memo[i * stride + j];
    if (slot >= 0) return slot;
    if (i == 0) return slot = static_cast<int>(j);
    if (j == 0) return slot = static_cast<int>(i);
    int best = f(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
    best = std::min(best, f(i - 1, j) + 1);
    best = std::min(best, f(i, j - 1) + 1);
    return slot = best;
  };
  return static_cast<std::size_t>(f(a.size(), b.size()));
}

std::size_t lev(const std::string& a, const std::string& b) {
  return metrics::levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

}  // namespace

TEST_CASE("levenshtein basics") {
  CHECK(lev("abc", "abc") == 0);
  CHECK(lev("kitten", "sitting") == recursive_levenshtein("kitten", "sitting"));
  CHECK(recursive_levenshtein("kitten", "sitting") == 3);
  CHECK(lev("", "abc") == 3);
  CHECK(lev("abc", "") == 3);
  CHECK(lev("", "") == 0);
}

TEST_CASE("levenshtein equals the recursive definition on short strings") {
  // Full enumeration over {a,b,c} up to length 4   (the acceptance suite
  // pushes this to length 6).
  std::vector<std::string> all{""};
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::string> next;
    for (const auto& s : all)
      if (s.size() == static_cast<std::size_t>(len - 1))
        for (char c : {'a', 'b', 'c'}) next.push_back(s + c);
    all.insert(all.end(), next.begin(), next.end());
  }
  for (const auto& a : all)
    for (const auto& b : all) REQUIRE(lev(a, b) == recursive_levenshtein(a, b));
}

TEST_CASE("levenshtein is a metric") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(0, 12);
  std::uniform_int_distribution<int> sym(0, 3);
  auto random_string = [&] {
    std::string s;
    for (int i = len(rng); i > 0; --i) s.push_back(static_cast<char>('a' + sym(rng)));
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    std::string a = random_string();
    std::string b = random_string();
    std::string c = random_string();
    CHECK(lev(a, b) == lev(b, a));
    CHECK(lev(a, a) == 0);
    if (lev(a, b) == 0) CHECK(a == b);
    CHECK(lev(a, c) <= lev(a, b) + lev(b, c));
  }
}

TEST_CASE("normalize_for_metrics trims and lowercases only") {
  CHECK(metrics::normalize_for_metrics("  Leiden ") == "leiden");
  CHECK(metrics::normalize_for_metrics("GOMARUS") == "gomarus");
  CHECK(metrics::normalize_for_metrics(" a  B\nc ") == "a  b\nc");
}

TEST_CASE("cer and wer") {
  CHECK(metrics::cer("same text", "same text") == 0.0);
  CHECK(metrics::wer("same text", "same text") == 0.0);

  // 'Leiden' misread as 'Lden': two deleted characters, one wrong word.
  auto m = metrics::text_metrics("leiden is", "lden is");
  CHECK(m.char_edits == 2);
  CHECK(m.ref_chars == 9);
  CHECK(m.word_edits == 1);
  CHECK(m.ref_words == 2);
  CHECK(m.cer() == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(m.wer() == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(metrics::cer("abc", "") == 1.0);
  CHECK_THROWS_AS(metrics::text_metrics("", "abc"), EvalError);
  CHECK_THROWS_AS(metrics::text_metrics("   ", "abc"), EvalError);
}

TEST_CASE("cer and wer ignore case and outer whitespace") {
  std::mt19937 rng(11);
  const std::vector<std::string> samples = {"Leiden is", "GOMARUS (GOMAIR)", "a b c",
                                            "Stud. Litt., Phil."};
  for (const auto& ref : samples) {
    for (const auto& hyp : samples) {
      auto base = metrics::text_metrics(ref, hyp);
      auto shifted = metrics::text_metrics("  " + ref + "\t", hyp + "\n");
      CHECK(base.char_edits == shifted.char_edits);
      auto upper = metrics::text_metrics(text::lowercase(ref), hyp);
      CHECK(base.char_edits == upper.char_edits);
      CHECK(base.word_edits == upper.word_edits);
    }
  }
}

TEST_CASE("volume averages") {
  metrics::TextMetrics a{1, 1, 10, 2};  // cer 0.1
  metrics::TextMetrics b{3, 1, 10, 2};  // cer 0.3
  auto avg = metrics::volume_average({a, b});
  CHECK(avg.documents == 2);
  CHECK(avg.mean_cer == doctest::Approx(0.2).epsilon(1e-12));

  auto single = metrics::volume_average({a});
  CHECK(single.mean_cer == doctest::Approx(0.1).epsilon(1e-12));

  // Hand-computed mean over four documents.
  metrics::TextMetrics c{2, 0, 8, 1};   // 0.25
  metrics::TextMetrics d{0, 0, 5, 1};   // 0.0
  auto four = metrics::volume_average({a, b, c, d});
  CHECK(four.mean_cer == doctest::Approx((0.1 + 0.3 + 0.25 + 0.0) / 4.0).epsilon(1e-12));

  CHECK_THROWS_AS(metrics::volume_average({}), EvalError);
}

TEST_CASE("json accuracy reproduces the main-person table") {
  auto correct = testing::load_json(testing::fixture_dir() / "listing5_main_person.json");
  auto generated = testing::load_json(testing::fixture_dir() / "listing6_main_person.json");
  auto rows = metrics::json_accuracy(correct, generated);

  auto row = [&](const std::string& key) -> const metrics::KeyAccuracy& {
    for (const auto& r : rows)
      if (r.category == "Main person" && r.key == key) return r;
    FAIL("missing row ", key);
    static metrics::KeyAccuracy none;
    return none;
  };

  CHECK(rows.size() == 12);
  CHECK(row("first_name").correct == 1);
  CHECK(row("alternative_last_names").correct == 0);
  CHECK(row("alternative_last_names").total == 3);
  CHECK(row("birth_country").correct == 0);
  CHECK(row("birth_date").correct == 0);   // "1534" vs "1534-01-24"
  CHECK(row("death_date").correct == 0);
  CHECK(row("birth_city").correct == 1);
  CHECK(row("death_city").correct == 1);
  CHECK(row("affix").correct == 1);        // null == null
  CHECK(row("type_of_person").correct == 1);
}

TEST_CASE("json accuracy of a record against itself is 100 percent") {
  std::mt19937 rng(23);
  for (int i = 0; i < 50; ++i) {
    auto rec = testing::random_record(rng);
    auto doc = records::to_wire_json(rec);
    for (const auto& row : metrics::json_accuracy(doc, doc)) {
      CHECK(row.correct == row.total);
      CHECK(row.accuracy() == 100.0);
    }
  }
}

TEST_CASE("json accuracy scores all-null generated output as zero") {
  auto correct = testing::load_json(testing::fixture_dir() / "listing5_main_person.json");
  json empty = json::object();
  for (const auto& row : metrics::json_accuracy(correct, empty)) {
    if (row.key == "affix") continue;  // null == null stays correct
    CHECK(row.correct == 0);
  }
}

TEST_CASE("json accuracy groups nested entries by category") {
  auto rec = testing::appendix_g_json();
  auto rows = metrics::json_accuracy(rec, rec);
  bool saw_education = false;
  bool saw_spouses = false;
  for (const auto& r : rows) {
    if (r.category == "Education") saw_education = true;
    if (r.category == "Spouses") saw_spouses = true;
  }
  CHECK(saw_education);
  CHECK(saw_spouses);

  auto cats = metrics::accuracy_by_category(rows);
  for (const auto& c : cats) CHECK(c.accuracy() == 100.0);
}

TEST_CASE("json accuracy counts missing generated entries as wrong") {
  json correct = json::parse(R"({
    "first_name": "A", "last_name": "B",
    "careers": [
      {"job": "Hoogleraar", "location": "Leiden", "date": "1601", "source": "2", "is_side_job": 0},
      {"job": "Rector", "location": "Delft", "date": "1610", "source": "3", "is_side_job": 0}
    ]
  })");
  json generated = json::parse(R"({
    "first_name": "A", "last_name": "B",
    "careers": [
      {"job": "Hoogleraar", "location": "Leiden", "date": "1601", "source": "2", "is_side_job": 0}
    ]
  })");
  auto rows = metrics::json_accuracy(correct, generated);
  for (const auto& r : rows) {
    if (r.category != "Careers") continue;
    CHECK(r.total == 2);
    CHECK(r.correct == 1);
  }
}

TEST_CASE("link outcome parsing enforces the evaluation shape") {
  json good = json::parse(
      R"({"vol1_X": {"person_id": 3, "new_person": false, "maybe_same_person": false}})");
  auto outcomes = metrics::parse_link_outcomes(good);
  CHECK(outcomes.at("vol1_X").person_id == 3);

  CHECK_THROWS_AS(metrics::parse_link_outcomes(json::parse(R"({"x": {"person_id": "3"}})")),
                  EvalError);
  CHECK_THROWS_AS(metrics::parse_link_outcomes(json::parse(
                      R"({"x": {"person_id": 3, "new_person": 1, "maybe_same_person": false}})")),
                  EvalError);
  CHECK_THROWS_AS(
      metrics::parse_link_outcomes(json::parse(
          R"({"x": {"person_id": 3, "new_person": true, "maybe_same_person": false, "extra": 1}})")),
      EvalError);
  CHECK_THROWS_AS(metrics::parse_link_outcomes(json::parse("[]")), EvalError);

  auto round = metrics::parse_link_outcomes(metrics::link_outcomes_to_json(outcomes));
  CHECK(round == outcomes);
}

TEST_CASE("linkage evaluation") {
  metrics::LinkOutcomeMap expected;
  metrics::LinkOutcomeMap actual;
  for (int i = 0; i < 7; ++i) {
    std::string name = "vol1_P" + std::to_string(i);
    expected[name] = {100 + i, false, false};
    actual[name] = expected[name];
  }

  SUBCASE("identical maps score 100 everywhere") {
    auto r = metrics::linkage_eval(expected, actual);
    CHECK(r.person_id_accuracy == 100.0);
    CHECK(r.new_person_accuracy == 100.0);
    CHECK(r.maybe_same_person_accuracy == 100.0);
    CHECK(r.average == 100.0);
  }

  SUBCASE("one wrong person and id") {
    actual["vol1_P3"] = {999, true, false};
    auto r = metrics::linkage_eval(expected, actual);
    CHECK(r.persons == 7);
    CHECK(r.person_id_accuracy == doctest::Approx(100.0 * 6 / 7));
    CHECK(r.new_person_accuracy == doctest::Approx(100.0 * 6 / 7));
    CHECK(r.maybe_same_person_accuracy == doctest::Approx(100.0));
    CHECK(r.average == doctest::Approx((100.0 * 6 / 7 * 2 + 100.0) / 3.0));
    CHECK(r.expected_new_persons == 0);
    CHECK(r.generated_new_persons == 1);
  }

  SUBCASE("missing actual entry scores wrong on all fields") {
    actual.erase("vol1_P0");
    auto r = metrics::linkage_eval(expected, actual);
    CHECK(r.person_id_accuracy == doctest::Approx(100.0 * 6 / 7));
    CHECK(r.maybe_same_person_accuracy == doctest::Approx(100.0 * 6 / 7));
  }

  SUBCASE("empty expected map is an error") {
    CHECK_THROWS_AS(metrics::linkage_eval({}, actual), EvalError);
  }

  SUBCASE("accuracies stay in range with random disagreement") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      metrics::LinkOutcomeMap noisy = expected;
      for (auto& [k, v] : noisy) {
        if (rng() % 2) v.person_id += 1;
        if (rng() % 2) v.new_person = !v.new_person;
        if (rng() % 2) v.maybe_same_person = !v.maybe_same_person;
      }
      auto r = metrics::linkage_eval(expected, noisy);
      for (double acc : {r.person_id_accuracy, r.new_person_accuracy,
                         r.maybe_same_person_accuracy}) {
        CHECK(acc >= 0.0);
        CHECK(acc <= 100.0);
      }
      CHECK(r.average == doctest::Approx((r.person_id_accuracy + r.new_person_accuracy +
                                          r.maybe_same_person_accuracy) /
                                         3.0));
    }
  }
}
