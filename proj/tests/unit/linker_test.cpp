#include "histrec/linker.hpp"

#include <doctest.h>

#include <random>

#include "histrec/errors.hpp"
#include "test_support.hpp"

using namespace histrec;
using linkage::MatchedCondition;

namespace {

records::PersonRecord record(const std::string& first, const std::string& last) {
  records::PersonRecord rec;
  rec.first_name = first;
  rec.last_name = last;
  return rec;
}

store::NewPerson db_person(const std::string& first, const std::string& last, int rating = 3) {
  store::NewPerson p;
  p.first_name = first;
  p.last_name = last;
  p.rating = rating;
  return p;
}

store::DbPerson as_db(const records::PersonRecord& rec, std::int64_t id = 1) {
  store::DbPerson p;
  p.id = id;
  p.first_name = rec.first_name;
  p.last_name = rec.last_name;
  p.birth_city = rec.birth_city;
  p.birth_country = rec.birth_country;
  p.birth_date = rec.birth_date;
  return p;
}

}  // namespace

TEST_CASE("name normalization") {
  CHECK(linkage::normalize_name("Casper Janszoon") ==
        std::vector<std::string>{"casper", "janszoon"});
  CHECK(linkage::normalize_name("") == std::vector<std::string>{});
  CHECK(linkage::normalize_name("COOLHAES,") == std::vector<std::string>{"coolhaes"});
  CHECK(linkage::normalize_name("Franciscus (Francois)") ==
        std::vector<std::string>{"franciscus", "francois"});
  CHECK(linkage::last_name_key("VAN DER AA,") == "van der aa");
}

TEST_CASE("first names match on token intersection") {
  CHECK(linkage::first_names_match("Casper Janszoon", "Casper Johannes"));
  CHECK_FALSE(linkage::first_names_match("Anna", "Maria"));
  CHECK(linkage::first_names_match("Franciscus (Francois)", "Francois"));
  CHECK_FALSE(linkage::first_names_match("", "Anna"));
}

TEST_CASE("last names match exactly, including alternatives") {
  CHECK(linkage::last_names_match("COOLHAES", {"KOOLHAES"}, "Koolhaes", std::nullopt));
  CHECK_FALSE(linkage::last_names_match("Coolhaas", {}, "Koolhaes", std::nullopt));
  CHECK(linkage::last_names_match("GOMARUS", {}, "gomarus", std::nullopt));
  CHECK(linkage::last_names_match("Smith", {}, "Jones", "Smith"));
  // A db column carrying several alternatives matches each one.
  CHECK(linkage::last_names_match("KOOLHAAS", {}, "Coolhaes", "Koolhaes; Koolhaas"));
  CHECK_FALSE(linkage::last_names_match("X", {}, std::nullopt, std::nullopt));
}

TEST_CASE("condition 1: names plus birth year or birth city") {
  auto rec = record("Caspar Janszoon", "COOLHAES");
  rec.birth_date = "1534-01-24";
  rec.birth_city = "Keulen";

  auto db = as_db(record("Caspar Johannes", "Coolhaes"));
  db.birth_date = "1534";
  db.birth_city = "Elders";
  CHECK(linkage::match_condition1(rec, db));  // year matches, city differs

  db.birth_date = "1600";
  db.birth_city = "keulen";
  CHECK(linkage::match_condition1(rec, db));  // city matches, year differs

  db.birth_city = "Elders";
  CHECK_FALSE(linkage::match_condition1(rec, db));

  SUBCASE("null birth data on both sides never matches") {
    auto bare = record("Caspar", "COOLHAES");
    auto bare_db = as_db(record("Caspar", "COOLHAES"));
    CHECK_FALSE(linkage::match_condition1(bare, bare_db));
  }

  SUBCASE("a record built from the main-person fixture matches its store row") {
    auto result = records::validate(
        testing::load_json(testing::fixture_dir() / "listing5_main_person.json"));
    auto* fixture = std::get_if<records::PersonRecord>(&result);
    REQUIRE(fixture != nullptr);
    auto row = as_db(*fixture);
    CHECK(linkage::match_condition1(*fixture, row));
  }
}

TEST_CASE("condition 2: last name, birth year, and city or country") {
  auto rec = record("Anna", "COOLHAES");
  rec.birth_date = "1534";
  rec.birth_country = "Duitsland";

  auto db = as_db(record("Caspar", "Coolhaes"));
  db.birth_date = "1534-01-24";
  db.birth_country = "duitsland";
  CHECK(linkage::match_condition2(rec, db));  // first names differ, rest matches

  db.birth_country = std::nullopt;
  CHECK_FALSE(linkage::match_condition2(rec, db));  // city and country both unavailable

  db.birth_city = "Keulen";
  rec.birth_city = "Keulen";
  CHECK(linkage::match_condition2(rec, db));

  rec.birth_date = "1600";
  CHECK_FALSE(linkage::match_condition2(rec, db));  // year must match

  SUBCASE("fixture row differing only in first name still matches") {
    auto result = records::validate(
        testing::load_json(testing::fixture_dir() / "listing5_main_person.json"));
    auto* fixture = std::get_if<records::PersonRecord>(&result);
    REQUIRE(fixture != nullptr);
    auto row = as_db(*fixture);
    row.first_name = "Gerardus";
    CHECK(linkage::match_condition2(*fixture, row));
  }
}

TEST_CASE("conditions are monotone under information removal") {
  std::mt19937 rng(41);
  const std::vector<std::string> firsts = {"Caspar", "Caspar Janszoon", "Anna"};
  const std::vector<std::string> lasts = {"COOLHAES", "Koolhaes"};
  const std::vector<std::string> cities = {"Keulen", "Leiden"};
  const std::vector<std::string> dates = {"1534", "1534-01-24", "1600"};

  auto maybe = [&rng](const std::vector<std::string>& pool) -> std::optional<std::string> {
    if (rng() % 3 == 0) return std::nullopt;
    return pool[rng() % pool.size()];
  };

  for (int trial = 0; trial < 300; ++trial) {
    records::PersonRecord rec;
    rec.first_name = firsts[rng() % firsts.size()];
    rec.last_name = lasts[rng() % lasts.size()];
    rec.birth_city = maybe(cities);
    rec.birth_country = maybe({"Duitsland", "Nederland"});
    rec.birth_date = maybe(dates);

    store::DbPerson db;
    db.id = 1;
    db.first_name = firsts[rng() % firsts.size()];
    db.last_name = lasts[rng() % lasts.size()];
    db.birth_city = maybe(cities);
    db.birth_country = maybe({"Duitsland", "Nederland"});
    db.birth_date = maybe(dates);

    const bool c1 = linkage::match_condition1(rec, db);
    const bool c2 = linkage::match_condition2(rec, db);

    auto weakened = rec;
    auto weakened_db = db;
    switch (rng() % 6) {
      case 0: weakened.birth_city = std::nullopt; break;
      case 1: weakened.birth_country = std::nullopt; break;
      case 2: weakened.birth_date = std::nullopt; break;
      case 3: weakened_db.birth_city = std::nullopt; break;
      case 4: weakened_db.birth_country = std::nullopt; break;
      case 5: weakened_db.birth_date = std::nullopt; break;
    }
    // Removing information never turns a non-match into a match.
    if (!c1) CHECK_FALSE(linkage::match_condition1(weakened, weakened_db));
    if (!c2) CHECK_FALSE(linkage::match_condition2(weakened, weakened_db));
  }
}

TEST_CASE("link decisions against a live store") {
  store::SqliteStore store(":memory:");
  linkage::Linker linker(store);

  SUBCASE("empty store creates a plain new person") {
    auto decision = linker.process(record("Pieter", "ALDERSHOF"));
    CHECK(decision.new_person);
    CHECK_FALSE(decision.maybe_same_person);
    CHECK(decision.matched_condition == MatchedCondition::None);
    CHECK(store.person_count() == 1);
    CHECK(store.relation_count() == 0);
    CHECK(store.get_person(decision.person_id)->rating == 1);
  }

  SUBCASE("a matching row is reused, not duplicated") {
    auto seed = db_person("Caspar Johannes", "Coolhaes");
    seed.birth_date = "1534";
    std::int64_t id = store.insert_person(seed);

    auto rec = record("Caspar Janszoon", "COOLHAES");
    rec.birth_date = "1534-01-24";
    auto decision = linker.process(rec);
    CHECK_FALSE(decision.new_person);
    CHECK(decision.person_id == id);
    CHECK(decision.matched_condition == MatchedCondition::Cond1);
    CHECK(store.person_count() == 1);

    // Linking the same record again still matches the same row.
    auto again = linker.process(rec);
    CHECK(again.person_id == id);
    CHECK(store.person_count() == 1);
  }

  SUBCASE("uncertain match creates a person plus a review relation") {
    auto seed = db_person("Caspar", "COOLHAES");
    seed.birth_date = "1534";
    seed.birth_city = "Keulen";
    std::int64_t suspected = store.insert_person(seed);

    auto rec = record("Caspar", "COOLHAES");
    rec.birth_date = "1600";
    rec.birth_city = "Leiden";
    auto decision = linker.process(rec);
    CHECK(decision.new_person);
    CHECK(decision.maybe_same_person);
    CHECK(decision.matched_condition == MatchedCondition::Uncertain);
    CHECK(decision.person_id != suspected);
    CHECK(store.person_count() == 2);
    CHECK(store.relation_count() == 1);
  }

  SUBCASE("ties resolve to the lowest id") {
    auto seed = db_person("Caspar", "COOLHAES");
    seed.birth_date = "1534";
    std::int64_t first = store.insert_person(seed);
    store.insert_person(seed);

    auto rec = record("Caspar", "COOLHAES");
    rec.birth_date = "1534";
    auto decision = linker.process(rec);
    CHECK(decision.person_id == first);
  }

  SUBCASE("store row count moves by exactly one per new person") {
    std::mt19937 rng(59);
    for (int i = 0; i < 40; ++i) {
      auto rec = testing::random_record(rng);
      std::size_t before = store.person_count();
      auto decision = linker.process(rec);
      std::size_t after = store.person_count();
      if (decision.new_person) {
        CHECK(after == before + 1);
      } else {
        CHECK(after == before);
      }
      // Exactly one of the three outcomes holds.
      int outcomes = 0;
      if (!decision.new_person && !decision.maybe_same_person) outcomes += 1;
      if (decision.new_person && !decision.maybe_same_person) outcomes += 1;
      if (decision.new_person && decision.maybe_same_person) outcomes += 1;
      CHECK(outcomes == 1);
    }
  }
}

TEST_CASE("enrichment fills gaps without overwriting") {
  store::SqliteStore store(":memory:");
  linkage::Linker linker(store);

  auto seed = db_person("Caspar Janszoon", "Coolhaes");
  seed.birth_date = "1534-01-24";
  seed.faculty = std::nullopt;
  std::int64_t id = store.insert_person(seed);

  auto rec = record("Caspar Janszoon", "COOLHAES");
  rec.birth_date = "1599-12-31";  // conflicts with the stored value
  rec.faculty = "Theologie";      // fills a gap
  rec.death_city = "Leiden";
  records::CareerEntry career;
  career.job = "Hoogleraar";
  rec.careers.push_back(career);

  auto summary = linker.enrich(id, rec, true);
  auto person = store.get_person(id);
  REQUIRE(person);
  CHECK(person->birth_date == "1534-01-24");  // non-null column untouched
  CHECK(person->faculty == "Theologie");
  CHECK(person->death_city == "Leiden");
  CHECK(person->rating == 2);  // the match event relabels the row
  CHECK(summary.rating_changed);
  CHECK(summary.careers_added == 1);
  CHECK(store.career_count(id) == 1);

  SUBCASE("a populated table is left alone") {
    records::PersonRecord more = rec;
    records::CareerEntry other;
    other.job = "Rector";
    more.careers = {other};
    auto second = linker.enrich(id, more, true);
    CHECK(second.careers_added == 0);
    CHECK(store.career_count(id) == 1);
  }

  SUBCASE("new persons get every table populated") {
    auto fresh = record("Isaac", "BEECKMAN");
    records::EducationEntry edu;
    edu.subject = "Stud. Litt.";
    fresh.education.push_back(edu);
    records::ParticularityEntry part;
    part.particularity = "Salaris: 600";
    fresh.particularities.push_back(part);
    records::CareerEntry job;
    job.job = "Rector";
    fresh.careers.push_back(job);

    auto decision = linker.process(fresh);
    CHECK(decision.new_person);
    CHECK(store.education_count(decision.person_id) == 1);
    CHECK(store.career_count(decision.person_id) == 1);
    CHECK(store.particularity_count(decision.person_id) == 1);
    CHECK(store.get_person(decision.person_id)->rating == 1);
  }
}

TEST_CASE("the store survives reopening") {
  testing::TempDir tmp("store");
  const std::string path = (tmp.path() / "store.db").string();
  std::int64_t id = 0;
  {
    store::SqliteStore store(path);
    auto seed = db_person("Caspar", "COOLHAES");
    id = store.insert_person(seed);
  }
  store::SqliteStore reopened(path);
  auto person = reopened.get_person(id);
  REQUIRE(person);
  CHECK(person->last_name == "COOLHAES");
  CHECK(reopened.find_by_name_keys({"coolhaes"}).size() == 1);
}

TEST_CASE("rollback leaves the store untouched") {
  store::SqliteStore store(":memory:");
  store.begin();
  store.insert_person(db_person("Caspar", "COOLHAES"));
  CHECK(store.person_count() == 1);
  store.rollback();
  CHECK(store.person_count() == 0);

  store.begin();
  store.insert_person(db_person("Caspar", "COOLHAES"));
  store.commit();
  CHECK(store.person_count() == 1);
}
