#pragma once

// Record linkage against the central store. Two definitive conditions:
//   1. first and last name match, and birth year or birth city matches;
//   2. last name and birth year match, and birth city or country matches.
// Names that match without any birth-field agreement flag an uncertain
// match: a new person is created and related to the suspected duplicate.
// Any clause touching a null on either side is false.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "histrec/records.hpp"
#include "histrec/store.hpp"

namespace histrec::linkage {

enum class MatchedCondition { Cond1, Cond2, Uncertain, None };

const char* to_string(MatchedCondition c);

struct LinkDecision {
  std::int64_t person_id = 0;
  bool new_person = false;
  bool maybe_same_person = false;
  MatchedCondition matched_condition = MatchedCondition::None;
};

// Lowercased, punctuation-stripped, whitespace-split tokens.
std::vector<std::string> normalize_name(const std::string& name);

// Whole-name key for last-name equality and index lookup: lowercased,
// punctuation replaced by spaces, whitespace collapsed.
std::string last_name_key(const std::string& name);

// Keys for the person_name_key index: primary last name plus each
// ';'-separated alternative.
std::vector<std::string> name_keys(const std::optional<std::string>& last_name,
                                   const std::optional<std::string>& alternative_last_name);

// True iff the token sets of a and b intersect after normalization.
bool first_names_match(const std::string& a, const std::string& b);

// Exact equality (case-insensitive, punctuation-stripped) between any of
// {record_last} + record_alts and any of {db_last} + db_alt values; no
// fuzzy matching.
bool last_names_match(const std::string& record_last, const std::vector<std::string>& record_alts,
                      const std::optional<std::string>& db_last,
                      const std::optional<std::string>& db_alt);

std::optional<int> birth_year(const std::optional<std::string>& partial_date);

bool match_condition1(const records::PersonRecord& rec, const store::DbPerson& db);
bool match_condition2(const records::PersonRecord& rec, const store::DbPerson& db);

struct EnrichmentSummary {
  std::size_t education_added = 0;
  std::size_t careers_added = 0;
  std::size_t particularities_added = 0;
  std::size_t scalars_filled = 0;
  bool rating_changed = false;
};

class Linker {
 public:
  explicit Linker(store::PersonStore& store) : store_(store) {}

  // Scans candidates sharing a last-name key. First candidate satisfying
  // condition 1 or 2 wins (lowest id on ties, with a warning); otherwise a
  // name-only candidate makes the new person an uncertain match with a
  // relation row; otherwise the person is simply new with rating 1.
  LinkDecision link(const records::PersonRecord& rec);

  // Inserts education/career/particularity rows only when the target's
  // table is empty and fills null scalar columns; populated columns are
  // never overwritten. A match marks the row rating 2.
  EnrichmentSummary enrich(std::int64_t person_id, const records::PersonRecord& rec,
                           bool matched_existing);

  // link + enrich inside one transaction; rolls back on any failure.
  LinkDecision process(const records::PersonRecord& rec);

 private:
  store::PersonStore& store_;
};

}  // namespace histrec::linkage
