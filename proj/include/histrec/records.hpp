#pragma once

// The nested biographical record extracted per person, plus validation and
// the two JSON views: the wire form (mixed-case field names, matching the
// golden fixtures byte for byte) and a canonical all-lowercase form used by
// the linker and the metrics code.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace histrec::records {

using json = nlohmann::ordered_json;

// A date known to year, year-month or full precision: "1601", "1601-10",
// "1601-10-20". Nothing else parses.
struct PartialDate {
  int year = 0;
  std::optional<int> month;
  std::optional<int> day;  // requires month

  static std::optional<PartialDate> parse(const std::string& s);
  std::string to_string() const;

  bool operator==(const PartialDate&) const = default;
};

bool is_valid_partial_date(const std::string& s);

struct EducationEntry {
  std::optional<std::string> subject;
  std::optional<std::string> location;
  std::optional<std::string> date;
  std::optional<std::string> source;

  bool operator==(const EducationEntry&) const = default;
};

struct CareerEntry {
  std::optional<std::string> job;
  std::optional<std::string> location;
  std::optional<std::string> date;
  std::optional<std::string> source;
  int is_side_job = 0;  // 0 or 1

  bool operator==(const CareerEntry&) const = default;
};

struct ParticularityEntry {
  std::string particularity;  // non-empty
  std::optional<std::string> location;
  std::optional<std::string> date;
  std::optional<std::string> source;

  bool operator==(const ParticularityEntry&) const = default;
};

struct RelatedPerson {
  std::optional<std::string> first_name;
  std::optional<std::string> last_name;
  std::optional<std::string> affix;
  std::optional<std::string> gender;
  std::optional<std::string> source;
  std::vector<std::string> second_names;
  std::vector<std::string> alternative_last_names;
  std::optional<std::string> birth_country;
  std::optional<std::string> birth_city;
  std::optional<std::string> birth_date;
  std::optional<std::string> death_date;
  std::optional<std::string> death_city;

  bool operator==(const RelatedPerson&) const = default;
};

struct PersonRecord {
  std::string first_name;  // required
  std::string last_name;   // required
  std::optional<std::string> affix;
  std::optional<std::string> gender;  // free text; the registers use "Man"
  std::vector<std::string> second_names;
  std::vector<std::string> alternative_last_names;
  std::vector<EducationEntry> education;
  std::vector<CareerEntry> careers;
  std::vector<ParticularityEntry> particularities;
  std::vector<RelatedPerson> spouses;
  std::vector<RelatedPerson> parents;
  std::vector<RelatedPerson> grand_parents;
  std::vector<RelatedPerson> in_laws;
  std::vector<RelatedPerson> children;
  std::vector<RelatedPerson> far_family;
  int type_of_person = 1;  // 1 = professor
  std::optional<std::string> faculty;
  std::optional<std::string> birth_country;
  std::optional<std::string> birth_city;
  std::optional<std::string> birth_date;
  std::optional<std::string> death_date;
  std::optional<std::string> death_city;

  bool operator==(const PersonRecord&) const = default;
};

enum class ValidationCode { MissingRequiredField, BadDateFormat, WrongType, BadValue };

struct ValidationIssue {
  ValidationCode code;
  std::string path;   // e.g. "careers[0].date"
  std::string detail;

  std::string to_string() const;
};

using ValidationResult = std::variant<PersonRecord, std::vector<ValidationIssue>>;

// Checks required fields, date formats, list types and flag domains against
// a parsed JSON document. Field names are accepted in wire form
// ("FirstName") or canonical form ("first_name"); unknown keys are ignored.
ValidationResult validate(const json& raw);

// Wire form: Appendix-style mixed-case keys, fixed field order.
json to_wire_json(const PersonRecord& rec);

// Canonical form: every key lowercase snake_case.
json to_canonical_json(const PersonRecord& rec);

// Rewrites a record document's keys to the canonical lowercase form without
// validating it; unknown keys pass through lowercased.
json canonicalize_keys(const json& doc);

// JSON Schema for the record, used as the tool/function parameter schema in
// chat-completion requests.
json person_record_schema();

}  // namespace histrec::records
