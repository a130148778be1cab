#include "histrec/linker.hpp"

#include <algorithm>

#include "histrec/errors.hpp"
#include "histrec/log.hpp"
#include "histrec/text.hpp"

namespace histrec::linkage {

const char* to_string(MatchedCondition c) {
  switch (c) {
    case MatchedCondition::Cond1: return "cond1";
    case MatchedCondition::Cond2: return "cond2";
    case MatchedCondition::Uncertain: return "uncertain";
    case MatchedCondition::None: return "none";
  }
  return "none";
}

namespace {

// Lowercases and maps every non-alphanumeric code point to a space.
std::string normalize_chars(const std::string& name) {
  auto cps = text::decode_utf8(name, false);
  std::string out;
  for (char32_t cp : cps) {
    if (text::is_letter(cp)) {
      out += text::encode_utf8(text::to_lower(cp));
    } else if (cp >= U'0' && cp <= U'9') {
      out += static_cast<char>(cp);
    } else {
      out += ' ';
    }
  }
  return out;
}

std::vector<std::string> split_alternatives(const std::string& column) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= column.size()) {
    size_t end = column.find(';', start);
    if (end == std::string::npos) end = column.size();
    std::string part = text::trim(column.substr(start, end - start));
    if (!part.empty()) out.push_back(part);
    start = end + 1;
  }
  return out;
}

bool equal_fold(const std::optional<std::string>& a, const std::optional<std::string>& b) {
  if (!a || !b) return false;  // a null clause is false
  return text::lowercase(text::trim(*a)) == text::lowercase(text::trim(*b));
}

bool birth_years_equal(const records::PersonRecord& rec, const store::DbPerson& db) {
  auto a = birth_year(rec.birth_date);
  auto b = birth_year(db.birth_date);
  return a && b && *a == *b;
}

bool names_match(const records::PersonRecord& rec, const store::DbPerson& db) {
  if (!db.first_name) return false;
  return first_names_match(rec.first_name, *db.first_name) &&
         last_names_match(rec.last_name, rec.alternative_last_names, db.last_name,
                          db.alternative_last_name);
}

std::optional<std::string> join_alternatives(const std::vector<std::string>& alts) {
  if (alts.empty()) return std::nullopt;
  std::string out;
  for (const auto& a : alts) {
    if (!out.empty()) out += "; ";
    out += a;
  }
  return out;
}

store::NewPerson new_person_from_record(const records::PersonRecord& rec) {
  store::NewPerson p;
  p.first_name = rec.first_name;
  p.last_name = rec.last_name;
  p.affix = rec.affix;
  p.alternative_last_name = join_alternatives(rec.alternative_last_names);
  p.rating = 1;
  p.faculty = rec.faculty;
  p.type_of_person = rec.type_of_person;
  p.birth_city = rec.birth_city;
  p.birth_country = rec.birth_country;
  p.birth_date = rec.birth_date;
  p.death_date = rec.death_date;
  p.death_city = rec.death_city;
  return p;
}

}  // namespace

std::vector<std::string> normalize_name(const std::string& name) {
  return text::split_whitespace(normalize_chars(name));
}

std::string last_name_key(const std::string& name) {
  auto tokens = normalize_name(name);
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::vector<std::string> name_keys(const std::optional<std::string>& last_name,
                                   const std::optional<std::string>& alternative_last_name) {
  std::vector<std::string> keys;
  auto add = [&keys](const std::string& raw) {
    std::string key = last_name_key(raw);
    if (!key.empty() && std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
  };
  if (last_name) add(*last_name);
  if (alternative_last_name)
    for (const auto& alt : split_alternatives(*alternative_last_name)) add(alt);
  return keys;
}

bool first_names_match(const std::string& a, const std::string& b) {
  auto ta = normalize_name(a);
  auto tb = normalize_name(b);
  for (const auto& t : ta)
    if (std::find(tb.begin(), tb.end(), t) != tb.end()) return true;
  return false;
}

bool last_names_match(const std::string& record_last, const std::vector<std::string>& record_alts,
                      const std::optional<std::string>& db_last,
                      const std::optional<std::string>& db_alt) {
  std::vector<std::string> record_keys;
  record_keys.push_back(last_name_key(record_last));
  for (const auto& alt : record_alts) record_keys.push_back(last_name_key(alt));

  std::vector<std::string> db_keys = name_keys(db_last, db_alt);
  for (const auto& r : record_keys) {
    if (r.empty()) continue;
    if (std::find(db_keys.begin(), db_keys.end(), r) != db_keys.end()) return true;
  }
  return false;
}

std::optional<int> birth_year(const std::optional<std::string>& partial_date) {
  if (!partial_date) return std::nullopt;
  auto parsed = records::PartialDate::parse(*partial_date);
  if (!parsed) return std::nullopt;
  return parsed->year;
}

bool match_condition1(const records::PersonRecord& rec, const store::DbPerson& db) {
  if (!db.first_name) return false;
  return first_names_match(rec.first_name, *db.first_name) &&
         last_names_match(rec.last_name, rec.alternative_last_names, db.last_name,
                          db.alternative_last_name) &&
         (birth_years_equal(rec, db) || equal_fold(rec.birth_city, db.birth_city));
}

bool match_condition2(const records::PersonRecord& rec, const store::DbPerson& db) {
  return last_names_match(rec.last_name, rec.alternative_last_names, db.last_name,
                          db.alternative_last_name) &&
         birth_years_equal(rec, db) &&
         (equal_fold(rec.birth_city, db.birth_city) ||
          equal_fold(rec.birth_country, db.birth_country));
}

LinkDecision Linker::link(const records::PersonRecord& rec) {
  std::optional<std::string> alt_column = join_alternatives(rec.alternative_last_names);
  auto candidates = store_.find_by_name_keys(name_keys(rec.last_name, alt_column));

  std::vector<const store::DbPerson*> definitive;
  const store::DbPerson* suspected = nullptr;
  MatchedCondition first_condition = MatchedCondition::None;

  for (const auto& c : candidates) {
    const bool c1 = match_condition1(rec, c);
    const bool c2 = c1 ? false : match_condition2(rec, c);
    if (c1 || c2) {
      definitive.push_back(&c);
      if (definitive.size() == 1) first_condition = c1 ? MatchedCondition::Cond1
                                                       : MatchedCondition::Cond2;
      continue;
    }
    // Names agree but no birth field does: a potential duplicate.
    if (suspected == nullptr && names_match(rec, c) && !birth_years_equal(rec, c) &&
        !equal_fold(rec.birth_city, c.birth_city) &&
        !equal_fold(rec.birth_country, c.birth_country)) {
      suspected = &c;
    }
  }

  if (!definitive.empty()) {
    if (definitive.size() > 1) {
      std::string ids;
      for (const auto* d : definitive) ids += (ids.empty() ? "" : ", ") + std::to_string(d->id);
      log::warn("linker: multiple definitive candidates for '" + rec.last_name +
                "' (ids " + ids + "); picking lowest id");
    }
    // candidates arrive ordered by id, so the first hit is the lowest.
    return LinkDecision{definitive.front()->id, false, false, first_condition};
  }

  if (suspected != nullptr) {
    std::int64_t new_id = store_.insert_person(new_person_from_record(rec));
    store_.insert_relation(new_id, suspected->id);
    return LinkDecision{new_id, true, true, MatchedCondition::Uncertain};
  }

  std::int64_t new_id = store_.insert_person(new_person_from_record(rec));
  return LinkDecision{new_id, true, false, MatchedCondition::None};
}

EnrichmentSummary Linker::enrich(std::int64_t person_id, const records::PersonRecord& rec,
                                 bool matched_existing) {
  auto person = store_.get_person(person_id);
  if (!person) throw StoreError("enrich: no person with id " + std::to_string(person_id));

  EnrichmentSummary summary;

  if (store_.education_count(person_id) == 0)
    for (const auto& e : rec.education) {
      store_.insert_education(person_id, e);
      ++summary.education_added;
    }
  if (store_.career_count(person_id) == 0)
    for (const auto& c : rec.careers) {
      store_.insert_career(person_id, c);
      ++summary.careers_added;
    }
  if (store_.particularity_count(person_id) == 0)
    for (const auto& p : rec.particularities) {
      store_.insert_particularity(person_id, p);
      ++summary.particularities_added;
    }

  auto fill = [&summary](std::optional<std::string>& column,
                         const std::optional<std::string>& value) {
    if (!column && value) {
      column = value;
      ++summary.scalars_filled;
    }
  };
  store::DbPerson updated = *person;
  fill(updated.affix, rec.affix);
  fill(updated.alternative_last_name, join_alternatives(rec.alternative_last_names));
  fill(updated.faculty, rec.faculty);
  fill(updated.birth_city, rec.birth_city);
  fill(updated.birth_country, rec.birth_country);
  fill(updated.birth_date, rec.birth_date);
  fill(updated.death_date, rec.death_date);
  fill(updated.death_city, rec.death_city);
  if (!updated.type_of_person) {
    updated.type_of_person = rec.type_of_person;
    ++summary.scalars_filled;
  }

  // The match event labels the row as matched/enriched data.
  if (matched_existing && updated.rating != 2) {
    updated.rating = 2;
    summary.rating_changed = true;
  }

  if (summary.scalars_filled > 0 || summary.rating_changed) store_.update_person(updated);
  return summary;
}

LinkDecision Linker::process(const records::PersonRecord& rec) {
  store_.begin();
  try {
    LinkDecision decision = link(rec);
    enrich(decision.person_id, rec, !decision.new_person);
    store_.commit();
    return decision;
  } catch (...) {
    try {
      store_.rollback();
    } catch (...) {
      // Rollback failure is secondary; surface the original error.
    }
    throw;
  }
}

}  // namespace histrec::linkage
