#include "histrec/records.hpp"

#include <array>

#include "histrec/text.hpp"

namespace histrec::records {

namespace {

int digits_to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

const json* find_field(const json& obj, const char* wire, const char* canonical) {
  if (auto it = obj.find(wire); it != obj.end()) return &*it;
  if (auto it = obj.find(canonical); it != obj.end()) return &*it;
  return nullptr;
}

struct Validator {
  std::vector<ValidationIssue> issues;

  void missing(const std::string& path) {
    issues.push_back({ValidationCode::MissingRequiredField, path, "required field missing"});
  }
  void wrong_type(const std::string& path, const std::string& expected) {
    issues.push_back({ValidationCode::WrongType, path, "expected " + expected});
  }
  void bad_date(const std::string& path, const std::string& value) {
    issues.push_back({ValidationCode::BadDateFormat, path,
                      "'" + value + "' is not YYYY, YYYY-MM or YYYY-MM-DD"});
  }
  void bad_value(const std::string& path, const std::string& detail) {
    issues.push_back({ValidationCode::BadValue, path, detail});
  }

  std::optional<std::string> optional_string(const json& obj, const char* wire,
                                             const char* canonical, const std::string& path) {
    const json* f = find_field(obj, wire, canonical);
    if (f == nullptr || f->is_null()) return std::nullopt;
    if (!f->is_string()) {
      wrong_type(path, "string or null");
      return std::nullopt;
    }
    return f->get<std::string>();
  }

  std::optional<std::string> optional_date(const json& obj, const char* wire,
                                           const char* canonical, const std::string& path) {
    auto s = optional_string(obj, wire, canonical, path);
    if (s && !is_valid_partial_date(*s)) {
      bad_date(path, *s);
      return std::nullopt;
    }
    return s;
  }

  std::vector<std::string> string_list(const json& obj, const char* name,
                                       const std::string& path) {
    std::vector<std::string> out;
    const json* f = find_field(obj, name, name);
    if (f == nullptr || f->is_null()) return out;
    if (!f->is_array()) {
      wrong_type(path, "array of strings");
      return out;
    }
    for (size_t i = 0; i < f->size(); ++i) {
      const json& item = (*f)[i];
      if (!item.is_string()) {
        wrong_type(path + "[" + std::to_string(i) + "]", "string");
        continue;
      }
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  const json* entry_list(const json& obj, const char* name, const std::string& path) {
    const json* f = find_field(obj, name, name);
    if (f == nullptr || f->is_null()) return nullptr;
    if (!f->is_array()) {
      wrong_type(path, "array");
      return nullptr;
    }
    return f;
  }

  EducationEntry education_entry(const json& obj, const std::string& path) {
    EducationEntry e;
    e.subject = optional_string(obj, "subject", "subject", path + ".subject");
    e.location = optional_string(obj, "location", "location", path + ".location");
    e.date = optional_date(obj, "date", "date", path + ".date");
    e.source = optional_string(obj, "source", "source", path + ".source");
    if (!e.subject && !e.location && !e.date && !e.source)
      bad_value(path, "education entry must have at least one non-null field");
    return e;
  }

  CareerEntry career_entry(const json& obj, const std::string& path) {
    CareerEntry c;
    c.job = optional_string(obj, "job", "job", path + ".job");
    c.location = optional_string(obj, "location", "location", path + ".location");
    c.date = optional_date(obj, "date", "date", path + ".date");
    c.source = optional_string(obj, "source", "source", path + ".source");
    if (const json* f = find_field(obj, "is_side_job", "is_side_job"); f && !f->is_null()) {
      if (!f->is_number_integer()) {
        wrong_type(path + ".is_side_job", "integer 0 or 1");
      } else {
        int v = f->get<int>();
        if (v != 0 && v != 1) {
          bad_value(path + ".is_side_job", "must be 0 or 1");
        } else {
          c.is_side_job = v;
        }
      }
    }
    return c;
  }

  ParticularityEntry particularity_entry(const json& obj, const std::string& path) {
    ParticularityEntry p;
    auto particularity =
        optional_string(obj, "particularity", "particularity", path + ".particularity");
    if (!particularity || particularity->empty()) {
      missing(path + ".particularity");
    } else {
      p.particularity = *particularity;
    }
    p.location = optional_string(obj, "location", "location", path + ".location");
    p.date = optional_date(obj, "date", "date", path + ".date");
    p.source = optional_string(obj, "source", "source", path + ".source");
    return p;
  }

  RelatedPerson related_person(const json& obj, const std::string& path) {
    RelatedPerson r;
    r.first_name = optional_string(obj, "FirstName", "first_name", path + ".first_name");
    r.last_name = optional_string(obj, "LastName", "last_name", path + ".last_name");
    r.affix = optional_string(obj, "Affix", "affix", path + ".affix");
    r.gender = optional_string(obj, "Gender", "gender", path + ".gender");
    r.source = optional_string(obj, "source", "source", path + ".source");
    r.second_names = string_list(obj, "second_names", path + ".second_names");
    r.alternative_last_names =
        string_list(obj, "alternative_last_names", path + ".alternative_last_names");
    r.birth_country = optional_string(obj, "BirthCountry", "birth_country", path + ".birth_country");
    r.birth_city = optional_string(obj, "BirthCity", "birth_city", path + ".birth_city");
    r.birth_date = optional_date(obj, "BirthDate", "birth_date", path + ".birth_date");
    r.death_date = optional_date(obj, "DeathDate", "death_date", path + ".death_date");
    r.death_city = optional_string(obj, "DeathCity", "death_city", path + ".death_city");
    return r;
  }

  std::vector<RelatedPerson> related_list(const json& obj, const char* name) {
    std::vector<RelatedPerson> out;
    const json* arr = entry_list(obj, name, name);
    if (arr == nullptr) return out;
    for (size_t i = 0; i < arr->size(); ++i) {
      const json& item = (*arr)[i];
      std::string path = std::string(name) + "[" + std::to_string(i) + "]";
      if (!item.is_object()) {
        wrong_type(path, "object");
        continue;
      }
      out.push_back(related_person(item, path));
    }
    return out;
  }
};

}  // namespace

std::optional<PartialDate> PartialDate::parse(const std::string& s) {
  PartialDate d;
  if (s.size() == 4 && all_digits(s)) {
    d.year = digits_to_int(s);
    return d;
  }
  if (s.size() == 7 && s[4] == '-' && all_digits(s.substr(0, 4)) && all_digits(s.substr(5))) {
    d.year = digits_to_int(s.substr(0, 4));
    int m = digits_to_int(s.substr(5));
    if (m < 1 || m > 12) return std::nullopt;
    d.month = m;
    return d;
  }
  if (s.size() == 10 && s[4] == '-' && s[7] == '-' && all_digits(s.substr(0, 4)) &&
      all_digits(s.substr(5, 2)) && all_digits(s.substr(8))) {
    d.year = digits_to_int(s.substr(0, 4));
    int m = digits_to_int(s.substr(5, 2));
    int day = digits_to_int(s.substr(8));
    if (m < 1 || m > 12 || day < 1 || day > 31) return std::nullopt;
    d.month = m;
    d.day = day;
    return d;
  }
  return std::nullopt;
}

std::string PartialDate::to_string() const {
  char buf[16];
  if (day) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, *month, *day);
  } else if (month) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, *month);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d", year);
  }
  return buf;
}

bool is_valid_partial_date(const std::string& s) { return PartialDate::parse(s).has_value(); }

std::string ValidationIssue::to_string() const {
  const char* kind = "invalid";
  switch (code) {
    case ValidationCode::MissingRequiredField: kind = "missing required field"; break;
    case ValidationCode::BadDateFormat: kind = "bad date format"; break;
    case ValidationCode::WrongType: kind = "wrong type"; break;
    case ValidationCode::BadValue: kind = "bad value"; break;
  }
  return std::string(kind) + " at " + path + ": " + detail;
}

ValidationResult validate(const json& raw) {
  Validator v;
  if (!raw.is_object()) {
    v.wrong_type("$", "object");
    return v.issues;
  }

  PersonRecord rec;

  const json* first = find_field(raw, "FirstName", "first_name");
  if (first == nullptr || first->is_null()) {
    v.missing("first_name");
  } else if (!first->is_string()) {
    v.wrong_type("first_name", "string");
  } else if (first->get<std::string>().empty()) {
    v.missing("first_name");
  } else {
    rec.first_name = first->get<std::string>();
  }

  const json* last = find_field(raw, "LastName", "last_name");
  if (last == nullptr || last->is_null()) {
    v.missing("last_name");
  } else if (!last->is_string()) {
    v.wrong_type("last_name", "string");
  } else if (last->get<std::string>().empty()) {
    v.missing("last_name");
  } else {
    rec.last_name = last->get<std::string>();
  }

  rec.affix = v.optional_string(raw, "Affix", "affix", "affix");
  rec.gender = v.optional_string(raw, "Gender", "gender", "gender");
  rec.second_names = v.string_list(raw, "second_names", "second_names");
  rec.alternative_last_names =
      v.string_list(raw, "alternative_last_names", "alternative_last_names");

  if (const json* arr = v.entry_list(raw, "education", "education")) {
    for (size_t i = 0; i < arr->size(); ++i) {
      std::string path = "education[" + std::to_string(i) + "]";
      if (!(*arr)[i].is_object()) {
        v.wrong_type(path, "object");
        continue;
      }
      rec.education.push_back(v.education_entry((*arr)[i], path));
    }
  }
  if (const json* arr = v.entry_list(raw, "careers", "careers")) {
    for (size_t i = 0; i < arr->size(); ++i) {
      std::string path = "careers[" + std::to_string(i) + "]";
      if (!(*arr)[i].is_object()) {
        v.wrong_type(path, "object");
        continue;
      }
      rec.careers.push_back(v.career_entry((*arr)[i], path));
    }
  }
  if (const json* arr = v.entry_list(raw, "particularities", "particularities")) {
    for (size_t i = 0; i < arr->size(); ++i) {
      std::string path = "particularities[" + std::to_string(i) + "]";
      if (!(*arr)[i].is_object()) {
        v.wrong_type(path, "object");
        continue;
      }
      rec.particularities.push_back(v.particularity_entry((*arr)[i], path));
    }
  }

  rec.spouses = v.related_list(raw, "spouses");
  rec.parents = v.related_list(raw, "parents");
  rec.grand_parents = v.related_list(raw, "grand_parents");
  rec.in_laws = v.related_list(raw, "in_laws");
  rec.children = v.related_list(raw, "children");
  rec.far_family = v.related_list(raw, "far_family");

  if (const json* f = find_field(raw, "type_of_person", "type_of_person"); f && !f->is_null()) {
    if (!f->is_number_integer()) {
      v.wrong_type("type_of_person", "integer");
    } else {
      rec.type_of_person = f->get<int>();
    }
  }
  rec.faculty = v.optional_string(raw, "faculty", "faculty", "faculty");
  rec.birth_country = v.optional_string(raw, "BirthCountry", "birth_country", "birth_country");
  rec.birth_city = v.optional_string(raw, "BirthCity", "birth_city", "birth_city");
  rec.birth_date = v.optional_date(raw, "BirthDate", "birth_date", "birth_date");
  rec.death_date = v.optional_date(raw, "DeathDate", "death_date", "death_date");
  rec.death_city = v.optional_string(raw, "DeathCity", "death_city", "death_city");

  if (!v.issues.empty()) return v.issues;
  return rec;
}

namespace {

json opt(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json education_wire(const EducationEntry& e) {
  json j = json::object();
  j["subject"] = opt(e.subject);
  j["location"] = opt(e.location);
  j["date"] = opt(e.date);
  j["source"] = opt(e.source);
  return j;
}

json career_wire(const CareerEntry& c) {
  json j = json::object();
  j["job"] = opt(c.job);
  j["location"] = opt(c.location);
  j["date"] = opt(c.date);
  j["source"] = opt(c.source);
  j["is_side_job"] = c.is_side_job;
  return j;
}

json particularity_wire(const ParticularityEntry& p) {
  json j = json::object();
  j["particularity"] = p.particularity;
  j["location"] = opt(p.location);
  j["date"] = opt(p.date);
  j["source"] = opt(p.source);
  return j;
}

json related_json(const RelatedPerson& r, bool wire) {
  json j = json::object();
  j[wire ? "FirstName" : "first_name"] = opt(r.first_name);
  j[wire ? "LastName" : "last_name"] = opt(r.last_name);
  j[wire ? "Affix" : "affix"] = opt(r.affix);
  j[wire ? "Gender" : "gender"] = opt(r.gender);
  j["source"] = opt(r.source);
  j["second_names"] = r.second_names;
  j["alternative_last_names"] = r.alternative_last_names;
  j[wire ? "BirthCountry" : "birth_country"] = opt(r.birth_country);
  j[wire ? "BirthCity" : "birth_city"] = opt(r.birth_city);
  j[wire ? "BirthDate" : "birth_date"] = opt(r.birth_date);
  j[wire ? "DeathDate" : "death_date"] = opt(r.death_date);
  j[wire ? "DeathCity" : "death_city"] = opt(r.death_city);
  return j;
}

json record_json(const PersonRecord& rec, bool wire) {
  json j = json::object();
  j[wire ? "FirstName" : "first_name"] = rec.first_name;
  j[wire ? "LastName" : "last_name"] = rec.last_name;
  j[wire ? "Affix" : "affix"] = opt(rec.affix);
  j[wire ? "Gender" : "gender"] = opt(rec.gender);
  j["second_names"] = rec.second_names;
  j["alternative_last_names"] = rec.alternative_last_names;
  j["education"] = json::array();
  for (const auto& e : rec.education) j["education"].push_back(education_wire(e));
  j["careers"] = json::array();
  for (const auto& c : rec.careers) j["careers"].push_back(career_wire(c));
  j["particularities"] = json::array();
  for (const auto& p : rec.particularities) j["particularities"].push_back(particularity_wire(p));
  for (const auto& [name, list] :
       std::initializer_list<std::pair<const char*, const std::vector<RelatedPerson>*>>{
           {"spouses", &rec.spouses},
           {"parents", &rec.parents},
           {"grand_parents", &rec.grand_parents},
           {"in_laws", &rec.in_laws},
           {"children", &rec.children},
           {"far_family", &rec.far_family}}) {
    j[name] = json::array();
    for (const auto& r : *list) j[name].push_back(related_json(r, wire));
  }
  j["type_of_person"] = rec.type_of_person;
  j["faculty"] = opt(rec.faculty);
  j[wire ? "BirthCountry" : "birth_country"] = opt(rec.birth_country);
  j[wire ? "BirthCity" : "birth_city"] = opt(rec.birth_city);
  j[wire ? "BirthDate" : "birth_date"] = opt(rec.birth_date);
  j[wire ? "DeathDate" : "death_date"] = opt(rec.death_date);
  j[wire ? "DeathCity" : "death_city"] = opt(rec.death_city);
  return j;
}

std::string canonical_key(const std::string& key) {
  static const std::array<std::pair<const char*, const char*>, 9> kMap{{
      {"FirstName", "first_name"},
      {"LastName", "last_name"},
      {"Affix", "affix"},
      {"Gender", "gender"},
      {"BirthCountry", "birth_country"},
      {"BirthCity", "birth_city"},
      {"BirthDate", "birth_date"},
      {"DeathDate", "death_date"},
      {"DeathCity", "death_city"},
  }};
  for (const auto& [wire, canon] : kMap)
    if (key == wire) return canon;
  std::string out = key;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  return out;
}

}  // namespace

json to_wire_json(const PersonRecord& rec) { return record_json(rec, true); }

json to_canonical_json(const PersonRecord& rec) { return record_json(rec, false); }

json canonicalize_keys(const json& doc) {
  if (doc.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : doc.items()) out[canonical_key(key)] = canonicalize_keys(value);
    return out;
  }
  if (doc.is_array()) {
    json out = json::array();
    for (const auto& value : doc) out.push_back(canonicalize_keys(value));
    return out;
  }
  return doc;
}

namespace {

json string_or_null(const char* description, json examples = nullptr) {
  json j{{"type", json::array({"string", "null"})}, {"description", description}};
  if (!examples.is_null()) j["examples"] = examples;
  return j;
}

json date_or_null(const char* description, json examples) {
  json j = string_or_null(description, examples);
  j["pattern"] = "^\\d{4}(-\\d{2}(-\\d{2})?)?$";
  return j;
}

json string_array(const char* description) {
  return json{{"type", "array"}, {"items", json{{"type", "string"}}}, {"description", description}};
}

json ref_array(const char* def_name, const char* description) {
  return json{{"type", "array"},
              {"items", json{{"$ref", std::string("#/$defs/") + def_name}}},
              {"description", description}};
}

}  // namespace

json person_record_schema() {
  json education{
      {"type", "object"},
      {"properties",
       json{{"subject", string_or_null("The subject of study",
                                       json::array({"Stud. Litt., Phil., en Theol."}))},
            {"location", string_or_null("The location of the education", json::array({"Leiden"}))},
            {"date", date_or_null("The date of the education.", json::array({"1577", "1601-10"}))},
            {"source",
             string_or_null("The source of the info mentioned in parentheses",
                            json::array({"33"}))}}},
      {"additionalProperties", false}};

  json career{
      {"type", "object"},
      {"properties",
       json{{"job", string_or_null("The type of job", json::array({"Hoogleraar Geschiedenis"}))},
            {"location", string_or_null("The location of the job", json::array({"Leiden"}))},
            {"date", date_or_null("The date of the job.", json::array({"1601-10-20", "1601"}))},
            {"source",
             string_or_null("The source of the info mentioned in parentheses", json::array({"6"}))},
            {"is_side_job",
             json{{"type", "integer"},
                  {"enum", json::array({0, 1})},
                  {"description", "1 when the position was held next to the main job"}}}}},
      {"additionalProperties", false}};

  json particularity{
      {"type", "object"},
      {"properties",
       json{{"particularity",
             json{{"type", "string"},
                  {"description", "A special detail such as a salary or membership"},
                  {"examples", json::array({"Salaris: bij aanvang 7 800"})}}},
            {"location", string_or_null("The location of the particularity")},
            {"date", date_or_null("The date of the particularity.", json::array({"1598"}))},
            {"source",
             string_or_null("The source of the info mentioned in parentheses",
                            json::array({"6"}))}}},
      {"required", json::array({"particularity"})},
      {"additionalProperties", false}};

  json related{
      {"type", "object"},
      {"properties",
       json{{"FirstName", string_or_null("The first name of the relative")},
            {"LastName", string_or_null("The last name of the relative")},
            {"Affix", string_or_null("Name affix, if any")},
            {"Gender", string_or_null("The gender of the relative")},
            {"source",
             string_or_null("The source of the info mentioned in parentheses")},
            {"second_names", string_array("Middle names of the relative")},
            {"alternative_last_names", string_array("Alternative spellings of the last name")},
            {"BirthCountry", string_or_null("Country of birth")},
            {"BirthCity", string_or_null("City of birth")},
            {"BirthDate",
             date_or_null("Birth date, Usually found after Geb.",
                          json::array({"1601-10-20", "1601", "1601-10"}))},
            {"DeathDate",
             date_or_null("Death date, Usually found after Gest.",
                          json::array({"1641-01-11", "1641"}))},
            {"DeathCity", string_or_null("City of death")}}},
      {"additionalProperties", false}};

  json properties = json::object();
  properties["FirstName"] = json{{"type", "string"},
                                 {"description", "The first name of a person"},
                                 {"examples", json::array({"Cornelis", "Johannes"})}};
  properties["LastName"] = json{{"type", "string"},
                                {"description", "The last name of a person"},
                                {"examples", json::array({"EKAMA"})}};
  properties["Affix"] = string_or_null("Name affix, if any", json::array({"(GOMAIR)"}));
  properties["Gender"] = string_or_null("The gender of the person", json::array({"Man"}));
  properties["second_names"] = string_array("Middle names of the person");
  properties["alternative_last_names"] = string_array("Alternative spellings of the last name");
  properties["education"] = ref_array("Education", "Education history");
  properties["careers"] = ref_array("Career", "Career history");
  properties["particularities"] = ref_array("Particularity", "Special details");
  properties["spouses"] = ref_array("RelatedPerson", "Spouses");
  properties["parents"] = ref_array("RelatedPerson", "Parents");
  properties["grand_parents"] = ref_array("RelatedPerson", "Grandparents");
  properties["in_laws"] = ref_array("RelatedPerson", "Parents-in-law and other in-laws");
  properties["children"] = ref_array("RelatedPerson", "Children");
  properties["far_family"] = ref_array("RelatedPerson", "More distant family members");
  properties["type_of_person"] = json{{"type", "integer"},
                                      {"description", "1 denotes a professor"},
                                      {"examples", json::array({1})}};
  properties["faculty"] =
      string_or_null("The faculty the person worked in", json::array({"Theologie"}));
  properties["BirthCountry"] = string_or_null("Country of birth", json::array({"Duitsland"}));
  properties["BirthCity"] = string_or_null("City of birth", json::array({"Keulen"}));
  properties["BirthDate"] = date_or_null("Birth date, Usually found after Geb.",
                                         json::array({"1601-10-20", "1601", "1601-10"}));
  properties["DeathDate"] = date_or_null("Death date, Usually found after Gest.",
                                         json::array({"1641-01-11", "1641"}));
  properties["DeathCity"] = string_or_null("City of death", json::array({"Groningen"}));

  return json{{"$schema", "http://json-schema.org/draft-07/schema#"},
              {"title", "Person"},
              {"type", "object"},
              {"properties", properties},
              {"required", json::array({"FirstName", "LastName"})},
              {"additionalProperties", false},
              {"$defs", json{{"Education", education},
                             {"Career", career},
                             {"Particularity", particularity},
                             {"RelatedPerson", related}}}};
}

}  // namespace histrec::records
