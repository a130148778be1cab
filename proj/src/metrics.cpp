#include "histrec/metrics.hpp"

#include <algorithm>

#include "histrec/errors.hpp"
#include "histrec/text.hpp"

namespace histrec::metrics {

const char* const kCategories[10] = {"Main person", "Education", "Careers", "Particularities",
                                     "Spouses",     "Parents",   "Grandparents", "In-laws",
                                     "Children",    "Far family"};

namespace {

template <typename T>
std::size_t edit_distance(const std::vector<T>& a, const std::vector<T>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

std::size_t levenshtein(const std::vector<char32_t>& a, const std::vector<char32_t>& b) {
  return edit_distance(a, b);
}

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return edit_distance(a, b);
}

std::string normalize_for_metrics(const std::string& s) { return text::lowercase(text::trim(s)); }

TextMetrics text_metrics(const std::string& reference, const std::string& hypothesis) {
  const std::string ref = normalize_for_metrics(reference);
  const std::string hyp = normalize_for_metrics(hypothesis);
  if (ref.empty()) throw EvalError("reference text is empty after normalization");

  TextMetrics m;
  auto ref_chars = text::decode_utf8(ref, false);
  auto hyp_chars = text::decode_utf8(hyp, false);
  m.ref_chars = ref_chars.size();
  m.char_edits = levenshtein(ref_chars, hyp_chars);

  auto ref_words = text::split_whitespace(ref);
  auto hyp_words = text::split_whitespace(hyp);
  m.ref_words = ref_words.size();
  m.word_edits = levenshtein(ref_words, hyp_words);
  return m;
}

double cer(const std::string& reference, const std::string& hypothesis) {
  return text_metrics(reference, hypothesis).cer();
}

double wer(const std::string& reference, const std::string& hypothesis) {
  return text_metrics(reference, hypothesis).wer();
}

VolumeTextMetrics volume_average(const std::vector<TextMetrics>& metrics) {
  if (metrics.empty()) throw EvalError("no documents to average");
  VolumeTextMetrics v;
  v.documents = metrics.size();
  for (const auto& m : metrics) {
    v.mean_cer += m.cer();
    v.mean_wer += m.wer();
  }
  v.mean_cer /= static_cast<double>(metrics.size());
  v.mean_wer /= static_cast<double>(metrics.size());
  return v;
}

namespace {

const json* member(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  if (it == obj.end()) return nullptr;
  return &*it;
}

bool is_null_like(const json* v) { return v == nullptr || v->is_null(); }

// Lowercase string equality for strings, value equality otherwise;
// null equals null. Dates are plain strings here, so a year-only value
// never matches a full date.
bool scalar_equal(const json* a, const json* b) {
  if (is_null_like(a) && is_null_like(b)) return true;
  if (is_null_like(a) || is_null_like(b)) return false;
  if (a->is_string() && b->is_string())
    return text::lowercase(a->get<std::string>()) == text::lowercase(b->get<std::string>());
  return *a == *b;
}

std::vector<std::string> lowered_strings(const json* arr) {
  std::vector<std::string> out;
  if (arr == nullptr || !arr->is_array()) return out;
  for (const auto& v : *arr)
    if (v.is_string()) out.push_back(text::lowercase(v.get<std::string>()));
  return out;
}

std::string sort_name_key(const json& entry, const std::vector<const char*>& name_keys) {
  std::string out;
  for (const char* k : name_keys) {
    const json* v = member(entry, k);
    if (v != nullptr && v->is_string()) {
      if (!out.empty()) out += ' ';
      out += text::lowercase(v->get<std::string>());
    }
  }
  return out;
}

std::vector<json> sorted_entries(const json* arr, const std::vector<const char*>& name_keys) {
  std::vector<json> out;
  if (arr == nullptr || !arr->is_array()) return out;
  for (const auto& e : *arr) out.push_back(e);
  std::stable_sort(out.begin(), out.end(), [&](const json& x, const json& y) {
    const json* dx = member(x, "date");
    const json* dy = member(y, "date");
    std::string kx = (dx && dx->is_string()) ? dx->get<std::string>() : "";
    std::string ky = (dy && dy->is_string()) ? dy->get<std::string>() : "";
    if (kx != ky) return kx < ky;
    return sort_name_key(x, name_keys) < sort_name_key(y, name_keys);
  });
  return out;
}

struct Tally {
  // Insertion-ordered (category, key) -> counts.
  std::vector<KeyAccuracy> rows;

  KeyAccuracy& row(const std::string& category, const std::string& key) {
    for (auto& r : rows)
      if (r.category == category && r.key == key) return r;
    rows.push_back({category, key, 0, 0});
    return rows.back();
  }

  void scalar(const std::string& category, const std::string& key, const json* c, const json* g,
              bool generated_present) {
    auto& r = row(category, key);
    r.total += 1;
    if (generated_present && scalar_equal(c, g)) r.correct += 1;
  }

  // Membership scoring: each correct item counts once; a generated item can
  // satisfy at most one correct item.
  void string_list(const std::string& category, const std::string& key, const json* c,
                   const json* g) {
    auto correct_items = lowered_strings(c);
    if (correct_items.empty()) return;
    auto generated_items = lowered_strings(g);
    auto& r = row(category, key);
    r.total += correct_items.size();
    for (const auto& item : correct_items) {
      auto it = std::find(generated_items.begin(), generated_items.end(), item);
      if (it != generated_items.end()) {
        r.correct += 1;
        generated_items.erase(it);
      }
    }
  }
};

struct EntrySpec {
  const char* category;
  const char* list_key;
  std::vector<const char*> scalar_keys;
  std::vector<const char*> list_keys;
  std::vector<const char*> name_keys;  // sort tiebreaker
};

const std::vector<EntrySpec>& entry_specs() {
  static const std::vector<EntrySpec> specs = {
      {"Education", "education", {"subject", "location", "date", "source"}, {}, {"subject"}},
      {"Careers", "careers", {"job", "location", "date", "source", "is_side_job"}, {}, {"job"}},
      {"Particularities",
       "particularities",
       {"particularity", "location", "date", "source"},
       {},
       {"particularity"}},
      {"Spouses", "spouses", {}, {}, {}},
      {"Parents", "parents", {}, {}, {}},
      {"Grandparents", "grand_parents", {}, {}, {}},
      {"In-laws", "in_laws", {}, {}, {}},
      {"Children", "children", {}, {}, {}},
      {"Far family", "far_family", {}, {}, {}},
  };
  return specs;
}

const std::vector<const char*>& related_scalar_keys() {
  static const std::vector<const char*> keys = {
      "first_name", "last_name",  "affix",      "gender",     "source",
      "birth_country", "birth_city", "birth_date", "death_date", "death_city"};
  return keys;
}

const std::vector<const char*>& related_list_keys() {
  static const std::vector<const char*> keys = {"second_names", "alternative_last_names"};
  return keys;
}

}  // namespace

std::vector<KeyAccuracy> json_accuracy(const json& correct, const json& generated) {
  if (!correct.is_object() || !generated.is_object())
    throw EvalError("json_accuracy expects two record documents");
  const json c = records::canonicalize_keys(correct);
  const json g = records::canonicalize_keys(generated);

  Tally tally;

  // Main person: the paper's table order.
  for (const char* key : {"first_name", "last_name", "affix", "gender"})
    tally.scalar("Main person", key, member(c, key), member(g, key), true);
  tally.string_list("Main person", "second_names", member(c, "second_names"),
                    member(g, "second_names"));
  tally.string_list("Main person", "alternative_last_names", member(c, "alternative_last_names"),
                    member(g, "alternative_last_names"));
  for (const char* key : {"type_of_person", "faculty", "birth_country", "birth_city", "birth_date",
                          "death_date", "death_city"})
    tally.scalar("Main person", key, member(c, key), member(g, key), true);

  for (const auto& spec : entry_specs()) {
    static const std::vector<const char*> kRelatedNameKeys = {"last_name", "first_name"};
    const bool related = spec.scalar_keys.empty();
    const auto& scalar_keys = related ? related_scalar_keys() : spec.scalar_keys;
    const auto& list_keys = related ? related_list_keys() : spec.list_keys;
    const auto& name_keys = related ? kRelatedNameKeys : spec.name_keys;

    auto c_entries = sorted_entries(member(c, spec.list_key), name_keys);
    if (c_entries.empty()) continue;
    auto g_entries = sorted_entries(member(g, spec.list_key), name_keys);

    for (std::size_t i = 0; i < c_entries.size(); ++i) {
      const json* g_entry = i < g_entries.size() ? &g_entries[i] : nullptr;
      for (const char* key : scalar_keys)
        tally.scalar(spec.category, key, member(c_entries[i], key),
                     g_entry ? member(*g_entry, key) : nullptr, g_entry != nullptr);
      for (const char* key : list_keys)
        tally.string_list(spec.category, key, member(c_entries[i], key),
                          g_entry ? member(*g_entry, key) : nullptr);
    }
  }

  std::vector<KeyAccuracy> rows;
  for (auto& r : tally.rows)
    if (r.total > 0) rows.push_back(r);
  return rows;
}

std::vector<KeyAccuracy> accuracy_by_category(const std::vector<KeyAccuracy>& rows) {
  std::vector<KeyAccuracy> out;
  for (const char* category : kCategories) {
    KeyAccuracy sum{category, "", 0, 0};
    for (const auto& r : rows) {
      if (r.category != category) continue;
      sum.correct += r.correct;
      sum.total += r.total;
    }
    if (sum.total > 0) out.push_back(sum);
  }
  return out;
}

LinkOutcomeMap parse_link_outcomes(const json& doc) {
  if (!doc.is_object()) throw EvalError("link outcome document must be a JSON object");
  LinkOutcomeMap out;
  for (const auto& [name, value] : doc.items()) {
    if (!value.is_object())
      throw EvalError("link outcome for '" + name + "' must be an object");
    for (const auto& [k, v] : value.items()) {
      if (k != "person_id" && k != "new_person" && k != "maybe_same_person")
        throw EvalError("unexpected key '" + k + "' in link outcome for '" + name + "'");
      (void)v;
    }
    const json* id = member(value, "person_id");
    const json* np = member(value, "new_person");
    const json* maybe = member(value, "maybe_same_person");
    if (id == nullptr || !id->is_number_integer())
      throw EvalError("link outcome for '" + name + "': person_id must be an integer");
    if (np == nullptr || !np->is_boolean())
      throw EvalError("link outcome for '" + name + "': new_person must be a boolean");
    if (maybe == nullptr || !maybe->is_boolean())
      throw EvalError("link outcome for '" + name + "': maybe_same_person must be a boolean");
    out[name] = LinkOutcome{id->get<std::int64_t>(), np->get<bool>(), maybe->get<bool>()};
  }
  return out;
}

json link_outcomes_to_json(const LinkOutcomeMap& outcomes) {
  json doc = json::object();
  for (const auto& [name, o] : outcomes) {
    doc[name] = json{{"person_id", o.person_id},
                     {"new_person", o.new_person},
                     {"maybe_same_person", o.maybe_same_person}};
  }
  return doc;
}

LinkageReport linkage_eval(const LinkOutcomeMap& expected, const LinkOutcomeMap& actual) {
  if (expected.empty()) throw EvalError("no persons in expected link outcomes");
  LinkageReport report;
  report.persons = expected.size();
  std::size_t id_ok = 0;
  std::size_t new_ok = 0;
  std::size_t maybe_ok = 0;
  for (const auto& [name, exp] : expected) {
    if (exp.new_person) report.expected_new_persons += 1;
    auto it = actual.find(name);
    if (it == actual.end()) continue;
    if (it->second.person_id == exp.person_id) ++id_ok;
    if (it->second.new_person == exp.new_person) ++new_ok;
    if (it->second.maybe_same_person == exp.maybe_same_person) ++maybe_ok;
  }
  for (const auto& [name, act] : actual) {
    (void)name;
    if (act.new_person) report.generated_new_persons += 1;
  }
  const double n = static_cast<double>(report.persons);
  report.person_id_accuracy = 100.0 * static_cast<double>(id_ok) / n;
  report.new_person_accuracy = 100.0 * static_cast<double>(new_ok) / n;
  report.maybe_same_person_accuracy = 100.0 * static_cast<double>(maybe_ok) / n;
  report.average = (report.person_id_accuracy + report.new_person_accuracy +
                    report.maybe_same_person_accuracy) /
                   3.0;
  return report;
}

}  // namespace histrec::metrics
