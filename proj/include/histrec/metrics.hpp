#pragma once

// Evaluation harness for the three pipeline phases: edit-distance text
// metrics (CER/WER), per-key JSON accuracy grouped by category, and link
// decision accuracy.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "histrec/records.hpp"

namespace histrec::metrics {

using records::json;

// Minimum number of insertions, deletions and substitutions turning a into
// b; standard dynamic-programming edit distance.
std::size_t levenshtein(const std::vector<char32_t>& a, const std::vector<char32_t>& b);
std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Leading/trailing whitespace stripped and lowercased; interior whitespace
// is preserved.
std::string normalize_for_metrics(const std::string& text);

struct TextMetrics {
  std::size_t char_edits = 0;
  std::size_t word_edits = 0;
  std::size_t ref_chars = 0;
  std::size_t ref_words = 0;

  double cer() const { return static_cast<double>(char_edits) / static_cast<double>(ref_chars); }
  double wer() const { return static_cast<double>(word_edits) / static_cast<double>(ref_words); }
};

// Character- and word-level error rates of hypothesis against reference,
// both normalized first. Throws EvalError when the reference is empty after
// normalization.
TextMetrics text_metrics(const std::string& reference, const std::string& hypothesis);

double cer(const std::string& reference, const std::string& hypothesis);
double wer(const std::string& reference, const std::string& hypothesis);

struct VolumeTextMetrics {
  std::size_t documents = 0;
  double mean_cer = 0.0;
  double mean_wer = 0.0;
};

VolumeTextMetrics volume_average(const std::vector<TextMetrics>& metrics);

struct KeyAccuracy {
  std::string category;  // "Main person", "Education", ...
  std::string key;
  std::size_t correct = 0;
  std::size_t total = 0;

  double accuracy() const { return 100.0 * static_cast<double>(correct) / static_cast<double>(total); }
};

extern const char* const kCategories[10];

// Key-by-key comparison of a generated record document against the correct
// one. Values are compared lowercased; date strings must match in full;
// null equals null. List-of-string keys count membership of the correct
// items; entry lists (education, careers, ...) are aligned by index after
// sorting by date then name, and each correct entry's fields are scored.
// Keys whose correct side contributes nothing (empty lists) yield no row.
std::vector<KeyAccuracy> json_accuracy(const json& correct, const json& generated);

// Sums rows into per-category correct/total.
std::vector<KeyAccuracy> accuracy_by_category(const std::vector<KeyAccuracy>& rows);

struct LinkOutcome {
  std::int64_t person_id = 0;
  bool new_person = false;
  bool maybe_same_person = false;

  bool operator==(const LinkOutcome&) const = default;
};

// Listing-style evaluation map: source file name -> outcome.
using LinkOutcomeMap = std::map<std::string, LinkOutcome>;

// Parses and shape-checks {"<file>": {"person_id": int, "new_person": bool,
// "maybe_same_person": bool}} documents. Throws EvalError on shape errors.
LinkOutcomeMap parse_link_outcomes(const json& doc);
json link_outcomes_to_json(const LinkOutcomeMap& outcomes);

struct LinkageReport {
  std::size_t persons = 0;
  double person_id_accuracy = 0.0;         // percent
  double new_person_accuracy = 0.0;        // percent
  double maybe_same_person_accuracy = 0.0; // percent
  double average = 0.0;                    // mean of the three
  std::size_t expected_new_persons = 0;
  std::size_t generated_new_persons = 0;
};

// Field-by-field accuracy of actual vs expected over the expected keys; an
// entry absent from actual scores wrong on every field. Throws EvalError on
// an empty expected map.
LinkageReport linkage_eval(const LinkOutcomeMap& expected, const LinkOutcomeMap& actual);

}  // namespace histrec::metrics
