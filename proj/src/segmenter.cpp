#include "histrec/segmenter.hpp"

#include <map>

#include "histrec/text.hpp"

namespace histrec::segment {

namespace {

struct Token {
  std::string core;      // token with outer punctuation stripped
  bool parenthesized = false;
};

// Strips non-letter characters from both ends; '(' on the left and ')' on
// the right mark a parenthesized token ("(GOMAIR),").
Token strip_token(const std::string& raw) {
  auto cps = text::decode_utf8(raw, false);
  size_t b = 0;
  size_t e = cps.size();
  bool open = false;
  bool close = false;
  while (b < e && !text::is_letter(cps[b])) {
    if (cps[b] == U'(') open = true;
    ++b;
  }
  while (e > b && !text::is_letter(cps[e - 1])) {
    if (cps[e - 1] == U')') close = true;
    --e;
  }
  Token t;
  t.core = text::encode_utf8(std::vector<char32_t>(cps.begin() + b, cps.begin() + e));
  t.parenthesized = open && close;
  return t;
}

// All-uppercase with at least two letters; internal hyphens and apostrophes
// are allowed so hyphenated compounds still qualify.
bool is_surname_token(const std::string& core) {
  auto cps = text::decode_utf8(core, false);
  int letters = 0;
  for (size_t i = 0; i < cps.size(); ++i) {
    char32_t cp = cps[i];
    if (text::is_upper_letter(cp)) {
      ++letters;
      continue;
    }
    if ((cp == U'-' || cp == U'\'') && i > 0 && i + 1 < cps.size()) continue;
    return false;
  }
  return letters >= 2;
}

}  // namespace

std::optional<SurnameDetection> detect_surname(const std::string& first_line) {
  SurnameDetection det;
  bool in_run = false;
  for (const auto& raw : text::split_whitespace(first_line)) {
    Token tok = strip_token(raw);
    if (tok.core.empty()) continue;
    if (tok.parenthesized) {
      if (is_surname_token(tok.core)) det.alternatives.push_back(tok.core);
      // An alias interrupts the primary run but does not end detection.
      if (in_run) in_run = false;
      continue;
    }
    if (is_surname_token(tok.core)) {
      if (det.surname.empty()) {
        det.surname = tok.core;
        in_run = true;
      } else if (in_run) {
        det.surname += " " + tok.core;
      }
      // The name line ends the surname at the first comma; strip_token
      // already dropped it, so a trailing comma ends the run below.
      if (raw.find(',') != std::string::npos) in_run = false;
    } else {
      in_run = false;
    }
  }
  if (det.surname.empty()) return std::nullopt;
  return det;
}

std::optional<std::string> first_content_line(const ocr::PageText& page) {
  for (const auto& line : page.lines) {
    if (text::is_blank(line) || text::is_numeric_only(line)) continue;
    return line;
  }
  return std::nullopt;
}

std::string person_key_slug(const std::string& surname) {
  std::string folded = text::ascii_fold(surname);
  std::string out;
  for (char c : folded) {
    if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
      out.push_back(c);
    } else if (c >= 'a' && c <= 'z') {
      out.push_back(static_cast<char>(c - 32));
    } else if (!out.empty() && out.back() != '_') {
      out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "UNKNOWN" : out;
}

SegmentResult segment(const std::vector<ocr::PageText>& pages) {
  SegmentResult result;
  std::map<std::string, int> key_counts;
  PersonText* current = nullptr;

  for (const auto& page : pages) {
    std::optional<SurnameDetection> det;
    if (auto line = first_content_line(page)) det = detect_surname(*line);

    if (det) {
      PersonText person;
      person.volume_id = page.volume_id;
      person.start_page = person.end_page = page.page_number;
      person.detected_surname = det->surname;
      person.alternative_surnames = det->alternatives;
      std::string slug = person_key_slug(det->surname);
      int n = ++key_counts[slug];
      person.person_key = n == 1 ? slug : slug + "_" + std::to_string(n);
      result.persons.push_back(std::move(person));
      current = &result.persons.back();
    } else if (current == nullptr) {
      if (!result.preamble) {
        result.preamble = PersonText{};
        result.preamble->person_key = "_preamble";
        result.preamble->volume_id = page.volume_id;
        result.preamble->start_page = page.page_number;
      }
      result.preamble->end_page = page.page_number;
      result.preamble->text += page.joined();
      continue;
    }
    current->end_page = page.page_number;
    current->text += page.joined();
  }
  return result;
}

}  // namespace histrec::segment
