#pragma once

// Splits the per-page OCR text stream into one document per person. A page
// whose first content line starts with an uppercase surname opens a new
// person; other pages continue the current one. Pages seen before the first
// surname land in a discardable preamble document.

#include <optional>
#include <string>
#include <vector>

#include "histrec/ocr.hpp"

namespace histrec::segment {

struct PersonText {
  std::string person_key;  // folded surname slug, ordinal suffix on collision
  std::string volume_id;
  int start_page = 0;
  int end_page = 0;
  std::string text;
  std::string detected_surname;                  // uppercase, as printed
  std::vector<std::string> alternative_surnames;  // parenthesized aliases on the name line
};

struct SurnameDetection {
  std::string surname;                            // full uppercase run ("VAN DER AA")
  std::vector<std::string> alternatives;          // e.g. "(GOMAIR)"
};

// Examines the first content line of a page. Returns the primary surname --
// the first run of all-uppercase tokens of >= 2 letters (diacritics allowed)
// -- or nothing. Tokens wholly inside parentheses are alternatives, never
// the primary surname.
std::optional<SurnameDetection> detect_surname(const std::string& first_line);

// First non-blank, non-numeric-only line of the page, if any.
std::optional<std::string> first_content_line(const ocr::PageText& page);

struct SegmentResult {
  std::vector<PersonText> persons;
  std::optional<PersonText> preamble;  // pages before the first surname
};

// Pages must arrive sorted by (volume, page_number). The concatenation of
// all person texts plus the preamble equals the concatenation of the input
// page texts.
SegmentResult segment(const std::vector<ocr::PageText>& pages);

// ASCII-folded uppercase slug used in person file names ("VAN DER AA" ->
// "VAN_DER_AA"); collisions within a volume get "_2", "_3", ...
std::string person_key_slug(const std::string& surname);

}  // namespace histrec::segment
