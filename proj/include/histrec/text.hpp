#pragma once

// Small UTF-8 / Latin text helpers shared by the segmenter, the linker and
// the metrics code. Case handling covers ASCII, Latin-1 Supplement and
// Latin Extended-A, which is sufficient for the Dutch register material.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace histrec::text {

// Decodes UTF-8 into code points. Throws histrec::DecodeError on malformed
// input when strict, otherwise substitutes U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view s, bool strict = true);

std::string encode_utf8(char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);

bool is_letter(char32_t cp);
bool is_upper_letter(char32_t cp);
bool is_lower_letter(char32_t cp);

char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);

// Lowercases letters in the covered ranges; other code points pass through.
std::string lowercase(std::string_view s);

// Maps accented Latin letters to their ASCII base form ("É" -> "E",
// "ß" -> "ss"); code points without a mapping pass through.
std::string ascii_fold(std::string_view s);

std::string trim(std::string_view s);

// Splits on runs of ASCII/Unicode whitespace; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

bool is_blank(std::string_view line);

// True when the line contains digits only (after trimming whitespace);
// scanned pages carry bare page-number lines like "9".
bool is_numeric_only(std::string_view line);

}  // namespace histrec::text
