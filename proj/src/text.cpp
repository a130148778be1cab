#include "histrec/text.hpp"

#include <algorithm>
#include <cctype>

#include "histrec/errors.hpp"

namespace histrec::text {

namespace {

bool in_range(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// Latin Extended-A (U+0100..U+017F) mostly alternates upper/lower on
// even/odd code points. The exceptions below break the pattern.
bool ext_a_is_upper(char32_t cp) {
  if (cp == 0x0138 || cp == 0x0149 || cp == 0x017F) return false;  // kra, 'n, long s
  if (cp == 0x0178) return true;                                   // Y with diaeresis
  if (cp >= 0x0179) return cp % 2 == 1;  // Z-with-accent block flips parity
  return cp % 2 == 0;
}

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view s, bool strict) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  auto bad = [&](size_t at) -> char32_t {
    if (strict) throw DecodeError("invalid UTF-8 byte sequence at offset " + std::to_string(at));
    return 0xFFFD;
  };
  while (i < s.size()) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(bad(i));
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(bad(i));
      break;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      unsigned char b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(bad(i));
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t cp : cps) out += encode_utf8(cp);
  return out;
}

bool is_upper_letter(char32_t cp) {
  if (in_range(cp, U'A', U'Z')) return true;
  if (in_range(cp, 0x00C0, 0x00DE) && cp != 0x00D7) return true;  // À..Þ minus ×
  if (in_range(cp, 0x0100, 0x017F)) return ext_a_is_upper(cp);
  return false;
}

bool is_lower_letter(char32_t cp) {
  if (in_range(cp, U'a', U'z')) return true;
  if (cp == 0x00DF) return true;                                  // ß
  if (in_range(cp, 0x00E0, 0x00FF) && cp != 0x00F7) return true;  // à..ÿ minus ÷
  if (in_range(cp, 0x0100, 0x017F)) return !ext_a_is_upper(cp);
  return false;
}

bool is_letter(char32_t cp) { return is_upper_letter(cp) || is_lower_letter(cp); }

char32_t to_lower(char32_t cp) {
  if (in_range(cp, U'A', U'Z')) return cp + 32;
  if (in_range(cp, 0x00C0, 0x00DE) && cp != 0x00D7) return cp + 32;
  if (in_range(cp, 0x0100, 0x017F) && is_upper_letter(cp)) {
    if (cp == 0x0178) return 0x00FF;  // Ÿ -> ÿ
    if (cp == 0x0130) return U'i';    // İ -> i (dot dropped)
    return cp + 1;
  }
  return cp;
}

char32_t to_upper(char32_t cp) {
  if (in_range(cp, U'a', U'z')) return cp - 32;
  if (in_range(cp, 0x00E0, 0x00FE) && cp != 0x00F7) return cp - 32;
  if (cp == 0x00FF) return 0x0178;
  if (in_range(cp, 0x0100, 0x017F) && is_lower_letter(cp) && cp != 0x00DF && cp != 0x0131 &&
      cp != 0x0138 && cp != 0x0149 && cp != 0x017F)
    return cp - 1;
  return cp;
}

std::string lowercase(std::string_view s) {
  auto cps = decode_utf8(s, false);
  for (auto& cp : cps) cp = to_lower(cp);
  return encode_utf8(cps);
}

std::string ascii_fold(std::string_view s) {
  static const struct {
    char32_t cp;
    const char* out;
  } kFolds[] = {
      {0x00C0, "A"}, {0x00C1, "A"}, {0x00C2, "A"}, {0x00C3, "A"}, {0x00C4, "A"}, {0x00C5, "A"},
      {0x00C6, "AE"}, {0x00C7, "C"}, {0x00C8, "E"}, {0x00C9, "E"}, {0x00CA, "E"}, {0x00CB, "E"},
      {0x00CC, "I"}, {0x00CD, "I"}, {0x00CE, "I"}, {0x00CF, "I"}, {0x00D0, "D"}, {0x00D1, "N"},
      {0x00D2, "O"}, {0x00D3, "O"}, {0x00D4, "O"}, {0x00D5, "O"}, {0x00D6, "O"}, {0x00D8, "O"},
      {0x00D9, "U"}, {0x00DA, "U"}, {0x00DB, "U"}, {0x00DC, "U"}, {0x00DD, "Y"}, {0x00DE, "TH"},
      {0x00DF, "ss"}, {0x00E0, "a"}, {0x00E1, "a"}, {0x00E2, "a"}, {0x00E3, "a"}, {0x00E4, "a"},
      {0x00E5, "a"}, {0x00E6, "ae"}, {0x00E7, "c"}, {0x00E8, "e"}, {0x00E9, "e"}, {0x00EA, "e"},
      {0x00EB, "e"}, {0x00EC, "i"}, {0x00ED, "i"}, {0x00EE, "i"}, {0x00EF, "i"}, {0x00F0, "d"},
      {0x00F1, "n"}, {0x00F2, "o"}, {0x00F3, "o"}, {0x00F4, "o"}, {0x00F5, "o"}, {0x00F6, "o"},
      {0x00F8, "o"}, {0x00F9, "u"}, {0x00FA, "u"}, {0x00FB, "u"}, {0x00FC, "u"}, {0x00FD, "y"},
      {0x00FE, "th"}, {0x00FF, "y"}, {0x0132, "IJ"}, {0x0133, "ij"}, {0x0152, "OE"},
      {0x0153, "oe"}, {0x0178, "Y"},
  };
  auto cps = decode_utf8(s, false);
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : cps) {
    bool folded = false;
    for (const auto& f : kFolds) {
      if (f.cp == cp) {
        out += f.out;
        folded = true;
        break;
      }
    }
    if (folded) continue;
    if (in_range(cp, 0x0100, 0x017F)) {
      // Accented Latin Extended-A letters reduce to their base letter.
      static const char* kBase =
          "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIi??JjKk?LlLlLlLlLlNnNnNn???OoOoOo??"
          "RrRrRrSsSsSsSsTtTtTtUuUuUuUuUuUuWwYy?ZzZzZz?";
      char c = kBase[cp - 0x0100];
      if (c != '?') {
        out.push_back(c);
        continue;
      }
    }
    out += encode_utf8(cp);
  }
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') {
      size_t end = i;
      if (end > start && s[end - 1] == '\r') --end;
      out.emplace_back(s.substr(start, end - start));
      start = i + 1;
    }
  }
  if (start < s.size()) {
    size_t end = s.size();
    if (end > start && s[end - 1] == '\r') --end;
    out.emplace_back(s.substr(start, end - start));
  }
  return out;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

bool is_numeric_only(std::string_view line) {
  bool saw_digit = false;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    saw_digit = true;
  }
  return saw_digit;
}

}  // namespace histrec::text
