#include "lexbias/text.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

#include "lexbias/error.hpp"

namespace lexbias::text {
namespace {

// Returns the decoded scalar and advances pos, or returns U+FFFFFFFF on error.
constexpr char32_t kInvalid = 0xFFFFFFFF;

char32_t next_scalar(std::string_view s, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((lead & 0xE0) == 0xC0) {
    len = 2, cp = lead & 0x1F, min = 0x80;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3, cp = lead & 0x0F, min = 0x800;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4, cp = lead & 0x07, min = 0x10000;
  } else {
    return kInvalid;
  }
  if (pos + len > s.size()) return kInvalid;
  for (std::size_t i = 1; i < len; ++i) {
    const auto cont = static_cast<unsigned char>(s[pos + i]);
    if ((cont & 0xC0) != 0x80) return kInvalid;
    cp = (cp << 6) | (cont & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return kInvalid;
  pos += len;
  return cp;
}

void append_scalar(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t pos = 0;
  while (pos < utf8.size()) {
    const char32_t cp = next_scalar(utf8, pos);
    if (cp == kInvalid) {
      throw ValidationError("invalid UTF-8 at byte " + std::to_string(pos));
    }
    out += cp;
  }
  return out;
}

std::string encode(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size());
  for (char32_t cp : scalars) append_scalar(out, cp);
  return out;
}

bool is_valid_utf8(std::string_view utf8) {
  std::size_t pos = 0;
  while (pos < utf8.size()) {
    if (next_scalar(utf8, pos) == kInvalid) return false;
  }
  return true;
}

std::size_t scalar_length(std::string_view utf8) {
  std::size_t n = 0;
  for (char c : utf8) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string substr(std::string_view utf8, std::size_t start, std::size_t end) {
  const std::u32string scalars = decode(utf8);
  if (start > end || end > scalars.size()) throw std::out_of_range("scalar range out of bounds");
  return encode(std::u32string_view(scalars).substr(start, end - start));
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::vector<Span> whitespace_tokens(std::u32string_view text) {
  std::vector<Span> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    tokens.push_back({start, i});
  }
  return tokens;
}

std::vector<Span> whitespace_tokens(std::string_view utf8) { return whitespace_tokens(decode(utf8)); }

std::string case_fold(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  s.foldCase(U_FOLD_CASE_DEFAULT);
  std::string out;
  s.toUTF8String(out);
  return out;
}

std::string trim(std::string_view utf8) {
  const std::u32string s = decode(utf8);
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return encode(std::u32string_view(s).substr(begin, end - begin));
}

std::string normalize_word_key(std::string_view surface) { return case_fold(trim(surface)); }

std::string pair_word_key(std::string_view surface_a, std::string_view surface_b) {
  std::string a = normalize_word_key(surface_a);
  std::string b = normalize_word_key(surface_b);
  if (a == b) return a;
  return a + std::string(kKeySeparator) + b;
}

}  // namespace lexbias::text
