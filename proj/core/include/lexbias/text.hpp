#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lexbias/types.hpp"

// UTF-8 helpers. Offsets everywhere in lexbias count Unicode scalar values.
namespace lexbias::text {

// Throws ValidationError on malformed UTF-8 (including surrogates).
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view scalars);
bool is_valid_utf8(std::string_view utf8);

std::size_t scalar_length(std::string_view utf8);
// Substring by scalar offsets; throws std::out_of_range when out of bounds.
std::string substr(std::string_view utf8, std::size_t start, std::size_t end);

bool is_space(char32_t c);

// Maximal runs of non-whitespace, as scalar spans.
std::vector<Span> whitespace_tokens(std::u32string_view text);
std::vector<Span> whitespace_tokens(std::string_view utf8);

// Full Unicode case folding.
std::string case_fold(std::string_view utf8);
std::string trim(std::string_view utf8);

// case_fold(trim(surface)).
std::string normalize_word_key(std::string_view surface);

// Separator used for crosslingual pair keys (U+241F SYMBOL FOR UNIT SEPARATOR).
inline constexpr std::string_view kKeySeparator = "\xE2\x90\x9F";

// Word key for a pair of surfaces: the shared normalized form when both agree,
// otherwise both normalized forms joined by kKeySeparator.
std::string pair_word_key(std::string_view surface_a, std::string_view surface_b);

}  // namespace lexbias::text
