#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace jobalign {

// Unicode plumbing shared by the corpus filter and the tokenizer.
// All strings are UTF-8; "scalar" means Unicode scalar value (code point).

// NFKC normalization.
std::string nfkc(std::string_view utf8);

// Locale-independent full lowercasing (root locale).
std::string to_lower(std::string_view utf8);

// Strip leading/trailing Unicode whitespace.
std::string trim(std::string_view utf8);

// nfkc + trim, the canonical form titles are measured and tokenized in.
std::string normalize_text(std::string_view utf8);

// Number of Unicode scalar values. Throws ParseError on invalid UTF-8.
std::size_t scalar_count(std::string_view utf8);

std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view scalars);
std::string encode_utf8(char32_t scalar);

// Token separators: Unicode whitespace, punctuation (general category P*),
// and control/format characters.
bool is_separator(char32_t c);

// CJK ideographs (Unified blocks, extensions A..H, compatibility block).
bool is_cjk(char32_t c);

}  // namespace jobalign
