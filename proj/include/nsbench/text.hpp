#pragma once

#include <string>
#include <string_view>

// Unicode helpers shared by the query pipeline, the alignment scorer and the
// reference retriever. Invalid UTF-8 sequences decode to U+FFFD.
namespace nsbench::text {

std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view cps);

// Length in Unicode scalar values.
std::size_t code_point_length(std::string_view utf8);

std::string normalize_nfc(std::string_view utf8);

bool is_whitespace(char32_t cp);
// Cc plus the byte-order mark; tab/newline/CR are whitespace, not control.
bool is_control(char32_t cp);
bool is_alnum(char32_t cp);
// Han, Hiragana, Katakana and Hangul code points are indexed one per token.
bool is_cjk(char32_t cp);
char32_t to_lower(char32_t cp);

std::string_view trim(std::string_view s);
std::string ascii_upper(std::string_view s);

} // namespace nsbench::text
