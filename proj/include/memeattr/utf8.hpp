#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace memeattr::utf8 {

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD, one per byte.
std::vector<char32_t> decode(std::string_view text);

void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

/// Number of Unicode scalar values.
std::size_t length(std::string_view text);

/// First `max_chars` scalar values of `text`.
std::string truncate(std::string_view text, std::size_t max_chars);

/// Maps fullwidth ASCII variants (U+FF01..U+FF5E) and the ideographic space
/// onto their ASCII counterparts.
char32_t fold_width(char32_t cp) noexcept;

bool is_cjk(char32_t cp) noexcept;
bool contains_cjk(std::string_view text);

/// Whitespace or punctuation, after width folding.
bool is_separator(char32_t cp) noexcept;

std::string trim(std::string_view text);

/// Lowercases ASCII letters and folds fullwidth forms; other code points pass through.
std::string fold_case_width(std::string_view text);

}  // namespace memeattr::utf8
