#pragma once

// Private helpers for the line-delimited record files.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace memeattr::jsonl {

using nlohmann::json;

/// Calls `fn(line_number, text)` for every non-blank line. Strips a trailing
/// '\r' and a leading byte-order mark.
void for_each_line(std::istream& in, const std::function<void(std::size_t, std::string_view)>& fn);

/// Parses one line as a JSON object; throws ParseError.
json parse_object(std::string_view text, std::size_t line);

/// Required string field; throws SchemaError when missing or not a string.
std::string required_string(const json& obj, const char* key, std::size_t line);

/// Optional string field; null and missing both map to nullopt.
std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t line);

std::vector<std::string> string_list(const json& obj, const char* key, std::size_t line);

/// Appends one warning per key not in `known`.
void note_unknown_fields(const json& obj, std::initializer_list<std::string_view> known,
                         std::size_t line, std::vector<std::string>* warnings);

/// Compact single-line dump (keys sorted), no trailing newline.
std::string dump_line(const json& obj);

}  // namespace memeattr::jsonl
