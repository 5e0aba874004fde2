#pragma once

#include <string>
#include <string_view>

namespace memeattr {

/// Writes `content` to a sibling temporary file, then renames it over `path`.
/// Readers never observe a partially written file. Throws IoError.
void write_file_atomic(const std::string& path, std::string_view content);

/// Whole file as bytes. Throws IoError.
std::string read_file(const std::string& path);

}  // namespace memeattr
