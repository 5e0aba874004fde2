#pragma once

#include <memory>
#include <string_view>

#include <spdlog/spdlog.h>

namespace memeattr {

/// Process-wide logger. Always writes to stderr; stdout is reserved for data.
spdlog::logger& logger();

/// Accepts spdlog level names ("trace" .. "off"). Unknown names leave the level unchanged.
void set_log_level(std::string_view level);

}  // namespace memeattr
