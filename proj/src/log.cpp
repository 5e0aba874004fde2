#include "memeattr/log.hpp"

#include <string>

#include <spdlog/sinks/stdout_sinks.h>

namespace memeattr {

spdlog::logger& logger() {
    static std::shared_ptr<spdlog::logger> instance = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
        auto lg = std::make_shared<spdlog::logger>("memeattr", sink);
        lg->set_pattern("[%l] %v");
        lg->set_level(spdlog::level::warn);
        return lg;
    }();
    return *instance;
}

void set_log_level(std::string_view level) {
    const auto parsed = spdlog::level::from_str(std::string(level));
    // from_str maps unknown names to "off"; only honour it when asked for explicitly.
    if (parsed != spdlog::level::off || level == "off") logger().set_level(parsed);
}

}  // namespace memeattr
