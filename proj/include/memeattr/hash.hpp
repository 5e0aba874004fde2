#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace memeattr {

/// 64-bit FNV-1a over the raw bytes. Stable across platforms and runs; every
/// mock-backend output is derived from it.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value);

}  // namespace memeattr
