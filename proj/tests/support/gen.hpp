#pragma once

// Seeded generators for property tests. Every case derives from one 64-bit
// seed so a failure can be replayed by printing it.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace memeattr::testkit {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t seed_for_case(std::size_t i) { return rng_() ^ (0x9E3779B97F4A7C15ull * (i + 1)); }

    std::size_t size(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    template <typename T>
    const T& pick(const std::vector<T>& xs) {
        return xs[size(0, xs.size() - 1)];
    }

    /// Lowercase word over a small alphabet so collisions are common.
    std::string latin_word(std::size_t max_len = 4) {
        static constexpr std::string_view kAlpha = "abcde";
        std::string w;
        const auto n = size(1, max_len);
        for (std::size_t i = 0; i < n; ++i) w += kAlpha[size(0, kAlpha.size() - 1)];
        return w;
    }

    /// Run of CJK characters drawn from a small pool.
    std::string cjk_run(std::size_t max_len = 4) {
        static const std::vector<std::string> kPool = {"菜", "狗", "女", "拳", "地", "域", "黑", "井", "盖", "绿", "茶"};
        std::string s;
        const auto n = size(1, max_len);
        for (std::size_t i = 0; i < n; ++i) s += pick(kPool);
        return s;
    }

    /// Mixed-script text of up to `max_pieces` words and CJK runs.
    std::string mixed_text(std::size_t max_pieces = 8, std::size_t min_pieces = 0) {
        static const std::vector<std::string> kSeps = {" ", "，", "、", " ", "! ", "。"};
        std::string s;
        const auto n = size(min_pieces, max_pieces);
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) s += pick(kSeps);
            s += coin(0.5) ? cjk_run() : latin_word();
        }
        return s;
    }

    /// Mostly ordinary strings with whitespace-only and empty ones mixed in.
    std::string maybe_blank_text() {
        switch (size(0, 5)) {
            case 0: return "";
            case 1: return std::string(size(1, 3), ' ');
            case 2: return " \t" + mixed_text(3, 1) + "\n";
            default: return mixed_text(4, 1);
        }
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("memeattr-test-" + std::to_string(rd()) + "-" + std::to_string(++counter));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(std::string_view name) const { return (path_ / std::string(name)).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string fixture(std::string_view name) { return std::string(MEMEATTR_FIXTURE_DIR) + "/" + std::string(name); }

}  // namespace memeattr::testkit
