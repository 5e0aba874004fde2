#include "memeattr/utf8.hpp"

namespace memeattr::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::vector<char32_t> decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= text.size() || !is_continuation(static_cast<unsigned char>(text[i + k]))) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
        }
        // Reject overlong forms, surrogates and out-of-range values.
        static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
        if (!ok || cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append(out, cp);
    return out;
}

std::size_t length(std::string_view text) { return decode(text).size(); }

std::string truncate(std::string_view text, std::size_t max_chars) {
    auto cps = decode(text);
    if (cps.size() <= max_chars) return std::string(text);
    cps.resize(max_chars);
    return encode(cps);
}

char32_t fold_width(char32_t cp) noexcept {
    if (cp >= 0xFF01 && cp <= 0xFF5E) return cp - 0xFF01 + 0x21;
    if (cp == 0x3000) return U' ';
    return cp;
}

bool is_cjk(char32_t cp) noexcept {
    return (cp >= 0x4E00 && cp <= 0x9FFF)      // unified ideographs
           || (cp >= 0x3400 && cp <= 0x4DBF)   // extension A
           || (cp >= 0x20000 && cp <= 0x2FA1F) // extensions B.. and compatibility supplement
           || (cp >= 0xF900 && cp <= 0xFAFF)   // compatibility ideographs
           || (cp >= 0x3040 && cp <= 0x30FF)   // kana
           || (cp >= 0xAC00 && cp <= 0xD7AF);  // hangul syllables
}

bool contains_cjk(std::string_view text) {
    for (char32_t cp : decode(text)) {
        if (is_cjk(cp)) return true;
    }
    return false;
}

bool is_separator(char32_t raw) noexcept {
    const char32_t cp = fold_width(raw);
    if (cp < 0x80) {
        const bool alnum = (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
                           (cp >= U'A' && cp <= U'Z');
        return !alnum;
    }
    return (cp >= 0x0080 && cp <= 0x00BF)      // latin-1 controls, punctuation, symbols
           || cp == 0x00D7 || cp == 0x00F7
           || (cp >= 0x2000 && cp <= 0x206F)   // general punctuation
           || (cp >= 0x2190 && cp <= 0x2BFF)   // arrows, math, technical, shapes, dingbats
           || (cp >= 0x3000 && cp <= 0x303F)   // CJK symbols and punctuation
           || (cp >= 0xFE30 && cp <= 0xFE4F)   // CJK compatibility forms
           || (cp >= 0xFF5F && cp <= 0xFF65)   // halfwidth CJK punctuation
           || (cp >= 0x1F000 && cp <= 0x1FAFF) // emoji and pictographs
           || cp == 0xFEFF || cp == 0xFFFD;
}

std::string trim(std::string_view text) {
    const auto cps = decode(text);
    auto is_space = [](char32_t cp) {
        const char32_t c = fold_width(cp);
        return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' ||
               c == 0x00A0 || c == 0xFEFF || (c >= 0x2000 && c <= 0x200B);
    };
    std::size_t begin = 0;
    std::size_t end = cps.size();
    while (begin < end && is_space(cps[begin])) ++begin;
    while (end > begin && is_space(cps[end - 1])) --end;
    return encode(std::vector<char32_t>(cps.begin() + static_cast<std::ptrdiff_t>(begin),
                                        cps.begin() + static_cast<std::ptrdiff_t>(end)));
}

std::string fold_case_width(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : decode(text)) {
        cp = fold_width(cp);
        if (cp >= U'A' && cp <= U'Z') cp = cp - U'A' + U'a';
        append(out, cp);
    }
    return out;
}

}  // namespace memeattr::utf8
