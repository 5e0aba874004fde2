#include "memeattr/tokenizer.hpp"

#include "memeattr/utf8.hpp"

namespace memeattr::text {

namespace {

void flush_cjk(std::vector<char32_t>& run, std::vector<Token>& out) {
    if (run.size() == 1) {
        out.push_back({utf8::encode(run), TokenKind::CjkUnigram});
    } else {
        for (std::size_t i = 0; i + 1 < run.size(); ++i) {
            std::string s;
            utf8::append(s, run[i]);
            utf8::append(s, run[i + 1]);
            out.push_back({std::move(s), TokenKind::CjkBigram});
        }
    }
    run.clear();
}

void flush_word(std::vector<char32_t>& run, std::vector<Token>& out) {
    if (run.empty()) return;
    bool all_digits = true;
    std::string s;
    for (char32_t cp : run) {
        if (cp >= U'A' && cp <= U'Z') cp = cp - U'A' + U'a';
        if (cp < U'0' || cp > U'9') all_digits = false;
        utf8::append(s, cp);
    }
    out.push_back({std::move(s), all_digits ? TokenKind::Digit : TokenKind::LatinWord});
    run.clear();
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::vector<char32_t> cjk;
    std::vector<char32_t> word;
    for (char32_t raw : utf8::decode(text)) {
        const char32_t cp = utf8::fold_width(raw);
        if (utf8::is_cjk(cp)) {
            flush_word(word, out);
            cjk.push_back(cp);
        } else if (utf8::is_separator(cp)) {
            flush_word(word, out);
            if (!cjk.empty()) flush_cjk(cjk, out);
        } else {
            if (!cjk.empty()) flush_cjk(cjk, out);
            word.push_back(cp);
        }
    }
    flush_word(word, out);
    if (!cjk.empty()) flush_cjk(cjk, out);
    return out;
}

std::vector<std::string> token_surfaces(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text)) out.push_back(std::move(t.surface));
    return out;
}

}  // namespace memeattr::text
