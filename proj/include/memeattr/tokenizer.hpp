#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace memeattr::text {

enum class TokenKind { CjkBigram, CjkUnigram, LatinWord, Digit };

struct Token {
    std::string surface;
    TokenKind kind = TokenKind::LatinWord;

    bool operator==(const Token&) const = default;
};

/// Deterministic mixed-script tokenizer.
///
/// Runs of CJK characters emit overlapping character bigrams; a run of exactly
/// one CJK character emits that character as a unigram. Everything else is
/// split on whitespace and punctuation into words; ASCII letters are lowercased
/// and fullwidth forms are folded to ASCII first. A word made only of digits is
/// a Digit token, anything else a LatinWord.
std::vector<Token> tokenize(std::string_view text);

/// Surfaces only, in token order.
std::vector<std::string> token_surfaces(std::string_view text);

}  // namespace memeattr::text
