#include "memeattr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <regex>

#include "memeattr/errors.hpp"
#include "memeattr/log.hpp"
#include "memeattr/tokenizer.hpp"
#include "memeattr/utf8.hpp"

namespace memeattr::eval {

namespace {

using Tokens = std::vector<std::string>;
using NgramCounts = std::map<std::vector<std::string_view>, std::size_t>;

NgramCounts ngrams(const Tokens& tokens, std::size_t n) {
    NgramCounts counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::vector<std::string_view> g(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                        tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
        ++counts[std::move(g)];
    }
    return counts;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

ConfusionCounts confusion(std::span<const HarmLabel> pred, std::span<const HarmLabel> gold) {
    if (pred.size() != gold.size()) {
        throw LengthMismatch("predictions (" + std::to_string(pred.size()) + ") and gold labels (" +
                             std::to_string(gold.size()) + ") differ in length");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] == HarmLabel::Harmful;
        const bool g = gold[i] == HarmLabel::Harmful;
        if (p && g) ++c.tp;
        else if (p) ++c.fp;
        else if (g) ++c.fn;
        else ++c.tn;
    }
    return c;
}

std::optional<double> f1_from(double precision, double recall) {
    if (precision + recall <= 0.0) return std::nullopt;
    return 2.0 * precision * recall / (precision + recall);
}

ClassificationReport prf1(const ConfusionCounts& c) {
    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    ClassificationReport r;
    r.accuracy = ratio(c.tp + c.tn, c.total());
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    if (r.precision && r.recall) r.f1 = f1_from(*r.precision, *r.recall);
    return r;
}

double bleu4(std::string_view candidate, std::span<const std::string> references) {
    if (references.empty()) throw EmptyReference();
    const Tokens cand = text::token_surfaces(candidate);
    if (cand.empty()) return 0.0;

    std::vector<Tokens> refs;
    refs.reserve(references.size());
    for (const auto& r : references) refs.push_back(text::token_surfaces(r));

    const std::size_t c = cand.size();
    std::size_t r = refs.front().size();
    for (const auto& ref : refs) {
        const auto d = [&](std::size_t len) { return len > c ? len - c : c - len; };
        if (d(ref.size()) < d(r) || (d(ref.size()) == d(r) && ref.size() < r)) r = ref.size();
    }

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto cand_counts = ngrams(cand, n);
        std::vector<NgramCounts> ref_counts;
        for (const auto& ref : refs) ref_counts.push_back(ngrams(ref, n));
        std::size_t matched = 0;
        std::size_t total = 0;
        for (const auto& [g, count] : cand_counts) {
            total += count;
            std::size_t best = 0;
            for (const auto& rc : ref_counts) {
                auto it = rc.find(g);
                if (it != rc.end()) best = std::max(best, it->second);
            }
            matched += std::min(count, best);
        }
        const double num = matched == 0 ? kBleuEpsilon : static_cast<double>(matched);
        const double den = static_cast<double>(std::max<std::size_t>(total, 1));
        log_sum += std::log(num / den);
    }
    const double bp = c < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)) : 1.0;
    return std::clamp(bp * std::exp(log_sum / 4.0), 0.0, 1.0);
}

double bleu4(std::string_view candidate, std::string_view reference) {
    const std::string ref(reference);
    return bleu4(candidate, std::span<const std::string>(&ref, 1));
}

double rouge_l(std::string_view candidate, std::string_view reference) {
    const Tokens c = text::token_surfaces(candidate);
    const Tokens r = text::token_surfaces(reference);
    if (c.empty() || r.empty()) return 0.0;
    const auto lcs = static_cast<double>(lcs_length(c, r));
    if (lcs == 0.0) return 0.0;
    const double p = lcs / static_cast<double>(c.size());
    const double rec = lcs / static_cast<double>(r.size());
    return 2.0 * p * rec / (p + rec);
}

// ---------------------------------------------------------------------------

bool LikertScores::any_clamped() const {
    return std::any_of(clamped.begin(), clamped.end(), [](bool b) { return b; });
}

std::string_view likert_rubric() {
    static constexpr std::string_view kRubric =
        "You are grading an explanation of why a Chinese internet meme is harmful.\n"
        "Score the explanation on five dimensions, each from 1 (worst) to 5 (best); half points are allowed.\n"
        "1. Informativeness: does it tell the reader something they need in order to understand the meme?\n"
        "2. Soundness: is the reasoning correct and free of unsupported claims?\n"
        "3. Cultural relevance: does it use the right cultural, slang or social background?\n"
        "4. Conciseness: is it short and free of filler?\n"
        "5. Persuasiveness: would a neutral reader accept the conclusion?\n"
        "Reply with exactly one line of the form\n"
        "SCORES: <informativeness>, <soundness>, <cultural relevance>, <conciseness>, <persuasiveness>\n"
        "and nothing else.\n";
    return kRubric;
}

model::ChatRequest likert_request(std::string_view explanation, const JudgeSubject& meme) {
    model::ChatRequest req;
    req.system = std::string(likert_rubric());
    req.user = "Meme text: " + std::string(meme.text) + "\nImage description: " + std::string(meme.description) +
               "\nExplanation: " + std::string(explanation);
    req.decoding.temperature = 0.0;
    req.decoding.max_tokens = 32;
    return req;
}

std::optional<LikertScores> parse_likert(std::string_view response) {
    static const std::regex kNumber(R"((-?\d+(?:\.\d+)?))");
    // Fullwidth digits and punctuation fold to ASCII first.
    std::string folded;
    for (char32_t cp : utf8::decode(response)) utf8::append(folded, utf8::fold_width(cp));

    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= folded.size()) {
        const auto end = folded.find('\n', start);
        lines.push_back(folded.substr(start, end == std::string::npos ? std::string::npos : end - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }

    auto numbers_in = [](const std::string& line) {
        std::vector<double> out;
        for (auto it = std::sregex_iterator(line.begin(), line.end(), kNumber); it != std::sregex_iterator(); ++it) {
            out.push_back(std::stod((*it)[1].str()));
        }
        return out;
    };
    auto is_scores_line = [](const std::string& line) {
        const auto lower = utf8::fold_case_width(utf8::trim(line));
        return lower.rfind("scores", 0) == 0;
    };

    std::optional<std::vector<double>> found;
    for (const auto& line : lines) {
        if (!is_scores_line(line)) continue;
        auto nums = numbers_in(line);
        if (nums.size() == kLikertDims) {
            found = std::move(nums);
            break;
        }
    }
    if (!found) {
        for (const auto& line : lines) {
            auto nums = numbers_in(line);
            if (nums.size() == kLikertDims) {
                found = std::move(nums);
                break;
            }
        }
    }
    if (!found) return std::nullopt;

    LikertScores s;
    for (std::size_t i = 0; i < kLikertDims; ++i) {
        const double v = (*found)[i];
        if (!std::isfinite(v) || std::floor(v * 2.0) != v * 2.0) return std::nullopt;
        s.values[i] = std::clamp(v, 1.0, 5.0);
        s.clamped[i] = s.values[i] != v;
    }
    return s;
}

LikertScores likert_judge(std::string_view explanation, const JudgeSubject& meme, model::ModelBackend& judge) {
    const auto req = likert_request(explanation, meme);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto response = judge.chat(req);
        if (auto scores = parse_likert(response.text)) {
            if (scores->any_clamped()) logger().warn("judge score out of range, clamped to [1, 5]");
            return *scores;
        }
        logger().warn("unparseable judge response (attempt {}): {}", attempt + 1, utf8::truncate(response.text, 80));
    }
    throw JudgeParseError("judge response did not contain five scores after one retry");
}

}  // namespace memeattr::eval
