#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memeattr/dataset.hpp"
#include "memeattr/gateway.hpp"

namespace memeattr::eval {

using kb::HarmLabel;

// ---------------------------------------------------------------------------
// Classification. Harmful is the positive class.

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// Throws LengthMismatch.
ConfusionCounts confusion(std::span<const HarmLabel> pred, std::span<const HarmLabel> gold);

/// A field is absent exactly when its ratio is 0/0.
struct ClassificationReport {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

ClassificationReport prf1(const ConfusionCounts& c);

/// 2PR/(P+R); absent when P+R is 0.
std::optional<double> f1_from(double precision, double recall);

// ---------------------------------------------------------------------------
// Generation. Token units come from text::tokenize.

/// Added to zero modified-precision numerators.
inline constexpr double kBleuEpsilon = 1e-9;

/// Sentence BLEU-4: geometric mean of the clipped 1..4-gram precisions times
/// the brevity penalty exp(1 - r/c) when c < r. r is the reference length
/// closest to c (shorter wins ties). A precision with zero matches uses
/// kBleuEpsilon as numerator; an empty n-gram denominator counts as 1.
/// Empty candidate -> 0. Throws EmptyReference when `references` is empty.
double bleu4(std::string_view candidate, std::span<const std::string> references);
double bleu4(std::string_view candidate, std::string_view reference);

/// LCS F-measure with beta = 1: P = LCS/|c|, R = LCS/|r|. 0 when either side
/// has no tokens or nothing in common.
double rouge_l(std::string_view candidate, std::string_view reference);

struct GenerationScores {
    double bleu4 = 0.0;
    double rouge_l = 0.0;
};

// ---------------------------------------------------------------------------
// Likert judging

inline constexpr std::size_t kLikertDims = 5;
inline constexpr std::array<std::string_view, kLikertDims> kLikertDimensionNames = {
    "informativeness", "soundness", "cultural_relevance", "conciseness", "persuasiveness"};

struct LikertScores {
    std::array<double, kLikertDims> values{};  // each in [1, 5]
    std::array<bool, kLikertDims> clamped{};   // true where the judge went out of range

    double informativeness() const { return values[0]; }
    double soundness() const { return values[1]; }
    double cultural_relevance() const { return values[2]; }
    double conciseness() const { return values[3]; }
    double persuasiveness() const { return values[4]; }
    bool any_clamped() const;
};

/// Aggregate human-written explanation scores used as a comparison row.
inline constexpr std::array<double, kLikertDims> kHumanReferenceLikert = {3.14, 4.03, 2.90, 4.79, 3.46};

inline constexpr std::string_view kRubricVersion = "likert-rubric-v1";

/// The fixed judge instructions for kRubricVersion.
std::string_view likert_rubric();

struct JudgeSubject {
    std::string text;
    std::string description;
};

model::ChatRequest likert_request(std::string_view explanation, const JudgeSubject& meme);

/// Reads five integer or half-point scores from the "SCORES:" line, or failing
/// that from the first line carrying exactly five numbers. Out-of-range values
/// are clamped to [1, 5] and flagged. nullopt when nothing parses.
std::optional<LikertScores> parse_likert(std::string_view response);

/// One judge call; an unparseable answer is retried once, then JudgeParseError.
LikertScores likert_judge(std::string_view explanation, const JudgeSubject& meme, model::ModelBackend& judge);

}  // namespace memeattr::eval
