#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "memeattr/ake.hpp"
#include "memeattr/dataset.hpp"
#include "memeattr/gateway.hpp"

namespace memeattr::rir {

using kb::HarmLabel;

/// A meme as image handle, embedded text and textual image description.
struct MemeTuple {
    std::optional<std::string> image;
    std::string text;
    std::string description;

    /// Throws InvalidArgument when text and description are both blank.
    void validate() const;

    static MemeTuple from_record(const kb::MemeRecord& record);
};

struct AttributionInput {
    MemeTuple meme;
    std::string exp_nonharmful;
    std::string exp_harmful;
    ake::KnowledgeContext knowledge;

    void validate() const;
};

enum class PromptLanguage { Auto, Chinese, English };

/// Auto picks Chinese when the meme text or description contains CJK.
PromptLanguage resolve_language(PromptLanguage requested, const MemeTuple& meme);

struct PromptOptions {
    PromptLanguage language = PromptLanguage::Auto;
    /// Whether the image itself reaches the model. When false the image slot
    /// points at the description instead.
    bool image_attached = false;
};

/// Debate-style instruction: expert preamble, the input block (image, text,
/// description, background knowledge as "term: definition" lines, then the
/// non-harmful and the harmful interpretation) and the required
/// "Answer:" / "Reason:" output block.
std::string build_rir_prompt(const AttributionInput& input, const PromptOptions& options = {});

enum class ParseStatus { Clean, Recovered, Fallback };

std::string_view to_string(ParseStatus status) noexcept;

struct Decision {
    HarmLabel label = HarmLabel::NonHarmful;
    std::string reason;
    std::string raw_response;
    ParseStatus parse_status = ParseStatus::Fallback;

    bool operator==(const Decision&) const = default;
};

/// Total parser for model verdicts.
///
///  - Clean: the first "Answer:" line (or 答案：) names exactly one label
///    (Harmful / Non-harmful / 有害 / 无害; case and width insensitive) and a
///    "Reason:" (理由：) section follows.
///  - Recovered: the label is still unambiguous, found elsewhere in the text.
///  - Fallback: no label or both labels; NonHarmful with the raw text as reason.
Decision parse_decision(std::string_view response);

/// "Answer: <Harmful|Non-harmful>\nReason: <reason>".
std::string render_decision(HarmLabel label, std::string_view reason);

struct AttributeOptions {
    PromptOptions prompt;
    int max_tokens = 512;
};

/// build_rir_prompt -> chat at temperature 0 -> parse_decision.
/// ModelError propagates; there is no fallback for transport failures.
Decision attribute(const AttributionInput& input, model::ModelBackend& model, const AttributeOptions& options = {});

inline constexpr std::size_t kDefaultStanceBudget = 120;

/// Prompt asking for a single interpretation arguing the given stance.
model::ChatRequest stance_request(const MemeTuple& meme, const ake::KnowledgeContext& knowledge, HarmLabel stance,
                                  PromptLanguage language = PromptLanguage::Auto);

/// One-sided interpretation, trimmed and cut to `budget` characters. Used when
/// no annotated interpretation pair exists.
std::string generate_stance(const MemeTuple& meme, const ake::KnowledgeContext& knowledge, HarmLabel stance,
                            model::ModelBackend& model, std::size_t budget = kDefaultStanceBudget,
                            PromptLanguage language = PromptLanguage::Auto);

struct NllScore {
    double value = 0.0;
    std::size_t token_count = 0;
};

/// -sum(logprob).
NllScore nll(const model::TokenLogProbs& logprobs);

/// Negative log-likelihood of the label answer given the attribution prompt.
NllScore classification_nll(const AttributionInput& input, HarmLabel gold, model::ModelBackend& scorer,
                            const PromptOptions& options = {});

/// Negative log-likelihood of an explanation given the attribution prompt.
NllScore explanation_nll(const AttributionInput& input, std::string_view explanation, model::ModelBackend& scorer,
                         const PromptOptions& options = {});

}  // namespace memeattr::rir
