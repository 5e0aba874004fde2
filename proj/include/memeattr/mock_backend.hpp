#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memeattr/gateway.hpp"

namespace memeattr::model {

/// Canned behaviour for the mock backend, loaded from a line-delimited file:
///
///   {"match": "<substring>", "response": "<text>"}
///   {"hash": "<16 hex digits>", "response": "<text>"}
///   {"match": "<substring>", "l_yes": 1.5, "l_no": -0.5}
///
/// Rules are tried in file order; the first match wins.
class ScenarioTable {
public:
    struct Rule {
        std::string match;                  // substring, or hex request hash when by_hash
        bool by_hash = false;
        std::optional<std::string> response;
        std::optional<BinaryLogits> logits;
    };

    static ScenarioTable read(std::istream& in);
    static ScenarioTable load(const std::string& path);

    void add_response(std::string match, std::string response);
    void add_hash_response(std::uint64_t hash, std::string response);
    void add_logits(std::string match, double l_yes, double l_no);

    /// First response rule matching the prompt text or the request hash.
    const std::string* find_response(std::string_view prompt, std::uint64_t hash) const;
    std::optional<BinaryLogits> find_logits(std::string_view prompt) const;

    std::size_t size() const noexcept { return rules_.size(); }

private:
    std::vector<Rule> rules_;
};

/// Fully deterministic backend: every output is a pure function of the input
/// and the scenario table. No clocks, no randomness, no shared mutable state.
class MockBackend final : public ModelBackend {
public:
    explicit MockBackend(ScenarioTable scenarios = {}, bool vision = false);

    std::string name() const override { return "mock"; }
    bool supports_vision() const override { return vision_; }

    /// Scenario response when a rule matches system+user text or the request
    /// hash; otherwise "mock:<hash>".
    ChatResponse chat(const ChatRequest& req) override;

    /// Feature hashing: each token bumps bucket fnv1a64(token) % dim, then the
    /// vector is L2-normalized. A text with no tokens hashes as one token.
    std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts, std::size_t dim) override;

    /// Scenario logits when a rule matches, else two values in [-4, 4] drawn
    /// from the prompt hash.
    BinaryLogits yes_no_logits(const std::string& prompt) override;

    /// Each completion token scores -(fnv1a64(token) % 100) / 100.
    TokenLogProbs token_logprobs(const std::string& prompt, const std::string& completion) override;

    const ScenarioTable& scenarios() const noexcept { return scenarios_; }

private:
    ScenarioTable scenarios_;
    bool vision_;
};

/// The mock embedding of a single text.
std::vector<double> hashed_embedding(std::string_view text, std::size_t dim);

}  // namespace memeattr::model
