#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memeattr::model {

struct DecodingParams {
    double temperature = 0.0;  // greedy by default
    int max_tokens = 512;

    bool operator==(const DecodingParams&) const = default;
};

struct ChatRequest {
    std::string system;
    std::string user;
    std::optional<std::string> image;  // opaque handle, passed through untouched
    DecodingParams decoding;
};

struct ChatResponse {
    std::string text;
    std::string finish_reason = "stop";
};

/// Yes/no label scores at the answer position. Either raw logits or
/// log-probabilities; only their difference is ever used.
struct BinaryLogits {
    double l_yes = 0.0;
    double l_no = 0.0;
};

struct TokenLogProb {
    std::string token;
    double logprob = 0.0;  // <= 0

    bool operator==(const TokenLogProb&) const = default;
};

struct TokenLogProbs {
    std::vector<TokenLogProb> tokens;

    bool operator==(const TokenLogProbs&) const = default;
};

/// Stable hash of every field of the request.
std::uint64_t request_hash(const ChatRequest& req);

/// Uniform contract for every model capability the pipeline uses. Backends
/// override what they support; the rest throw CapabilityUnsupported.
/// Implementations must be safe for concurrent calls.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;

    /// Identifier recorded in reports (backend kind and model name).
    virtual std::string name() const = 0;

    virtual bool supports_vision() const { return false; }

    virtual ChatResponse chat(const ChatRequest& req);

    /// One vector of length `dim` per text. Throws EmptyText for blank input.
    virtual std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts, std::size_t dim);

    virtual BinaryLogits yes_no_logits(const std::string& prompt);

    /// Log-probability of each token of `completion` given `prompt`.
    virtual TokenLogProbs token_logprobs(const std::string& prompt, const std::string& completion);
};

// ---------------------------------------------------------------------------
// Process-wide network switch. Mock runs turn it off; the remote backend checks
// it before every request and counts the requests it does send.

void set_network_allowed(bool allowed) noexcept;
bool network_allowed() noexcept;
std::size_t network_requests_sent() noexcept;
void note_network_request() noexcept;

}  // namespace memeattr::model
