#pragma once

#include <memory>
#include <semaphore>
#include <string>

#include "json.hpp"
#include "memeattr/gateway.hpp"

namespace memeattr::model {

struct EndpointConfig {
    std::string base_url;     // e.g. "https://api.example.com/v1"
    std::string model;
    std::string api_key_env;  // name of the environment variable holding the key; empty = no auth
    double timeout_s = 60.0;
    int retries = 2;
    int max_in_flight = 4;

    bool operator==(const EndpointConfig&) const = default;
};

/// Adapter for an OpenAI-compatible HTTP API.
///
///  - chat:           POST {base}/chat/completions
///  - yes_no_logits:  POST {base}/chat/completions with logprobs/top_logprobs,
///                    one output token; returns the yes/no log-probabilities
///  - embed_texts:    POST {base}/embeddings
///  - token_logprobs: POST {base}/completions with echo=true, max_tokens=0
///
/// Timeouts, transport failures, 429 and 5xx responses are retried up to
/// `retries` times; 401/403 fail immediately. The credential is read from the
/// environment at call time and never stored.
class RemoteBackend final : public ModelBackend {
public:
    explicit RemoteBackend(EndpointConfig config, bool vision = false);
    ~RemoteBackend() override;

    std::string name() const override { return "remote:" + config_.model; }
    bool supports_vision() const override { return vision_; }

    ChatResponse chat(const ChatRequest& req) override;
    std::vector<std::vector<double>> embed_texts(std::span<const std::string> texts, std::size_t dim) override;
    BinaryLogits yes_no_logits(const std::string& prompt) override;
    TokenLogProbs token_logprobs(const std::string& prompt, const std::string& completion) override;

    const EndpointConfig& config() const noexcept { return config_; }

private:
    nlohmann::json post(const std::string& path, const nlohmann::json& body);
    nlohmann::json post_once(const std::string& path, const std::string& payload);

    EndpointConfig config_;
    bool vision_;
    std::string scheme_host_port_;
    std::string path_prefix_;
    std::unique_ptr<std::counting_semaphore<256>> in_flight_;
};

}  // namespace memeattr::model
