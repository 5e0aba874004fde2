#include "memeattr/remote_backend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "httplib.h"
#include "memeattr/errors.hpp"
#include "memeattr/log.hpp"
#include "memeattr/utf8.hpp"

namespace memeattr::model {

namespace {

using nlohmann::json;

/// Releases the in-flight slot on scope exit.
class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<256>& sem) : sem_(sem) { sem_.acquire(); }
    ~SlotGuard() { sem_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::counting_semaphore<256>& sem_;
};

bool retriable(const ModelError& e) {
    if (dynamic_cast<const AuthError*>(&e)) return false;
    return dynamic_cast<const TimeoutError*>(&e) || dynamic_cast<const TransportError*>(&e) ||
           dynamic_cast<const RateLimited*>(&e);
}

std::string normalized_label(const std::string& token) {
    return utf8::fold_case_width(utf8::trim(token));
}

}  // namespace

RemoteBackend::RemoteBackend(EndpointConfig config, bool vision)
    : config_(std::move(config)), vision_(vision) {
    const auto& url = config_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigParse("endpoint base_url needs a scheme: '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    if (config_.model.empty()) throw ConfigParse("endpoint model name is empty");
    const int cap = std::clamp(config_.max_in_flight, 1, 256);
    in_flight_ = std::make_unique<std::counting_semaphore<256>>(cap);
}

RemoteBackend::~RemoteBackend() = default;

json RemoteBackend::post_once(const std::string& path, const std::string& payload) {
    if (!network_allowed()) throw NetworkDisabled();

    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw AuthError("credential environment variable " + config_.api_key_env + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    httplib::Client client(scheme_host_port_);
    const auto seconds = static_cast<time_t>(config_.timeout_s);
    const auto micros = static_cast<time_t>((config_.timeout_s - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);

    SlotGuard slot(*in_flight_);
    note_network_request();
    auto res = client.Post(path_prefix_ + path, headers, payload, "application/json");
    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout) throw TimeoutError("connection timed out: " + scheme_host_port_);
        throw TransportError("request to " + scheme_host_port_ + path_prefix_ + path + " failed: " +
                             httplib::to_string(err));
    }
    const int status = res->status;
    if (status == 401 || status == 403) throw AuthError("endpoint rejected credential (HTTP " + std::to_string(status) + ")");
    if (status == 429) throw RateLimited("rate limited (HTTP 429)");
    if (status == 408 || status == 504) throw TimeoutError("endpoint timeout (HTTP " + std::to_string(status) + ")");
    if (status >= 500) throw TransportError("server error (HTTP " + std::to_string(status) + ")");
    if (status < 200 || status >= 300) {
        throw CapabilityUnsupported("request rejected (HTTP " + std::to_string(status) + "): " + res->body.substr(0, 200));
    }
    try {
        return json::parse(res->body);
    } catch (const json::parse_error&) {
        throw TransportError("endpoint returned invalid JSON");
    }
}

json RemoteBackend::post(const std::string& path, const json& body) {
    const std::string payload = body.dump();
    const int attempts = 1 + std::max(0, config_.retries);
    for (int attempt = 1;; ++attempt) {
        try {
            return post_once(path, payload);
        } catch (const ModelError& e) {
            if (!retriable(e) || attempt >= attempts) throw;
            logger().warn("{} (attempt {}/{}), retrying", e.what(), attempt, attempts);
            std::this_thread::sleep_for(std::chrono::milliseconds(100 * (1 << std::min(attempt, 6))));
        }
    }
}

ChatResponse RemoteBackend::chat(const ChatRequest& req) {
    json user_content;
    if (req.image && vision_) {
        user_content = json::array({json{{"type", "text"}, {"text", req.user}},
                                    json{{"type", "image_url"}, {"image_url", {{"url", *req.image}}}}});
    } else {
        user_content = req.user;
    }
    json messages = json::array();
    if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
    messages.push_back({{"role", "user"}, {"content", user_content}});
    const json body = {{"model", config_.model},
                       {"messages", messages},
                       {"temperature", req.decoding.temperature},
                       {"max_tokens", req.decoding.max_tokens}};
    const json res = post("/chat/completions", body);
    try {
        const auto& choice = res.at("choices").at(0);
        const auto& message = choice.at("message");
        const std::string finish = choice.value("finish_reason", std::string("stop"));
        if (message.contains("refusal") && message["refusal"].is_string()) {
            throw Refusal("model refused: " + message["refusal"].get<std::string>());
        }
        if (finish == "content_filter") throw Refusal("response blocked by content filter");
        const auto& content = message.at("content");
        return {content.is_string() ? content.get<std::string>() : std::string(), finish};
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected chat response shape: ") + e.what());
    }
}

std::vector<std::vector<double>> RemoteBackend::embed_texts(std::span<const std::string> texts, std::size_t dim) {
    for (const auto& t : texts) {
        if (utf8::trim(t).empty()) throw EmptyText();
    }
    if (texts.empty()) return {};
    const json body = {{"model", config_.model},
                       {"input", std::vector<std::string>(texts.begin(), texts.end())}};
    const json res = post("/embeddings", body);
    std::vector<std::vector<double>> out(texts.size());
    try {
        const auto& data = res.at("data");
        if (data.size() != texts.size()) throw TransportError("embedding count does not match input count");
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto idx = data[i].value("index", i);
            if (idx >= out.size()) throw TransportError("embedding index out of range");
            out[idx] = data[i].at("embedding").get<std::vector<double>>();
            if (out[idx].size() != dim) {
                throw DimensionMismatch("endpoint returned dimension " + std::to_string(out[idx].size()) +
                                        ", expected " + std::to_string(dim));
            }
        }
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected embedding response shape: ") + e.what());
    }
    return out;
}

BinaryLogits RemoteBackend::yes_no_logits(const std::string& prompt) {
    const json body = {{"model", config_.model},
                       {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
                       {"temperature", 0.0},
                       {"max_tokens", 1},
                       {"logprobs", true},
                       {"top_logprobs", 20}};
    const json res = post("/chat/completions", body);
    constexpr double kMissing = -std::numeric_limits<double>::infinity();
    double yes = kMissing;
    double no = kMissing;
    double floor = 0.0;
    try {
        const auto& first = res.at("choices").at(0).at("logprobs").at("content").at(0);
        auto consider = [&](const json& item) {
            const auto label = normalized_label(item.at("token").get<std::string>());
            const double lp = item.at("logprob").get<double>();
            floor = std::min(floor, lp);
            if (label == "yes") yes = std::max(yes, lp);
            if (label == "no") no = std::max(no, lp);
        };
        consider(first);
        if (first.contains("top_logprobs")) {
            for (const auto& item : first["top_logprobs"]) consider(item);
        }
    } catch (const json::exception& e) {
        throw CapabilityUnsupported(std::string("endpoint did not return token log-probabilities: ") + e.what());
    }
    if (yes == kMissing && no == kMissing) {
        throw CapabilityUnsupported("neither 'yes' nor 'no' among the returned top log-probabilities");
    }
    // A label outside the returned top list is bounded above by the smallest listed log-probability.
    if (yes == kMissing) yes = floor;
    if (no == kMissing) no = floor;
    return {yes, no};
}

TokenLogProbs RemoteBackend::token_logprobs(const std::string& prompt, const std::string& completion) {
    TokenLogProbs out;
    if (completion.empty()) return out;
    const json body = {{"model", config_.model},
                       {"prompt", prompt + completion},
                       {"max_tokens", 0},
                       {"echo", true},
                       {"logprobs", 0}};
    const json res = post("/completions", body);
    try {
        const auto& lp = res.at("choices").at(0).at("logprobs");
        const auto& tokens = lp.at("tokens");
        const auto& values = lp.at("token_logprobs");
        const auto& offsets = lp.at("text_offset");
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (offsets.at(i).get<std::size_t>() < prompt.size()) continue;
            if (values.at(i).is_null()) continue;
            out.tokens.push_back({tokens[i].get<std::string>(), std::min(0.0, values[i].get<double>())});
        }
    } catch (const json::exception& e) {
        throw CapabilityUnsupported(std::string("endpoint did not return echoed log-probabilities: ") + e.what());
    }
    return out;
}

}  // namespace memeattr::model
