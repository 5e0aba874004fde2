#include "memeattr/gateway.hpp"

#include <atomic>
#include <cstring>

#include "memeattr/errors.hpp"
#include "memeattr/hash.hpp"

namespace memeattr::model {

namespace {

std::atomic<bool> g_network_allowed{true};
std::atomic<std::size_t> g_network_requests{0};

}  // namespace

std::uint64_t request_hash(const ChatRequest& req) {
    std::string buf;
    buf.reserve(req.system.size() + req.user.size() + 64);
    buf += req.system;
    buf += '\x1f';
    buf += req.user;
    buf += '\x1f';
    if (req.image) {
        buf += 'I';
        buf += *req.image;
    }
    buf += '\x1f';
    std::uint64_t temp_bits = 0;
    static_assert(sizeof(temp_bits) == sizeof(req.decoding.temperature));
    std::memcpy(&temp_bits, &req.decoding.temperature, sizeof(temp_bits));
    buf += std::to_string(temp_bits);
    buf += '\x1f';
    buf += std::to_string(req.decoding.max_tokens);
    return fnv1a64(buf);
}

ChatResponse ModelBackend::chat(const ChatRequest&) {
    throw CapabilityUnsupported(name() + ": chat completion not supported");
}

std::vector<std::vector<double>> ModelBackend::embed_texts(std::span<const std::string>, std::size_t) {
    throw CapabilityUnsupported(name() + ": embeddings not supported");
}

BinaryLogits ModelBackend::yes_no_logits(const std::string&) {
    throw CapabilityUnsupported(name() + ": label scoring not supported");
}

TokenLogProbs ModelBackend::token_logprobs(const std::string&, const std::string&) {
    throw CapabilityUnsupported(name() + ": completion scoring not supported");
}

void set_network_allowed(bool allowed) noexcept { g_network_allowed.store(allowed); }
bool network_allowed() noexcept { return g_network_allowed.load(); }
std::size_t network_requests_sent() noexcept { return g_network_requests.load(); }
void note_network_request() noexcept { g_network_requests.fetch_add(1); }

}  // namespace memeattr::model
