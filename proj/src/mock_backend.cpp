#include "memeattr/mock_backend.hpp"

#include <cmath>
#include <fstream>

#include "jsonl.hpp"
#include "memeattr/errors.hpp"
#include "memeattr/hash.hpp"
#include "memeattr/tokenizer.hpp"
#include "memeattr/utf8.hpp"

namespace memeattr::model {

namespace {

constexpr double kLogitRange = 4.0;

double unit_from_bits(std::uint64_t bits32) {
    return static_cast<double>(bits32) / 4294967295.0;
}

std::uint64_t parse_hex(const std::string& s, std::size_t line) {
    if (s.size() != 16) throw SchemaError("hash", "expected 16 hex digits (line " + std::to_string(line) + ")");
    std::uint64_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') {
            v |= static_cast<std::uint64_t>(c - '0');
        } else if (c >= 'a' && c <= 'f') {
            v |= static_cast<std::uint64_t>(c - 'a' + 10);
        } else if (c >= 'A' && c <= 'F') {
            v |= static_cast<std::uint64_t>(c - 'A' + 10);
        } else {
            throw SchemaError("hash", "invalid hex digit (line " + std::to_string(line) + ")");
        }
    }
    return v;
}

}  // namespace

ScenarioTable ScenarioTable::read(std::istream& in) {
    ScenarioTable table;
    jsonl::for_each_line(in, [&](std::size_t line, std::string_view text) {
        const auto obj = jsonl::parse_object(text, line);
        jsonl::note_unknown_fields(obj, {"match", "hash", "response", "l_yes", "l_no"}, line, nullptr);
        Rule rule;
        if (auto hash = jsonl::optional_string(obj, "hash", line)) {
            rule.by_hash = true;
            rule.match = hex64(parse_hex(*hash, line));
        } else {
            rule.match = jsonl::required_string(obj, "match", line);
        }
        rule.response = jsonl::optional_string(obj, "response", line);
        const bool has_yes = obj.contains("l_yes");
        const bool has_no = obj.contains("l_no");
        if (has_yes != has_no) throw SchemaError("l_yes", "l_yes and l_no come as a pair (line " + std::to_string(line) + ")");
        if (has_yes) {
            if (!obj["l_yes"].is_number() || !obj["l_no"].is_number()) {
                throw SchemaError("l_yes", "logits must be numbers (line " + std::to_string(line) + ")");
            }
            rule.logits = BinaryLogits{obj["l_yes"].get<double>(), obj["l_no"].get<double>()};
        }
        if (!rule.response && !rule.logits) {
            throw SchemaError("response", "rule needs a response or a logit pair (line " + std::to_string(line) + ")");
        }
        table.rules_.push_back(std::move(rule));
    });
    return table;
}

ScenarioTable ScenarioTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file: " + path);
    return read(in);
}

void ScenarioTable::add_response(std::string match, std::string response) {
    rules_.push_back({std::move(match), false, std::move(response), std::nullopt});
}

void ScenarioTable::add_hash_response(std::uint64_t hash, std::string response) {
    rules_.push_back({hex64(hash), true, std::move(response), std::nullopt});
}

void ScenarioTable::add_logits(std::string match, double l_yes, double l_no) {
    rules_.push_back({std::move(match), false, std::nullopt, BinaryLogits{l_yes, l_no}});
}

const std::string* ScenarioTable::find_response(std::string_view prompt, std::uint64_t hash) const {
    const std::string hash_hex = hex64(hash);
    for (const auto& rule : rules_) {
        if (!rule.response) continue;
        const bool hit = rule.by_hash ? rule.match == hash_hex : prompt.find(rule.match) != std::string_view::npos;
        if (hit) return &*rule.response;
    }
    return nullptr;
}

std::optional<BinaryLogits> ScenarioTable::find_logits(std::string_view prompt) const {
    for (const auto& rule : rules_) {
        if (rule.logits && !rule.by_hash && prompt.find(rule.match) != std::string_view::npos) return rule.logits;
    }
    return std::nullopt;
}

MockBackend::MockBackend(ScenarioTable scenarios, bool vision)
    : scenarios_(std::move(scenarios)), vision_(vision) {}

ChatResponse MockBackend::chat(const ChatRequest& req) {
    const auto hash = request_hash(req);
    const std::string prompt = req.system + "\n" + req.user;
    if (const auto* canned = scenarios_.find_response(prompt, hash)) return {*canned, "stop"};
    return {"mock:" + hex64(hash), "stop"};
}

std::vector<double> hashed_embedding(std::string_view text, std::size_t dim) {
    if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
    const std::string trimmed = utf8::trim(text);
    if (trimmed.empty()) throw EmptyText();
    auto tokens = text::token_surfaces(trimmed);
    if (tokens.empty()) tokens.push_back(trimmed);

    std::vector<double> v(dim, 0.0);
    for (const auto& t : tokens) v[fnv1a64(t) % dim] += 1.0;
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

std::vector<std::vector<double>> MockBackend::embed_texts(std::span<const std::string> texts, std::size_t dim) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(hashed_embedding(t, dim));
    return out;
}

BinaryLogits MockBackend::yes_no_logits(const std::string& prompt) {
    if (auto canned = scenarios_.find_logits(prompt)) return *canned;
    const std::uint64_t h = fnv1a64(prompt);
    return {-kLogitRange + 2.0 * kLogitRange * unit_from_bits(h & 0xFFFFFFFFULL),
            -kLogitRange + 2.0 * kLogitRange * unit_from_bits(h >> 32)};
}

TokenLogProbs MockBackend::token_logprobs(const std::string&, const std::string& completion) {
    TokenLogProbs out;
    for (auto& surface : text::token_surfaces(completion)) {
        const double lp = 0.0 - static_cast<double>(fnv1a64(surface) % 100) / 100.0;
        out.tokens.push_back({std::move(surface), lp});
    }
    return out;
}

}  // namespace memeattr::model
