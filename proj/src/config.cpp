#include "memeattr/config.hpp"

#include <filesystem>

#include "memeattr/errors.hpp"
#include "memeattr/io.hpp"
#include "memeattr/mock_backend.hpp"

namespace memeattr::config {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
    if (!obj.is_object()) throw ConfigParse(std::string(where) + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || k == key;
        if (!ok) throw ConfigParse(std::string(where) + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        if constexpr (std::is_same_v<T, std::size_t>) {
            if (!it->is_number_unsigned()) throw ConfigParse("not a non-negative integer");
        } else if constexpr (std::is_same_v<T, int>) {
            if (!it->is_number_integer()) throw ConfigParse("not an integer");
        } else if constexpr (std::is_same_v<T, double>) {
            if (!it->is_number()) throw ConfigParse("not a number");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ConfigParse("not a boolean");
        } else {
            if (!it->is_string()) throw ConfigParse("not a string");
        }
        out = it->get<T>();
    } catch (const std::exception& e) {
        throw ConfigParse(std::string(where) + "." + key + ": " + e.what());
    }
}

void read_endpoint(const json& obj, model::EndpointConfig& ep, std::string_view where) {
    check_keys(obj, where, {"base_url", "model", "api_key_env", "timeout_s", "retries", "max_in_flight"});
    read(obj, "base_url", ep.base_url, where);
    read(obj, "model", ep.model, where);
    read(obj, "api_key_env", ep.api_key_env, where);
    read(obj, "timeout_s", ep.timeout_s, where);
    read(obj, "retries", ep.retries, where);
    read(obj, "max_in_flight", ep.max_in_flight, where);
}

json endpoint_json(const model::EndpointConfig& ep) {
    return {{"base_url", ep.base_url},   {"model", ep.model},     {"api_key_env", ep.api_key_env},
            {"timeout_s", ep.timeout_s}, {"retries", ep.retries}, {"max_in_flight", ep.max_in_flight}};
}

std::string file_name(const std::string& path) {
    return path.empty() ? std::string() : std::filesystem::path(path).filename().string();
}

template <typename Fn>
void for_each_endpoint(Endpoints& eps, Fn&& fn) {
    fn(eps.expansion);
    fn(eps.rerank);
    fn(eps.attribution);
    fn(eps.embedder);
    fn(eps.judge);
}

}  // namespace

rir::PromptLanguage language_from_string(const std::string& s) {
    if (s == "auto") return rir::PromptLanguage::Auto;
    if (s == "zh") return rir::PromptLanguage::Chinese;
    if (s == "en") return rir::PromptLanguage::English;
    throw InvalidArgument("language must be auto, zh or en (got '" + s + "')");
}

std::string_view to_string(rir::PromptLanguage lang) noexcept {
    switch (lang) {
        case rir::PromptLanguage::Auto: return "auto";
        case rir::PromptLanguage::Chinese: return "zh";
        case rir::PromptLanguage::English: return "en";
    }
    return "auto";
}

void apply_config_json(AppConfig& cfg, const json& doc) {
    check_keys(doc, "config",
               {"endpoints", "weights", "gate", "expansion_cap", "paths", "mock", "mock_scenarios", "vision", "dim",
                "language", "stance_budget", "parallelism", "log_level"});
    if (auto it = doc.find("endpoints"); it != doc.end()) {
        check_keys(*it, "endpoints", {"default", "expansion", "rerank", "attribution", "embedder", "judge"});
        if (it->contains("default")) {
            for_each_endpoint(cfg.endpoints, [&](model::EndpointConfig& ep) {
                read_endpoint(it->at("default"), ep, "endpoints.default");
            });
        }
        if (it->contains("expansion")) read_endpoint(it->at("expansion"), cfg.endpoints.expansion, "endpoints.expansion");
        if (it->contains("rerank")) read_endpoint(it->at("rerank"), cfg.endpoints.rerank, "endpoints.rerank");
        if (it->contains("attribution")) {
            read_endpoint(it->at("attribution"), cfg.endpoints.attribution, "endpoints.attribution");
        }
        if (it->contains("embedder")) read_endpoint(it->at("embedder"), cfg.endpoints.embedder, "endpoints.embedder");
        if (it->contains("judge")) read_endpoint(it->at("judge"), cfg.endpoints.judge, "endpoints.judge");
    }
    if (auto it = doc.find("weights"); it != doc.end()) {
        check_keys(*it, "weights", {"bm25", "dense"});
        read(*it, "bm25", cfg.ake.weights.w_bm25, "weights");
        read(*it, "dense", cfg.ake.weights.w_dense, "weights");
    }
    if (auto it = doc.find("gate"); it != doc.end()) {
        check_keys(*it, "gate", {"tau_rel", "k_final", "k_candidates"});
        read(*it, "tau_rel", cfg.ake.gate.tau_rel, "gate");
        read(*it, "k_final", cfg.ake.gate.k_final, "gate");
        read(*it, "k_candidates", cfg.ake.gate.k_candidates, "gate");
    }
    read(doc, "expansion_cap", cfg.ake.expansion_cap, "config");
    if (auto it = doc.find("paths"); it != doc.end()) {
        check_keys(*it, "paths", {"kb", "index", "dataset"});
        read(*it, "kb", cfg.kb_path, "paths");
        read(*it, "index", cfg.index_path, "paths");
        read(*it, "dataset", cfg.dataset_path, "paths");
    }
    read(doc, "mock", cfg.mock, "config");
    read(doc, "mock_scenarios", cfg.mock_scenarios, "config");
    read(doc, "vision", cfg.vision, "config");
    read(doc, "dim", cfg.dim, "config");
    if (doc.contains("language")) {
        std::string lang;
        read(doc, "language", lang, "config");
        try {
            cfg.language = language_from_string(lang);
        } catch (const InvalidArgument& e) {
            throw ConfigParse(std::string("config.language: ") + e.what());
        }
    }
    read(doc, "stance_budget", cfg.stance_budget, "config");
    read(doc, "parallelism", cfg.parallelism, "config");
    read(doc, "log_level", cfg.log_level, "config");
}

void validate(const AppConfig& cfg) {
    cfg.ake.weights.validate();
    cfg.ake.gate.validate();
    if (cfg.dim == 0) throw InvalidArgument("dim must be positive");
    if (cfg.parallelism == 0) throw InvalidArgument("parallelism must be positive");
    if (cfg.stance_budget == 0) throw InvalidArgument("stance_budget must be positive");
}

AppConfig load_config(const std::optional<std::string>& path, const Overrides& o) {
    AppConfig cfg;
    if (path) {
        const auto text = read_file(*path);
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigParse("config file " + *path + ": " + e.what());
        }
        apply_config_json(cfg, doc);
    }

    if (o.mock) cfg.mock = *o.mock;
    if (cfg.mock && (o.base_url || o.model || o.api_key_env)) {
        throw ConflictingFlags("--mock cannot be combined with --base-url, --model or --api-key-env");
    }
    for_each_endpoint(cfg.endpoints, [&](model::EndpointConfig& ep) {
        if (o.base_url) ep.base_url = *o.base_url;
        if (o.model) ep.model = *o.model;
        if (o.api_key_env) ep.api_key_env = *o.api_key_env;
    });
    if (o.mock_scenarios) cfg.mock_scenarios = *o.mock_scenarios;
    if (o.w_bm25) cfg.ake.weights.w_bm25 = *o.w_bm25;
    if (o.w_dense) cfg.ake.weights.w_dense = *o.w_dense;
    // A single weight on the command line implies its complement.
    if (o.w_bm25 && !o.w_dense) cfg.ake.weights.w_dense = 1.0 - *o.w_bm25;
    if (o.w_dense && !o.w_bm25) cfg.ake.weights.w_bm25 = 1.0 - *o.w_dense;
    if (o.tau_rel) cfg.ake.gate.tau_rel = *o.tau_rel;
    if (o.k_final) {
        cfg.ake.gate.k_final = *o.k_final;
        if (!o.k_candidates) cfg.ake.gate.k_candidates = std::max(cfg.ake.gate.k_candidates, *o.k_final);
    }
    if (o.k_candidates) cfg.ake.gate.k_candidates = *o.k_candidates;
    if (o.dim) cfg.dim = *o.dim;
    if (o.parallelism) cfg.parallelism = *o.parallelism;
    if (o.log_level) cfg.log_level = *o.log_level;
    if (o.language) cfg.language = language_from_string(*o.language);
    if (o.stance_budget) cfg.stance_budget = *o.stance_budget;
    if (o.kb_path) cfg.kb_path = *o.kb_path;
    if (o.index_path) cfg.index_path = *o.index_path;
    if (o.dataset_path) cfg.dataset_path = *o.dataset_path;
    cfg.ake.parallelism = cfg.parallelism;

    validate(cfg);
    return cfg;
}

json to_json(const AppConfig& cfg) {
    json out;
    out["mock"] = cfg.mock;
    out["mock_scenarios"] = file_name(cfg.mock_scenarios);
    if (!cfg.mock) {
        out["endpoints"] = {{"expansion", endpoint_json(cfg.endpoints.expansion)},
                            {"rerank", endpoint_json(cfg.endpoints.rerank)},
                            {"attribution", endpoint_json(cfg.endpoints.attribution)},
                            {"embedder", endpoint_json(cfg.endpoints.embedder)},
                            {"judge", endpoint_json(cfg.endpoints.judge)}};
    }
    out["weights"] = {{"bm25", cfg.ake.weights.w_bm25}, {"dense", cfg.ake.weights.w_dense}};
    out["gate"] = {{"tau_rel", cfg.ake.gate.tau_rel},
                   {"k_final", cfg.ake.gate.k_final},
                   {"k_candidates", cfg.ake.gate.k_candidates}};
    out["expansion_cap"] = cfg.ake.expansion_cap;
    out["paths"] = {{"kb", file_name(cfg.kb_path)},
                    {"index", file_name(cfg.index_path)},
                    {"dataset", file_name(cfg.dataset_path)}};
    out["vision"] = cfg.vision;
    out["dim"] = cfg.dim;
    out["language"] = std::string(to_string(cfg.language));
    out["stance_budget"] = cfg.stance_budget;
    return out;
}

model::ModelBackend& Backends::need(std::string_view role) const {
    const std::shared_ptr<model::ModelBackend>* slot = nullptr;
    if (role == "expansion") slot = &expansion;
    else if (role == "rerank") slot = &rerank;
    else if (role == "attribution") slot = &attribution;
    else if (role == "embedder") slot = &embedder;
    else if (role == "judge") slot = &judge;
    if (slot == nullptr || !*slot) {
        throw UsageError("no " + std::string(role) +
                         " endpoint configured (set base_url and model, or use --mock)");
    }
    return **slot;
}

Backends make_backends(const AppConfig& cfg) {
    Backends b;
    if (cfg.mock) {
        model::set_network_allowed(false);
        auto scenarios = cfg.mock_scenarios.empty() ? model::ScenarioTable{}
                                                    : model::ScenarioTable::load(cfg.mock_scenarios);
        auto mock = std::make_shared<model::MockBackend>(std::move(scenarios), cfg.vision);
        b.expansion = b.rerank = b.attribution = b.embedder = b.judge = mock;
        return b;
    }
    model::set_network_allowed(true);
    auto make = [&](const model::EndpointConfig& ep) -> std::shared_ptr<model::ModelBackend> {
        if (ep.base_url.empty() || ep.model.empty()) return nullptr;
        return std::make_shared<model::RemoteBackend>(ep, cfg.vision);
    };
    b.expansion = make(cfg.endpoints.expansion);
    b.rerank = make(cfg.endpoints.rerank);
    b.attribution = make(cfg.endpoints.attribution);
    b.embedder = make(cfg.endpoints.embedder);
    b.judge = make(cfg.endpoints.judge);
    return b;
}

}  // namespace memeattr::config
