#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "memeattr/ake.hpp"
#include "memeattr/gateway.hpp"
#include "memeattr/remote_backend.hpp"
#include "memeattr/rir.hpp"

namespace memeattr::config {

/// The model roles a run can talk to. Each has its own endpoint.
struct Endpoints {
    model::EndpointConfig expansion;
    model::EndpointConfig rerank;
    model::EndpointConfig attribution;
    model::EndpointConfig embedder;
    model::EndpointConfig judge;

    bool operator==(const Endpoints&) const = default;
};

struct AppConfig {
    Endpoints endpoints;
    ake::AkeConfig ake;
    std::string kb_path;
    std::string index_path;
    std::string dataset_path;
    bool mock = false;
    std::string mock_scenarios;  // optional scenario file for the mock backend
    bool vision = false;
    std::size_t dim = 256;
    rir::PromptLanguage language = rir::PromptLanguage::Auto;
    std::size_t stance_budget = rir::kDefaultStanceBudget;
    std::size_t parallelism = 4;
    std::string log_level = "warn";

    bool operator==(const AppConfig&) const = default;
};

/// Command-line values; set fields override the file.
struct Overrides {
    std::optional<bool> mock;
    std::optional<std::string> mock_scenarios;
    std::optional<std::string> base_url;
    std::optional<std::string> model;
    std::optional<std::string> api_key_env;
    std::optional<double> w_bm25;
    std::optional<double> w_dense;
    std::optional<double> tau_rel;
    std::optional<std::size_t> k_final;
    std::optional<std::size_t> k_candidates;
    std::optional<std::size_t> dim;
    std::optional<std::size_t> parallelism;
    std::optional<std::string> log_level;
    std::optional<std::string> language;
    std::optional<std::size_t> stance_budget;
    std::optional<std::string> kb_path;
    std::optional<std::string> index_path;
    std::optional<std::string> dataset_path;
};

/// Applies one JSON document on top of `cfg`. Unknown keys are errors.
/// Throws ConfigParse.
void apply_config_json(AppConfig& cfg, const nlohmann::json& doc);

/// Built-in defaults < config file < overrides, then validation. Setting
/// --base-url, --model or --api-key-env in a mock run throws ConflictingFlags;
/// a bad file throws ConfigParse (IoError when missing); bad values throw
/// InvalidArgument.
AppConfig load_config(const std::optional<std::string>& path, const Overrides& overrides = {});

/// Throws InvalidArgument / InvalidWeights.
void validate(const AppConfig& cfg);

rir::PromptLanguage language_from_string(const std::string& s);
std::string_view to_string(rir::PromptLanguage lang) noexcept;

/// The effective configuration as echoed into reports. Paths are reduced to
/// file names so reports do not depend on where a run happens.
nlohmann::json to_json(const AppConfig& cfg);

/// The backends of a run, one per role. In mock mode every role shares one
/// MockBackend and network access is switched off process-wide. A remote role
/// without base_url or model stays empty.
struct Backends {
    std::shared_ptr<model::ModelBackend> expansion;
    std::shared_ptr<model::ModelBackend> rerank;
    std::shared_ptr<model::ModelBackend> attribution;
    std::shared_ptr<model::ModelBackend> embedder;
    std::shared_ptr<model::ModelBackend> judge;

    /// Role by name; throws UsageError when that role is not configured.
    model::ModelBackend& need(std::string_view role) const;
};

/// Throws IoError / ParseError when the mock scenario file is unusable.
Backends make_backends(const AppConfig& cfg);

}  // namespace memeattr::config
