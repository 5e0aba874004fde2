#include <gtest/gtest.h>

#include <fstream>

#include "memeattr/config.hpp"
#include "memeattr/errors.hpp"
#include "support/gen.hpp"

using namespace memeattr;
using namespace memeattr::config;

namespace {

std::string write_config(const testkit::TempDir& dir, const std::string& body) {
    const auto path = dir.file("cfg.json");
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST(Config, Defaults) {
    const auto cfg = load_config(std::nullopt);
    EXPECT_EQ(cfg.ake.gate.tau_rel, 0.5);
    EXPECT_EQ(cfg.ake.gate.k_final, 5u);
    EXPECT_EQ(cfg.ake.weights.w_bm25, 0.5);
    EXPECT_EQ(cfg.ake.weights.w_dense, 0.5);
    EXPECT_FALSE(cfg.mock);
    EXPECT_EQ(cfg.dim, 256u);
}

TEST(Config, FlagsBeatFileBeatsDefaults) {
    testkit::TempDir dir;
    const auto path = write_config(dir, R"({"gate": {"tau_rel": 0.6, "k_final": 3}, "parallelism": 2})");
    auto cfg = load_config(path);
    EXPECT_EQ(cfg.ake.gate.tau_rel, 0.6);
    EXPECT_EQ(cfg.ake.gate.k_final, 3u);
    EXPECT_EQ(cfg.parallelism, 2u);
    Overrides o;
    o.tau_rel = 0.7;
    cfg = load_config(path, o);
    EXPECT_EQ(cfg.ake.gate.tau_rel, 0.7);
    EXPECT_EQ(cfg.ake.gate.k_final, 3u);
}

TEST(Config, OneWeightImpliesTheOther) {
    Overrides o;
    o.w_bm25 = 0.25;
    const auto cfg = load_config(std::nullopt, o);
    EXPECT_EQ(cfg.ake.weights.w_dense, 0.75);
    o.w_dense = 0.5;
    EXPECT_THROW(load_config(std::nullopt, o), InvalidWeights);
}

TEST(Config, MockConflictsWithRemoteFlags) {
    Overrides o;
    o.mock = true;
    o.base_url = "http://localhost:1";
    EXPECT_THROW(load_config(std::nullopt, o), ConflictingFlags);
    o.base_url.reset();
    o.api_key_env = "KEY";
    EXPECT_THROW(load_config(std::nullopt, o), ConflictingFlags);
}

TEST(Config, BadFiles) {
    testkit::TempDir dir;
    EXPECT_THROW(load_config(write_config(dir, R"({"nonsense": 1})")), ConfigParse);
    EXPECT_THROW(load_config(write_config(dir, "{not json")), ConfigParse);
    EXPECT_THROW(load_config(write_config(dir, R"({"gate": {"tau_rel": 2}})")), InvalidArgument);
    EXPECT_THROW(load_config(dir.file("absent.json")), IoError);
}

TEST(Config, EndpointsPerRole) {
    testkit::TempDir dir;
    const auto path = write_config(dir, R"({"endpoints": {
        "default": {"base_url": "http://h/v1", "model": "base", "api_key_env": "K"},
        "judge": {"model": "judge-model"}}})");
    const auto cfg = load_config(path);
    EXPECT_EQ(cfg.endpoints.attribution.model, "base");
    EXPECT_EQ(cfg.endpoints.judge.model, "judge-model");
    EXPECT_EQ(cfg.endpoints.judge.base_url, "http://h/v1");
    EXPECT_EQ(cfg.endpoints.rerank.api_key_env, "K");
}

TEST(Config, MockBackendsShareOneInstanceAndDisableNetwork) {
    Overrides o;
    o.mock = true;
    const auto b = make_backends(load_config(std::nullopt, o));
    EXPECT_EQ(b.expansion, b.judge);
    EXPECT_EQ(b.need("attribution").name(), "mock");
    EXPECT_FALSE(model::network_allowed());
    model::set_network_allowed(true);
}

TEST(Config, UnconfiguredRemoteRoleIsUsageError) {
    const auto b = make_backends(load_config(std::nullopt));
    EXPECT_FALSE(b.judge);
    EXPECT_THROW(b.need("judge"), UsageError);
}

TEST(Config, EchoUsesFileNames) {
    Overrides o;
    o.mock = true;
    o.kb_path = "/some/where/kb.jsonl";
    const auto j = to_json(load_config(std::nullopt, o));
    EXPECT_EQ(j.dump().find("/some/where"), std::string::npos);
    EXPECT_NE(j.dump().find("kb.jsonl"), std::string::npos);
}

TEST(Config, Languages) {
    EXPECT_EQ(language_from_string("zh"), rir::PromptLanguage::Chinese);
    EXPECT_EQ(to_string(rir::PromptLanguage::English), "en");
    EXPECT_THROW(language_from_string("fr"), InvalidArgument);
}
