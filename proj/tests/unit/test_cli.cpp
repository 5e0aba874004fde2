#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "memeattr/cli.hpp"
#include "memeattr/gateway.hpp"
#include "memeattr/io.hpp"
#include "support/gen.hpp"

using namespace memeattr;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, VersionAndHelp) {
    auto r = run({"--version"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("memeattr 0.1.0", 0), 0u);
    EXPECT_NE(r.out.find("index format 1"), std::string::npos);
    r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("attribute"), std::string::npos);
}

TEST(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"kb", "stats"}).code, 1);
    EXPECT_EQ(run({"index", "query", "--text", "x"}).code, 1);  // no index configured
}

TEST(Cli, DataErrorsExitTwo) {
    testkit::TempDir dir;
    EXPECT_EQ(run({"kb", "stats", dir.file("missing.jsonl")}).code, 2);
    write_file_atomic(dir.file("bad.jsonl"), "{\"id\": 1}\n");
    const auto r = run({"kb", "validate", dir.file("bad.jsonl")});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(json::parse(r.out)["valid"].get<bool>());
}

TEST(Cli, KbStatsOnFixture) {
    const auto r = run({"kb", "stats", testkit::fixture("kb_small.jsonl")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["total"], 20);
    EXPECT_EQ(j["per_category"]["Sexism"], 5);
    EXPECT_EQ(j["per_category"]["Others"], 5);
}

TEST(Cli, DatasetStatsOnFixture) {
    const auto r = run({"dataset", "stats", testkit::fixture("dataset_small.jsonl"), "--check-reference"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["total"], 12);
    EXPECT_EQ(j["harmful"], 6);
}

TEST(Cli, MockPipelineSendsNoRequests) {
    testkit::TempDir dir;
    const auto before = model::network_requests_sent();
    const auto idx = dir.file("kb.idx");
    const auto scen = testkit::fixture("mock_scenarios.jsonl");
    ASSERT_EQ(run({"index", "build", "--kb", testkit::fixture("kb_small.jsonl"), "--out", idx, "--mock"}).code, 0);
    auto r = run({"retrieve", "--index", idx, "--text", "又输了，你个菜狗", "--desc", "A cartoon dog sitting at a computer, looking defeated", "--mock",
                  "--mock-scenarios", scen});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("kb-001"), std::string::npos);
    const auto pred = dir.file("pred.jsonl");
    r = run({"attribute", "--index", idx, "--record", testkit::fixture("dataset_small.jsonl"), "--out", pred, "--mock",
             "--mock-scenarios", scen});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run({"eval", "--pred", pred, "--gold", testkit::fixture("dataset_small.jsonl"), "--mock", "--mock-scenarios",
             scen, "--likert"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = json::parse(r.out);
    EXPECT_EQ(report["classification"]["n"], 12);
    EXPECT_TRUE(report["likert"].is_object());
    EXPECT_EQ(model::network_requests_sent(), before);
    model::set_network_allowed(true);
}

TEST(Cli, MockWithRemoteFlagsConflicts) {
    EXPECT_EQ(run({"kb", "stats", testkit::fixture("kb_small.jsonl")}).code, 0);
    const auto r = run({"index", "build", "--kb", testkit::fixture("kb_small.jsonl"), "--out", "/tmp/x.idx", "--mock",
                        "--base-url", "http://localhost:9"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, UnreachableEndpointExitsThree) {
    testkit::TempDir dir;
    model::set_network_allowed(true);
    const auto r = run({"index", "build", "--kb", testkit::fixture("kb_small.jsonl"), "--out", dir.file("kb.idx"),
                        "--base-url", "http://127.0.0.1:9/v1", "--model", "m"});
    EXPECT_EQ(r.code, 3) << r.err;
}
