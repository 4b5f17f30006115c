// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "modelselect/common/io.hpp"
#include "modelselect/provider/provider.hpp"
#include "test_support.hpp"

namespace mp = modelselect::provider;
namespace net = modelselect::net;
using modelselect::testing::resource_dir;
using modelselect::testing::TempDir;

namespace {

const std::vector<std::string> kLabels = {"Model", "Feature", "Neither"};

class ScriptedBackend : public mp::Backend {
  public:
    explicit ScriptedBackend(std::vector<std::string> script) : script_(std::move(script)) {}
    std::string answer(const mp::LabelTask&, int) override
    {
        if (calls_ >= script_.size()) throw modelselect::Error("script exhausted");
        auto next = script_[calls_++];
        if (next == "!fail") throw modelselect::TransportError("simulated outage");
        return next;
    }
    std::string name() const override { return "scripted"; }
    std::size_t calls() const { return calls_; }

  private:
    std::vector<std::string> script_;
    std::size_t calls_ = 0;
};

mp::LabelTask phrase_task(std::string candidate)
{
    return {mp::TaskKind::PhraseLabel, "", std::move(candidate), kLabels};
}

mp::HeuristicBackend bundled_heuristic()
{
    return mp::HeuristicBackend(mp::HeuristicRules::load(resource_dir() / "heuristic_rules.toml"));
}

}  // namespace

TEST(Vote, MajorityWinsWithShareAsConfidence)
{
    ScriptedBackend backend({"Model", "Feature", "Model"});
    auto result = mp::label(phrase_task("ridge regression"), backend, 3);
    EXPECT_EQ(result.answer, "Model");
    EXPECT_NEAR(result.confidence, 2.0 / 3.0, 1e-12);
    EXPECT_EQ(result.votes, (std::vector<std::string>{"Model", "Feature", "Model"}));
}

TEST(Vote, ThreeWayTieGoesToSmallestAnswer)
{
    ScriptedBackend backend({"Neither", "Model", "Feature"});
    auto result = mp::label(phrase_task("x"), backend, 3);
    EXPECT_EQ(result.answer, "Feature");
    EXPECT_NEAR(result.confidence, 1.0 / 3.0, 1e-12);
}

TEST(Vote, RawAnswersAreMappedOntoOptions)
{
    ScriptedBackend backend({"It is a Model.", "model", "I would say FEATURE"});
    auto result = mp::label(phrase_task("x"), backend, 3);
    EXPECT_EQ(result.votes, (std::vector<std::string>{"Model", "Model", "Feature"}));
}

TEST(Vote, FailedVoteIsRetriedOnce)
{
    ScriptedBackend backend({"Model", "!fail", "Model", "Model"});
    auto result = mp::label(phrase_task("x"), backend, 3);
    EXPECT_EQ(result.answer, "Model");
    EXPECT_DOUBLE_EQ(result.confidence, 1.0);
    EXPECT_EQ(backend.calls(), 4u);
}

TEST(Vote, TwoFailuresOnOneVoteRaiseProviderError)
{
    ScriptedBackend backend({"Model", "!fail", "banana"});
    EXPECT_THROW(mp::label(phrase_task("x"), backend, 3), mp::ProviderError);
}

TEST(Vote, EvenOrZeroVotesRejected)
{
    ScriptedBackend backend({"Model"});
    EXPECT_THROW(mp::label(phrase_task("x"), backend, 2), modelselect::Error);
    EXPECT_THROW(mp::label(phrase_task("x"), backend, 0), modelselect::Error);
}

// Property: answer is a most frequent vote, smallest among ties, and the
// confidence equals its share.
TEST(Vote, MatchesCountingOracle)
{
    std::mt19937 rng(4242);
    for (int round = 0; round < 300; ++round) {
        int votes = 1 + 2 * static_cast<int>(rng() % 4);
        std::vector<std::string> script;
        for (int i = 0; i < votes; ++i) script.push_back(kLabels[rng() % kLabels.size()]);
        ScriptedBackend backend(script);
        auto result = mp::label(phrase_task("x"), backend, votes);

        std::map<std::string, int> counts;
        for (const auto& s : script) ++counts[s];
        int top = 0;
        for (const auto& [a, c] : counts) top = std::max(top, c);
        std::string expected;
        for (const auto& [a, c] : counts) {
            if (c == top) {
                expected = a;
                break;
            }
        }
        ASSERT_EQ(result.answer, expected);
        ASSERT_DOUBLE_EQ(result.confidence, static_cast<double>(top) / votes);
        ASSERT_GE(result.confidence, 1.0 / 3.0 - 1e-12);
    }
}

TEST(Fuse, Policies)
{
    std::vector<std::set<std::string>> systems = {{"a", "b", "c"}, {"b", "c"}, {"c", "d"}};
    EXPECT_EQ(mp::fuse(systems, mp::FusePolicy::Union), (std::set<std::string>{"a", "b", "c", "d"}));
    EXPECT_EQ(mp::fuse(systems, mp::FusePolicy::Intersection), (std::set<std::string>{"c"}));
    EXPECT_EQ(mp::fuse(systems, mp::FusePolicy::Majority), (std::set<std::string>{"b", "c"}));
    EXPECT_THROW(mp::fuse({{"a"}}, mp::FusePolicy::Union), modelselect::Error);
    EXPECT_EQ(mp::fuse_policy_from_string("Majority"), mp::FusePolicy::Majority);
}

TEST(Fuse, IntersectionWithinMajorityWithinUnion)
{
    std::mt19937 rng(99);
    for (int round = 0; round < 200; ++round) {
        std::vector<std::set<std::string>> systems(2 + rng() % 4);
        for (auto& s : systems) {
            for (int i = 0; i < 6; ++i) {
                if (rng() % 2) s.insert(std::string(1, static_cast<char>('a' + i)));
            }
        }
        auto u = mp::fuse(systems, mp::FusePolicy::Union);
        auto m = mp::fuse(systems, mp::FusePolicy::Majority);
        auto n = mp::fuse(systems, mp::FusePolicy::Intersection);
        ASSERT_TRUE(std::includes(u.begin(), u.end(), m.begin(), m.end()));
        ASSERT_TRUE(std::includes(m.begin(), m.end(), n.begin(), n.end()));
    }
}

TEST(Options, FirstMentionOnWordBoundaries)
{
    EXPECT_EQ(mp::first_option_mentioned("Feature, not a model", kLabels), "Feature");
    EXPECT_EQ(mp::first_option_mentioned("remodeling", kLabels), std::nullopt);
    std::vector<std::string> attrs = {"safety", "functional suitability", "security"};
    EXPECT_EQ(mp::first_option_mentioned("This is about Security.", attrs), "security");
}

TEST(Heuristic, PhraseLabels)
{
    auto h = bundled_heuristic();
    EXPECT_EQ(h.label_phrase("convolutional neural network"), "Model");
    EXPECT_EQ(h.label_phrase("Robust Multivariate Regression"), "Model");
    EXPECT_EQ(h.label_phrase("l2 penalty"), "Feature");
    EXPECT_EQ(h.label_phrase("huber losses"), "Feature");
    EXPECT_EQ(h.label_phrase("installation guide"), "Neither");
    EXPECT_EQ(h.label_phrase("blue sky"), "Neither");
}

TEST(Heuristic, SentimentNeedsAttributeCue)
{
    auto h = bundled_heuristic();
    auto sentiment = [&](std::string s) {
        return mp::label({mp::TaskKind::Sentiment, "", std::move(s), {"positive", "negative", "neutral"}}, h, 3).answer;
    };
    EXPECT_EQ(sentiment("Training was painfully slow on CPU."), "negative");
    EXPECT_EQ(sentiment("The API is intuitive and the docs are great."), "positive");
    EXPECT_EQ(sentiment("It works."), "neutral");
    EXPECT_EQ(sentiment("Installation was not difficult and the docs help."), "positive");
}

TEST(Heuristic, QualityMapping)
{
    auto h = bundled_heuristic();
    std::vector<std::string> attrs = {"functional suitability", "performance efficiency", "interaction capability",
                                      "reliability", "security"};
    auto map = [&](std::string s) { return mp::label({mp::TaskKind::QualityMap, "", std::move(s), attrs}, h, 1).answer; };
    EXPECT_EQ(map("Training was painfully slow on CPU."), "performance efficiency");
    EXPECT_EQ(map("The API is intuitive and the docs are great."), "interaction capability");
    EXPECT_EQ(map("It kept crashing with a memory leak bug."), "reliability");
}

TEST(Heuristic, DefinitionIsFirstSentenceNamingThePhrase)
{
    auto h = bundled_heuristic();
    std::string context =
        "Linear models are common. Ridge regression adds an l2 penalty to least squares. "
        "Ridge regression is fast.";
    auto result = mp::label({mp::TaskKind::Definition, context, "ridge regression", {}}, h, 3);
    EXPECT_EQ(result.answer, "Ridge regression adds an l2 penalty to least squares.");
    EXPECT_DOUBLE_EQ(result.confidence, 1.0);
}

TEST(Chat, RequestShapeAndParsing)
{
    std::vector<net::HttpRequest> seen;
    auto transport = std::make_shared<net::FunctionTransport>([&](const net::HttpRequest& r) {
        seen.push_back(r);
        nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "Model"}}}}}}};
        return net::HttpResponse{200, "application/json", reply.dump()};
    });
    mp::ChatBackend chat(transport, {"https://llm.example/v1/chat/completions", "m1", "sk-test", 7},
                         mp::PromptTemplates::load(resource_dir() / "prompts"));
    auto result = mp::label(phrase_task("ridge regression"), chat, 3);
    EXPECT_EQ(result.answer, "Model");
    ASSERT_EQ(seen.size(), 3u);
    auto body = nlohmann::json::parse(seen[1].body);
    EXPECT_EQ(body["seed"], 8);
    EXPECT_EQ(body["temperature"], 0);
    auto prompt = body["messages"][0]["content"].get<std::string>();
    EXPECT_NE(prompt.find("\"ridge regression\""), std::string::npos);
    EXPECT_EQ(prompt.find("{{"), std::string::npos);
    EXPECT_EQ(prompt.find('#'), std::string::npos);
    EXPECT_EQ(seen[1].headers.at("Authorization"), "Bearer sk-test");
    EXPECT_EQ(seen[2].replay_tag, "vote-2");
}

TEST(Chat, ReplayIsDeterministicAndMissesFail)
{
    TempDir dir("provider-replay");
    auto store = std::make_shared<net::ReplayStore>(dir.path());
    int upstream_calls = 0;
    auto upstream = std::make_shared<net::FunctionTransport>([&](const net::HttpRequest&) {
        ++upstream_calls;
        nlohmann::json reply = {{"choices", {{{"message", {{"content", "Feature"}}}}}}};
        return net::HttpResponse{200, "application/json", reply.dump()};
    });
    auto templates = mp::PromptTemplates::load(resource_dir() / "prompts");
    mp::ChatSettings settings{"https://llm.example/v1/chat/completions", "m1", "", 7};
    mp::ChatBackend recorder(std::make_shared<net::ReplayTransport>(store, net::ReplayMode::Record, upstream), settings,
                             templates);
    auto recorded = mp::label(phrase_task("l2 penalty"), recorder, 3);
    EXPECT_EQ(upstream_calls, 3);

    mp::ChatBackend replay(std::make_shared<net::ReplayTransport>(store, net::ReplayMode::Replay), settings, templates);
    EXPECT_EQ(mp::label(phrase_task("l2 penalty"), replay, 3), recorded);
    EXPECT_EQ(upstream_calls, 3);
    EXPECT_THROW(mp::label(phrase_task("never recorded"), replay, 3), mp::ProviderError);
}

TEST(Chat, MalformedReplyCountsAsFailure)
{
    auto transport = std::make_shared<net::FunctionTransport>(
        [](const net::HttpRequest&) { return net::HttpResponse{200, "application/json", "{\"oops\":1}"}; });
    mp::ChatBackend chat(transport, {"https://llm.example/v1/chat/completions", "m1", "", 7},
                         mp::PromptTemplates::load(resource_dir() / "prompts"));
    EXPECT_THROW(mp::label(phrase_task("x"), chat, 1), mp::ProviderError);
}

TEST(Config, BundledProviderFileSelectsHeuristic)
{
    auto cfg = mp::ProviderConfig::load(resource_dir() / "provider.toml");
    EXPECT_EQ(cfg.backend, "heuristic");
    EXPECT_EQ(cfg.votes, 3);
    auto backend = mp::make_backend(cfg, resource_dir());
    EXPECT_EQ(backend->name(), "heuristic");

    TempDir dir("provider-config");
    modelselect::io::write_file(dir.path() / "p.toml", "[provider]\nbackend = \"oracle\"\n");
    EXPECT_THROW(mp::ProviderConfig::load(dir.path() / "p.toml"), modelselect::Error);
    modelselect::io::write_file(dir.path() / "q.toml", "[provider]\nbackend = \"replay\"\nreplay_dir = \"r\"\n");
    auto replay = mp::ProviderConfig::load(dir.path() / "q.toml");
    EXPECT_EQ(replay.replay_dir, dir.path() / "r");
}
