// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include <httplib.h>

#include "modelselect/eval/eval.hpp"
#include "modelselect/gateway/cli.hpp"
#include "modelselect/gateway/server.hpp"
#include "modelselect/gateway/service.hpp"
#include "modelselect/knowledge/snapshot.hpp"
#include "test_support.hpp"

namespace gw = modelselect::gateway;
namespace kg = modelselect::kg;
using nlohmann::json;
using modelselect::testing::TempDir;

namespace {

const gw::QueryResources& resources()
{
    static const gw::QueryResources r = gw::QueryResources::load(modelselect::testing::resource_dir());
    return r;
}

std::filesystem::path golden_dir() { return modelselect::testing::fixture_dir() / "corpus" / "golden"; }

/// Fig. 4 graph saved as a snapshot.
struct Fig4Snapshot {
    TempDir dir{"gateway-fig4"};
    Fig4Snapshot() { kg::save_snapshot(modelselect::testing::fig4_graph(), dir.path()); }
};

std::unique_ptr<gw::ApiService> fig4_service(const Fig4Snapshot& snap)
{
    auto service = std::make_unique<gw::ApiService>(resources());
    service->load(snap.dir.path());
    return service;
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = gw::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(RecommendRequest, SchemaDiagnostics)
{
    auto field_of = [](const json& body) {
        try {
            gw::parse_recommend_request(body, 10);
        } catch (const gw::RequestError& e) {
            return e.field();
        }
        return std::string("<accepted>");
    };
    EXPECT_EQ(field_of(json::object()), "intent");
    EXPECT_EQ(field_of(json::array()), "body");
    EXPECT_EQ(field_of({{"intent", 3}}), "intent");
    EXPECT_EQ(field_of({{"intent", "  "}}), "intent");
    EXPECT_EQ(field_of({{"intent", "x"}, {"k", 0}}), "k");
    EXPECT_EQ(field_of({{"intent", "x"}, {"k", 2.5}}), "k");
    EXPECT_EQ(field_of({{"intent", "x"}, {"required_features", "l2"}}), "required_features");
    EXPECT_EQ(field_of({{"intent", "x"}, {"quality_weights", {{"reliability", -1}}}}), "quality_weights.reliability");
    EXPECT_EQ(field_of({{"intent", "x"}, {"colour", "red"}}), "colour");

    auto q = gw::parse_recommend_request(
        {{"intent", "robust regression"}, {"k", 2}, {"required_features", {"l2 penalty"}}, {"quality_weights", {{"reliability", 0.5}}}},
        10);
    EXPECT_EQ(q.text, "robust regression");
    EXPECT_EQ(q.k, 2);
    EXPECT_EQ(q.required_features, std::set<std::string>{"l2 penalty"});
    EXPECT_DOUBLE_EQ(q.quality_weights.at("reliability"), 0.5);
    EXPECT_EQ(gw::parse_recommend_request({{"intent", "x"}}, 7).k, 7);
}

TEST(ApiService, RecommendOnFig4)
{
    Fig4Snapshot snap;
    auto holder = fig4_service(snap);
    auto& service = *holder;
    auto r = service.recommend(R"({"intent": "robust regression for outliers", "k": 2})");
    ASSERT_EQ(r.status, 200) << r.body.dump();
    const auto& results = r.body["results"];
    ASSERT_EQ(results.size(), 2u);
    EXPECT_EQ(results[0]["rank"], 1);
    EXPECT_EQ(results[1]["rank"], 2);
    EXPECT_EQ(results[0]["variation"]["name"], "Robust Multivariate Regression");
    EXPECT_EQ(results[0]["variation"]["base"], "Regression");
    EXPECT_EQ(results[0]["library"]["name"], "scikit-learn");
    EXPECT_FALSE(results[0]["evidence"].empty());
    EXPECT_TRUE(results[0]["evidence"][0].contains("url"));
    EXPECT_TRUE(r.body["keywords"].contains("enriched"));
}

TEST(ApiService, ApiRecommendationMirrorsScoredCandidate)
{
    Fig4Snapshot snap;
    auto graph = kg::load_snapshot(snap.dir.path());
    auto rec = modelselect::inference::recommend({"ridge regression with l2 penalty", 5, {}, {}}, graph,
                                                 resources().intent, resources().ranking);
    auto api = gw::api_recommendations(rec, graph);
    ASSERT_EQ(api["results"].size(), rec.results.size());
    for (std::size_t i = 0; i < rec.results.size(); ++i) {
        const auto& c = rec.results[i];
        const auto& a = api["results"][i];
        EXPECT_EQ(a["rank"], i + 1);
        EXPECT_EQ(a["variation"]["id"], c.variation_id.str());
        EXPECT_EQ(a["library"]["id"], c.library_id.str());
        EXPECT_EQ(a["final_score"].get<double>(), c.final_score);
        EXPECT_EQ(a["relevance"].get<double>(), c.relevance);
        EXPECT_EQ(a["quality_bonus"].get<double>(), c.quality_bonus);
        EXPECT_EQ((a["field_breakdown"].get<std::map<std::string, double>>()), c.field_breakdown);
        ASSERT_EQ(a["evidence"].size(), c.evidence.size());
        for (std::size_t e = 0; e < c.evidence.size(); ++e) {
            EXPECT_EQ(a["evidence"][e]["url"], c.evidence[e].source_url);
            EXPECT_EQ(a["evidence"][e]["fragment"], c.evidence[e].fragment);
        }
    }
}

TEST(ApiService, RecommendErrors)
{
    gw::ApiService empty(resources());
    EXPECT_EQ(empty.recommend(R"({"intent":"x"})").status, 503);
    EXPECT_EQ(empty.stats().status, 503);
    EXPECT_EQ(empty.snapshot_version(), "none");

    Fig4Snapshot snap;
    auto holder = fig4_service(snap);
    auto& service = *holder;
    auto missing = service.recommend("{}");
    EXPECT_EQ(missing.status, 400);
    EXPECT_EQ(missing.body["field"], "intent");
    EXPECT_EQ(service.recommend("{not json").status, 400);
    auto stopwords = service.recommend(R"({"intent":"the of and"})");
    EXPECT_EQ(stopwords.status, 400);
    EXPECT_EQ(stopwords.body["field"], "intent");
}

TEST(ApiService, QualityWeightsReRankPerInference)
{
    auto graph = kg::load_snapshot(golden_dir());
    gw::ApiService service(resources());
    service.load(golden_dir());
    modelselect::inference::IntentQuery q{"regression robust to outliers", 4, {}, {{"performance efficiency", 1.0}}};
    auto expected = gw::recommend_json(q, graph, resources());
    auto r = service.recommend(R"({"intent":"regression robust to outliers","k":4,
                                   "quality_weights":{"performance efficiency":1}})");
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(gw::canonical_json(r.body), gw::canonical_json(expected));
}

TEST(ApiService, ReadEndpoints)
{
    Fig4Snapshot snap;
    auto holder = fig4_service(snap);
    auto& service = *holder;
    auto graph = kg::load_snapshot(snap.dir.path());
    const auto* regression = graph.base_by_name("Regression");
    ASSERT_NE(regression, nullptr);

    auto sub = service.graph(regression->id.str(), std::string("2"));
    ASSERT_EQ(sub.status, 200);
    std::set<std::string> names;
    for (const auto& e : sub.body["entities"]) {
        if (e.contains("name")) names.insert(e["name"].get<std::string>());
        if (e.contains("distribution_name")) names.insert(e["distribution_name"].get<std::string>());
    }
    for (const char* n : {"Regression", "Ridge Regression", "Robust Multivariate Regression", "scikit-learn"}) {
        EXPECT_TRUE(names.count(n)) << n;
    }
    EXPECT_EQ(sub.body["entities"][0]["id"], regression->id.str());

    EXPECT_EQ(service.graph(regression->id.str(), std::string("-1")).status, 422);
    EXPECT_EQ(service.graph(regression->id.str(), std::string("two")).status, 422);
    EXPECT_EQ(service.graph(regression->id.str(), std::string("99")).status, 422);
    EXPECT_EQ(service.graph("nope", std::nullopt).status, 404);
    EXPECT_EQ(service.graph(regression->id.str(), std::string("0")).body["entities"].size(), 1u);

    EXPECT_EQ(service.model("unknown").status, 404);
    auto base = service.model(regression->id.str());
    ASSERT_EQ(base.status, 200);
    EXPECT_EQ(base.body["variations"].size(), 2u);
    auto ridge_id = base.body["variations"][0]["id"].get<std::string>();
    auto ridge = service.model(ridge_id);
    ASSERT_EQ(ridge.status, 200);
    EXPECT_EQ(ridge.body["type"], "variation");
    EXPECT_EQ(ridge.body["libraries"][0]["name"], "scikit-learn");
    EXPECT_EQ(ridge.body["features"].size(), 3u);

    auto lib = service.library("scikit-learn");
    ASSERT_EQ(lib.status, 200);
    EXPECT_EQ(lib.body["variations"].size(), 2u);
    EXPECT_EQ(service.library("Scikit_Learn").status, 200);
    EXPECT_EQ(service.library("left-pad").status, 404);

    auto stats = service.stats();
    ASSERT_EQ(stats.status, 200);
    EXPECT_EQ(stats.body, modelselect::eval::to_json(modelselect::eval::corpus_stats(graph)));

    auto search = service.search(std::string("ridge"), std::string("3"));
    ASSERT_EQ(search.status, 200);
    ASSERT_FALSE(search.body["results"].empty());
    EXPECT_EQ(search.body["results"][0]["name"], "Ridge Regression");
    EXPECT_LE(search.body["results"].size(), 3u);
    EXPECT_EQ(service.search(std::nullopt, std::nullopt).status, 400);
    EXPECT_EQ(service.search(std::string("ridge"), std::string("0")).status, 400);

    auto spec = gw::ApiService::spec();
    EXPECT_TRUE(spec.body["paths"].contains("/api/recommend"));
    EXPECT_TRUE(spec.body["paths"].contains("/api/graph/{id}"));
}

TEST(ApiService, ReadsLeaveSnapshotUntouched)
{
    TempDir dir("gateway-readonly");
    for (const auto& entry : std::filesystem::directory_iterator(golden_dir())) {
        if (entry.is_regular_file()) std::filesystem::copy_file(entry.path(), dir.path() / entry.path().filename());
    }
    auto before = kg::read_manifest(dir.path()).version;
    gw::ApiService service(resources());
    service.load(dir.path());
    auto graph = kg::load_snapshot(dir.path());
    for (const auto& [id, v] : graph.variations()) {
        service.model(id.str());
        service.graph(id.str(), std::string("2"));
    }
    service.stats();
    service.search(std::string("regression"), std::nullopt);
    service.recommend(R"({"intent":"gradient boosting on tabular data"})");
    EXPECT_EQ(kg::read_manifest(dir.path()).version, before);
    EXPECT_EQ(kg::load_snapshot(dir.path()), graph);
}

TEST(ApiService, SnapshotSwapKeepsInFlightReaders)
{
    Fig4Snapshot snap;
    gw::ApiService service(resources());
    service.load(snap.dir.path());
    auto v1 = service.snapshot_version();
    std::atomic<bool> stop{false};
    std::atomic<int> failures{0};
    std::thread reader([&] {
        while (!stop) {
            auto r = service.recommend(R"({"intent":"regression"})");
            if (r.status != 200) ++failures;
        }
    });
    for (int i = 0; i < 20; ++i) {
        service.load(i % 2 ? golden_dir() : snap.dir.path());
    }
    stop = true;
    reader.join();
    EXPECT_EQ(failures, 0);
    EXPECT_EQ(service.snapshot_version(), kg::read_manifest(golden_dir()).version);
    EXPECT_NE(service.snapshot_version(), v1);
}

class HttpFixture : public ::testing::Test {
  protected:
    void SetUp() override
    {
        service_.load(golden_dir());
        server_ = std::make_unique<gw::HttpServer>(service_, gw::ServerOptions{"127.0.0.1", 0, "http://ui.test", {}});
        port_ = server_->bind();
        thread_ = std::thread([this] { server_->listen(); });
        server_->wait_until_ready();
    }
    void TearDown() override
    {
        server_->stop();
        thread_.join();
    }

    httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

    gw::ApiService service_{resources()};
    std::unique_ptr<gw::HttpServer> server_;
    std::thread thread_;
    int port_ = 0;
};

TEST_F(HttpFixture, RecommendMatchesLibraryCall)
{
    auto c = client();
    auto res = c.Post("/api/recommend", R"({"intent":"robust regression for outliers","k":3})", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("X-Snapshot-Version"), kg::read_manifest(golden_dir()).version);
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://ui.test");
    auto graph = kg::load_snapshot(golden_dir());
    auto expected = gw::recommend_json({"robust regression for outliers", 3, {}, {}}, graph, resources());
    EXPECT_EQ(gw::canonical_json(json::parse(res->body)), gw::canonical_json(expected));
}

TEST_F(HttpFixture, StatusCodesAndHeaders)
{
    auto c = client();
    auto bad = c.Post("/api/recommend", "{}", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    EXPECT_EQ(json::parse(bad->body)["field"], "intent");

    auto unknown = c.Get("/api/models/unknown");
    ASSERT_TRUE(unknown);
    EXPECT_EQ(unknown->status, 404);
    EXPECT_FALSE(unknown->get_header_value("X-Snapshot-Version").empty());

    auto graph = kg::load_snapshot(golden_dir());
    auto id = graph.variations().begin()->first.str();
    auto depth = c.Get(("/api/graph/" + id + "?depth=abc").c_str());
    ASSERT_TRUE(depth);
    EXPECT_EQ(depth->status, 422);
    auto ok = c.Get(("/api/graph/" + id + "?depth=1").c_str());
    ASSERT_TRUE(ok);
    EXPECT_EQ(ok->status, 200);

    auto stats = c.Get("/api/stats");
    ASSERT_TRUE(stats);
    EXPECT_EQ(json::parse(stats->body), modelselect::eval::to_json(modelselect::eval::corpus_stats(graph)));

    auto search = c.Get("/api/search?q=gradient%20boosting&k=2");
    ASSERT_TRUE(search);
    EXPECT_EQ(search->status, 200);

    auto lib = c.Get("/api/libraries/scikit-learn");
    ASSERT_TRUE(lib);
    EXPECT_EQ(lib->status, 200);

    auto spec = c.Get("/api/spec");
    ASSERT_TRUE(spec);
    EXPECT_EQ(json::parse(spec->body)["openapi"], "3.0.3");

    auto nowhere = c.Get("/api/nowhere");
    ASSERT_TRUE(nowhere);
    EXPECT_EQ(nowhere->status, 404);
    EXPECT_FALSE(nowhere->get_header_value("X-Snapshot-Version").empty());

    auto preflight = c.Options("/api/recommend");
    ASSERT_TRUE(preflight);
    EXPECT_EQ(preflight->status, 204);
    EXPECT_NE(preflight->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST(HttpServer, NoSnapshotAnswers503)
{
    gw::ApiService service(resources());
    gw::HttpServer server(service, {"127.0.0.1", 0, "*", {}});
    int port = server.bind();
    std::thread t([&] { server.listen(); });
    server.wait_until_ready();
    httplib::Client c("127.0.0.1", port);
    auto res = c.Post("/api/recommend", R"({"intent":"regression"})", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 503);
    EXPECT_EQ(res->get_header_value("X-Snapshot-Version"), "none");
    server.stop();
    t.join();
}

TEST(HttpServer, PortFromEnvironment)
{
    unsetenv("MODELSELECT_PORT");
    EXPECT_EQ(gw::port_from_environment(), 8080);
    setenv("MODELSELECT_PORT", "9191", 1);
    EXPECT_EQ(gw::port_from_environment(), 9191);
    setenv("MODELSELECT_PORT", "http", 1);
    EXPECT_THROW(gw::port_from_environment(), modelselect::Error);
    unsetenv("MODELSELECT_PORT");
}

TEST(Cli, QueryTableOnFig4)
{
    Fig4Snapshot snap;
    auto r = cli({"--data-dir", snap.dir.path().string(), "query", "robust regression for outliers", "-k", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(first.rfind("1", 0), 0u);
    EXPECT_NE(first.find("Robust Multivariate Regression"), std::string::npos);
}

TEST(Cli, QueryJsonEqualsLibraryCall)
{
    auto r = cli({"--data-dir", golden_dir().string(), "--format", "json", "query", "gradient boosting for tabular data",
                  "-k", "5", "--weight", "reliability=0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto graph = kg::load_snapshot(golden_dir());
    auto expected = gw::recommend_json({"gradient boosting for tabular data", 5, {}, {{"reliability", 0.5}}}, graph, resources());
    EXPECT_EQ(r.out, gw::canonical_json(expected) + "\n");
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(cli({}).code, gw::kExitUsage);
    auto unknown = cli({"--bogus", "stats"});
    EXPECT_EQ(unknown.code, gw::kExitUsage);
    EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
    EXPECT_EQ(cli({"query"}).code, gw::kExitUsage);
    EXPECT_EQ(cli({"--format", "xml", "stats"}).code, gw::kExitUsage);
    EXPECT_EQ(cli({"query", "x", "--weight", "reliability"}).code, gw::kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, gw::kExitOk);

    TempDir empty("gateway-cli-empty");
    auto missing = cli({"--data-dir", empty.path().string(), "stats"});
    EXPECT_EQ(missing.code, gw::kExitOperational);
    EXPECT_NE(missing.err.find("error:"), std::string::npos);
}

TEST(Cli, StatsMatchCorpusStats)
{
    auto r = cli({"--data-dir", golden_dir().string(), "--format", "json", "stats"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto expected = modelselect::eval::to_json(modelselect::eval::corpus_stats(kg::load_snapshot(golden_dir())));
    EXPECT_EQ(json::parse(r.out), expected);
}

TEST(Cli, BuildIndexValidatesAndExports)
{
    TempDir dir("gateway-build-index");
    kg::save_snapshot(kg::load_snapshot(golden_dir()), dir.path());
    auto r = cli({"--data-dir", dir.path().string(), "--format", "json", "build-index"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(json::parse(r.out)["violations"].empty());
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "exports" / "two_way_index.jsonl"));
}

TEST(Cli, RunAllThenStagesInReplay)
{
    TempDir dir("gateway-run-all");
    auto config = (modelselect::testing::fixture_dir() / "corpus" / "pipeline.toml").string();
    for (std::vector<std::string> stage : {std::vector<std::string>{"ingest", "repos"}, {"ingest", "libraries"},
                                           {"extract", "models"}, {"assess", "quality"}}) {
        std::vector<std::string> args = {"--data-dir", dir.path().string(), "--format", "json"};
        args.insert(args.end(), stage.begin(), stage.end());
        args.insert(args.end(), {"--config", config});
        auto r = cli(args);
        ASSERT_EQ(r.code, 0) << stage[0] << " " << stage[1] << ": " << r.err;
    }
    // Four separate stage runs land on the same snapshot as the combined run.
    EXPECT_EQ(kg::read_manifest(dir.path()).version, kg::read_manifest(golden_dir()).version);
}

TEST(Cli, EvalCoverageOnFixtureCases)
{
    auto cases = modelselect::testing::fixture_dir() / "eval" / "cases.jsonl";
    auto r = cli({"--data-dir", golden_dir().string(), "--format", "json", "eval", "--cases", cases.string(), "-k", "10"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto report = json::parse(r.out);
    EXPECT_EQ(report["coverage"]["metric"], "coverage@10");
    EXPECT_EQ(report["coverage"]["denominator"], report["cases"]);

    auto experiment = modelselect::testing::fixture_dir() / "eval" / "experiment.toml";
    auto e = cli({"--format", "json", "eval", "--experiment", experiment.string()});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(json::parse(e.out)["rows"].size(), 3u);
}
