// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <gtest/gtest.h>

#include "modelselect/common/error.hpp"
#include "modelselect/net/http.hpp"
#include "test_support.hpp"

namespace {

using namespace modelselect;
using namespace modelselect::net;

TEST(Url, ParsesSchemeHostPortAndTarget)
{
    auto u = parse_url("HTTPS://Docs.Example.org:8443/a/b?q=1#frag");
    EXPECT_EQ(u.scheme, "https");
    EXPECT_EQ(u.host, "docs.example.org");
    EXPECT_EQ(u.port, 8443);
    EXPECT_EQ(u.target, "/a/b?q=1");
    EXPECT_EQ(u.origin(), "https://docs.example.org:8443");
    EXPECT_EQ(parse_url("http://x.test").target, "/");
    EXPECT_EQ(parse_url("http://x.test").origin(), "http://x.test");
    EXPECT_THROW(parse_url("not a url"), Error);
}

TEST(Url, ResolvesRelativeReferences)
{
    std::string base = "https://lib.test/docs/guide/index.html";
    EXPECT_EQ(resolve_url(base, "page.html"), "https://lib.test/docs/guide/page.html");
    EXPECT_EQ(resolve_url(base, "../api.html#x"), "https://lib.test/docs/api.html");
    EXPECT_EQ(resolve_url(base, "/root.html"), "https://lib.test/root.html");
    EXPECT_EQ(resolve_url(base, "//other.test/a"), "https://other.test/a");
    EXPECT_EQ(resolve_url(base, "http://abs.test/p"), "http://abs.test/p");
    EXPECT_EQ(resolve_url(base, "mailto:a@b.c"), std::nullopt);
    EXPECT_EQ(resolve_url(base, "#top"), std::nullopt);
}

TEST(Url, EncodesQueryText) { EXPECT_EQ(url_encode("ridge regression/sk"), "ridge+regression%2Fsk"); }

TEST(Replay, RecordsAndReplaysByRequestContent)
{
    modelselect::testing::TempDir dir;
    auto store = std::make_shared<ReplayStore>(dir.path());
    int upstream_calls = 0;
    auto upstream = std::make_shared<FunctionTransport>([&](const HttpRequest& r) {
        ++upstream_calls;
        return HttpResponse{200, "text/plain", "echo " + r.url + r.replay_tag};
    });
    ReplayTransport recorder(store, ReplayMode::Record, upstream);
    HttpRequest a{"GET", "https://x.test/a", "", {}, ""};
    HttpRequest a_vote2{"GET", "https://x.test/a", "", {}, "vote-2"};
    EXPECT_EQ(recorder.send(a).body, "echo https://x.test/a");
    EXPECT_EQ(recorder.send(a).body, "echo https://x.test/a");
    EXPECT_EQ(recorder.send(a_vote2).body, "echo https://x.test/avote-2");
    EXPECT_EQ(upstream_calls, 2);

    ReplayTransport offline(store, ReplayMode::Replay);
    HttpRequest with_header = a;
    with_header.headers["Authorization"] = "Bearer secret";
    EXPECT_EQ(offline.send(with_header).body, "echo https://x.test/a");
    EXPECT_THROW(offline.send({"GET", "https://x.test/missing", "", {}, ""}), TransportError);
    EXPECT_NE(ReplayStore::key(a), ReplayStore::key(a_vote2));
    EXPECT_NE(ReplayStore::key(a), ReplayStore::key({"POST", "https://x.test/a", "", {}, ""}));
}

TEST(Replay, ServerErrorsAreNotRecorded)
{
    modelselect::testing::TempDir dir;
    auto store = std::make_shared<ReplayStore>(dir.path());
    auto upstream = std::make_shared<FunctionTransport>([](const HttpRequest&) { return HttpResponse{503, "", ""}; });
    ReplayTransport recorder(store, ReplayMode::Record, upstream);
    HttpRequest r{"GET", "https://x.test/busy", "", {}, ""};
    EXPECT_EQ(recorder.send(r).status, 503);
    EXPECT_FALSE(store->lookup(r).has_value());
}

TEST(Retry, BacksOffExponentiallyThenFails)
{
    int calls = 0;
    FunctionTransport failing([&](const HttpRequest&) -> HttpResponse {
        ++calls;
        throw TransportError("connection refused");
    });
    std::vector<long> delays;
    RetryPolicy policy{3, std::chrono::milliseconds(100), [&](std::chrono::milliseconds d) { delays.push_back(d.count()); }};
    EXPECT_THROW(send_with_retry(failing, {"GET", "https://x.test/", "", {}, ""}, policy), TransportError);
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(delays, (std::vector<long>{100, 200}));
}

TEST(Retry, RecoversAndDoesNotRetryClientErrors)
{
    int calls = 0;
    FunctionTransport flaky([&](const HttpRequest&) {
        ++calls;
        if (calls == 1) return HttpResponse{502, "", ""};
        return HttpResponse{404, "", "missing"};
    });
    RetryPolicy policy{3, std::chrono::milliseconds(1), [](std::chrono::milliseconds) {}};
    EXPECT_EQ(send_with_retry(flaky, {"GET", "https://x.test/", "", {}, ""}, policy).status, 404);
    EXPECT_EQ(calls, 2);
}

}  // namespace
