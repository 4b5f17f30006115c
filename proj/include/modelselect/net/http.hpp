// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace modelselect::net {

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::string body;
    std::map<std::string, std::string> headers;
    /// Distinguishes otherwise identical requests in the replay store (e.g. vote index).
    std::string replay_tag;
};

struct HttpResponse {
    int status = 0;
    std::string content_type;
    std::string body;
};

struct Url {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string target;  // path + query, at least "/"

    std::string origin() const;
};

/// Throws modelselect::Error for anything that is not scheme://host[:port][/...].
Url parse_url(std::string_view url);

/// Resolves `href` against `base` (absolute, scheme-relative, root-relative and
/// relative paths; fragments dropped). Empty when `href` is not http(s).
std::optional<std::string> resolve_url(const std::string& base, std::string_view href);

std::string url_encode(std::string_view text);

class Transport {
  public:
    virtual ~Transport() = default;
    /// Any HTTP status is returned as a response; TransportError means no response.
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// Adapts a callable; mostly for tests and in-process fakes.
class FunctionTransport : public Transport {
  public:
    explicit FunctionTransport(std::function<HttpResponse(const HttpRequest&)> fn) : fn_(std::move(fn)) {}
    HttpResponse send(const HttpRequest& request) override { return fn_(request); }

  private:
    std::function<HttpResponse(const HttpRequest&)> fn_;
};

/// Real network access with a per-host politeness limit.
class LiveTransport : public Transport {
  public:
    explicit LiveTransport(double requests_per_second = 2.0, std::chrono::seconds timeout = std::chrono::seconds(20));
    HttpResponse send(const HttpRequest& request) override;

  private:
    void wait_turn(const std::string& host);

    std::chrono::nanoseconds interval_;
    std::chrono::seconds timeout_;
    std::mutex mutex_;
    std::map<std::string, std::chrono::steady_clock::time_point> next_slot_;
};

/// Content-addressed response cache: replay/<sha256 of request>.json.
class ReplayStore {
  public:
    explicit ReplayStore(std::filesystem::path directory);

    static std::string key(const HttpRequest& request);

    std::optional<HttpResponse> lookup(const HttpRequest& request) const;
    void record(const HttpRequest& request, const HttpResponse& response);

    const std::filesystem::path& directory() const noexcept { return directory_; }

  private:
    std::filesystem::path directory_;
};

enum class ReplayMode {
    Replay,  // store only; a miss is a TransportError
    Record,  // store first, upstream on a miss, and the answer is recorded
};

class ReplayTransport : public Transport {
  public:
    ReplayTransport(std::shared_ptr<ReplayStore> store, ReplayMode mode, std::shared_ptr<Transport> upstream = nullptr);
    HttpResponse send(const HttpRequest& request) override;

  private:
    std::shared_ptr<ReplayStore> store_;
    ReplayMode mode_;
    std::shared_ptr<Transport> upstream_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds base_delay{250};
    /// Replaced in tests to avoid real sleeping.
    std::function<void(std::chrono::milliseconds)> sleep;
};

/// Retries transport failures and 429/5xx answers with exponential backoff.
/// Throws TransportError once attempts are exhausted.
HttpResponse send_with_retry(Transport& transport, const HttpRequest& request, const RetryPolicy& policy = {});

}  // namespace modelselect::net
