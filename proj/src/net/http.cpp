// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/net/http.hpp"

#include <regex>
#include <thread>

#include "modelselect/common/error.hpp"
#include "modelselect/common/hash.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace modelselect::net {

std::string Url::origin() const
{
    std::string out = scheme + "://" + host;
    bool default_port = (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
    if (!default_port) {
        out += ":" + std::to_string(port);
    }
    return out;
}

Url parse_url(std::string_view url)
{
    static const std::regex pattern(R"(^([A-Za-z][A-Za-z0-9+.\-]*)://([^/?#:\s]+)(?::(\d+))?([^#\s]*)(#.*)?$)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(url.begin(), url.end(), m, pattern)) {
        throw Error("malformed URL: '" + std::string(url) + "'");
    }
    Url out;
    out.scheme = text::to_lower(m[1].str());
    out.host = text::to_lower(m[2].str());
    if (m[3].matched) {
        out.port = std::stoi(m[3].str());
    } else {
        out.port = out.scheme == "https" ? 443 : 80;
    }
    out.target = m[4].str();
    if (out.target.empty() || out.target[0] != '/') {
        out.target.insert(out.target.begin(), '/');
    }
    return out;
}

namespace {

std::string normalize_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::string query;
    auto q = path.find('?');
    std::string p = path.substr(0, q);
    if (q != std::string::npos) {
        query = path.substr(q);
    }
    for (auto& seg : text::split(p, '/')) {
        if (seg == "." || seg.empty()) {
            continue;
        }
        if (seg == "..") {
            if (!parts.empty()) parts.pop_back();
            continue;
        }
        parts.push_back(seg);
    }
    std::string out = "/" + text::join(parts, "/");
    if (p.size() > 1 && p.back() == '/' && out != "/") {
        out.push_back('/');
    }
    return out + query;
}

}  // namespace

std::optional<std::string> resolve_url(const std::string& base, std::string_view href_in)
{
    std::string href = text::trim(href_in);
    if (auto hash = href.find('#'); hash != std::string::npos) {
        href.erase(hash);
    }
    if (href.empty()) {
        return std::nullopt;
    }
    static const std::regex scheme_re(R"(^([A-Za-z][A-Za-z0-9+.\-]*):)");
    std::smatch m;
    if (std::regex_search(href, m, scheme_re)) {
        auto scheme = text::to_lower(m[1].str());
        if (scheme != "http" && scheme != "https") {
            return std::nullopt;
        }
        auto u = parse_url(href);
        return u.origin() + normalize_path(u.target);
    }
    Url b = parse_url(base);
    if (href.rfind("//", 0) == 0) {
        auto u = parse_url(b.scheme + ":" + href);
        return u.origin() + normalize_path(u.target);
    }
    if (href[0] == '/') {
        return b.origin() + normalize_path(href);
    }
    if (href[0] == '?') {
        return b.origin() + normalize_path(b.target.substr(0, b.target.find('?')) + href);
    }
    auto dir = b.target.substr(0, b.target.find('?'));
    dir = dir.substr(0, dir.rfind('/') + 1);
    return b.origin() + normalize_path(dir + href);
}

std::string url_encode(std::string_view s)
{
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else if (c == ' ') {
            out.push_back('+');
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
    }
    return out;
}

LiveTransport::LiveTransport(double requests_per_second, std::chrono::seconds timeout)
    : interval_(requests_per_second > 0 ? std::chrono::nanoseconds(static_cast<std::int64_t>(1e9 / requests_per_second))
                                        : std::chrono::nanoseconds(0)),
      timeout_(timeout)
{}

void LiveTransport::wait_turn(const std::string& host)
{
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        auto now = std::chrono::steady_clock::now();
        auto& next = next_slot_[host];
        slot = std::max(now, next);
        next = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

HttpResponse LiveTransport::send(const HttpRequest& request)
{
    auto url = parse_url(request.url);
    wait_turn(url.host);

    httplib::Client client(url.origin());
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [name, value] : request.headers) {
        if (text::iequals(name, "content-type")) {
            content_type = value;
        } else {
            headers.emplace(name, value);
        }
    }
    httplib::Result result;
    if (request.method == "GET") {
        result = client.Get(url.target, headers);
    } else if (request.method == "POST") {
        result = client.Post(url.target, headers, request.body, content_type);
    } else {
        throw Error("unsupported HTTP method " + request.method);
    }
    if (!result) {
        throw TransportError(request.method + " " + request.url + ": " + httplib::to_string(result.error()));
    }
    return {result->status, result->get_header_value("Content-Type"), result->body};
}

ReplayStore::ReplayStore(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::string ReplayStore::key(const HttpRequest& request)
{
    std::string material = request.method;
    for (const auto* part : {&request.url, &request.body, &request.replay_tag}) {
        material.push_back('\n');
        material += *part;
    }
    return sha256_hex(material);
}

std::optional<HttpResponse> ReplayStore::lookup(const HttpRequest& request) const
{
    auto path = directory_ / (key(request) + ".json");
    if (!std::filesystem::exists(path)) {
        return std::nullopt;
    }
    try {
        auto j = nlohmann::json::parse(io::read_file(path));
        return HttpResponse{j.at("status").get<int>(), j.value("content_type", ""), j.at("body").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.filename().string(), 1, e.what());
    }
}

void ReplayStore::record(const HttpRequest& request, const HttpResponse& response)
{
    nlohmann::ordered_json j;
    j["request"] = {{"method", request.method}, {"url", request.url}, {"body", request.body},
                    {"replay_tag", request.replay_tag}};
    j["status"] = response.status;
    j["content_type"] = response.content_type;
    j["body"] = response.body;
    std::filesystem::create_directories(directory_);
    auto name = key(request) + ".json";
    // Write-then-rename keeps concurrent writers of the same key from exposing partial files.
    auto tmp = directory_ / (name + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
    io::write_file(tmp, j.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n");
    std::filesystem::rename(tmp, directory_ / name);
}

ReplayTransport::ReplayTransport(std::shared_ptr<ReplayStore> store, ReplayMode mode, std::shared_ptr<Transport> upstream)
    : store_(std::move(store)), mode_(mode), upstream_(std::move(upstream))
{
    if (mode_ == ReplayMode::Record && !upstream_) {
        throw Error("record mode needs an upstream transport");
    }
}

HttpResponse ReplayTransport::send(const HttpRequest& request)
{
    if (auto hit = store_->lookup(request)) {
        return *hit;
    }
    if (mode_ == ReplayMode::Replay) {
        throw TransportError("no replay entry for " + request.method + " " + request.url);
    }
    auto response = upstream_->send(request);
    if (response.status < 500 && response.status != 429) {
        store_->record(request, response);
    }
    return response;
}

HttpResponse send_with_retry(Transport& transport, const HttpRequest& request, const RetryPolicy& policy)
{
    auto sleep = policy.sleep ? policy.sleep : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    std::string last_error;
    auto delay = policy.base_delay;
    int attempts = std::max(1, policy.attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        try {
            auto response = transport.send(request);
            if (response.status != 429 && response.status < 500) {
                return response;
            }
            last_error = "HTTP " + std::to_string(response.status);
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        logger().info("{} {} attempt {}/{} failed: {}", request.method, request.url, attempt, attempts, last_error);
        if (attempt < attempts) {
            sleep(delay);
            delay *= 2;
        }
    }
    throw TransportError(request.method + " " + request.url + " failed after " + std::to_string(attempts) +
                         " attempts: " + last_error);
}

}  // namespace modelselect::net
