// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/gateway/server.hpp"

#include <charconv>
#include <cstdlib>

#include <httplib.h>

#include "modelselect/common/log.hpp"

namespace modelselect::gateway {

int port_from_environment()
{
    const char* value = std::getenv("MODELSELECT_PORT");
    if (!value || !*value) return 8080;
    std::string text(value);
    int port = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), port);
    if (ec != std::errc() || end != text.data() + text.size() || port < 0 || port > 65535) {
        throw Error("MODELSELECT_PORT is not a port number: " + text);
    }
    return port;
}

struct HttpServer::Impl {
    Impl(const ApiService& s, ServerOptions o) : service(s), options(std::move(o)) {}

    const ApiService& service;
    ServerOptions options;
    httplib::Server server;
    int bound_port = -1;

    void reply(httplib::Response& res, const Response& r) const
    {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    }

    static std::optional<std::string> param(const httplib::Request& req, const char* name)
    {
        if (!req.has_param(name)) return std::nullopt;
        return req.get_param_value(name);
    }

    void routes()
    {
        server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
            res.set_header("X-Snapshot-Version", service.snapshot_version());
            res.set_header("Access-Control-Allow-Origin", options.cors_origin);
            res.set_header("Access-Control-Expose-Headers", "X-Snapshot-Version");
        });
        server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
        server.Post("/api/recommend",
                    [this](const httplib::Request& req, httplib::Response& res) { reply(res, service.recommend(req.body)); });
        server.Get("/api/search", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.search(param(req, "q"), param(req, "k")));
        });
        server.Get(R"(/api/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.model(req.matches[1]));
        });
        server.Get(R"(/api/libraries/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.library(req.matches[1]));
        });
        server.Get(R"(/api/graph/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.graph(req.matches[1], param(req, "depth")));
        });
        server.Get("/api/stats", [this](const httplib::Request&, httplib::Response& res) { reply(res, service.stats()); });
        server.Get("/api/spec", [this](const httplib::Request&, httplib::Response& res) { reply(res, ApiService::spec()); });
        if (options.ui_dir && !server.set_mount_point("/ui", options.ui_dir->string())) {
            throw Error("ui directory does not exist: " + options.ui_dir->string());
        }
        server.set_error_handler([this](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) reply(res, {res.status, {{"error", httplib::status_message(res.status)}}});
        });
        server.set_exception_handler([this](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
            std::string message = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                message = e.what();
            } catch (...) {
            }
            logger().error("{} {}: {}", req.method, req.path, message);
            reply(res, {500, {{"error", message}}});
        });
    }
};

HttpServer::HttpServer(const ApiService& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options)))
{
    impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind()
{
    auto& s = impl_->server;
    int port = impl_->options.port;
    if (port == 0) {
        port = s.bind_to_any_port(impl_->options.host);
    } else if (!s.bind_to_port(impl_->options.host, port)) {
        port = -1;
    }
    if (port < 0) throw Error("cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
    impl_->bound_port = port;
    return port;
}

void HttpServer::listen()
{
    if (impl_->bound_port < 0) throw Error("listen() before bind()");
    logger().info("serving on http://{}:{} (snapshot {})", impl_->options.host, impl_->bound_port,
                  impl_->service.snapshot_version());
    impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace modelselect::gateway
