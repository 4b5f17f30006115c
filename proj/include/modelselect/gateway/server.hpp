// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "modelselect/gateway/service.hpp"

namespace modelselect::gateway {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;                           // 0 picks a free port
    std::string cors_origin = "*";             // Access-Control-Allow-Origin
    std::optional<std::filesystem::path> ui_dir;  // served under /ui/ when set
};

/// MODELSELECT_PORT, else 8080. Throws Error when the variable is not a port number.
int port_from_environment();

/// HTTP front for an ApiService. Every response carries X-Snapshot-Version.
class HttpServer {
  public:
    HttpServer(const ApiService& service, ServerOptions options);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds the socket and returns the actual port. Throws Error on failure.
    int bind();
    /// Serves until stop(). bind() must have succeeded.
    void listen();
    void stop();
    void wait_until_ready() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace modelselect::gateway
