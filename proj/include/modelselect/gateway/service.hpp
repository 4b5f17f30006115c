// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "modelselect/common/error.hpp"
#include "modelselect/inference/inference.hpp"
#include "modelselect/knowledge/graph.hpp"

namespace modelselect::gateway {

/// A request body or query parameter that does not fit the schema.
class RequestError : public Error {
  public:
    RequestError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Everything the read path needs besides the graph.
struct QueryResources {
    inference::IntentResources intent;
    inference::RankingConfig ranking;

    /// stoplist, synonyms, chunking and ranking.toml from one directory.
    static QueryResources load(const std::filesystem::path& resource_dir);
};

/// {intent, k?, required_features?, quality_weights?}. Unknown keys are rejected.
inference::IntentQuery parse_recommend_request(const nlohmann::json& body, int default_k);

/// {results: [ApiRecommendation], keywords: {raw, pruned, enriched}}.
nlohmann::json api_recommendations(const inference::Recommendation& recommendation, const kg::KnowledgeGraph& graph);

/// The library-level recommend call rendered in API form; every surface goes through this.
nlohmann::json recommend_json(const inference::IntentQuery& query, const kg::KnowledgeGraph& graph,
                              const QueryResources& resources);

/// Sorted keys, no whitespace. Equal values give equal bytes.
std::string canonical_json(const nlohmann::json& value);

struct Response {
    int status = 200;
    nlohmann::json body;
};

/// Pure views of an immutable snapshot. The snapshot can be swapped while
/// requests run; a request keeps the snapshot it started with.
class ApiService {
  public:
    explicit ApiService(QueryResources resources);

    /// Loads data_dir and publishes it. Throws on a broken snapshot; the old one stays.
    void load(const std::filesystem::path& data_dir);
    void publish(std::shared_ptr<const kg::KnowledgeGraph> graph, std::string version);

    bool loaded() const;
    std::string snapshot_version() const;

    Response recommend(const std::string& body) const;
    Response search(const std::optional<std::string>& q, const std::optional<std::string>& k) const;
    Response model(const std::string& id) const;
    Response library(const std::string& name) const;
    Response graph(const std::string& id, const std::optional<std::string>& depth) const;
    Response stats() const;
    static Response spec();

    static constexpr std::size_t kMaxDepth = 6;

  private:
    struct State {
        std::shared_ptr<const kg::KnowledgeGraph> graph;
        std::string version;
    };
    std::shared_ptr<const State> state() const;

    QueryResources resources_;
    mutable std::mutex mutex_;
    std::shared_ptr<const State> state_;
};

/// OpenAPI 3 description of the HTTP surface.
const nlohmann::json& openapi_document();

}  // namespace modelselect::gateway
