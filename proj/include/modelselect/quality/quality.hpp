// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelselect/common/time.hpp"
#include "modelselect/knowledge/graph.hpp"
#include "modelselect/net/http.hpp"
#include "modelselect/provider/provider.hpp"

namespace modelselect::quality {

struct Review {
    std::string id;
    std::string source;  // forum identifier
    std::string url;
    std::string body;
    Timestamp created_at{};

    friend bool operator==(const Review&, const Review&) = default;
};

struct SentimentRecord {
    std::string review_id;
    std::string sentence;
    int polarity = 0;  // +1 or -1
    double confidence = 0.0;
    std::string attribute;
    kg::EvidenceRef evidence;
};

/// Forum search contract: reviews relevant to a free-text query.
class ReviewSource {
  public:
    virtual ~ReviewSource() = default;
    virtual std::vector<Review> search(const std::string& query) = 0;
};

/// Offline corpus (reviews.jsonl: id, source, url, body, created_at). Every
/// review is a search hit; harvest_reviews does the filtering.
class JsonlReviewSource : public ReviewSource {
  public:
    explicit JsonlReviewSource(const std::filesystem::path& path);
    explicit JsonlReviewSource(std::vector<Review> reviews) : reviews_(std::move(reviews)) {}
    std::vector<Review> search(const std::string& query) override;

  private:
    std::vector<Review> reviews_;
};

/// GET {base}/search?q=... answering {"items":[{url, body, created_at}]}.
class HttpForumSource : public ReviewSource {
  public:
    HttpForumSource(std::shared_ptr<net::Transport> transport, std::string base_url, std::string source_name,
                    net::RetryPolicy retry = {});
    std::vector<Review> search(const std::string& query) override;

  private:
    std::shared_ptr<net::Transport> transport_;
    std::string base_url_;
    std::string source_name_;
    net::RetryPolicy retry_;
};

Review review_from_json(const nlohmann::json& j, const std::string& default_source);

/// Reviews mentioning both names (case-insensitive) for the query
/// "{variation} {library}", first occurrence per url kept.
std::vector<Review> harvest_reviews(const std::string& variation_name, const std::string& library_name,
                                    ReviewSource& source);

/// Splits where a terminator is followed by whitespace and a capital letter.
/// Sentences are trimmed substrings of `body`.
std::vector<std::string> split_sentences(std::string_view body);

struct AttributeDefinition {
    std::string name;
    std::string definition;
};

/// quality_attributes.toml; names must match the bundled attribute list.
std::vector<AttributeDefinition> load_attribute_definitions(const std::filesystem::path& path);

/// Sentiment then attribute per sentence, each by vote. Neutral sentences give
/// no record; confidence is the product of the two vote shares.
std::vector<SentimentRecord> classify_sentences(const Review& review, provider::Backend& backend,
                                                const std::vector<AttributeDefinition>& attributes, int votes,
                                                Timestamp retrieved_at);

/// Combines the records of one (variation, library, attribute) triple.
class Aggregator {
  public:
    virtual ~Aggregator() = default;
    /// nullopt when the records carry no weight.
    virtual std::optional<double> score(const std::vector<SentimentRecord>& records) const = 0;
};

/// Σ polarity·confidence / Σ confidence.
class WeightedMeanAggregator : public Aggregator {
  public:
    std::optional<double> score(const std::vector<SentimentRecord>& records) const override;
};

/// Empty input, or records of another attribute, give nullopt / Error.
std::optional<kg::QualityAggregate> aggregate_quality(const kg::EntityId& variation_id, const kg::EntityId& library_id,
                                                      const std::string& attribute,
                                                      const std::vector<SentimentRecord>& records,
                                                      const Aggregator& aggregator = WeightedMeanAggregator{});

/// Upsert keyed by triple; unresolved triples are rejected by the graph.
kg::ChangeSummary attach_quality(kg::GraphStore& store, const std::vector<kg::QualityAggregate>& aggregates);

struct AssessmentResult {
    std::vector<kg::QualityAggregate> aggregates;
    std::size_t reviews = 0;
    std::size_t records = 0;
    std::vector<std::string> diagnostics;
};

/// Every library-variation pair of the graph, in key order.
AssessmentResult assess_quality(const kg::KnowledgeGraph& graph, ReviewSource& source, provider::Backend& backend,
                                const std::vector<AttributeDefinition>& attributes, int votes, Timestamp retrieved_at);

}  // namespace modelselect::quality
