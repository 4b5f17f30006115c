// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/quality/quality.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "modelselect/common/config.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/knowledge/validation_rules.hpp"

namespace modelselect::quality {

namespace {

const std::vector<std::string> kSentimentOptions = {"positive", "negative", "neutral"};

std::string attribute_context(const std::vector<AttributeDefinition>& attributes)
{
    std::string out;
    for (const auto& a : attributes) out += "- " + a.name + ": " + a.definition + "\n";
    return out;
}

}  // namespace

Review review_from_json(const nlohmann::json& j, const std::string& default_source)
{
    Review r;
    r.url = j.at("url").get<std::string>();
    r.body = j.at("body").get<std::string>();
    r.id = j.contains("id") ? j.at("id").get<std::string>() : r.url;
    r.source = j.value("source", default_source);
    if (j.contains("created_at") && j.at("created_at").is_string()) {
        r.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    }
    if (text::trim(r.body).empty()) throw Error("review " + r.id + " has an empty body");
    if (!kg::is_well_formed_url(r.url)) throw Error("review " + r.id + " has a malformed url '" + r.url + "'");
    return r;
}

JsonlReviewSource::JsonlReviewSource(const std::filesystem::path& path)
{
    io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
        try {
            reviews_.push_back(review_from_json(j, "offline"));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.filename().string(), line, e.what());
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(path.filename().string(), line, e.what());
        }
    });
}

std::vector<Review> JsonlReviewSource::search(const std::string& /*query*/) { return reviews_; }

HttpForumSource::HttpForumSource(std::shared_ptr<net::Transport> transport, std::string base_url,
                                 std::string source_name, net::RetryPolicy retry)
    : transport_(std::move(transport)), base_url_(std::move(base_url)), source_name_(std::move(source_name)),
      retry_(std::move(retry))
{
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::vector<Review> HttpForumSource::search(const std::string& query)
{
    net::HttpRequest req;
    req.url = base_url_ + "/search?q=" + net::url_encode(query);
    auto response = net::send_with_retry(*transport_, req, retry_);
    if (response.status != 200) {
        throw ProtocolError(source_name_ + " search answered HTTP " + std::to_string(response.status));
    }
    auto parsed = nlohmann::json::parse(response.body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("items") || !parsed["items"].is_array()) {
        throw ProtocolError(source_name_ + " search returned no items array: " + response.body.substr(0, 160));
    }
    std::vector<Review> out;
    for (const auto& item : parsed["items"]) {
        try {
            out.push_back(review_from_json(item, source_name_));
        } catch (const std::exception& e) {
            logger().warn("{}: skipping malformed item: {}", source_name_, e.what());
        }
    }
    return out;
}

std::vector<Review> harvest_reviews(const std::string& variation_name, const std::string& library_name,
                                    ReviewSource& source)
{
    if (text::trim(variation_name).empty() || text::trim(library_name).empty()) {
        throw Error("review harvest needs both a variation and a library name");
    }
    std::vector<Review> out;
    std::set<std::string> urls;
    for (auto& r : source.search(variation_name + " " + library_name)) {
        if (!text::icontains(r.body, variation_name) || !text::icontains(r.body, library_name)) continue;
        if (urls.insert(r.url).second) out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> split_sentences(std::string_view body)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c != '.' && c != '?' && c != '!') continue;
        std::size_t j = i + 1;
        if (j >= body.size() || std::isspace(static_cast<unsigned char>(body[j])) == 0) continue;
        while (j < body.size() && std::isspace(static_cast<unsigned char>(body[j])) != 0) ++j;
        if (j < body.size() && std::isupper(static_cast<unsigned char>(body[j])) == 0) continue;
        auto s = text::trim(body.substr(start, i + 1 - start));
        if (!s.empty()) out.push_back(std::move(s));
        start = j;
        i = j - 1;
    }
    if (start < body.size()) {
        auto s = text::trim(body.substr(start));
        if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
}

std::vector<AttributeDefinition> load_attribute_definitions(const std::filesystem::path& path)
{
    auto j = config::load_toml(path);
    std::vector<AttributeDefinition> out;
    const auto& known = kg::quality_attribute_names();
    if (j.contains("attribute")) {
        for (const auto& a : j.at("attribute")) {
            AttributeDefinition d{text::normalize_phrase(a.at("name").get<std::string>()),
                                  a.value("definition", std::string())};
            if (std::find(known.begin(), known.end(), d.name) == known.end()) {
                throw Error(path.filename().string() + ": unknown quality attribute '" + d.name + "'");
            }
            out.push_back(std::move(d));
        }
    }
    if (out.empty()) throw Error(path.filename().string() + ": no quality attributes");
    return out;
}

std::vector<SentimentRecord> classify_sentences(const Review& review, provider::Backend& backend,
                                                const std::vector<AttributeDefinition>& attributes, int votes,
                                                Timestamp retrieved_at)
{
    std::vector<std::string> names;
    for (const auto& a : attributes) names.push_back(a.name);
    auto context = attribute_context(attributes);
    std::vector<SentimentRecord> out;
    for (const auto& sentence : split_sentences(review.body)) {
        auto sentiment = provider::label({provider::TaskKind::Sentiment, "", sentence, kSentimentOptions}, backend, votes);
        if (sentiment.answer == "neutral") continue;
        auto attribute = provider::label({provider::TaskKind::QualityMap, context, sentence, names}, backend, votes);
        SentimentRecord r;
        r.review_id = review.id;
        r.sentence = sentence;
        r.polarity = sentiment.answer == "positive" ? 1 : -1;
        r.confidence = sentiment.confidence * attribute.confidence;
        r.attribute = attribute.answer;
        r.evidence = {review.url, sentence, retrieved_at};
        out.push_back(std::move(r));
    }
    return out;
}

std::optional<double> WeightedMeanAggregator::score(const std::vector<SentimentRecord>& records) const
{
    double weighted = 0.0;
    double total = 0.0;
    for (const auto& r : records) {
        weighted += r.polarity * r.confidence;
        total += r.confidence;
    }
    if (total <= 0.0) return std::nullopt;
    return std::clamp(weighted / total, -1.0, 1.0);
}

std::optional<kg::QualityAggregate> aggregate_quality(const kg::EntityId& variation_id, const kg::EntityId& library_id,
                                                      const std::string& attribute,
                                                      const std::vector<SentimentRecord>& records,
                                                      const Aggregator& aggregator)
{
    for (const auto& r : records) {
        if (r.attribute != attribute) throw Error("record for '" + r.attribute + "' in the '" + attribute + "' group");
        if (r.polarity != 1 && r.polarity != -1) throw Error("record polarity must be +1 or -1");
        if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) throw Error("record confidence outside [0,1]");
    }
    if (records.empty()) return std::nullopt;
    auto score = aggregator.score(records);
    if (!score) return std::nullopt;
    kg::QualityAggregate q;
    q.variation_id = variation_id;
    q.library_id = library_id;
    q.attribute = attribute;
    q.score = *score;
    q.review_count = static_cast<std::int64_t>(records.size());
    std::set<kg::EvidenceRef> evidence;
    for (const auto& r : records) evidence.insert(r.evidence);
    q.evidence.assign(evidence.begin(), evidence.end());
    q.id = kg::ids::quality(variation_id, library_id, attribute);
    return q;
}

kg::ChangeSummary attach_quality(kg::GraphStore& store, const std::vector<kg::QualityAggregate>& aggregates)
{
    kg::Batch batch;
    for (const auto& q : aggregates) batch.entities.push_back(q);
    return store.apply(batch);
}

AssessmentResult assess_quality(const kg::KnowledgeGraph& graph, ReviewSource& source, provider::Backend& backend,
                                const std::vector<AttributeDefinition>& attributes, int votes, Timestamp retrieved_at)
{
    AssessmentResult result;
    for (const auto& [key, edge] : graph.edges()) {
        if (key.kind != kg::EdgeKind::LibraryVariation) continue;
        const auto& library = graph.libraries().at(key.from);
        const auto& variation = graph.variations().at(key.to);
        auto reviews = harvest_reviews(variation.name, library.distribution_name, source);
        result.reviews += reviews.size();
        std::map<std::string, std::vector<SentimentRecord>> by_attribute;
        for (const auto& review : reviews) {
            try {
                for (auto& r : classify_sentences(review, backend, attributes, votes, retrieved_at)) {
                    by_attribute[r.attribute].push_back(std::move(r));
                }
            } catch (const provider::ProviderError& e) {
                result.diagnostics.push_back("review " + review.id + " skipped: " + e.what());
            }
        }
        for (const auto& [attribute, records] : by_attribute) {
            result.records += records.size();
            if (auto q = aggregate_quality(key.to, key.from, attribute, records)) result.aggregates.push_back(*q);
        }
    }
    return result;
}

}  // namespace modelselect::quality
