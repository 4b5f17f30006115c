// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/gateway/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/common/time.hpp"
#include "modelselect/eval/eval.hpp"
#include "modelselect/knowledge/serialize.hpp"
#include "modelselect/knowledge/snapshot.hpp"

namespace modelselect::gateway {

using nlohmann::json;
using kg::EntityId;
using text::match_tokens;
using text::trim;

QueryResources QueryResources::load(const std::filesystem::path& resource_dir)
{
    return {inference::IntentResources::load(resource_dir), inference::RankingConfig::load(resource_dir / "ranking.toml")};
}

inference::IntentQuery parse_recommend_request(const json& body, int default_k)
{
    if (!body.is_object()) throw RequestError("body", "expected a JSON object");
    static const std::set<std::string> kKnown = {"intent", "k", "required_features", "quality_weights"};
    for (const auto& [key, value] : body.items()) {
        if (!kKnown.count(key)) throw RequestError(key, "unknown field");
    }
    inference::IntentQuery query;
    query.k = default_k;

    auto intent = body.find("intent");
    if (intent == body.end()) throw RequestError("intent", "required");
    if (!intent->is_string()) throw RequestError("intent", "expected a string");
    query.text = intent->get<std::string>();
    if (trim(query.text).empty()) throw RequestError("intent", "must not be empty");

    if (auto k = body.find("k"); k != body.end()) {
        if (!k->is_number_integer()) throw RequestError("k", "expected an integer");
        auto value = k->get<std::int64_t>();
        if (value < 1 || value > 1000) throw RequestError("k", "must be between 1 and 1000");
        query.k = static_cast<int>(value);
    }
    if (auto features = body.find("required_features"); features != body.end()) {
        if (!features->is_array()) throw RequestError("required_features", "expected an array of strings");
        for (const auto& f : *features) {
            if (!f.is_string()) throw RequestError("required_features", "expected an array of strings");
            query.required_features.insert(f.get<std::string>());
        }
    }
    if (auto weights = body.find("quality_weights"); weights != body.end()) {
        if (!weights->is_object()) throw RequestError("quality_weights", "expected an object of numbers");
        for (const auto& [attribute, w] : weights->items()) {
            if (!w.is_number()) throw RequestError("quality_weights." + attribute, "expected a number");
            double value = w.get<double>();
            if (!std::isfinite(value) || value < 0.0) throw RequestError("quality_weights." + attribute, "must be >= 0");
            query.quality_weights[attribute] = value;
        }
    }
    return query;
}

namespace {

json evidence_list(const std::vector<kg::EvidenceRef>& evidence)
{
    json out = json::array();
    for (const auto& e : evidence) out.push_back({{"url", e.source_url}, {"fragment", e.fragment}});
    return out;
}

json pair_quality(const kg::KnowledgeGraph& graph, const EntityId& variation, const EntityId& library)
{
    json out = json::array();
    for (const auto& attribute : kg::quality_attribute_names()) {
        auto it = graph.quality().find(kg::ids::quality(variation, library, attribute));
        if (it == graph.quality().end()) continue;
        out.push_back({{"attribute", attribute}, {"score", it->second.score}, {"review_count", it->second.review_count}});
    }
    return out;
}

std::string base_name(const kg::KnowledgeGraph& graph, const EntityId& base_id)
{
    auto it = graph.base_models().find(base_id);
    return it == graph.base_models().end() ? std::string() : it->second.name;
}

json plain(const kg::ordered_json& j) { return json::parse(j.dump()); }

std::string entity_name(const kg::Entity& entity)
{
    return std::visit(
        [](const auto& e) -> std::string {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, kg::BaseModel> || std::is_same_v<T, kg::ModelVariation> ||
                          std::is_same_v<T, kg::Repository>) {
                return e.name;
            } else if constexpr (std::is_same_v<T, kg::Feature>) {
                return e.phrase;
            } else if constexpr (std::is_same_v<T, kg::Library>) {
                return e.distribution_name;
            } else if constexpr (std::is_same_v<T, kg::QualityAggregate>) {
                return e.attribute;
            } else {
                return e.id.str();
            }
        },
        entity);
}

json library_summary(const kg::Library& library)
{
    return {{"id", library.id.str()},
            {"name", library.distribution_name},
            {"version", library.version},
            {"cve_count", library.cve_ids.size()}};
}

Response error_response(int status, const std::string& message, const std::string& field = {})
{
    json body = {{"error", message}};
    if (!field.empty()) body["field"] = field;
    return {status, body};
}

Response no_graph() { return error_response(503, "no knowledge graph loaded"); }

std::optional<std::int64_t> parse_int(const std::string& text)
{
    std::int64_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

}  // namespace

json api_recommendations(const inference::Recommendation& recommendation, const kg::KnowledgeGraph& graph)
{
    json results = json::array();
    for (std::size_t i = 0; i < recommendation.results.size(); ++i) {
        const auto& c = recommendation.results[i];
        const auto& v = graph.variations().at(c.variation_id);
        const auto& lib = graph.libraries().at(c.library_id);
        results.push_back({
            {"rank", i + 1},
            {"variation",
             {{"id", v.id.str()}, {"name", v.name}, {"base", base_name(graph, v.base_id)}, {"definition", v.definition}}},
            {"library", library_summary(lib)},
            {"relevance", c.relevance},
            {"quality_bonus", c.quality_bonus},
            {"final_score", c.final_score},
            {"field_breakdown", c.field_breakdown},
            {"quality", pair_quality(graph, c.variation_id, c.library_id)},
            {"evidence", evidence_list(c.evidence)},
        });
    }
    return {{"results", results}, {"keywords", inference::to_json(recommendation.keywords)}};
}

json recommend_json(const inference::IntentQuery& query, const kg::KnowledgeGraph& graph, const QueryResources& resources)
{
    return api_recommendations(inference::recommend(query, graph, resources.intent, resources.ranking), graph);
}

std::string canonical_json(const json& value)
{
    // nlohmann::json keeps object keys in a std::map, so dump() is already sorted.
    return value.dump();
}

ApiService::ApiService(QueryResources resources) : resources_(std::move(resources)) {}

void ApiService::load(const std::filesystem::path& data_dir)
{
    auto graph = std::make_shared<const kg::KnowledgeGraph>(kg::load_snapshot(data_dir));
    publish(std::move(graph), kg::read_manifest(data_dir).version);
}

void ApiService::publish(std::shared_ptr<const kg::KnowledgeGraph> graph, std::string version)
{
    auto next = std::make_shared<const State>(State{std::move(graph), std::move(version)});
    std::lock_guard lock(mutex_);
    state_ = std::move(next);
}

std::shared_ptr<const ApiService::State> ApiService::state() const
{
    std::lock_guard lock(mutex_);
    return state_;
}

bool ApiService::loaded() const { return state() != nullptr; }

std::string ApiService::snapshot_version() const
{
    auto s = state();
    return s ? s->version : std::string("none");
}

Response ApiService::recommend(const std::string& body) const
{
    auto s = state();
    if (!s) return no_graph();
    auto parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) return error_response(400, "request body is not valid JSON", "body");
    try {
        auto query = parse_recommend_request(parsed, resources_.ranking.default_k);
        return {200, recommend_json(query, *s->graph, resources_)};
    } catch (const RequestError& e) {
        return error_response(400, e.what(), e.field());
    } catch (const inference::UnintelligibleIntent& e) {
        return error_response(400, e.what(), "intent");
    }
}

Response ApiService::search(const std::optional<std::string>& q, const std::optional<std::string>& k) const
{
    auto s = state();
    if (!s) return no_graph();
    if (!q || trim(*q).empty()) return error_response(400, "q: required", "q");
    std::int64_t limit = resources_.ranking.default_k;
    if (k) {
        auto parsed = parse_int(*k);
        if (!parsed || *parsed < 1 || *parsed > 1000) return error_response(400, "k: must be between 1 and 1000", "k");
        limit = *parsed;
    }
    const auto& graph = *s->graph;

    // Hits per entity = number of distinct query tokens found in any of its fields.
    std::map<EntityId, std::set<std::string>> hits;
    for (const auto& token : match_tokens(*q)) {
        for (const auto& doc : graph.index().matching_documents(std::vector<std::string>{token})) hits[doc.entity].insert(token);
    }
    struct Hit {
        EntityId id;
        std::string type;
        std::string name;
        std::size_t matched;
    };
    std::vector<Hit> ranked;
    for (const auto& [id, tokens] : hits) {
        auto entity = graph.find(id);
        if (!entity) continue;
        ranked.push_back({id, std::string(kg::entity_type_name(*entity)), entity_name(*entity), tokens.size()});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Hit& a, const Hit& b) {
        if (a.matched != b.matched) return a.matched > b.matched;
        if (a.name != b.name) return a.name < b.name;
        return a.id < b.id;
    });
    if (ranked.size() > static_cast<std::size_t>(limit)) ranked.resize(static_cast<std::size_t>(limit));
    json results = json::array();
    for (const auto& h : ranked) {
        results.push_back({{"id", h.id.str()}, {"type", h.type}, {"name", h.name}, {"matched_terms", h.matched}});
    }
    return {200, {{"query", *q}, {"results", results}}};
}

Response ApiService::model(const std::string& id) const
{
    auto s = state();
    if (!s) return no_graph();
    const auto& graph = *s->graph;
    EntityId key(id);

    if (auto v = graph.variations().find(key); v != graph.variations().end()) {
        const auto& variation = v->second;
        json features = json::array();
        for (const auto& f : variation.feature_ids) {
            auto it = graph.features().find(f);
            if (it != graph.features().end()) features.push_back({{"id", f.str()}, {"phrase", it->second.phrase}});
        }
        json libraries = json::array();
        for (const auto& [lib_id, lib] : graph.libraries()) {
            if (!lib.supported_variation_ids.count(key)) continue;
            auto summary = library_summary(lib);
            summary["quality"] = pair_quality(graph, key, lib_id);
            libraries.push_back(summary);
        }
        return {200,
                {{"entity", plain(kg::to_json(variation))},
                 {"type", "variation"},
                 {"base", base_name(graph, variation.base_id)},
                 {"features", features},
                 {"libraries", libraries}}};
    }
    if (auto b = graph.base_models().find(key); b != graph.base_models().end()) {
        json variations = json::array();
        for (const auto& [vid, v] : graph.variations()) {
            if (v.base_id == key) variations.push_back({{"id", vid.str()}, {"name", v.name}});
        }
        return {200, {{"entity", plain(kg::to_json(b->second))}, {"type", "base_model"}, {"variations", variations}}};
    }
    return error_response(404, "no model with id '" + id + "'");
}

Response ApiService::library(const std::string& name) const
{
    auto s = state();
    if (!s) return no_graph();
    const auto& graph = *s->graph;
    const kg::Library* lib = graph.library_by_name(name);
    if (!lib) lib = graph.library_by_name(kg::normalize_distribution_name(name));
    if (!lib) return error_response(404, "no library named '" + name + "'");

    json variations = json::array();
    for (const auto& vid : lib->supported_variation_ids) {
        auto it = graph.variations().find(vid);
        if (it == graph.variations().end()) continue;
        variations.push_back(
            {{"id", vid.str()}, {"name", it->second.name}, {"base", base_name(graph, it->second.base_id)}});
    }
    json cves = json::array();
    for (const auto& cid : lib->cve_ids) {
        auto it = graph.cves().find(cid);
        cves.push_back({{"id", cid.str()},
                        {"affected_version_range", it == graph.cves().end() ? "" : it->second.affected_version_range}});
    }
    json dependents = json::array();
    for (const auto& [key, edge] : graph.edges()) {
        if (key.kind != kg::EdgeKind::RepoLibrary || key.to != lib->id) continue;
        auto repo = graph.repositories().find(key.from);
        if (repo != graph.repositories().end()) dependents.push_back(repo->second.name);
    }
    std::sort(dependents.begin(), dependents.end());
    return {200,
            {{"entity", plain(kg::to_json(*lib))}, {"variations", variations}, {"cves", cves}, {"dependents", dependents}}};
}

Response ApiService::graph(const std::string& id, const std::optional<std::string>& depth) const
{
    auto s = state();
    if (!s) return no_graph();
    std::size_t d = 1;
    if (depth) {
        auto parsed = parse_int(*depth);
        if (!parsed || *parsed < 0 || *parsed > static_cast<std::int64_t>(kMaxDepth)) {
            return error_response(422, "depth: expected an integer between 0 and " + std::to_string(kMaxDepth), "depth");
        }
        d = static_cast<std::size_t>(*parsed);
    }
    EntityId root(id);
    if (!s->graph->contains(root)) return error_response(404, "no entity with id '" + id + "'");
    auto sub = s->graph->get_subgraph(root, d);
    json entities = json::array();
    for (const auto& e : sub.entities) entities.push_back(plain(kg::entity_to_json(e)));
    json edges = json::array();
    for (const auto& e : sub.edges) edges.push_back(plain(kg::to_json(e)));
    return {200, {{"root", id}, {"depth", d}, {"entities", entities}, {"edges", edges}}};
}

Response ApiService::stats() const
{
    auto s = state();
    if (!s) return no_graph();
    return {200, eval::to_json(eval::corpus_stats(*s->graph))};
}

Response ApiService::spec() { return {200, openapi_document()}; }

const json& openapi_document()
{
    static const json doc = [] {
        auto get = [](std::string summary, json parameters, json responses) {
            return json{{"get", {{"summary", summary}, {"parameters", parameters}, {"responses", responses}}}};
        };
        auto path_param = [](std::string name) {
            return json{{"name", name}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}};
        };
        auto query_param = [](std::string name, std::string type, bool required) {
            return json{{"name", name}, {"in", "query"}, {"required", required}, {"schema", {{"type", type}}}};
        };
        auto ok = json{{"description", "OK"}};
        json doc;
        doc["openapi"] = "3.0.3";
        doc["info"] = {{"title", "ModelSelect API"}, {"version", "1.0.0"}};
        doc["paths"]["/api/recommend"] = {
            {"post",
             {{"summary", "Ranked model and library recommendations for an intent paragraph"},
              {"requestBody",
               {{"required", true},
                {"content",
                 {{"application/json",
                   {{"schema",
                     {{"type", "object"},
                      {"required", {"intent"}},
                      {"additionalProperties", false},
                      {"properties",
                       {{"intent", {{"type", "string"}}},
                        {"k", {{"type", "integer"}, {"minimum", 1}}},
                        {"required_features", {{"type", "array"}, {"items", {{"type", "string"}}}}},
                        {"quality_weights",
                         {{"type", "object"}, {"additionalProperties", {{"type", "number"}, {"minimum", 0}}}}}}}}}}}}}}},
              {"responses",
               {{"200", ok},
                {"400", {{"description", "Schema violation or unintelligible intent"}}},
                {"503", {{"description", "No knowledge graph loaded"}}}}}}}};
        doc["paths"]["/api/search"] = get("Keyword search over indexed entities",
                                          {query_param("q", "string", true), query_param("k", "integer", false)},
                                          {{"200", ok}, {"400", {{"description", "Bad parameters"}}}});
        doc["paths"]["/api/models/{id}"] =
            get("Variation or base model by id", {path_param("id")}, {{"200", ok}, {"404", {{"description", "Unknown id"}}}});
        doc["paths"]["/api/libraries/{name}"] = get("Library by distribution name", {path_param("name")},
                                                    {{"200", ok}, {"404", {{"description", "Unknown library"}}}});
        doc["paths"]["/api/graph/{id}"] =
            get("Subgraph around an entity", {path_param("id"), query_param("depth", "integer", false)},
                {{"200", ok}, {"404", {{"description", "Unknown id"}}}, {"422", {{"description", "Bad depth"}}}});
        doc["paths"]["/api/stats"] = get("Corpus statistics", json::array(), {{"200", ok}});
        doc["paths"]["/api/spec"] = get("This document", json::array(), {{"200", ok}});
        return doc;
    }();
    return doc;
}

}  // namespace modelselect::gateway
