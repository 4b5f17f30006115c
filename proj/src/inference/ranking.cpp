// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <algorithm>
#include <cmath>

#include "modelselect/common/config.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/common/time.hpp"
#include "modelselect/inference/inference.hpp"

namespace modelselect::inference {

namespace {

using kg::DocKey;
using kg::EntityId;
using kg::IndexField;

struct PairKey {
    EntityId variation;
    EntityId library;
    friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

// Reverse lookups needed to turn matching documents into (variation, library) pairs.
struct PairMap {
    std::map<EntityId, std::set<EntityId>> libraries_of;   // variation -> libraries
    std::map<EntityId, std::set<EntityId>> variations_of;  // base or feature -> variations

    explicit PairMap(const kg::KnowledgeGraph& graph)
    {
        for (const auto& [key, edge] : graph.edges()) {
            if (key.kind == kg::EdgeKind::LibraryVariation) libraries_of[key.to].insert(key.from);
        }
        for (const auto& [id, v] : graph.variations()) {
            variations_of[v.base_id].insert(id);
            for (const auto& f : v.feature_ids) variations_of[f].insert(id);
        }
    }
};

std::vector<DocKey> pair_documents(IndexField field, const kg::ModelVariation& v, const EntityId& library)
{
    switch (field) {
    case IndexField::VariationName: return {{field, v.id}};
    case IndexField::BaseName: return {{field, v.base_id}};
    case IndexField::Definition: {
        std::vector<DocKey> docs{{field, v.id}, {field, v.base_id}};
        std::sort(docs.begin(), docs.end());
        return docs;
    }
    case IndexField::FeaturePhrase: {
        std::vector<DocKey> docs;
        for (const auto& f : v.feature_ids) docs.push_back({field, f});
        return docs;
    }
    case IndexField::LibraryText: return {{field, library}};
    }
    return {};
}

void add_evidence(std::set<kg::EvidenceRef>& into, const std::vector<kg::EvidenceRef>& from)
{
    into.insert(from.begin(), from.end());
}

void collect_evidence(const kg::KnowledgeGraph& graph, const DocKey& doc, const kg::ModelVariation& v,
                      const EntityId& library, std::set<kg::EvidenceRef>& into)
{
    switch (doc.field) {
    case IndexField::VariationName:
    case IndexField::BaseName: add_evidence(into, v.evidence); break;
    case IndexField::Definition: add_evidence(into, v.evidence); break;
    case IndexField::FeaturePhrase: {
        auto edge = graph.edges().find({kg::EdgeKind::VariationFeature, v.id, doc.entity});
        if (edge != graph.edges().end() && !edge->second.evidence.empty()) {
            add_evidence(into, edge->second.evidence);
        } else {
            add_evidence(into, v.evidence);
        }
        break;
    }
    case IndexField::LibraryText: {
        add_evidence(into, graph.libraries().at(library).evidence);
        auto edge = graph.edges().find({kg::EdgeKind::LibraryVariation, library, v.id});
        if (edge != graph.edges().end()) add_evidence(into, edge->second.evidence);
        break;
    }
    }
}

}  // namespace

double bm25(std::size_t tf, std::size_t df, std::size_t documents, double length, double average_length, double k1,
            double b)
{
    if (tf == 0 || documents == 0) return 0.0;
    double n = static_cast<double>(documents);
    double d = static_cast<double>(df);
    double idf = std::log(1.0 + (n - d + 0.5) / (d + 0.5));
    double t = static_cast<double>(tf);
    double norm = average_length > 0.0 ? length / average_length : 0.0;
    return idf * (t * (k1 + 1.0)) / (t + k1 * (1.0 - b + b * norm));
}

RankingConfig RankingConfig::load(const std::filesystem::path& path)
{
    auto j = config::load_toml(path);
    RankingConfig c;
    if (j.contains("bm25")) {
        c.k1 = j["bm25"].value("k1", c.k1);
        c.b = j["bm25"].value("b", c.b);
    }
    if (j.contains("boosts")) {
        for (auto field : kg::kAllIndexFields) {
            c.boosts[field] = j["boosts"].value(std::string(kg::to_string(field)), c.boosts[field]);
        }
    }
    if (j.contains("quality")) c.quality_lambda = j["quality"].value("lambda", c.quality_lambda);
    if (j.contains("query")) {
        c.default_k = j["query"].value("default_k", c.default_k);
        c.rarity_floor = j["query"].value("rarity_floor", c.rarity_floor);
    }
    if (c.k1 < 0.0 || c.b < 0.0 || c.b > 1.0) throw Error(path.string() + ": bm25 k1 must be >= 0 and b in [0,1]");
    for (const auto& [field, boost] : c.boosts) {
        if (!(boost >= 0.0) || !std::isfinite(boost)) throw Error(path.string() + ": boosts must be finite and >= 0");
    }
    if (!(c.quality_lambda >= 0.0) || !std::isfinite(c.quality_lambda)) throw Error(path.string() + ": bad lambda");
    if (c.default_k < 1) throw Error(path.string() + ": default_k must be >= 1");
    return c;
}

std::map<std::string, double> token_weights(const std::vector<WeightedTerm>& terms)
{
    std::map<std::string, double> out;
    for (const auto& t : terms) {
        for (const auto& token : text::match_tokens(t.term)) {
            auto [it, fresh] = out.emplace(token, t.weight);
            if (!fresh) it->second = std::max(it->second, t.weight);
        }
    }
    return out;
}

std::vector<ScoredCandidate> score_candidates(const std::vector<WeightedTerm>& keywords, const kg::KnowledgeGraph& graph,
                                              const RankingConfig& config)
{
    const auto& index = graph.index();
    auto weights = token_weights(keywords);
    PairMap pairs_of(graph);

    std::set<PairKey> candidates;
    auto add_variation = [&](const EntityId& v) {
        auto libs = pairs_of.libraries_of.find(v);
        if (libs == pairs_of.libraries_of.end()) return;
        for (const auto& l : libs->second) candidates.insert({v, l});
    };
    for (const auto& [token, weight] : weights) {
        if (weight <= 0.0) continue;
        for (const auto& doc : index.matching_documents({token})) {
            if (graph.variations().count(doc.entity) != 0) {
                add_variation(doc.entity);
            } else if (auto lib = graph.libraries().find(doc.entity); lib != graph.libraries().end()) {
                for (const auto& v : lib->second.supported_variation_ids) candidates.insert({v, doc.entity});
            } else if (auto vs = pairs_of.variations_of.find(doc.entity); vs != pairs_of.variations_of.end()) {
                for (const auto& v : vs->second) add_variation(v);
            }
        }
    }

    std::vector<ScoredCandidate> out;
    for (const auto& pair : candidates) {
        const auto& v = graph.variations().at(pair.variation);
        ScoredCandidate c;
        c.variation_id = pair.variation;
        c.library_id = pair.library;
        std::set<kg::EvidenceRef> evidence;
        for (auto field : kg::kAllIndexFields) {
            auto docs = pair_documents(field, v, pair.library);
            double partial = 0.0;
            for (const auto& [token, weight] : weights) {
                std::vector<std::string> needle{token};
                std::size_t df = 0;
                bool df_known = false;
                for (const auto& doc : docs) {
                    auto tf = index.term_frequency(doc, needle);
                    if (tf == 0) continue;
                    if (!df_known) {
                        df = index.document_frequency(field, needle);
                        df_known = true;
                    }
                    partial += weight * bm25(tf, df, index.document_count(field),
                                             static_cast<double>(index.document_length(doc)),
                                             index.average_length(field), config.k1, config.b);
                    collect_evidence(graph, doc, v, pair.library, evidence);
                }
            }
            c.field_breakdown[std::string(kg::to_string(field))] = config.boosts.at(field) * partial;
        }
        for (auto field : kg::kAllIndexFields) c.relevance += c.field_breakdown.at(std::string(kg::to_string(field)));
        if (c.relevance <= 0.0) continue;
        c.evidence.assign(evidence.begin(), evidence.end());
        out.push_back(std::move(c));
    }
    return out;
}

double quality_bonus(const kg::KnowledgeGraph& graph, const EntityId& variation_id, const EntityId& library_id,
                     const std::map<std::string, double>& weights)
{
    double num = 0.0;
    double den = 0.0;
    for (const auto& [attribute, weight] : weights) {
        if (weight <= 0.0) continue;
        den += weight;
        auto q = graph.quality().find(kg::ids::quality(variation_id, library_id, attribute));
        if (q != graph.quality().end()) num += weight * q->second.score;
    }
    return den > 0.0 ? num / den : 0.0;
}

bool ranks_before(const kg::KnowledgeGraph& graph, const ScoredCandidate& a, const ScoredCandidate& b)
{
    if (a.final_score != b.final_score) return a.final_score > b.final_score;
    const auto& va = graph.variations().at(a.variation_id).name;
    const auto& vb = graph.variations().at(b.variation_id).name;
    if (va != vb) return va < vb;
    const auto& la = graph.libraries().at(a.library_id).distribution_name;
    const auto& lb = graph.libraries().at(b.library_id).distribution_name;
    if (la != lb) return la < lb;
    if (a.variation_id != b.variation_id) return a.variation_id < b.variation_id;
    return a.library_id < b.library_id;
}

void check_query(const IntentQuery& query)
{
    if (query.k < 1) throw Error("k must be at least 1, got " + std::to_string(query.k));
    for (const auto& [attribute, weight] : query.quality_weights) {
        if (!std::isfinite(weight) || weight < 0.0) {
            throw Error("quality weight for '" + attribute + "' must be finite and >= 0");
        }
    }
}

std::vector<ScoredCandidate> rank(const std::vector<WeightedTerm>& keywords, const std::set<std::string>& required_features,
                                  const std::map<std::string, double>& quality_weights, int k,
                                  const kg::KnowledgeGraph& graph, const RankingConfig& config)
{
    check_query({"", k, required_features, quality_weights});
    std::set<EntityId> required;
    for (const auto& phrase : required_features) required.insert(kg::ids::feature(phrase));

    std::vector<ScoredCandidate> kept;
    for (auto& c : score_candidates(keywords, graph, config)) {
        const auto& features = graph.variations().at(c.variation_id).feature_ids;
        if (!std::includes(features.begin(), features.end(), required.begin(), required.end())) continue;
        c.quality_bonus = quality_bonus(graph, c.variation_id, c.library_id, quality_weights);
        c.final_score = c.relevance * (1.0 + config.quality_lambda * c.quality_bonus);
        kept.push_back(std::move(c));
    }
    std::sort(kept.begin(), kept.end(),
              [&](const ScoredCandidate& a, const ScoredCandidate& b) { return ranks_before(graph, a, b); });
    if (kept.size() > static_cast<std::size_t>(k)) kept.resize(static_cast<std::size_t>(k));
    return kept;
}

Recommendation recommend(const IntentQuery& query, const kg::KnowledgeGraph& graph, const IntentResources& resources,
                         const RankingConfig& config)
{
    check_query(query);
    const auto& index = graph.index();
    Recommendation out;
    out.keywords = interpret_intent(
        query.text, resources, [&](const std::string& token) { return index.document_frequency({token}); },
        config.rarity_floor);
    out.results = rank(out.keywords.enriched, query.required_features, query.quality_weights, query.k, graph, config);
    return out;
}

nlohmann::json to_json(const ScoredCandidate& c, const kg::KnowledgeGraph& graph)
{
    const auto& v = graph.variations().at(c.variation_id);
    auto base = graph.base_models().find(v.base_id);
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : c.evidence) {
        evidence.push_back({{"source_url", e.source_url}, {"fragment", e.fragment},
                            {"retrieved_at", format_timestamp(e.retrieved_at)}});
    }
    return {
        {"variation_id", c.variation_id.str()},
        {"variation", v.name},
        {"base", base == graph.base_models().end() ? "" : base->second.name},
        {"library_id", c.library_id.str()},
        {"library", graph.libraries().at(c.library_id).distribution_name},
        {"relevance", c.relevance},
        {"field_breakdown", c.field_breakdown},
        {"quality_bonus", c.quality_bonus},
        {"final_score", c.final_score},
        {"evidence", evidence},
    };
}

nlohmann::json to_json(const KeywordSet& keywords)
{
    nlohmann::json enriched = nlohmann::json::array();
    for (const auto& t : keywords.enriched) {
        enriched.push_back({{"term", t.term}, {"weight", t.weight}, {"origin", to_string(t.origin)}});
    }
    return {{"raw", keywords.raw}, {"pruned", keywords.pruned}, {"enriched", enriched}};
}

nlohmann::json to_json(const Recommendation& recommendation, const kg::KnowledgeGraph& graph)
{
    nlohmann::json results = nlohmann::json::array();
    for (std::size_t i = 0; i < recommendation.results.size(); ++i) {
        auto item = to_json(recommendation.results[i], graph);
        item["rank"] = i + 1;
        results.push_back(std::move(item));
    }
    return {{"keywords", to_json(recommendation.keywords)}, {"results", results}};
}

}  // namespace modelselect::inference
