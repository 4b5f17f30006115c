// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modelselect/common/error.hpp"
#include "modelselect/extract/extract.hpp"
#include "modelselect/knowledge/graph.hpp"

namespace modelselect::inference {

/// Nothing usable is left of an intent paragraph.
class UnintelligibleIntent : public Error {
  public:
    using Error::Error;
};

struct Synonym {
    std::string expansion;
    double weight = 0.5;
};

/// term -> expansions; synonyms.tsv lines are term<TAB>expansion[<TAB>weight].
using SynonymTable = std::map<std::string, std::vector<Synonym>>;

SynonymTable parse_synonyms(std::string_view tsv, double default_weight = 0.5);

struct IntentResources {
    std::set<std::string> stoplist;
    SynonymTable synonyms;
    extract::ChunkingConfig chunking;

    /// stoplist.txt, synonyms.tsv and chunking.toml from one directory.
    static IntentResources load(const std::filesystem::path& resource_dir);
};

enum class TermOrigin { User, Synonym };

std::string_view to_string(TermOrigin origin) noexcept;

struct WeightedTerm {
    std::string term;
    double weight = 1.0;
    TermOrigin origin = TermOrigin::User;

    friend bool operator==(const WeightedTerm&, const WeightedTerm&) = default;
};

struct KeywordSet {
    std::vector<std::string> raw;     // noun phrases, then leftover content words
    std::vector<std::string> pruned;  // raw minus stoplist minus rare terms
    std::vector<WeightedTerm> enriched;
};

/// Document frequency of a term's tokens; the rarity rule uses the largest.
using TokenFrequency = std::function<std::size_t(const std::string& token)>;

/// Raw terms are the noun phrases of the text plus content words outside
/// them. A term is pruned when it is a stopword or, given `frequency`, none
/// of its tokens reaches `rarity_floor` documents. Synonyms are looked up for
/// every non-stopword term (rare ones included) and never outweigh a user
/// term. Throws UnintelligibleIntent when the enriched list is empty.
KeywordSet interpret_intent(std::string_view text, const IntentResources& resources,
                            const TokenFrequency& frequency = {}, std::size_t rarity_floor = 0);

struct RankingConfig {
    double k1 = 1.2;
    double b = 0.75;
    std::map<kg::IndexField, double> boosts = {{kg::IndexField::VariationName, 3.0},
                                               {kg::IndexField::BaseName, 2.0},
                                               {kg::IndexField::Definition, 1.5},
                                               {kg::IndexField::FeaturePhrase, 1.5},
                                               {kg::IndexField::LibraryText, 1.0}};
    double quality_lambda = 0.25;
    int default_k = 10;
    std::size_t rarity_floor = 1;

    static RankingConfig load(const std::filesystem::path& path);
};

struct IntentQuery {
    std::string text;
    int k = 10;
    std::set<std::string> required_features;
    std::map<std::string, double> quality_weights;
};

struct ScoredCandidate {
    kg::EntityId variation_id;
    kg::EntityId library_id;
    double relevance = 0.0;
    std::map<std::string, double> field_breakdown;  // boosted partial per field name
    double quality_bonus = 0.0;
    double final_score = 0.0;
    std::vector<kg::EvidenceRef> evidence;

    friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

/// Token -> weight, each term's tokens at the term weight, max on collision.
std::map<std::string, double> token_weights(const std::vector<WeightedTerm>& terms);

/// BM25 term score; idf = ln(1 + (N - df + 0.5) / (df + 0.5)).
double bm25(std::size_t tf, std::size_t df, std::size_t documents, double length, double average_length, double k1,
            double b);

/// The documents that make up one (variation, library) pair per field:
/// variation name; base names; variation and base definitions; the
/// variation's feature phrases; the library text. Within a field the partial
/// is Σ over tokens (ascending) of Σ over documents (key order) of
/// weight·bm25; relevance sums the boosted partials in field order. Pairs
/// without any match are left out.
std::vector<ScoredCandidate> score_candidates(const std::vector<WeightedTerm>& keywords, const kg::KnowledgeGraph& graph,
                                              const RankingConfig& config);

/// Σ w·score over the pair's aggregates divided by Σ w; 0 without weights.
double quality_bonus(const kg::KnowledgeGraph& graph, const kg::EntityId& variation_id, const kg::EntityId& library_id,
                     const std::map<std::string, double>& weights);

/// Strict ranking order: final score descending, then variation name, library
/// name, variation id and library id ascending.
bool ranks_before(const kg::KnowledgeGraph& graph, const ScoredCandidate& a, const ScoredCandidate& b);

/// Filtering, bonus and top-k over already interpreted keywords.
std::vector<ScoredCandidate> rank(const std::vector<WeightedTerm>& keywords, const std::set<std::string>& required_features,
                                  const std::map<std::string, double>& quality_weights, int k,
                                  const kg::KnowledgeGraph& graph, const RankingConfig& config);

struct Recommendation {
    KeywordSet keywords;
    std::vector<ScoredCandidate> results;
};

/// Rare terms are judged against the graph's text index.
Recommendation recommend(const IntentQuery& query, const kg::KnowledgeGraph& graph, const IntentResources& resources,
                         const RankingConfig& config);

/// Validates k and the weights; throws Error on bad input.
void check_query(const IntentQuery& query);

nlohmann::json to_json(const ScoredCandidate& candidate, const kg::KnowledgeGraph& graph);
nlohmann::json to_json(const KeywordSet& keywords);

/// {"keywords": ..., "results": [...]}; the byte form every surface shares.
nlohmann::json to_json(const Recommendation& recommendation, const kg::KnowledgeGraph& graph);

}  // namespace modelselect::inference
