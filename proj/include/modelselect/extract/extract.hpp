// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modelselect/common/time.hpp"
#include "modelselect/knowledge/graph.hpp"
#include "modelselect/provider/provider.hpp"

namespace modelselect::extract {

struct DocumentChunk {
    kg::EntityId library_id;
    std::string source_url;
    std::string text;
    int position = 0;

    friend bool operator==(const DocumentChunk&, const DocumentChunk&) = default;
};

/// Segmentation and part-of-speech lexicon (chunking.toml).
struct ChunkingConfig {
    std::size_t min_chunk_chars = 20;
    std::size_t nav_min_items = 3;
    std::size_t max_phrase_tokens = 8;
    std::set<std::string> closed_class;   // determiners, prepositions, pronouns, auxiliaries
    std::set<std::string> verbs;
    std::set<std::string> adjectives;
    std::vector<std::string> adjective_suffixes;
    std::set<std::string> noun_exceptions;  // suffix-looking words that stay nouns

    static ChunkingConfig from_json(const nlohmann::json& j);
    static ChunkingConfig load(const std::filesystem::path& path);
};

/// Drops fenced code and "A | B | C" navigation lines, splits on blank lines
/// and keeps paragraphs of at least min_chunk_chars characters.
std::vector<DocumentChunk> segment(std::string_view raw_page_text, const kg::EntityId& library_id,
                                   const std::string& source_url, const ChunkingConfig& config);

struct NounPhraseCandidate {
    std::string phrase;  // normalized
    std::string source_url;
    int position = 0;
    std::size_t begin = 0;  // byte span in the chunk text
    std::size_t end = 0;

    friend bool operator==(const NounPhraseCandidate&, const NounPhraseCandidate&) = default;
};

enum class Tag { Noun, Adjective, Break };

Tag tag_word(std::string_view lowered, const ChunkingConfig& config);

/// Maximal runs of adjectives and nouns ending in a noun, at most
/// max_phrase_tokens long (the head end is kept). Punctuation ends a run.
std::vector<NounPhraseCandidate> extract_noun_phrases(const DocumentChunk& chunk, const ChunkingConfig& config);

enum class PhraseLabel { Model, Feature, Neither };

std::string_view to_string(PhraseLabel label) noexcept;

struct LabeledCandidate {
    NounPhraseCandidate candidate;
    PhraseLabel label = PhraseLabel::Neither;
    double confidence = 0.0;
    std::optional<std::string> definition;
    kg::EvidenceRef evidence;
};

/// The sentence of `text` around byte offset `at`, trimmed.
std::string sentence_around(std::string_view text, std::size_t at);

LabeledCandidate label_and_define(const NounPhraseCandidate& candidate, const DocumentChunk& context,
                                  provider::Backend& backend, int votes, Timestamp retrieved_at);

struct FeatureLink {
    std::string variation_phrase;
    std::string feature_phrase;
    std::int64_t weight = 0;
    std::vector<kg::EvidenceRef> evidence;
};

/// One link per (model, feature) pair that shares a chunk; the weight counts
/// the shared chunks. Output is sorted by (variation, feature).
std::vector<FeatureLink> map_model_features(const std::vector<DocumentChunk>& chunks,
                                            const std::vector<LabeledCandidate>& labeled, Timestamp retrieved_at);

struct BaseEntry {
    std::string name;
    std::vector<std::string> aliases;
    std::string definition;
};

struct BaseLexicon {
    static constexpr std::string_view kFallback = "Miscellaneous";

    std::vector<BaseEntry> bases;
    double fuzzy_threshold = 0.85;

    const BaseEntry* find(std::string_view name) const;
    static BaseLexicon from_json(const nlohmann::json& j);
    static BaseLexicon load(const std::filesystem::path& path);
};

/// Variation phrase to base name: longest name/alias occurring as a token
/// subsequence, else best edit similarity at or above the threshold, else the
/// fallback base. Ties prefer the longer base name, then the smaller one.
std::map<std::string, std::string> cluster_variations(const std::vector<std::string>& variation_phrases,
                                                      const BaseLexicon& lexicon, double fuzzy_threshold);

struct TwoWayIndex {
    std::map<kg::EntityId, std::set<kg::EntityId>> library_to_variations;
    std::map<kg::EntityId, std::set<kg::EntityId>> variation_to_libraries;

    bool is_transpose() const;
};

TwoWayIndex build_two_way_index(const kg::KnowledgeGraph& graph);

/// One {"library", "variations"} line per library, both sorted by name.
std::string two_way_index_jsonl(const kg::KnowledgeGraph& graph, const TwoWayIndex& index);

struct LibraryPages {
    kg::EntityId library_id;
    std::vector<std::pair<std::string, std::string>> pages;  // (url, text)
};

struct ExtractionSettings {
    ChunkingConfig chunking;
    BaseLexicon lexicon;
    int votes = 3;
};

struct ExtractionResult {
    kg::Batch batch;
    std::vector<LabeledCandidate> labeled;
    std::vector<FeatureLink> links;
    std::map<std::string, std::string> clusters;
};

/// Whole documentation pipeline. Each distinct phrase is labelled once, in
/// the first chunk (library order, then page order) where it occurs. A library
/// supports every model phrase found in its own chunks.
ExtractionResult extract_models(const std::vector<LibraryPages>& libraries, provider::Backend& backend,
                                const ExtractionSettings& settings, Timestamp retrieved_at);

}  // namespace modelselect::extract
