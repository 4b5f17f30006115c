// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <algorithm>
#include <cctype>

#include "modelselect/common/config.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/extract/extract.hpp"

namespace modelselect::extract {

namespace {

const std::vector<std::string> kLabelOptions = {"Model", "Feature", "Neither"};

bool sentence_end(std::string_view text, std::size_t i)
{
    char c = text[i];
    return (c == '.' || c == '?' || c == '!') &&
           (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])) != 0);
}

// Preference between two bases matched equally well.
bool better_base(const std::string& candidate, const std::string& incumbent)
{
    if (candidate.size() != incumbent.size()) return candidate.size() > incumbent.size();
    return candidate < incumbent;
}

std::vector<std::string> base_terms(const BaseEntry& base)
{
    std::vector<std::string> terms{base.name};
    terms.insert(terms.end(), base.aliases.begin(), base.aliases.end());
    return terms;
}

// First sentence whose tokens contain `needle`; the whole text otherwise.
std::string sentence_naming(std::string_view text, const std::vector<std::string>& needle)
{
    std::size_t start = 0;
    while (start < text.size()) {
        auto sentence = sentence_around(text, start);
        if (text::contains_subsequence(text::match_tokens(sentence), needle)) return sentence;
        std::size_t next = start;
        while (next < text.size() && !sentence_end(text, next)) ++next;
        start = next + 1;
    }
    return text::trim(text);
}

}  // namespace

std::string_view to_string(PhraseLabel label) noexcept
{
    switch (label) {
    case PhraseLabel::Model: return "Model";
    case PhraseLabel::Feature: return "Feature";
    case PhraseLabel::Neither: return "Neither";
    }
    return "Neither";
}

std::string sentence_around(std::string_view text, std::size_t at)
{
    if (text.empty()) return {};
    at = std::min(at, text.size() - 1);
    std::size_t begin = 0;
    for (std::size_t i = at; i > 0; --i) {
        if (sentence_end(text, i - 1)) {
            begin = i;
            break;
        }
    }
    std::size_t end = text.size();
    for (std::size_t i = at; i < text.size(); ++i) {
        if (sentence_end(text, i)) {
            end = i + 1;
            break;
        }
    }
    return text::trim(text.substr(begin, end - begin));
}

LabeledCandidate label_and_define(const NounPhraseCandidate& candidate, const DocumentChunk& context,
                                  provider::Backend& backend, int votes, Timestamp retrieved_at)
{
    if (candidate.end > context.text.size() || candidate.begin >= candidate.end) {
        throw Error("candidate '" + candidate.phrase + "' does not lie in its context chunk");
    }
    LabeledCandidate out;
    out.candidate = candidate;
    auto result = provider::label({provider::TaskKind::PhraseLabel, context.text, candidate.phrase, kLabelOptions},
                                  backend, votes);
    out.confidence = result.confidence;
    out.label = result.answer == "Model" ? PhraseLabel::Model
                : result.answer == "Feature" ? PhraseLabel::Feature
                                             : PhraseLabel::Neither;
    if (out.label == PhraseLabel::Model) {
        auto definition =
            provider::label({provider::TaskKind::Definition, context.text, candidate.phrase, {}}, backend, votes);
        out.definition = definition.answer;
    }
    out.evidence = {context.source_url, sentence_around(context.text, candidate.begin), retrieved_at};
    return out;
}

std::vector<FeatureLink> map_model_features(const std::vector<DocumentChunk>& chunks,
                                            const std::vector<LabeledCandidate>& labeled, Timestamp retrieved_at)
{
    std::map<std::string, std::vector<std::string>> models;
    std::map<std::string, std::vector<std::string>> features;
    for (const auto& l : labeled) {
        if (l.label == PhraseLabel::Model) models.emplace(l.candidate.phrase, text::match_tokens(l.candidate.phrase));
        if (l.label == PhraseLabel::Feature) features.emplace(l.candidate.phrase, text::match_tokens(l.candidate.phrase));
    }
    std::map<std::pair<std::string, std::string>, FeatureLink> links;
    for (const auto& chunk : chunks) {
        auto tokens = text::match_tokens(chunk.text);
        std::vector<const std::string*> present_features;
        for (const auto& [phrase, needle] : features) {
            if (text::contains_subsequence(tokens, needle)) present_features.push_back(&phrase);
        }
        if (present_features.empty()) continue;
        for (const auto& [model, needle] : models) {
            if (!text::contains_subsequence(tokens, needle)) continue;
            for (const auto* feature : present_features) {
                if (*feature == model) continue;
                auto& link = links[{model, *feature}];
                link.variation_phrase = model;
                link.feature_phrase = *feature;
                ++link.weight;
                link.evidence.push_back({chunk.source_url, chunk.text, retrieved_at});
            }
        }
    }
    std::vector<FeatureLink> out;
    for (auto& [key, link] : links) out.push_back(std::move(link));
    return out;
}

const BaseEntry* BaseLexicon::find(std::string_view name) const
{
    for (const auto& b : bases) {
        if (text::iequals(b.name, name)) return &b;
    }
    return nullptr;
}

BaseLexicon BaseLexicon::from_json(const nlohmann::json& j)
{
    BaseLexicon lex;
    lex.fuzzy_threshold = j.value("fuzzy_threshold", lex.fuzzy_threshold);
    if (j.contains("base")) {
        for (const auto& b : j.at("base")) {
            BaseEntry e;
            e.name = b.at("name").get<std::string>();
            e.definition = b.value("definition", std::string());
            if (b.contains("aliases")) e.aliases = b.at("aliases").get<std::vector<std::string>>();
            lex.bases.push_back(std::move(e));
        }
    }
    if (lex.fuzzy_threshold < 0.0 || lex.fuzzy_threshold > 1.0) throw Error("base lexicon: fuzzy_threshold outside [0,1]");
    if (lex.find(kFallback) == nullptr) throw Error("base lexicon must contain the Miscellaneous base");
    return lex;
}

BaseLexicon BaseLexicon::load(const std::filesystem::path& path) { return from_json(config::load_toml(path)); }

std::map<std::string, std::string> cluster_variations(const std::vector<std::string>& variation_phrases,
                                                      const BaseLexicon& lexicon, double fuzzy_threshold)
{
    if (lexicon.find(BaseLexicon::kFallback) == nullptr) throw Error("base lexicon lacks the Miscellaneous base");
    std::map<std::string, std::string> out;
    for (const auto& phrase : variation_phrases) {
        auto tokens = text::match_tokens(phrase);
        auto normalized = text::normalize_phrase(phrase);

        std::optional<std::string> best;
        std::pair<std::size_t, std::size_t> best_len{0, 0};  // (tokens, characters) of the matched term
        for (const auto& base : lexicon.bases) {
            for (const auto& term : base_terms(base)) {
                auto needle = text::match_tokens(term);
                if (!text::contains_subsequence(tokens, needle)) continue;
                std::pair<std::size_t, std::size_t> len{needle.size(), text::join(needle, " ").size()};
                if (!best || len > best_len || (len == best_len && better_base(base.name, *best))) {
                    best = base.name;
                    best_len = len;
                }
            }
        }
        if (!best) {
            double best_sim = -1.0;
            for (const auto& base : lexicon.bases) {
                for (const auto& term : base_terms(base)) {
                    double sim = text::edit_similarity(normalized, text::normalize_phrase(term));
                    if (sim < fuzzy_threshold) continue;
                    if (!best || sim > best_sim || (sim == best_sim && better_base(base.name, *best))) {
                        best = base.name;
                        best_sim = sim;
                    }
                }
            }
        }
        out[phrase] = best ? *best : std::string(BaseLexicon::kFallback);
    }
    return out;
}

bool TwoWayIndex::is_transpose() const
{
    std::map<kg::EntityId, std::set<kg::EntityId>> flipped;
    for (const auto& [lib, vars] : library_to_variations) {
        for (const auto& v : vars) flipped[v].insert(lib);
    }
    auto strip = [](std::map<kg::EntityId, std::set<kg::EntityId>> m) {
        std::erase_if(m, [](const auto& kv) { return kv.second.empty(); });
        return m;
    };
    return strip(flipped) == strip(variation_to_libraries);
}

TwoWayIndex build_two_way_index(const kg::KnowledgeGraph& graph)
{
    TwoWayIndex index;
    for (const auto& [key, edge] : graph.edges()) {
        if (key.kind != kg::EdgeKind::LibraryVariation) continue;
        index.library_to_variations[key.from].insert(key.to);
        index.variation_to_libraries[key.to].insert(key.from);
    }
    return index;
}

std::string two_way_index_jsonl(const kg::KnowledgeGraph& graph, const TwoWayIndex& index)
{
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
    for (const auto& [lib_id, vars] : index.library_to_variations) {
        auto lib = graph.libraries().find(lib_id);
        std::vector<std::string> names;
        for (const auto& v : vars) {
            auto var = graph.variations().find(v);
            names.push_back(var == graph.variations().end() ? v.str() : var->second.name);
        }
        std::sort(names.begin(), names.end());
        rows.emplace_back(lib == graph.libraries().end() ? lib_id.str() : lib->second.distribution_name, names);
    }
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& [lib, names] : rows) {
        out += nlohmann::json{{"library", lib}, {"variations", names}}.dump();
        out.push_back('\n');
    }
    return out;
}

ExtractionResult extract_models(const std::vector<LibraryPages>& libraries, provider::Backend& backend,
                                const ExtractionSettings& settings, Timestamp retrieved_at)
{
    ExtractionResult result;
    std::vector<DocumentChunk> all_chunks;
    std::map<kg::EntityId, std::vector<DocumentChunk>> chunks_by_library;
    std::map<std::string, std::size_t> label_of;  // phrase -> index into result.labeled

    for (const auto& lib : libraries) {
        auto& mine = chunks_by_library[lib.library_id];
        for (const auto& [url, page] : lib.pages) {
            for (auto& chunk : segment(page, lib.library_id, url, settings.chunking)) {
                for (const auto& candidate : extract_noun_phrases(chunk, settings.chunking)) {
                    if (label_of.count(candidate.phrase) != 0) continue;
                    label_of[candidate.phrase] = result.labeled.size();
                    result.labeled.push_back(
                        label_and_define(candidate, chunk, backend, settings.votes, retrieved_at));
                }
                mine.push_back(chunk);
                all_chunks.push_back(std::move(chunk));
            }
        }
    }

    std::vector<std::string> model_phrases;
    for (const auto& l : result.labeled) {
        if (l.label == PhraseLabel::Model) model_phrases.push_back(l.candidate.phrase);
    }
    result.clusters = cluster_variations(model_phrases, settings.lexicon, settings.lexicon.fuzzy_threshold);
    result.links = map_model_features(all_chunks, result.labeled, retrieved_at);

    auto& batch = result.batch;
    std::set<std::string> bases_used;
    std::map<std::string, kg::EntityId> variation_ids;
    for (const auto& l : result.labeled) {
        if (l.label == PhraseLabel::Feature) {
            batch.entities.push_back(kg::Feature{{}, l.candidate.phrase, std::nullopt});
        }
        if (l.label != PhraseLabel::Model) continue;
        const auto& base_name = result.clusters.at(l.candidate.phrase);
        bases_used.insert(base_name);
        kg::ModelVariation v;
        v.name = text::title_case(l.candidate.phrase);
        v.base_id = kg::ids::base_model(base_name);
        v.definition = l.definition.value_or("");
        v.evidence = {l.evidence};
        v.id = kg::ids::variation(v.base_id, v.name);
        variation_ids[l.candidate.phrase] = v.id;
        batch.entities.push_back(std::move(v));
    }
    for (const auto& name : bases_used) {
        const auto* entry = settings.lexicon.find(name);
        std::set<std::string> aliases(entry->aliases.begin(), entry->aliases.end());
        batch.entities.insert(batch.entities.begin(), kg::BaseModel{{}, entry->name, entry->definition, aliases});
    }
    for (const auto& link : result.links) {
        batch.edges.push_back({kg::EdgeKind::VariationFeature, variation_ids.at(link.variation_phrase),
                               kg::ids::feature(link.feature_phrase), link.weight, link.evidence});
    }
    for (const auto& [lib_id, chunks] : chunks_by_library) {
        std::map<std::string, kg::EvidenceRef> found;
        for (const auto& chunk : chunks) {
            auto tokens = text::match_tokens(chunk.text);
            for (const auto& [phrase, id] : variation_ids) {
                auto needle = text::match_tokens(phrase);
                if (found.count(phrase) != 0 || !text::contains_subsequence(tokens, needle)) continue;
                found[phrase] = {chunk.source_url, sentence_naming(chunk.text, needle), retrieved_at};
            }
        }
        for (const auto& [phrase, evidence] : found) {
            batch.edges.push_back({kg::EdgeKind::LibraryVariation, lib_id, variation_ids.at(phrase), 1, {evidence}});
        }
    }
    return result;
}

}  // namespace modelselect::extract
