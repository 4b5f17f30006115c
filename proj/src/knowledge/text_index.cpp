// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/knowledge/text_index.hpp"

#include <algorithm>

#include "modelselect/common/text.hpp"

namespace modelselect::kg {

std::string_view to_string(IndexField field) noexcept
{
    switch (field) {
    case IndexField::VariationName: return "variation_name";
    case IndexField::BaseName: return "base_names";
    case IndexField::Definition: return "definitions";
    case IndexField::FeaturePhrase: return "feature_phrases";
    case IndexField::LibraryText: return "library_text";
    }
    return "unknown";
}

void TextIndex::erase(const DocKey& key)
{
    auto it = documents_.find(key);
    if (it == documents_.end()) {
        return;
    }
    auto stats = field_stats_.find(key.field);
    stats->second.total_length -= it->second.length;
    if (--stats->second.documents == 0) {
        field_stats_.erase(stats);
    }
    for (const auto& value : it->second.values) {
        for (const auto& token : text::match_tokens(value)) {
            auto posting = postings_.find(token);
            if (posting == postings_.end()) {
                continue;
            }
            posting->second.erase(key);
            if (posting->second.empty()) {
                postings_.erase(posting);
            }
        }
    }
    documents_.erase(it);
}

void TextIndex::put(IndexField field, const EntityId& entity, const std::vector<std::string>& values)
{
    DocKey key{field, entity};
    erase(key);

    Document doc;
    std::uint32_t position = 0;
    std::map<std::string, std::vector<std::uint32_t>> positions;
    for (const auto& value : values) {
        auto tokens = text::match_tokens(value);
        if (tokens.empty()) {
            continue;
        }
        if (!doc.values.empty()) {
            ++position;  // gap between values
        }
        for (auto& token : tokens) {
            positions[token].push_back(position++);
            ++doc.length;
        }
        doc.values.push_back(value);
    }
    if (doc.length == 0) {
        return;
    }
    for (auto& [token, pos] : positions) {
        postings_[token][key] = std::move(pos);
    }
    auto& stats = field_stats_[field];
    stats.total_length += doc.length;
    ++stats.documents;
    documents_.emplace(std::move(key), std::move(doc));
}

std::size_t TextIndex::count_in(const std::map<DocKey, std::vector<std::uint32_t>>& first_postings,
                                const DocKey& doc, const std::vector<std::string>& phrase) const
{
    auto first = first_postings.find(doc);
    if (first == first_postings.end()) {
        return 0;
    }
    std::vector<const std::vector<std::uint32_t>*> rest;
    for (std::size_t i = 1; i < phrase.size(); ++i) {
        auto posting = postings_.find(phrase[i]);
        if (posting == postings_.end()) {
            return 0;
        }
        auto in_doc = posting->second.find(doc);
        if (in_doc == posting->second.end()) {
            return 0;
        }
        rest.push_back(&in_doc->second);
    }
    std::size_t count = 0;
    for (auto start : first->second) {
        bool match = true;
        for (std::size_t i = 0; i < rest.size() && match; ++i) {
            match = std::binary_search(rest[i]->begin(), rest[i]->end(), start + static_cast<std::uint32_t>(i + 1));
        }
        if (match) {
            ++count;
        }
    }
    return count;
}

std::size_t TextIndex::term_frequency(const DocKey& doc, const std::vector<std::string>& phrase) const
{
    if (phrase.empty()) {
        return 0;
    }
    auto posting = postings_.find(phrase.front());
    if (posting == postings_.end()) {
        return 0;
    }
    return count_in(posting->second, doc, phrase);
}

std::vector<DocKey> TextIndex::matching_documents(const std::vector<std::string>& phrase) const
{
    std::vector<DocKey> docs;
    if (phrase.empty()) {
        return docs;
    }
    auto posting = postings_.find(phrase.front());
    if (posting == postings_.end()) {
        return docs;
    }
    for (const auto& [doc, positions] : posting->second) {
        if (count_in(posting->second, doc, phrase) > 0) {
            docs.push_back(doc);
        }
    }
    return docs;
}

std::size_t TextIndex::document_frequency(IndexField field, const std::vector<std::string>& phrase) const
{
    auto docs = matching_documents(phrase);
    return static_cast<std::size_t>(
        std::count_if(docs.begin(), docs.end(), [field](const DocKey& d) { return d.field == field; }));
}

std::size_t TextIndex::document_frequency(const std::vector<std::string>& phrase) const
{
    return matching_documents(phrase).size();
}

std::size_t TextIndex::document_count(IndexField field) const
{
    auto it = field_stats_.find(field);
    return it == field_stats_.end() ? 0 : it->second.documents;
}

std::size_t TextIndex::document_length(const DocKey& doc) const
{
    auto it = documents_.find(doc);
    return it == documents_.end() ? 0 : it->second.length;
}

double TextIndex::average_length(IndexField field) const
{
    auto it = field_stats_.find(field);
    if (it == field_stats_.end()) {
        return 0.0;
    }
    return static_cast<double>(it->second.total_length) / static_cast<double>(it->second.documents);
}

}  // namespace modelselect::kg
