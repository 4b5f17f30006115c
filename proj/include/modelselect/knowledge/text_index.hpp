// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "modelselect/knowledge/types.hpp"

namespace modelselect::kg {

enum class IndexField {
    VariationName,
    BaseName,
    Definition,
    FeaturePhrase,
    LibraryText,
};

inline constexpr IndexField kAllIndexFields[] = {IndexField::VariationName, IndexField::BaseName,
                                                 IndexField::Definition, IndexField::FeaturePhrase,
                                                 IndexField::LibraryText};

std::string_view to_string(IndexField field) noexcept;

struct DocKey {
    IndexField field{};
    EntityId entity;

    friend auto operator<=>(const DocKey&, const DocKey&) = default;
};

/// Positional inverted index over the graph's text fields. Terms are
/// match_tokens() output; a multi-valued document keeps a one-position gap
/// between values so phrases never straddle two values.
class TextIndex {
  public:
    /// Replaces the document; an empty value list (or one with no tokens) removes it.
    void put(IndexField field, const EntityId& entity, const std::vector<std::string>& values);

    /// Phrase occurrences of `phrase` (already match-tokenized) in the document.
    std::size_t term_frequency(const DocKey& doc, const std::vector<std::string>& phrase) const;

    std::size_t document_frequency(IndexField field, const std::vector<std::string>& phrase) const;

    /// Across every field.
    std::size_t document_frequency(const std::vector<std::string>& phrase) const;

    /// Documents containing the phrase, in key order.
    std::vector<DocKey> matching_documents(const std::vector<std::string>& phrase) const;

    std::size_t document_count(IndexField field) const;
    std::size_t document_length(const DocKey& doc) const;
    double average_length(IndexField field) const;

    std::size_t size() const noexcept { return documents_.size(); }

    friend bool operator==(const TextIndex&, const TextIndex&) = default;

  private:
    struct Document {
        std::uint32_t length = 0;
        std::vector<std::string> values;
        friend bool operator==(const Document&, const Document&) = default;
    };

    void erase(const DocKey& key);
    std::size_t count_in(const std::map<DocKey, std::vector<std::uint32_t>>& first_postings,
                         const DocKey& doc, const std::vector<std::string>& phrase) const;

    struct FieldStats {
        std::size_t documents = 0;
        std::uint64_t total_length = 0;
        friend bool operator==(const FieldStats&, const FieldStats&) = default;
    };

    std::map<DocKey, Document> documents_;
    std::map<std::string, std::map<DocKey, std::vector<std::uint32_t>>> postings_;
    std::map<IndexField, FieldStats> field_stats_;
};

}  // namespace modelselect::kg
