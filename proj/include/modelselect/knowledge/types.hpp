// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modelselect/common/time.hpp"

namespace modelselect::kg {

/// Opaque, content-derived entity identifier.
class EntityId {
  public:
    EntityId() = default;
    explicit EntityId(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend auto operator<=>(const EntityId&, const EntityId&) = default;

  private:
    std::string value_;
};

/// Source URL plus the verbatim excerpt that justifies a fact.
struct EvidenceRef {
    std::string source_url;
    std::string fragment;
    Timestamp retrieved_at{};

    friend auto operator<=>(const EvidenceRef&, const EvidenceRef&) = default;
};

struct BaseModel {
    EntityId id;
    std::string name;
    std::string definition;
    std::set<std::string> aliases;

    friend bool operator==(const BaseModel&, const BaseModel&) = default;
};

struct ModelVariation {
    EntityId id;
    std::string name;
    EntityId base_id;
    std::string definition;
    std::set<EntityId> feature_ids;
    std::vector<EvidenceRef> evidence;

    friend bool operator==(const ModelVariation&, const ModelVariation&) = default;
};

struct Feature {
    EntityId id;
    std::string phrase;
    std::optional<std::string> definition;

    friend bool operator==(const Feature&, const Feature&) = default;
};

struct Popularity {
    std::int64_t stars = 0;
    std::int64_t forks = 0;

    friend bool operator==(const Popularity&, const Popularity&) = default;
};

struct Library {
    EntityId id;
    std::string distribution_name;
    std::string summary;
    std::string homepage;
    std::vector<std::string> keywords;
    std::vector<std::string> classifiers;
    std::string version;
    bool ai_related = false;
    double ai_score = 0.0;
    std::set<EntityId> supported_variation_ids;
    std::set<EntityId> cve_ids;
    std::optional<Popularity> popularity;
    std::vector<EvidenceRef> evidence;

    friend bool operator==(const Library&, const Library&) = default;
};

struct Repository {
    EntityId id;
    std::string name;
    std::string url;
    std::string description;
    std::int64_t stars = 0;
    std::int64_t forks = 0;
    std::int64_t size_kb = 0;
    std::string language;
    std::int64_t contributors = 0;
    Timestamp created_at{};
    Timestamp updated_at{};
    std::vector<std::string> topics;
    std::vector<std::string> categories;
    std::set<std::string> dependency_names;

    friend bool operator==(const Repository&, const Repository&) = default;
};

struct QualityAggregate {
    EntityId id;
    EntityId variation_id;
    EntityId library_id;
    std::string attribute;
    double score = 0.0;
    std::int64_t review_count = 0;
    std::vector<EvidenceRef> evidence;

    friend bool operator==(const QualityAggregate&, const QualityAggregate&) = default;
};

struct CveRecord {
    EntityId id;  // external vulnerability identifier
    EntityId library_id;
    std::string affected_version_range;

    friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

enum class EdgeKind {
    BaseVariation,
    VariationFeature,
    LibraryVariation,
    LibraryCve,
    RepoLibrary,
};

std::string_view to_string(EdgeKind kind) noexcept;
std::optional<EdgeKind> edge_kind_from_string(std::string_view name) noexcept;

struct EdgeKey {
    EdgeKind kind{};
    EntityId from;
    EntityId to;

    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct Edge {
    EdgeKind kind{};
    EntityId from;
    EntityId to;
    std::int64_t weight = 1;
    std::vector<EvidenceRef> evidence;

    EdgeKey key() const { return {kind, from, to}; }

    friend bool operator==(const Edge&, const Edge&) = default;
};

using Entity = std::variant<BaseModel, ModelVariation, Feature, Library, Repository, QualityAggregate, CveRecord>;

/// The fixed list of product-quality characteristics used as aggregate attributes.
const std::vector<std::string>& quality_attribute_names();

// Content-derived identifiers. Independent ingestion runs that see the same
// canonical names converge on the same ids.
namespace ids {
EntityId base_model(std::string_view name);
EntityId variation(const EntityId& base_id, std::string_view name);
EntityId feature(std::string_view phrase);
EntityId library(std::string_view distribution_name);
EntityId repository(std::string_view url_or_name);
EntityId quality(const EntityId& variation_id, const EntityId& library_id, std::string_view attribute);
}  // namespace ids

/// PEP 503 normalization: lowercase, runs of [-_.] collapse to '-'.
std::string normalize_distribution_name(std::string_view name);

/// Fills an empty id from the entity's canonical content.
void assign_id(Entity& entity);

const EntityId& id_of(const Entity& entity);

}  // namespace modelselect::kg

template <>
struct std::hash<modelselect::kg::EntityId> {
    std::size_t operator()(const modelselect::kg::EntityId& id) const noexcept
    {
        return std::hash<std::string>{}(id.str());
    }
};
