// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modelselect/knowledge/text_index.hpp"
#include "modelselect/knowledge/types.hpp"

namespace modelselect::kg {

/// A set of typed entities and edges submitted together. Entity reference
/// fields (base_id, feature_ids, supported_variation_ids, cve_ids,
/// CveRecord::library_id) are turned into implied edges; edges may point at
/// entities of the same batch.
struct Batch {
    std::vector<Entity> entities;
    std::vector<Edge> edges;

    bool empty() const noexcept { return entities.empty() && edges.empty(); }
};

struct ChangeCounts {
    std::size_t inserted = 0;
    std::size_t updated = 0;
    std::size_t rejected = 0;

    friend bool operator==(const ChangeCounts&, const ChangeCounts&) = default;
};

struct ChangeSummary {
    ChangeCounts entities;
    ChangeCounts edges;
    std::vector<std::string> diagnostics;

    std::size_t inserted() const noexcept { return entities.inserted + edges.inserted; }
    std::size_t updated() const noexcept { return entities.updated + edges.updated; }
    std::size_t rejected() const noexcept { return entities.rejected + edges.rejected; }
    bool unchanged() const noexcept { return inserted() == 0 && updated() == 0; }
};

struct Subgraph {
    std::vector<Entity> entities;  // root first, then BFS order
    std::vector<Edge> edges;       // every edge between returned entities, key order
};

/// Append/update-only knowledge graph with an embedded text index. All
/// mutation goes through upsert(); the index is rebuilt for touched entities
/// in the same call.
class KnowledgeGraph {
  public:
    ChangeSummary upsert(const Batch& batch);

    /// BFS over edges in both directions. Depth 0 returns only the root.
    Subgraph get_subgraph(const EntityId& root, std::size_t depth) const;

    bool contains(const EntityId& id) const;
    std::optional<Entity> find(const EntityId& id) const;

    const std::map<EntityId, BaseModel>& base_models() const noexcept { return base_models_; }
    const std::map<EntityId, ModelVariation>& variations() const noexcept { return variations_; }
    const std::map<EntityId, Feature>& features() const noexcept { return features_; }
    const std::map<EntityId, Library>& libraries() const noexcept { return libraries_; }
    const std::map<EntityId, Repository>& repositories() const noexcept { return repositories_; }
    const std::map<EntityId, QualityAggregate>& quality() const noexcept { return quality_; }
    const std::map<EntityId, CveRecord>& cves() const noexcept { return cves_; }
    const std::map<EdgeKey, Edge>& edges() const noexcept { return edges_; }
    const TextIndex& index() const noexcept { return index_; }

    const Library* library_by_name(std::string_view distribution_name) const;
    const BaseModel* base_by_name(std::string_view name) const;

    std::size_t entity_count() const noexcept;

    /// Builds a graph from raw tables without merge semantics (used by snapshot
    /// loading). The text index is rebuilt from the tables.
    static KnowledgeGraph from_tables(std::vector<Entity> entities, std::vector<Edge> edges);

    /// Index derived from the entity tables alone; validate() compares it with index().
    TextIndex rebuild_index() const;

    /// Tables and edges equal; the index is derived and not compared.
    friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b);

  private:
    void put_entity(const Entity& entity);
    void reindex(const EntityId& id);
    void index_entity(TextIndex& index, const EntityId& id) const;

    std::map<EntityId, BaseModel> base_models_;
    std::map<EntityId, ModelVariation> variations_;
    std::map<EntityId, Feature> features_;
    std::map<EntityId, Library> libraries_;
    std::map<EntityId, Repository> repositories_;
    std::map<EntityId, QualityAggregate> quality_;
    std::map<EntityId, CveRecord> cves_;
    std::map<EdgeKey, Edge> edges_;
    TextIndex index_;
};

/// Single-writer, multi-reader holder. Writers copy the current graph, apply
/// the batch and publish the result; readers keep whatever snapshot they took.
class GraphStore {
  public:
    GraphStore() : current_(std::make_shared<const KnowledgeGraph>()) {}
    explicit GraphStore(KnowledgeGraph graph) : current_(std::make_shared<const KnowledgeGraph>(std::move(graph))) {}

    std::shared_ptr<const KnowledgeGraph> snapshot() const;
    ChangeSummary apply(const Batch& batch);
    void replace(KnowledgeGraph graph);

  private:
    mutable std::mutex read_mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const KnowledgeGraph> current_;
};

struct Violation {
    EntityId entity;
    std::string rule;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every type invariant, referential-integrity and index-consistency rule.
/// Empty iff the graph is sound.
std::vector<Violation> validate(const KnowledgeGraph& graph);

}  // namespace modelselect::kg
