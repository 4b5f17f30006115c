// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/knowledge/graph.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "modelselect/common/error.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/knowledge/validation_rules.hpp"

namespace modelselect::kg {

namespace {

void merge_evidence(std::vector<EvidenceRef>& into, const std::vector<EvidenceRef>& extra)
{
    into.insert(into.end(), extra.begin(), extra.end());
    std::sort(into.begin(), into.end());
    into.erase(std::unique(into.begin(), into.end()), into.end());
}

std::string describe(const EdgeKey& key)
{
    return std::string(to_string(key.kind)) + " " + key.from.str() + " -> " + key.to.str();
}

// Ids present in the graph or among the accepted batch entities, per type.
struct Catalog {
    std::unordered_set<EntityId> bases, variations, features, libraries, repositories, cves;

    bool has(EdgeKind kind, const EntityId& from, const EntityId& to) const
    {
        switch (kind) {
        case EdgeKind::BaseVariation: return bases.count(from) != 0 && variations.count(to) != 0;
        case EdgeKind::VariationFeature: return variations.count(from) != 0 && features.count(to) != 0;
        case EdgeKind::LibraryVariation: return libraries.count(from) != 0 && variations.count(to) != 0;
        case EdgeKind::LibraryCve: return libraries.count(from) != 0 && cves.count(to) != 0;
        case EdgeKind::RepoLibrary: return repositories.count(from) != 0 && libraries.count(to) != 0;
        }
        return false;
    }
};

std::optional<std::string> missing_required_ref(const Entity& entity, const Catalog& catalog)
{
    if (const auto* v = std::get_if<ModelVariation>(&entity)) {
        if (catalog.bases.count(v->base_id) == 0) {
            return "base model " + v->base_id.str() + " does not resolve";
        }
    } else if (const auto* q = std::get_if<QualityAggregate>(&entity)) {
        if (catalog.variations.count(q->variation_id) == 0) {
            return "variation " + q->variation_id.str() + " does not resolve";
        }
        if (catalog.libraries.count(q->library_id) == 0) {
            return "library " + q->library_id.str() + " does not resolve";
        }
    } else if (const auto* c = std::get_if<CveRecord>(&entity)) {
        if (catalog.libraries.count(c->library_id) == 0) {
            return "library " + c->library_id.str() + " does not resolve";
        }
    }
    return std::nullopt;
}

void add_to_catalog(Catalog& catalog, const Entity& entity)
{
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BaseModel>) catalog.bases.insert(e.id);
            else if constexpr (std::is_same_v<T, ModelVariation>) catalog.variations.insert(e.id);
            else if constexpr (std::is_same_v<T, Feature>) catalog.features.insert(e.id);
            else if constexpr (std::is_same_v<T, Library>) catalog.libraries.insert(e.id);
            else if constexpr (std::is_same_v<T, Repository>) catalog.repositories.insert(e.id);
            else if constexpr (std::is_same_v<T, CveRecord>) catalog.cves.insert(e.id);
        },
        entity);
}

void remove_from_catalog(Catalog& catalog, const Entity& entity)
{
    const auto& id = id_of(entity);
    for (auto* set : {&catalog.bases, &catalog.variations, &catalog.features, &catalog.libraries,
                      &catalog.repositories, &catalog.cves}) {
        set->erase(id);
    }
}

// Scalar merge of an incoming entity into the stored one: incoming scalar state
// wins, reference sets are kept from storage (they are maintained through edges)
// and evidence lists are unioned.
template <typename T>
T merged(const T* stored, T incoming)
{
    if constexpr (std::is_same_v<T, ModelVariation>) {
        incoming.feature_ids.clear();
        if (stored != nullptr) {
            incoming.feature_ids = stored->feature_ids;
            merge_evidence(incoming.evidence, stored->evidence);
        } else {
            merge_evidence(incoming.evidence, {});
        }
    } else if constexpr (std::is_same_v<T, Library>) {
        incoming.supported_variation_ids.clear();
        incoming.cve_ids.clear();
        if (stored != nullptr) {
            incoming.supported_variation_ids = stored->supported_variation_ids;
            incoming.cve_ids = stored->cve_ids;
            merge_evidence(incoming.evidence, stored->evidence);
        } else {
            merge_evidence(incoming.evidence, {});
        }
    } else if constexpr (std::is_same_v<T, Repository>) {
        std::set<std::string> deps;
        for (const auto& name : incoming.dependency_names) {
            deps.insert(normalize_distribution_name(name));
        }
        if (stored != nullptr) {
            deps.insert(stored->dependency_names.begin(), stored->dependency_names.end());
        }
        incoming.dependency_names = std::move(deps);
    } else if constexpr (std::is_same_v<T, CveRecord>) {
        if (stored != nullptr) {
            incoming.library_id = stored->library_id;
        }
    } else if constexpr (std::is_same_v<T, QualityAggregate>) {
        merge_evidence(incoming.evidence, {});
    } else if constexpr (std::is_same_v<T, Feature>) {
        incoming.phrase = text::normalize_phrase(incoming.phrase);
    }
    return incoming;
}

}  // namespace

bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b)
{
    return a.base_models_ == b.base_models_ && a.variations_ == b.variations_ && a.features_ == b.features_ &&
           a.libraries_ == b.libraries_ && a.repositories_ == b.repositories_ && a.quality_ == b.quality_ &&
           a.cves_ == b.cves_ && a.edges_ == b.edges_;
}

bool KnowledgeGraph::contains(const EntityId& id) const { return find(id).has_value(); }

std::optional<Entity> KnowledgeGraph::find(const EntityId& id) const
{
    if (auto it = base_models_.find(id); it != base_models_.end()) return Entity{it->second};
    if (auto it = variations_.find(id); it != variations_.end()) return Entity{it->second};
    if (auto it = features_.find(id); it != features_.end()) return Entity{it->second};
    if (auto it = libraries_.find(id); it != libraries_.end()) return Entity{it->second};
    if (auto it = repositories_.find(id); it != repositories_.end()) return Entity{it->second};
    if (auto it = quality_.find(id); it != quality_.end()) return Entity{it->second};
    if (auto it = cves_.find(id); it != cves_.end()) return Entity{it->second};
    return std::nullopt;
}

const Library* KnowledgeGraph::library_by_name(std::string_view distribution_name) const
{
    auto it = libraries_.find(ids::library(distribution_name));
    return it == libraries_.end() ? nullptr : &it->second;
}

const BaseModel* KnowledgeGraph::base_by_name(std::string_view name) const
{
    auto it = base_models_.find(ids::base_model(name));
    return it == base_models_.end() ? nullptr : &it->second;
}

std::size_t KnowledgeGraph::entity_count() const noexcept
{
    return base_models_.size() + variations_.size() + features_.size() + libraries_.size() + repositories_.size() +
           quality_.size() + cves_.size();
}

void KnowledgeGraph::put_entity(const Entity& entity)
{
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BaseModel>) base_models_[e.id] = e;
            else if constexpr (std::is_same_v<T, ModelVariation>) variations_[e.id] = e;
            else if constexpr (std::is_same_v<T, Feature>) features_[e.id] = e;
            else if constexpr (std::is_same_v<T, Library>) libraries_[e.id] = e;
            else if constexpr (std::is_same_v<T, Repository>) repositories_[e.id] = e;
            else if constexpr (std::is_same_v<T, QualityAggregate>) quality_[e.id] = e;
            else if constexpr (std::is_same_v<T, CveRecord>) cves_[e.id] = e;
        },
        entity);
}

void KnowledgeGraph::index_entity(TextIndex& index, const EntityId& id) const
{
    if (auto it = variations_.find(id); it != variations_.end()) {
        index.put(IndexField::VariationName, id, {it->second.name});
        index.put(IndexField::Definition, id, {it->second.definition});
    } else if (auto base = base_models_.find(id); base != base_models_.end()) {
        std::vector<std::string> names{base->second.name};
        names.insert(names.end(), base->second.aliases.begin(), base->second.aliases.end());
        index.put(IndexField::BaseName, id, names);
        index.put(IndexField::Definition, id, {base->second.definition});
    } else if (auto feature = features_.find(id); feature != features_.end()) {
        index.put(IndexField::FeaturePhrase, id, {feature->second.phrase});
    } else if (auto lib = libraries_.find(id); lib != libraries_.end()) {
        std::vector<std::string> values{lib->second.distribution_name};
        values.insert(values.end(), lib->second.keywords.begin(), lib->second.keywords.end());
        values.push_back(lib->second.summary);
        index.put(IndexField::LibraryText, id, values);
    }
}

void KnowledgeGraph::reindex(const EntityId& id) { index_entity(index_, id); }

TextIndex KnowledgeGraph::rebuild_index() const
{
    TextIndex index;
    for (const auto& [id, _] : base_models_) index_entity(index, id);
    for (const auto& [id, _] : variations_) index_entity(index, id);
    for (const auto& [id, _] : features_) index_entity(index, id);
    for (const auto& [id, _] : libraries_) index_entity(index, id);
    return index;
}

KnowledgeGraph KnowledgeGraph::from_tables(std::vector<Entity> entities, std::vector<Edge> edges)
{
    KnowledgeGraph graph;
    for (const auto& entity : entities) {
        graph.put_entity(entity);
    }
    for (auto& edge : edges) {
        auto key = edge.key();
        graph.edges_[key] = std::move(edge);
    }
    graph.index_ = graph.rebuild_index();
    return graph;
}

ChangeSummary KnowledgeGraph::upsert(const Batch& batch)
{
    ChangeSummary summary;

    // Collapse duplicates within the batch; later copies win for scalar fields.
    std::vector<Entity> incoming;
    std::unordered_map<EntityId, std::size_t> position;
    for (auto entity : batch.entities) {
        if (auto* feature = std::get_if<Feature>(&entity)) {
            feature->phrase = text::normalize_phrase(feature->phrase);
        }
        assign_id(entity);
        if (id_of(entity).empty()) {
            ++summary.entities.rejected;
            summary.diagnostics.push_back("entity without identifier rejected");
            continue;
        }
        if (auto problems = entity_problems(entity); !problems.empty()) {
            ++summary.entities.rejected;
            summary.diagnostics.push_back(id_of(entity).str() + ": " + problems.front());
            continue;
        }
        auto [it, fresh] = position.emplace(id_of(entity), incoming.size());
        if (fresh) {
            incoming.push_back(std::move(entity));
            continue;
        }
        auto& previous = incoming[it->second];
        if (previous.index() != entity.index()) {
            ++summary.entities.rejected;
            summary.diagnostics.push_back(id_of(entity).str() + ": identifier reused by a different entity type");
            continue;
        }
        std::visit(
            [&](auto& prev) {
                using T = std::decay_t<decltype(prev)>;
                auto next = std::get<T>(entity);
                if constexpr (std::is_same_v<T, ModelVariation>) {
                    next.feature_ids.insert(prev.feature_ids.begin(), prev.feature_ids.end());
                    merge_evidence(next.evidence, prev.evidence);
                } else if constexpr (std::is_same_v<T, Library>) {
                    next.supported_variation_ids.insert(prev.supported_variation_ids.begin(),
                                                        prev.supported_variation_ids.end());
                    next.cve_ids.insert(prev.cve_ids.begin(), prev.cve_ids.end());
                    merge_evidence(next.evidence, prev.evidence);
                } else if constexpr (std::is_same_v<T, Repository>) {
                    next.dependency_names.insert(prev.dependency_names.begin(), prev.dependency_names.end());
                }
                prev = std::move(next);
            },
            previous);
    }

    // Required references must resolve against the graph or the accepted batch.
    Catalog catalog;
    for (const auto& [id, _] : base_models_) catalog.bases.insert(id);
    for (const auto& [id, _] : variations_) catalog.variations.insert(id);
    for (const auto& [id, _] : features_) catalog.features.insert(id);
    for (const auto& [id, _] : libraries_) catalog.libraries.insert(id);
    for (const auto& [id, _] : repositories_) catalog.repositories.insert(id);
    for (const auto& [id, _] : cves_) catalog.cves.insert(id);
    for (const auto& entity : incoming) {
        add_to_catalog(catalog, entity);
    }
    std::vector<bool> accepted(incoming.size(), true);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < incoming.size(); ++i) {
            if (!accepted[i]) {
                continue;
            }
            if (auto why = missing_required_ref(incoming[i], catalog)) {
                accepted[i] = false;
                changed = true;
                remove_from_catalog(catalog, incoming[i]);
                ++summary.entities.rejected;
                summary.diagnostics.push_back(id_of(incoming[i]).str() + ": " + *why);
            }
        }
    }

    // Apply entities and derive implied edges from their reference fields.
    std::vector<Edge> edges;
    std::set<EntityId> touched_repos;
    std::set<EntityId> new_libraries;
    for (std::size_t i = 0; i < incoming.size(); ++i) {
        if (!accepted[i]) {
            continue;
        }
        const auto& entity = incoming[i];
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                std::optional<T> stored_copy;
                if (auto existing = find(e.id)) {
                    if (const auto* stored = std::get_if<T>(&*existing)) {
                        stored_copy = *stored;
                    } else {
                        ++summary.entities.rejected;
                        summary.diagnostics.push_back(e.id.str() + ": identifier already used by another entity type");
                        return;
                    }
                }
                T next = merged(stored_copy ? &*stored_copy : nullptr, e);
                if (!stored_copy) {
                    ++summary.entities.inserted;
                    if constexpr (std::is_same_v<T, Library>) new_libraries.insert(e.id);
                } else if (!(*stored_copy == next)) {
                    ++summary.entities.updated;
                }
                if constexpr (std::is_same_v<T, ModelVariation>) {
                    edges.push_back({EdgeKind::BaseVariation, e.base_id, e.id, 1, {}});
                    for (const auto& f : e.feature_ids) edges.push_back({EdgeKind::VariationFeature, e.id, f, 1, {}});
                } else if constexpr (std::is_same_v<T, Library>) {
                    for (const auto& v : e.supported_variation_ids)
                        edges.push_back({EdgeKind::LibraryVariation, e.id, v, 1, {}});
                    for (const auto& c : e.cve_ids) edges.push_back({EdgeKind::LibraryCve, e.id, c, 1, {}});
                } else if constexpr (std::is_same_v<T, CveRecord>) {
                    edges.push_back({EdgeKind::LibraryCve, e.library_id, e.id, 1, {}});
                } else if constexpr (std::is_same_v<T, Repository>) {
                    touched_repos.insert(e.id);
                }
                if (!stored_copy || !(*stored_copy == next)) {
                    put_entity(Entity{std::move(next)});
                    reindex(e.id);
                }
            },
            entity);
    }

    // Explicit edges first so their weight/evidence is kept over bare implied copies.
    std::vector<Edge> all_edges(batch.edges.begin(), batch.edges.end());
    all_edges.insert(all_edges.end(), edges.begin(), edges.end());

    std::set<EdgeKey> explicit_keys;
    for (const auto& edge : batch.edges) {
        explicit_keys.insert(edge.key());
    }
    std::map<EdgeKey, Edge> pending;
    std::vector<EdgeKey> order;
    for (auto& edge : all_edges) {
        auto key = edge.key();
        auto it = pending.find(key);
        if (it == pending.end()) {
            order.push_back(key);
            pending.emplace(key, edge);
            continue;
        }
        merge_evidence(it->second.evidence, edge.evidence);
        if (!edge.evidence.empty() || edge.weight != 1) {
            it->second.weight = edge.weight;
        }
    }

    auto apply_edge = [&](Edge edge) {
        auto key = edge.key();
        if (!catalog.has(key.kind, key.from, key.to) || !contains(key.from) || !contains(key.to)) {
            ++summary.edges.rejected;
            summary.diagnostics.push_back("dangling edge rejected: " + describe(key));
            return;
        }
        if (key.kind == EdgeKind::BaseVariation && variations_.at(key.to).base_id != key.from) {
            ++summary.edges.rejected;
            summary.diagnostics.push_back("conflicting base rejected: " + describe(key));
            return;
        }
        merge_evidence(edge.evidence, {});
        auto existing = edges_.find(key);
        if (existing != edges_.end()) {
            if (explicit_keys.count(key) == 0) {
                return;  // implied copy of a stored edge
            }
            Edge next = existing->second;
            merge_evidence(next.evidence, edge.evidence);
            next.weight = edge.weight;
            if (!(next == existing->second)) {
                existing->second = std::move(next);
                ++summary.edges.updated;
            }
            return;
        }
        edges_.emplace(key, std::move(edge));
        ++summary.edges.inserted;
        switch (key.kind) {
        case EdgeKind::BaseVariation: break;
        case EdgeKind::VariationFeature: variations_.at(key.from).feature_ids.insert(key.to); break;
        case EdgeKind::LibraryVariation: libraries_.at(key.from).supported_variation_ids.insert(key.to); break;
        case EdgeKind::LibraryCve: {
            libraries_.at(key.from).cve_ids.insert(key.to);
            auto& cve = cves_.at(key.to);
            if (cve.library_id.empty()) cve.library_id = key.from;
            break;
        }
        case EdgeKind::RepoLibrary:
            repositories_.at(key.from).dependency_names.insert(
                normalize_distribution_name(libraries_.at(key.to).distribution_name));
            break;
        }
    };
    for (const auto& key : order) {
        apply_edge(pending.at(key));
    }

    // Repositories link to every known library they declare, regardless of
    // which of the two arrived first.
    for (const auto& repo_id : touched_repos) {
        for (const auto& name : repositories_.at(repo_id).dependency_names) {
            if (const auto* lib = library_by_name(name)) {
                if (edges_.count({EdgeKind::RepoLibrary, repo_id, lib->id}) == 0) {
                    apply_edge({EdgeKind::RepoLibrary, repo_id, lib->id, 1, {}});
                }
            }
        }
    }
    if (!new_libraries.empty()) {
        for (const auto& [repo_id, repo] : repositories_) {
            for (const auto& lib_id : new_libraries) {
                const auto& name = normalize_distribution_name(libraries_.at(lib_id).distribution_name);
                if (repo.dependency_names.count(name) != 0 &&
                    edges_.count({EdgeKind::RepoLibrary, repo_id, lib_id}) == 0) {
                    apply_edge({EdgeKind::RepoLibrary, repo_id, lib_id, 1, {}});
                }
            }
        }
    }
    return summary;
}

Subgraph KnowledgeGraph::get_subgraph(const EntityId& root, std::size_t depth) const
{
    auto root_entity = find(root);
    if (!root_entity) {
        throw NotFoundError("unknown entity: " + root.str());
    }
    std::unordered_map<EntityId, std::vector<EntityId>> adjacency;
    for (const auto& [key, _] : edges_) {
        adjacency[key.from].push_back(key.to);
        adjacency[key.to].push_back(key.from);
    }

    Subgraph result;
    std::unordered_set<EntityId> seen{root};
    std::deque<std::pair<EntityId, std::size_t>> frontier{{root, 0}};
    result.entities.push_back(*root_entity);
    while (!frontier.empty()) {
        auto [id, level] = frontier.front();
        frontier.pop_front();
        if (level == depth) {
            continue;
        }
        auto it = adjacency.find(id);
        if (it == adjacency.end()) {
            continue;
        }
        for (const auto& next : it->second) {
            if (!seen.insert(next).second) {
                continue;
            }
            if (auto entity = find(next)) {
                result.entities.push_back(std::move(*entity));
                frontier.emplace_back(next, level + 1);
            }
        }
    }
    for (const auto& [key, edge] : edges_) {
        if (seen.count(key.from) != 0 && seen.count(key.to) != 0 && contains(key.from) && contains(key.to)) {
            result.edges.push_back(edge);
        }
    }
    return result;
}

std::shared_ptr<const KnowledgeGraph> GraphStore::snapshot() const
{
    std::lock_guard lock(read_mutex_);
    return current_;
}

ChangeSummary GraphStore::apply(const Batch& batch)
{
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<KnowledgeGraph>(*snapshot());
    auto summary = next->upsert(batch);
    if (!summary.unchanged()) {
        std::lock_guard lock(read_mutex_);
        current_ = std::move(next);
    }
    return summary;
}

void GraphStore::replace(KnowledgeGraph graph)
{
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<const KnowledgeGraph>(std::move(graph));
    std::lock_guard lock(read_mutex_);
    current_ = std::move(next);
}

}  // namespace modelselect::kg
