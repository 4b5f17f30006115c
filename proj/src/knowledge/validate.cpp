// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>

#include "modelselect/common/text.hpp"
#include "modelselect/knowledge/graph.hpp"
#include "modelselect/knowledge/validation_rules.hpp"

namespace modelselect::kg {

bool is_well_formed_url(std::string_view url)
{
    static const std::regex pattern(R"(^[A-Za-z][A-Za-z0-9+.\-]*://[^\s/?#]+[^\s]*$)");
    return std::regex_match(url.begin(), url.end(), pattern);
}

std::vector<std::string> evidence_problems(const EvidenceRef& evidence)
{
    std::vector<std::string> problems;
    if (text::trim(evidence.fragment).empty()) {
        problems.push_back("evidence fragment is empty");
    }
    if (!is_well_formed_url(evidence.source_url)) {
        problems.push_back("evidence source_url is not a well-formed URL: '" + evidence.source_url + "'");
    }
    return problems;
}

namespace {

void check_evidence(const std::vector<EvidenceRef>& list, std::vector<std::string>& problems)
{
    for (const auto& e : list) {
        auto found = evidence_problems(e);
        problems.insert(problems.end(), found.begin(), found.end());
    }
}

}  // namespace

std::vector<std::string> entity_problems(const Entity& entity)
{
    std::vector<std::string> problems;
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BaseModel>) {
                if (text::trim(e.name).empty()) problems.push_back("base model name is empty");
            } else if constexpr (std::is_same_v<T, ModelVariation>) {
                if (text::trim(e.name).empty()) problems.push_back("variation name is empty");
                if (e.base_id.empty()) problems.push_back("variation has no base model");
                check_evidence(e.evidence, problems);
            } else if constexpr (std::is_same_v<T, Feature>) {
                if (e.phrase.empty()) problems.push_back("feature phrase is empty");
                else if (e.phrase != text::normalize_phrase(e.phrase)) problems.push_back("feature phrase is not normalized");
            } else if constexpr (std::is_same_v<T, Library>) {
                if (text::trim(e.distribution_name).empty()) problems.push_back("library distribution_name is empty");
                if (!std::isfinite(e.ai_score) || e.ai_score < 0.0 || e.ai_score > 1.0)
                    problems.push_back("ai_score outside [0,1]");
                if (e.popularity && (e.popularity->stars < 0 || e.popularity->forks < 0))
                    problems.push_back("negative popularity count");
                check_evidence(e.evidence, problems);
            } else if constexpr (std::is_same_v<T, Repository>) {
                if (text::trim(e.name).empty()) problems.push_back("repository name is empty");
                if (e.stars < 0 || e.forks < 0 || e.size_kb < 0 || e.contributors < 0)
                    problems.push_back("negative repository count");
                if (e.updated_at < e.created_at) problems.push_back("updated_at precedes created_at");
            } else if constexpr (std::is_same_v<T, QualityAggregate>) {
                if (!std::isfinite(e.score) || e.score < -1.0 || e.score > 1.0)
                    problems.push_back("quality score outside [-1,1]");
                const auto& names = quality_attribute_names();
                if (std::find(names.begin(), names.end(), e.attribute) == names.end())
                    problems.push_back("unknown quality attribute '" + e.attribute + "'");
                if (e.review_count < 0) problems.push_back("negative review_count");
                check_evidence(e.evidence, problems);
            } else if constexpr (std::is_same_v<T, CveRecord>) {
                if (text::trim(e.id.str()).empty()) problems.push_back("vulnerability id is empty");
                if (e.library_id.empty()) problems.push_back("vulnerability has no library");
            }
        },
        entity);
    return problems;
}

std::vector<Violation> validate(const KnowledgeGraph& graph)
{
    std::vector<Violation> out;
    auto report = [&](const EntityId& id, std::string rule, std::string message) {
        out.push_back({id, std::move(rule), std::move(message)});
    };
    auto edge_text = [](EdgeKind kind, const EntityId& from, const EntityId& to) {
        return std::string(to_string(kind)) + " " + from.str() + " -> " + to.str();
    };
    std::set<EdgeKey> explained;

    auto check_entity = [&](const Entity& entity) {
        for (auto& problem : entity_problems(entity)) {
            report(id_of(entity), "invariant", std::move(problem));
        }
    };

    std::map<std::string, EntityId> base_names;
    for (const auto& [id, base] : graph.base_models()) {
        check_entity(base);
        auto [it, fresh] = base_names.emplace(text::to_lower(base.name), id);
        if (!fresh) report(id, "unique-name", "base model name '" + base.name + "' duplicates " + it->second.str());
    }

    std::map<std::pair<EntityId, std::string>, EntityId> variation_names;
    for (const auto& [id, v] : graph.variations()) {
        check_entity(v);
        EdgeKey base_edge{EdgeKind::BaseVariation, v.base_id, id};
        explained.insert(base_edge);
        if (graph.base_models().count(v.base_id) == 0) {
            report(id, "dangling-reference",
                   "base_id " + v.base_id.str() + " does not resolve (edge " +
                       edge_text(EdgeKind::BaseVariation, v.base_id, id) + ")");
        } else if (graph.edges().count(base_edge) == 0) {
            report(id, "orphan-variation", "missing edge " + edge_text(EdgeKind::BaseVariation, v.base_id, id));
        }
        auto [it, fresh] = variation_names.emplace(std::pair{v.base_id, text::to_lower(v.name)}, id);
        if (!fresh) report(id, "unique-name", "variation name '" + v.name + "' duplicated within its base");
        for (const auto& f : v.feature_ids) {
            EdgeKey key{EdgeKind::VariationFeature, id, f};
            explained.insert(key);
            if (graph.features().count(f) == 0) {
                report(id, "dangling-reference",
                       "feature " + f.str() + " does not resolve (edge " + edge_text(key.kind, id, f) + ")");
            } else if (graph.edges().count(key) == 0) {
                report(id, "edge-mismatch", "missing edge " + edge_text(key.kind, id, f));
            }
        }
    }

    for (const auto& [id, f] : graph.features()) check_entity(f);

    std::map<std::string, EntityId> dist_names;
    for (const auto& [id, lib] : graph.libraries()) {
        check_entity(lib);
        auto [it, fresh] = dist_names.emplace(normalize_distribution_name(lib.distribution_name), id);
        if (!fresh) report(id, "unique-name", "distribution_name '" + lib.distribution_name + "' is not unique");
        for (const auto& v : lib.supported_variation_ids) {
            EdgeKey key{EdgeKind::LibraryVariation, id, v};
            explained.insert(key);
            if (graph.variations().count(v) == 0) {
                report(id, "dangling-reference",
                       "variation " + v.str() + " does not resolve (edge " + edge_text(key.kind, id, v) + ")");
            } else if (graph.edges().count(key) == 0) {
                report(id, "edge-mismatch", "missing edge " + edge_text(key.kind, id, v));
            }
        }
        for (const auto& c : lib.cve_ids) {
            EdgeKey key{EdgeKind::LibraryCve, id, c};
            explained.insert(key);
            if (graph.cves().count(c) == 0) {
                report(id, "dangling-reference",
                       "vulnerability " + c.str() + " does not resolve (edge " + edge_text(key.kind, id, c) + ")");
            } else if (graph.edges().count(key) == 0) {
                report(id, "edge-mismatch", "missing edge " + edge_text(key.kind, id, c));
            }
        }
    }

    for (const auto& [id, repo] : graph.repositories()) {
        check_entity(repo);
        for (const auto& name : repo.dependency_names) {
            if (const auto* lib = graph.library_by_name(name)) {
                EdgeKey key{EdgeKind::RepoLibrary, id, lib->id};
                explained.insert(key);
                if (graph.edges().count(key) == 0) {
                    report(id, "edge-mismatch", "missing edge " + edge_text(key.kind, id, lib->id));
                }
            }
        }
    }

    for (const auto& [id, q] : graph.quality()) {
        check_entity(q);
        if (graph.variations().count(q.variation_id) == 0)
            report(id, "dangling-reference", "variation " + q.variation_id.str() + " does not resolve");
        if (graph.libraries().count(q.library_id) == 0)
            report(id, "dangling-reference", "library " + q.library_id.str() + " does not resolve");
    }

    for (const auto& [id, cve] : graph.cves()) {
        check_entity(cve);
        EdgeKey key{EdgeKind::LibraryCve, cve.library_id, id};
        if (graph.libraries().count(cve.library_id) == 0) {
            explained.insert(key);
            report(id, "dangling-reference", "library " + cve.library_id.str() + " does not resolve");
        } else if (graph.edges().count(key) == 0) {
            explained.insert(key);
            report(id, "edge-mismatch", "missing edge " + edge_text(key.kind, cve.library_id, id));
        }
    }

    // Edges must be mirrored by the reference fields of their endpoints.
    for (const auto& [key, edge] : graph.edges()) {
        for (const auto& e : edge.evidence) {
            for (auto& problem : evidence_problems(e)) {
                report(key.from, "invariant", "edge " + edge_text(key.kind, key.from, key.to) + ": " + problem);
            }
        }
        if (explained.count(key) != 0) {
            continue;
        }
        bool mirrored = false;
        switch (key.kind) {
        case EdgeKind::BaseVariation: {
            auto v = graph.variations().find(key.to);
            mirrored = v != graph.variations().end() && v->second.base_id == key.from;
            break;
        }
        case EdgeKind::VariationFeature: {
            auto v = graph.variations().find(key.from);
            mirrored = v != graph.variations().end() && v->second.feature_ids.count(key.to) != 0;
            break;
        }
        case EdgeKind::LibraryVariation: {
            auto l = graph.libraries().find(key.from);
            mirrored = l != graph.libraries().end() && l->second.supported_variation_ids.count(key.to) != 0;
            break;
        }
        case EdgeKind::LibraryCve: {
            auto l = graph.libraries().find(key.from);
            mirrored = l != graph.libraries().end() && l->second.cve_ids.count(key.to) != 0 &&
                       graph.cves().count(key.to) != 0;
            break;
        }
        case EdgeKind::RepoLibrary: {
            auto r = graph.repositories().find(key.from);
            auto l = graph.libraries().find(key.to);
            mirrored = r != graph.repositories().end() && l != graph.libraries().end() &&
                       r->second.dependency_names.count(normalize_distribution_name(l->second.distribution_name)) != 0;
            break;
        }
        }
        if (!mirrored) {
            report(key.from, "edge-mismatch", "edge " + edge_text(key.kind, key.from, key.to) +
                                                  " has no matching reference or a missing endpoint");
        }
    }

    if (!(graph.index() == graph.rebuild_index())) {
        report(EntityId{}, "index-consistency", "text index does not match the entity tables");
    }
    return out;
}

}  // namespace modelselect::kg
