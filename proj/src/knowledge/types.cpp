// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/knowledge/types.hpp"

#include "modelselect/common/hash.hpp"
#include "modelselect/common/text.hpp"

namespace modelselect::kg {

std::string_view to_string(EdgeKind kind) noexcept
{
    switch (kind) {
    case EdgeKind::BaseVariation: return "base_variation";
    case EdgeKind::VariationFeature: return "variation_feature";
    case EdgeKind::LibraryVariation: return "library_variation";
    case EdgeKind::LibraryCve: return "library_cve";
    case EdgeKind::RepoLibrary: return "repo_library";
    }
    return "unknown";
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view name) noexcept
{
    for (auto kind : {EdgeKind::BaseVariation, EdgeKind::VariationFeature, EdgeKind::LibraryVariation,
                      EdgeKind::LibraryCve, EdgeKind::RepoLibrary}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

const std::vector<std::string>& quality_attribute_names()
{
    static const std::vector<std::string> names = {
        "functional suitability", "performance efficiency", "compatibility",
        "interaction capability", "reliability",            "security",
        "maintainability",        "flexibility",            "safety",
    };
    return names;
}

namespace ids {

namespace {

EntityId make(std::string_view prefix, std::string_view canonical)
{
    std::string material(prefix);
    material.push_back('\x1f');
    material.append(canonical);
    return EntityId(std::string(prefix) + "-" + sha256_hex(material).substr(0, 16));
}

}  // namespace

EntityId base_model(std::string_view name) { return make("base", text::normalize_phrase(name)); }

EntityId variation(const EntityId& base_id, std::string_view name)
{
    return make("var", base_id.str() + '\x1f' + text::normalize_phrase(name));
}

EntityId feature(std::string_view phrase) { return make("feat", text::normalize_phrase(phrase)); }

EntityId library(std::string_view distribution_name)
{
    return make("lib", normalize_distribution_name(distribution_name));
}

EntityId repository(std::string_view url_or_name) { return make("repo", text::to_lower(text::trim(url_or_name))); }

EntityId quality(const EntityId& variation_id, const EntityId& library_id, std::string_view attribute)
{
    return make("qual", variation_id.str() + '\x1f' + library_id.str() + '\x1f' + text::normalize_phrase(attribute));
}

}  // namespace ids

std::string normalize_distribution_name(std::string_view name)
{
    std::string out;
    bool in_separator = false;
    for (char c : text::to_lower(text::trim(name))) {
        if (c == '-' || c == '_' || c == '.') {
            in_separator = true;
            continue;
        }
        if (in_separator && !out.empty()) {
            out.push_back('-');
        }
        in_separator = false;
        out.push_back(c);
    }
    return out;
}

namespace {

struct IdAssigner {
    void operator()(BaseModel& e) const
    {
        if (e.id.empty()) e.id = ids::base_model(e.name);
    }
    void operator()(ModelVariation& e) const
    {
        if (e.id.empty()) e.id = ids::variation(e.base_id, e.name);
    }
    void operator()(Feature& e) const
    {
        if (e.id.empty()) e.id = ids::feature(e.phrase);
    }
    void operator()(Library& e) const
    {
        if (e.id.empty()) e.id = ids::library(e.distribution_name);
    }
    void operator()(Repository& e) const
    {
        if (e.id.empty()) e.id = ids::repository(e.url.empty() ? e.name : e.url);
    }
    void operator()(QualityAggregate& e) const
    {
        if (e.id.empty()) e.id = ids::quality(e.variation_id, e.library_id, e.attribute);
    }
    void operator()(CveRecord&) const {}
};

}  // namespace

void assign_id(Entity& entity) { std::visit(IdAssigner{}, entity); }

const EntityId& id_of(const Entity& entity)
{
    return std::visit([](const auto& e) -> const EntityId& { return e.id; }, entity);
}

}  // namespace modelselect::kg
