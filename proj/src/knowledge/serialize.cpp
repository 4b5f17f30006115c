// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/knowledge/serialize.hpp"

#include "modelselect/common/error.hpp"

namespace modelselect::kg {

namespace {

template <typename Set>
ordered_json id_array(const Set& ids)
{
    auto out = ordered_json::array();
    for (const auto& id : ids) {
        out.push_back(id.str());
    }
    return out;
}

ordered_json evidence_array(const std::vector<EvidenceRef>& list)
{
    auto out = ordered_json::array();
    for (const auto& e : list) {
        out.push_back(to_json(e));
    }
    return out;
}

std::set<EntityId> ids_from(const nlohmann::json& j)
{
    std::set<EntityId> out;
    for (const auto& v : j) {
        out.emplace(v.get<std::string>());
    }
    return out;
}

std::vector<EvidenceRef> evidence_from(const nlohmann::json& j)
{
    std::vector<EvidenceRef> out;
    for (const auto& v : j) {
        out.push_back(evidence_from_json(v));
    }
    return out;
}

}  // namespace

ordered_json to_json(const EvidenceRef& e)
{
    ordered_json j;
    j["source_url"] = e.source_url;
    j["fragment"] = e.fragment;
    j["retrieved_at"] = format_timestamp(e.retrieved_at);
    return j;
}

ordered_json to_json(const BaseModel& e)
{
    ordered_json j;
    j["id"] = e.id.str();
    j["name"] = e.name;
    j["definition"] = e.definition;
    j["aliases"] = e.aliases;
    return j;
}

ordered_json to_json(const ModelVariation& e)
{
    ordered_json j;
    j["id"] = e.id.str();
    j["name"] = e.name;
    j["base_id"] = e.base_id.str();
    j["definition"] = e.definition;
    j["feature_ids"] = id_array(e.feature_ids);
    j["evidence"] = evidence_array(e.evidence);
    return j;
}

ordered_json to_json(const Feature& e)
{
    ordered_json j;
    j["id"] = e.id.str();
    j["phrase"] = e.phrase;
    j["definition"] = e.definition ? ordered_json(*e.definition) : ordered_json(nullptr);
    return j;
}

ordered_json to_json(const Library& e)
{
    ordered_json j;
    j["id"] = e.id.str();
    j["distribution_name"] = e.distribution_name;
    j["summary"] = e.summary;
    j["homepage"] = e.homepage;
    j["keywords"] = e.keywords;
    j["classifiers"] = e.classifiers;
    j["version"] = e.version;
    j["ai_related"] = e.ai_related;
    j["ai_score"] = e.ai_score;
    j["supported_variation_ids"] = id_array(e.supported_variation_ids);
    j["cve_ids"] = id_array(e.cve_ids);
    if (e.popularity) {
        j["popularity"] = {{"stars", e.popularity->stars}, {"forks", e.popularity->forks}};
    } else {
        j["popularity"] = nullptr;
    }
    j["evidence"] = evidence_array(e.evidence);
    return j;
}

ordered_json to_json(const Repository& e)
{
    ordered_json j;
    j["id"] = e.id.str();
    j["name"] = e.name;
    j["url"] = e.url;
    j["description"] = e.description;
    j["stars"] = e.stars;
    j["forks"] = e.forks;
    j["size_kb"] = e.size_kb;
    j["language"] = e.language;
    j["contributors"] = e.contributors;
    j["created_at"] = format_timestamp(e.created_at);
    j["updated_at"] = format_timestamp(e.updated_at);
    j["topics"] = e.topics;
    j["categories"] = e.categories;
    j["dependency_names"] = e.dependency_names;
    return j;
}

ordered_json to_json(const QualityAggregate& e)
{
    ordered_json j;
    j["id"] = e.id.str();
    j["variation_id"] = e.variation_id.str();
    j["library_id"] = e.library_id.str();
    j["attribute"] = e.attribute;
    j["score"] = e.score;
    j["review_count"] = e.review_count;
    j["evidence"] = evidence_array(e.evidence);
    return j;
}

ordered_json to_json(const CveRecord& e)
{
    ordered_json j;
    j["id"] = e.id.str();
    j["library_id"] = e.library_id.str();
    j["affected_version_range"] = e.affected_version_range;
    return j;
}

ordered_json to_json(const Edge& e)
{
    ordered_json j;
    j["kind"] = std::string(to_string(e.kind));
    j["from"] = e.from.str();
    j["to"] = e.to.str();
    j["weight"] = e.weight;
    j["evidence"] = evidence_array(e.evidence);
    return j;
}

std::string_view entity_type_name(const Entity& entity) noexcept
{
    static constexpr std::string_view kNames[] = {"base_model", "variation", "feature", "library",
                                                  "repository", "quality",   "cve"};
    return kNames[entity.index()];
}

ordered_json entity_to_json(const Entity& entity)
{
    ordered_json out;
    out["entity_type"] = std::string(entity_type_name(entity));
    auto body = std::visit([](const auto& e) { return to_json(e); }, entity);
    for (auto& [key, value] : body.items()) {
        out[key] = value;
    }
    return out;
}

EvidenceRef evidence_from_json(const nlohmann::json& j)
{
    return {j.at("source_url").get<std::string>(), j.at("fragment").get<std::string>(),
            parse_timestamp(j.at("retrieved_at").get<std::string>())};
}

BaseModel base_model_from_json(const nlohmann::json& j)
{
    BaseModel e;
    e.id = EntityId(j.at("id").get<std::string>());
    e.name = j.at("name").get<std::string>();
    e.definition = j.at("definition").get<std::string>();
    e.aliases = j.at("aliases").get<std::set<std::string>>();
    return e;
}

ModelVariation variation_from_json(const nlohmann::json& j)
{
    ModelVariation e;
    e.id = EntityId(j.at("id").get<std::string>());
    e.name = j.at("name").get<std::string>();
    e.base_id = EntityId(j.at("base_id").get<std::string>());
    e.definition = j.at("definition").get<std::string>();
    e.feature_ids = ids_from(j.at("feature_ids"));
    e.evidence = evidence_from(j.at("evidence"));
    return e;
}

Feature feature_from_json(const nlohmann::json& j)
{
    Feature e;
    e.id = EntityId(j.at("id").get<std::string>());
    e.phrase = j.at("phrase").get<std::string>();
    if (const auto& d = j.at("definition"); !d.is_null()) {
        e.definition = d.get<std::string>();
    }
    return e;
}

Library library_from_json(const nlohmann::json& j)
{
    Library e;
    e.id = EntityId(j.at("id").get<std::string>());
    e.distribution_name = j.at("distribution_name").get<std::string>();
    e.summary = j.at("summary").get<std::string>();
    e.homepage = j.at("homepage").get<std::string>();
    e.keywords = j.at("keywords").get<std::vector<std::string>>();
    e.classifiers = j.at("classifiers").get<std::vector<std::string>>();
    e.version = j.at("version").get<std::string>();
    e.ai_related = j.at("ai_related").get<bool>();
    e.ai_score = j.at("ai_score").get<double>();
    e.supported_variation_ids = ids_from(j.at("supported_variation_ids"));
    e.cve_ids = ids_from(j.at("cve_ids"));
    if (const auto& p = j.at("popularity"); !p.is_null()) {
        e.popularity = Popularity{p.at("stars").get<std::int64_t>(), p.at("forks").get<std::int64_t>()};
    }
    e.evidence = evidence_from(j.at("evidence"));
    return e;
}

Repository repository_from_json(const nlohmann::json& j)
{
    Repository e;
    e.id = EntityId(j.at("id").get<std::string>());
    e.name = j.at("name").get<std::string>();
    e.url = j.at("url").get<std::string>();
    e.description = j.at("description").get<std::string>();
    e.stars = j.at("stars").get<std::int64_t>();
    e.forks = j.at("forks").get<std::int64_t>();
    e.size_kb = j.at("size_kb").get<std::int64_t>();
    e.language = j.at("language").get<std::string>();
    e.contributors = j.at("contributors").get<std::int64_t>();
    e.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    e.updated_at = parse_timestamp(j.at("updated_at").get<std::string>());
    e.topics = j.at("topics").get<std::vector<std::string>>();
    e.categories = j.at("categories").get<std::vector<std::string>>();
    e.dependency_names = j.at("dependency_names").get<std::set<std::string>>();
    return e;
}

QualityAggregate quality_from_json(const nlohmann::json& j)
{
    QualityAggregate e;
    e.id = EntityId(j.at("id").get<std::string>());
    e.variation_id = EntityId(j.at("variation_id").get<std::string>());
    e.library_id = EntityId(j.at("library_id").get<std::string>());
    e.attribute = j.at("attribute").get<std::string>();
    e.score = j.at("score").get<double>();
    e.review_count = j.at("review_count").get<std::int64_t>();
    e.evidence = evidence_from(j.at("evidence"));
    return e;
}

CveRecord cve_from_json(const nlohmann::json& j)
{
    CveRecord e;
    e.id = EntityId(j.at("id").get<std::string>());
    e.library_id = EntityId(j.at("library_id").get<std::string>());
    e.affected_version_range = j.at("affected_version_range").get<std::string>();
    return e;
}

Edge edge_from_json(const nlohmann::json& j)
{
    Edge e;
    auto kind_name = j.at("kind").get<std::string>();
    auto kind = edge_kind_from_string(kind_name);
    if (!kind) {
        throw Error("unknown edge kind '" + kind_name + "'");
    }
    e.kind = *kind;
    e.from = EntityId(j.at("from").get<std::string>());
    e.to = EntityId(j.at("to").get<std::string>());
    e.weight = j.at("weight").get<std::int64_t>();
    e.evidence = evidence_from(j.at("evidence"));
    return e;
}

std::string dump_line(const ordered_json& j)
{
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace modelselect::kg
