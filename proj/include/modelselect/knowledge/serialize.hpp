// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <json.hpp>

#include "modelselect/knowledge/types.hpp"

// JSON records with a fixed key order (declaration order of the fields). Used
// by snapshot files and by the HTTP API.
namespace modelselect::kg {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const EvidenceRef& e);
ordered_json to_json(const BaseModel& e);
ordered_json to_json(const ModelVariation& e);
ordered_json to_json(const Feature& e);
ordered_json to_json(const Library& e);
ordered_json to_json(const Repository& e);
ordered_json to_json(const QualityAggregate& e);
ordered_json to_json(const CveRecord& e);
ordered_json to_json(const Edge& e);

/// Adds an "entity_type" key in front of the record.
ordered_json entity_to_json(const Entity& entity);
std::string_view entity_type_name(const Entity& entity) noexcept;

EvidenceRef evidence_from_json(const nlohmann::json& j);
BaseModel base_model_from_json(const nlohmann::json& j);
ModelVariation variation_from_json(const nlohmann::json& j);
Feature feature_from_json(const nlohmann::json& j);
Library library_from_json(const nlohmann::json& j);
Repository repository_from_json(const nlohmann::json& j);
QualityAggregate quality_from_json(const nlohmann::json& j);
CveRecord cve_from_json(const nlohmann::json& j);
Edge edge_from_json(const nlohmann::json& j);

/// Compact single-line dump, UTF-8 preserved, invalid bytes replaced.
std::string dump_line(const ordered_json& j);

}  // namespace modelselect::kg
