// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "modelselect/knowledge/types.hpp"

namespace modelselect::kg {

/// scheme://host[...] with no whitespace.
bool is_well_formed_url(std::string_view url);

/// Per-entity invariants that need no other entity (ranges, non-empty names,
/// evidence shape). Used by both upsert() and validate().
std::vector<std::string> entity_problems(const Entity& entity);

std::vector<std::string> evidence_problems(const EvidenceRef& evidence);

}  // namespace modelselect::kg
