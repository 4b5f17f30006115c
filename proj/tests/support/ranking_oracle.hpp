// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "modelselect/inference/inference.hpp"

namespace modelselect::testing {

struct OracleResult {
    kg::EntityId variation_id;
    kg::EntityId library_id;
    double relevance = 0.0;
    double final_score = 0.0;

    friend bool operator==(const OracleResult&, const OracleResult&) = default;
};

/// Exhaustive reference ranking: scores every (variation, library) pair from
/// the raw entity tables, without the text index or candidate retrieval.
std::vector<OracleResult> brute_force_rank(const std::vector<inference::WeightedTerm>& keywords,
                                           const std::set<std::string>& required_features,
                                           const std::map<std::string, double>& quality_weights, int k,
                                           const kg::KnowledgeGraph& graph, const inference::RankingConfig& config);

std::vector<OracleResult> as_oracle_view(const std::vector<inference::ScoredCandidate>& ranked);

}  // namespace modelselect::testing
