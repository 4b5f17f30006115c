// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "modelselect/common/time.hpp"
#include "modelselect/knowledge/types.hpp"

namespace modelselect::repo {

enum class PopularityField { Stars, Forks, Contributors };

struct FilterPolicy {
    std::vector<PopularityField> popularity_fields{PopularityField::Stars, PopularityField::Forks,
                                                   PopularityField::Contributors};
    int min_fields_at_median = 2;
    int recency_window_months = 36;
    Timestamp reference_date{};
    std::optional<std::int64_t> min_size_kb;
    std::optional<std::int64_t> max_size_kb;

    /// Reads {popularity_fields, min_fields_at_median, recency_window_months,
    /// reference_date, min_size_kb, max_size_kb}; absent keys keep defaults.
    static FilterPolicy from_json(const nlohmann::json& j, Timestamp default_reference);
};

std::int64_t field_value(const kg::Repository& repo, PopularityField field);

/// Lower-middle median (element (n-1)/2 of the sorted values).
std::int64_t lower_median(std::vector<std::int64_t> values);

/// Keeps repos meeting the popularity, recency and size criteria, in input order.
/// Throws on an empty input or an inconsistent policy.
std::vector<kg::Repository> filter_repositories(const std::vector<kg::Repository>& repos, const FilterPolicy& policy);

/// Case-insensitive whole-word taxonomy matches against name, description and
/// topics; hyphens, underscores and slashes separate words. Ranked by match
/// count, then alphabetically.
std::vector<std::string> categorize_repository(const kg::Repository& repo, const std::vector<std::string>& taxonomy);

}  // namespace modelselect::repo
