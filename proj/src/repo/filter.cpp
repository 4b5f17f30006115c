// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/repo/filter.hpp"

#include <algorithm>
#include <map>

#include "modelselect/common/error.hpp"
#include "modelselect/common/text.hpp"

namespace modelselect::repo {

namespace {

PopularityField field_from_name(const std::string& name)
{
    if (name == "stars") return PopularityField::Stars;
    if (name == "forks") return PopularityField::Forks;
    if (name == "contributors") return PopularityField::Contributors;
    throw Error("unknown popularity field '" + name + "'");
}

}  // namespace

FilterPolicy FilterPolicy::from_json(const nlohmann::json& j, Timestamp default_reference)
{
    FilterPolicy policy;
    policy.reference_date = default_reference;
    if (j.contains("popularity_fields")) {
        policy.popularity_fields.clear();
        for (const auto& name : j["popularity_fields"]) policy.popularity_fields.push_back(field_from_name(name.get<std::string>()));
    }
    policy.min_fields_at_median = j.value("min_fields_at_median", policy.min_fields_at_median);
    policy.recency_window_months = j.value("recency_window_months", policy.recency_window_months);
    if (j.contains("reference_date")) policy.reference_date = parse_timestamp(j["reference_date"].get<std::string>());
    if (j.contains("min_size_kb")) policy.min_size_kb = j["min_size_kb"].get<std::int64_t>();
    if (j.contains("max_size_kb")) policy.max_size_kb = j["max_size_kb"].get<std::int64_t>();
    return policy;
}

std::int64_t field_value(const kg::Repository& repo, PopularityField field)
{
    switch (field) {
    case PopularityField::Stars: return repo.stars;
    case PopularityField::Forks: return repo.forks;
    case PopularityField::Contributors: return repo.contributors;
    }
    return 0;
}

std::int64_t lower_median(std::vector<std::int64_t> values)
{
    if (values.empty()) {
        throw Error("median of an empty list");
    }
    auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

std::vector<kg::Repository> filter_repositories(const std::vector<kg::Repository>& repos, const FilterPolicy& policy)
{
    if (repos.empty()) {
        throw Error("cannot filter an empty repository list: medians are undefined");
    }
    auto fields = policy.popularity_fields;
    std::sort(fields.begin(), fields.end());
    fields.erase(std::unique(fields.begin(), fields.end()), fields.end());
    if (policy.min_fields_at_median < 1 || policy.min_fields_at_median > static_cast<int>(fields.size())) {
        throw Error("min_fields_at_median must lie between 1 and the number of popularity fields");
    }
    std::map<PopularityField, std::int64_t> medians;
    for (auto field : fields) {
        std::vector<std::int64_t> values;
        values.reserve(repos.size());
        for (const auto& r : repos) values.push_back(field_value(r, field));
        medians[field] = lower_median(std::move(values));
    }
    auto oldest = subtract_months(policy.reference_date, policy.recency_window_months);

    std::vector<kg::Repository> kept;
    for (const auto& repo : repos) {
        int at_median = 0;
        for (auto field : fields) {
            if (field_value(repo, field) >= medians[field]) ++at_median;
        }
        bool popular = at_median >= policy.min_fields_at_median;
        bool recent = repo.updated_at >= oldest;
        bool sized = (!policy.min_size_kb || repo.size_kb >= *policy.min_size_kb) &&
                     (!policy.max_size_kb || repo.size_kb <= *policy.max_size_kb);
        if (popular && recent && sized) {
            kept.push_back(repo);
        }
    }
    return kept;
}

std::vector<std::string> categorize_repository(const kg::Repository& repo, const std::vector<std::string>& taxonomy)
{
    if (taxonomy.empty()) {
        throw Error("taxonomy is empty");
    }
    std::vector<std::vector<std::string>> texts;
    texts.push_back(text::tokenize(repo.name));
    texts.push_back(text::tokenize(repo.description));
    for (const auto& topic : repo.topics) texts.push_back(text::tokenize(topic));

    std::vector<std::pair<std::size_t, std::string>> hits;
    for (const auto& term : taxonomy) {
        auto needle = text::tokenize(term);
        if (needle.empty()) continue;
        std::size_t count = 0;
        for (const auto& haystack : texts) count += text::count_subsequence(haystack, needle);
        if (count > 0) hits.emplace_back(count, term);
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> out;
    for (auto& [count, term] : hits) {
        if (std::find(out.begin(), out.end(), term) == out.end()) out.push_back(std::move(term));
    }
    return out;
}

}  // namespace modelselect::repo
