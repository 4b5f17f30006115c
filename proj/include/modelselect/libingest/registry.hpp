// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "modelselect/knowledge/types.hpp"
#include "modelselect/net/http.hpp"

namespace modelselect::libingest {

struct RegistryMetadata {
    std::string distribution_name;
    std::string summary;
    std::string homepage;
    std::vector<std::string> keywords;
    std::vector<std::string> classifiers;
    std::string version;
    std::map<std::string, std::string> project_urls;

    friend bool operator==(const RegistryMetadata&, const RegistryMetadata&) = default;
};

/// Normalizes the "info" object of a registry JSON document. Null fields become
/// empty; keywords are split on commas (or whitespace when there is no comma).
RegistryMetadata metadata_from_registry_json(const nlohmann::json& document);

/// PyPI-compatible read API: GET {base}/pypi/{name}/json.
class RegistryClient {
  public:
    RegistryClient(std::shared_ptr<net::Transport> transport, std::string base_url, net::RetryPolicy retry = {});

    /// Empty when the registry has no such distribution (404). Transport
    /// failures surface as TransportError after retries; an unreadable body
    /// as ProtocolError.
    std::optional<RegistryMetadata> fetch(const std::string& distribution_name);

    bool exists(const std::string& distribution_name) { return fetch(distribution_name).has_value(); }

    std::string request_url(const std::string& distribution_name) const;

  private:
    std::shared_ptr<net::Transport> transport_;
    std::string base_url_;
    net::RetryPolicy retry_;
};

struct AiLexicon {
    std::set<std::string> strong_terms;
    std::set<std::string> weak_terms;
    std::set<std::string> classifier_markers;
    double strong_weight = 0.6;
    double weak_weight = 0.25;
    double threshold = 0.5;

    /// Throws when the term sets overlap or a weight is out of range.
    void check() const;
    static AiLexicon from_json(const nlohmann::json& j);
    static AiLexicon load(const std::filesystem::path& path);
};

enum class AiBasis { Tag, Heuristic, None };
std::string_view to_string(AiBasis basis) noexcept;

struct AiClassification {
    bool ai_related = false;
    double score = 0.0;
    AiBasis basis = AiBasis::None;
    std::vector<std::string> matched_terms;

    friend bool operator==(const AiClassification&, const AiClassification&) = default;
};

/// A classifier containing a marker (case-insensitive) is decisive (score 1).
/// Otherwise distinct whole-phrase term hits in summary + homepage text give
/// min(1, strong_weight * strong + weak_weight * weak).
AiClassification classify_ai_related(const RegistryMetadata& meta, const AiLexicon& lexicon,
                                     const std::optional<std::string>& homepage_text = std::nullopt);

/// OSV-compatible vulnerability lookup: POST {base}/v1/query.
class VulnerabilityClient {
  public:
    VulnerabilityClient(std::shared_ptr<net::Transport> transport, std::string base_url, net::RetryPolicy retry = {});

    /// Distinct advisories for the exact (name, version); ids in first-seen order.
    std::vector<kg::CveRecord> fetch(const std::string& distribution_name, const std::string& version);

  private:
    std::shared_ptr<net::Transport> transport_;
    std::string base_url_;
    net::RetryPolicy retry_;
};

/// "{base}/v1/query" request body for (name, version).
std::string osv_query_body(const std::string& distribution_name, const std::string& version);

}  // namespace modelselect::libingest
