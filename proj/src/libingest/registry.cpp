// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/libingest/registry.hpp"

#include <algorithm>
#include <cmath>

#include "modelselect/common/config.hpp"
#include "modelselect/common/error.hpp"
#include "modelselect/common/text.hpp"

namespace modelselect::libingest {

namespace {

std::string string_or_empty(const nlohmann::json& obj, const char* key)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return {};
    return it->get<std::string>();
}

std::string excerpt(const std::string& body)
{
    auto cut = body.substr(0, 160);
    return cut.size() < body.size() ? cut + "..." : cut;
}

}  // namespace

RegistryMetadata metadata_from_registry_json(const nlohmann::json& document)
{
    if (!document.is_object() || !document.contains("info") || !document["info"].is_object()) {
        throw ProtocolError("registry document has no 'info' object");
    }
    const auto& info = document["info"];
    RegistryMetadata meta;
    meta.distribution_name = string_or_empty(info, "name");
    meta.summary = text::collapse_whitespace(text::trim(string_or_empty(info, "summary")));
    meta.homepage = text::trim(string_or_empty(info, "home_page"));
    meta.version = string_or_empty(info, "version");
    auto keywords = string_or_empty(info, "keywords");
    char sep = keywords.find(',') != std::string::npos ? ',' : ' ';
    for (auto& k : text::split(keywords, sep)) {
        auto word = text::trim(k);
        if (!word.empty() && std::find(meta.keywords.begin(), meta.keywords.end(), word) == meta.keywords.end()) {
            meta.keywords.push_back(word);
        }
    }
    if (auto it = info.find("classifiers"); it != info.end() && it->is_array()) {
        for (const auto& c : *it) {
            if (c.is_string()) meta.classifiers.push_back(c.get<std::string>());
        }
    }
    if (auto it = info.find("project_urls"); it != info.end() && it->is_object()) {
        for (const auto& [key, value] : it->items()) {
            if (value.is_string() && !value.get<std::string>().empty()) meta.project_urls[key] = value.get<std::string>();
        }
    }
    if (meta.homepage.empty()) {
        for (const auto* key : {"Homepage", "homepage", "Home", "home"}) {
            if (auto it = meta.project_urls.find(key); it != meta.project_urls.end()) {
                meta.homepage = it->second;
                break;
            }
        }
    }
    return meta;
}

RegistryClient::RegistryClient(std::shared_ptr<net::Transport> transport, std::string base_url, net::RetryPolicy retry)
    : transport_(std::move(transport)), base_url_(std::move(base_url)), retry_(std::move(retry))
{
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string RegistryClient::request_url(const std::string& distribution_name) const
{
    return base_url_ + "/pypi/" + kg::normalize_distribution_name(distribution_name) + "/json";
}

std::optional<RegistryMetadata> RegistryClient::fetch(const std::string& distribution_name)
{
    net::HttpRequest request;
    request.url = request_url(distribution_name);
    request.headers["Accept"] = "application/json";
    auto response = net::send_with_retry(*transport_, request, retry_);
    if (response.status == 404) {
        return std::nullopt;
    }
    if (response.status != 200) {
        throw ProtocolError("registry answered HTTP " + std::to_string(response.status) + " for " + request.url);
    }
    nlohmann::json document;
    try {
        document = nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError("registry body for " + distribution_name + " is not JSON: " + excerpt(response.body));
    }
    auto meta = metadata_from_registry_json(document);
    if (meta.distribution_name.empty()) meta.distribution_name = distribution_name;
    if (meta.version.empty()) {
        throw ProtocolError("registry record for " + distribution_name + " has no version");
    }
    return meta;
}

void AiLexicon::check() const
{
    for (const auto* a : {&strong_terms, &weak_terms, &classifier_markers}) {
        for (const auto* b : {&strong_terms, &weak_terms, &classifier_markers}) {
            if (a >= b) continue;
            for (const auto& term : *a) {
                if (b->count(term) != 0) throw Error("AI lexicon term '" + term + "' appears in two sets");
            }
        }
    }
    for (double w : {strong_weight, weak_weight, threshold}) {
        if (!std::isfinite(w) || w < 0.0 || w > 1.0) throw Error("AI lexicon weights must lie in [0,1]");
    }
}

AiLexicon AiLexicon::from_json(const nlohmann::json& j)
{
    AiLexicon lexicon;
    auto read_set = [&](const char* key, std::set<std::string>& into) {
        if (j.contains(key)) {
            for (const auto& t : j[key]) into.insert(text::normalize_phrase(t.get<std::string>()));
        }
    };
    read_set("strong_terms", lexicon.strong_terms);
    read_set("weak_terms", lexicon.weak_terms);
    read_set("classifier_markers", lexicon.classifier_markers);
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        lexicon.strong_weight = w.value("strong", lexicon.strong_weight);
        lexicon.weak_weight = w.value("weak", lexicon.weak_weight);
        lexicon.threshold = w.value("threshold", lexicon.threshold);
    }
    lexicon.check();
    return lexicon;
}

AiLexicon AiLexicon::load(const std::filesystem::path& path) { return from_json(config::load_toml(path)); }

std::string_view to_string(AiBasis basis) noexcept
{
    switch (basis) {
    case AiBasis::Tag: return "tag";
    case AiBasis::Heuristic: return "heuristic";
    case AiBasis::None: return "none";
    }
    return "none";
}

AiClassification classify_ai_related(const RegistryMetadata& meta, const AiLexicon& lexicon,
                                     const std::optional<std::string>& homepage_text)
{
    AiClassification result;
    for (const auto& classifier : meta.classifiers) {
        for (const auto& marker : lexicon.classifier_markers) {
            if (text::icontains(classifier, marker)) {
                result.ai_related = true;
                result.score = 1.0;
                result.basis = AiBasis::Tag;
                result.matched_terms.push_back(marker);
                return result;
            }
        }
    }
    auto tokens = text::match_tokens(meta.summary);
    if (homepage_text) {
        auto more = text::match_tokens(*homepage_text);
        tokens.push_back("");  // keeps phrases from spanning the two texts
        tokens.insert(tokens.end(), more.begin(), more.end());
    }
    std::size_t strong = 0;
    std::size_t weak = 0;
    for (const auto& term : lexicon.strong_terms) {
        if (text::contains_subsequence(tokens, text::match_tokens(term))) {
            ++strong;
            result.matched_terms.push_back(term);
        }
    }
    for (const auto& term : lexicon.weak_terms) {
        if (text::contains_subsequence(tokens, text::match_tokens(term))) {
            ++weak;
            result.matched_terms.push_back(term);
        }
    }
    double raw = lexicon.strong_weight * static_cast<double>(strong) + lexicon.weak_weight * static_cast<double>(weak);
    result.score = std::min(1.0, std::round(raw * 1e9) / 1e9);
    result.ai_related = result.score >= lexicon.threshold;
    result.basis = result.ai_related ? AiBasis::Heuristic : AiBasis::None;
    return result;
}

std::string osv_query_body(const std::string& distribution_name, const std::string& version)
{
    nlohmann::ordered_json body;
    body["package"] = {{"ecosystem", "PyPI"}, {"name", distribution_name}};
    body["version"] = version;
    return body.dump();
}

VulnerabilityClient::VulnerabilityClient(std::shared_ptr<net::Transport> transport, std::string base_url,
                                         net::RetryPolicy retry)
    : transport_(std::move(transport)), base_url_(std::move(base_url)), retry_(std::move(retry))
{
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

namespace {

// ">=a,<b" per ECOSYSTEM range; several ranges joined with " || ".
std::string affected_range(const nlohmann::json& vuln, const std::string& name)
{
    std::vector<std::string> ranges;
    if (!vuln.contains("affected") || !vuln["affected"].is_array()) return {};
    for (const auto& affected : vuln["affected"]) {
        if (affected.contains("package") &&
            kg::normalize_distribution_name(affected["package"].value("name", "")) != kg::normalize_distribution_name(name)) {
            continue;
        }
        if (!affected.contains("ranges")) continue;
        for (const auto& range : affected["ranges"]) {
            if (range.value("type", "") != "ECOSYSTEM" || !range.contains("events")) continue;
            std::vector<std::string> parts;
            for (const auto& event : range["events"]) {
                if (event.contains("introduced") && event["introduced"] != "0") parts.push_back(">=" + event["introduced"].get<std::string>());
                if (event.contains("fixed")) parts.push_back("<" + event["fixed"].get<std::string>());
                if (event.contains("last_affected")) parts.push_back("<=" + event["last_affected"].get<std::string>());
            }
            if (!parts.empty()) ranges.push_back(text::join(parts, ","));
        }
    }
    return text::join(ranges, " || ");
}

}  // namespace

std::vector<kg::CveRecord> VulnerabilityClient::fetch(const std::string& distribution_name, const std::string& version)
{
    if (version.empty()) {
        throw Error("vulnerability lookup needs a version");
    }
    net::HttpRequest request;
    request.method = "POST";
    request.url = base_url_ + "/v1/query";
    request.body = osv_query_body(distribution_name, version);
    request.headers["Content-Type"] = "application/json";
    auto response = net::send_with_retry(*transport_, request, retry_);
    if (response.status != 200) {
        throw ProtocolError("vulnerability API answered HTTP " + std::to_string(response.status) + ": " +
                            excerpt(response.body));
    }
    nlohmann::json document;
    try {
        document = nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError("vulnerability response is not JSON: " + excerpt(response.body));
    }
    if (!document.is_object()) {
        throw ProtocolError("vulnerability response is not an object: " + excerpt(response.body));
    }
    std::vector<kg::CveRecord> out;
    if (!document.contains("vulns")) {
        return out;
    }
    if (!document["vulns"].is_array()) {
        throw ProtocolError("'vulns' is not a list: " + excerpt(response.body));
    }
    std::set<std::string> seen;
    auto library_id = kg::ids::library(distribution_name);
    for (const auto& vuln : document["vulns"]) {
        if (!vuln.is_object() || !vuln.contains("id") || !vuln["id"].is_string()) {
            throw ProtocolError("vulnerability entry without an id: " + excerpt(response.body));
        }
        auto id = vuln["id"].get<std::string>();
        if (!seen.insert(id).second) continue;
        out.push_back({kg::EntityId(id), library_id, affected_range(vuln, distribution_name)});
    }
    return out;
}

}  // namespace modelselect::libingest
