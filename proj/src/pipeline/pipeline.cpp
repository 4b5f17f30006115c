// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/pipeline/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "modelselect/common/config.hpp"
#include "modelselect/common/error.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/extract/extract.hpp"
#include "modelselect/knowledge/serialize.hpp"
#include "modelselect/knowledge/snapshot.hpp"
#include "modelselect/libingest/registry.hpp"
#include "modelselect/quality/quality.hpp"
#include "modelselect/repo/imports.hpp"
#include "modelselect/repo/resolver.hpp"

namespace modelselect::pipeline {

namespace {

std::filesystem::path relative_to(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

const nlohmann::json& section(const nlohmann::json& doc, const char* name)
{
    static const nlohmann::json empty = nlohmann::json::object();
    return doc.contains(name) ? doc.at(name) : empty;
}

std::string base64_decode(std::string_view encoded)
{
    std::string compact;
    for (char c : encoded) {
        if (c != '\n' && c != '\r' && c != ' ') compact.push_back(c);
    }
    if (compact.size() % 4 != 0) {
        throw ProtocolError("base64 payload has a bad length");
    }
    std::string out(compact.size() / 4 * 3, '\0');
    int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            reinterpret_cast<const unsigned char*>(compact.data()), static_cast<int>(compact.size()));
    if (n < 0) {
        throw ProtocolError("invalid base64 payload");
    }
    std::size_t padding = 0;
    for (auto it = compact.rbegin(); it != compact.rend() && *it == '='; ++it) ++padding;
    out.resize(static_cast<std::size_t>(n) - padding);
    return out;
}

void note(StageReport& report, std::string message)
{
    logger().info("{}: {}", report.stage, message);
    report.notes.push_back(std::move(message));
}

void absorb(StageReport& report, const kg::ChangeSummary& changes)
{
    auto add = [](kg::ChangeCounts& into, const kg::ChangeCounts& from) {
        into.inserted += from.inserted;
        into.updated += from.updated;
        into.rejected += from.rejected;
    };
    add(report.changes.entities, changes.entities);
    add(report.changes.edges, changes.edges);
    report.changes.diagnostics.insert(report.changes.diagnostics.end(), changes.diagnostics.begin(),
                                      changes.diagnostics.end());
}

}  // namespace

NetworkMode network_mode_from_string(std::string_view name)
{
    if (name == "replay") return NetworkMode::Replay;
    if (name == "record") return NetworkMode::Record;
    if (name == "live") return NetworkMode::Live;
    throw Error("unknown network mode '" + std::string(name) + "' (expected replay, record or live)");
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path, const std::filesystem::path& resource_dir)
{
    auto doc = config::load_toml(path);
    PipelineConfig c;
    c.base_dir = path.parent_path();
    c.resource_dir = resource_dir;
    try {
        c.as_of = parse_timestamp(doc.at("as_of").get<std::string>());

        const auto& repos = section(doc, "repos");
        if (repos.contains("source")) c.repos_dir = relative_to(c.base_dir, repos["source"].get<std::string>());
        c.github_repos = repos.value("github", std::vector<std::string>{});
        c.github_api = repos.value("github_api", c.github_api);
        c.taxonomy_file = repos.contains("taxonomy") ? relative_to(c.base_dir, repos["taxonomy"].get<std::string>())
                                                     : resource_dir / "taxonomy_terms.txt";
        c.limits.use_manifests = repos.value("use_manifests", c.limits.use_manifests);
        c.limits.max_files = repos.value("max_files", c.limits.max_files);
        c.limits.max_bytes_per_file = repos.value("max_bytes_per_file", c.limits.max_bytes_per_file);
        c.filter = repo::FilterPolicy::from_json(section(doc, "filter"), c.as_of);

        c.registry_url = section(doc, "registry").value("base_url", c.registry_url);
        c.osv_url = section(doc, "osv").value("base_url", c.osv_url);
        const auto& crawl = section(doc, "crawl");
        c.crawl.max_urls = crawl.value("max_urls", c.crawl.max_urls);
        c.crawl.same_site_only = crawl.value("same_site_only", c.crawl.same_site_only);

        const auto& network = section(doc, "network");
        c.network = network_mode_from_string(network.value("mode", std::string("replay")));
        c.replay_dir = relative_to(c.base_dir, network.value("replay_dir", std::string("replay")));
        c.requests_per_second = network.value("requests_per_second", c.requests_per_second);

        const auto& prov = section(doc, "provider");
        if (prov.contains("config")) c.provider_config = relative_to(c.base_dir, prov["config"].get<std::string>());

        const auto& reviews = section(doc, "reviews");
        if (reviews.contains("source")) c.reviews_file = relative_to(c.base_dir, reviews["source"].get<std::string>());
        c.forum_url = reviews.value("base_url", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 0, std::string("bad pipeline config: ") + e.what());
    }
    if (c.repos_dir.empty() && c.github_repos.empty()) {
        throw ParseError(path.string(), 0, "[repos] needs source or github");
    }
    if (c.crawl.max_urls < 1) {
        throw ParseError(path.string(), 0, "crawl.max_urls must be >= 1");
    }
    if (c.requests_per_second <= 0.0) {
        throw ParseError(path.string(), 0, "network.requests_per_second must be positive");
    }
    return c;
}

std::shared_ptr<net::Transport> make_transport(const PipelineConfig& config)
{
    if (config.network == NetworkMode::Live) {
        return std::make_shared<net::LiveTransport>(config.requests_per_second);
    }
    auto store = std::make_shared<net::ReplayStore>(config.replay_dir);
    if (config.network == NetworkMode::Replay) {
        return std::make_shared<net::ReplayTransport>(store, net::ReplayMode::Replay);
    }
    return std::make_shared<net::ReplayTransport>(store, net::ReplayMode::Record,
                                                  std::make_shared<net::LiveTransport>(config.requests_per_second));
}

net::RetryPolicy retry_policy(const PipelineConfig& config)
{
    net::RetryPolicy policy;
    if (config.network == NetworkMode::Replay) {
        policy.attempts = 1;
    }
    return policy;
}

provider::ProviderConfig provider_settings(const PipelineConfig& config)
{
    return config.provider_config ? provider::ProviderConfig::load(*config.provider_config) : provider::ProviderConfig{};
}

std::unique_ptr<provider::Backend> make_backend(const PipelineConfig& config, std::shared_ptr<net::Transport> transport)
{
    return provider::make_backend(provider_settings(config), config.resource_dir, std::move(transport));
}

std::filesystem::path docs_file(const std::filesystem::path& data_dir) { return data_dir / "work" / "docs.jsonl"; }

std::filesystem::path two_way_index_file(const std::filesystem::path& data_dir)
{
    return data_dir / "exports" / "two_way_index.jsonl";
}

GitHubClient::GitHubClient(std::shared_ptr<net::Transport> transport, std::string api_base, std::string token,
                           net::RetryPolicy retry)
    : transport_(std::move(transport)), api_base_(std::move(api_base)), token_(std::move(token)), retry_(std::move(retry))
{
    while (!api_base_.empty() && api_base_.back() == '/') api_base_.pop_back();
}

nlohmann::json GitHubClient::get_json(const std::string& url)
{
    net::HttpRequest request;
    request.url = url;
    request.headers["Accept"] = "application/vnd.github+json";
    if (!token_.empty()) request.headers["Authorization"] = "Bearer " + token_;
    auto response = net::send_with_retry(*transport_, request, retry_);
    if (response.status == 404) {
        throw NotFoundError("not found: " + url);
    }
    if (response.status != 200) {
        throw ProtocolError("HTTP " + std::to_string(response.status) + " from " + url);
    }
    try {
        return nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProtocolError("unreadable response from " + url + ": " + e.what());
    }
}

repo::RepoSnapshotEntry GitHubClient::fetch(const std::string& full_name, std::size_t max_files)
{
    auto base = api_base_ + "/repos/" + full_name;
    auto meta = get_json(base);
    repo::RepoSnapshotEntry entry;
    try {
        nlohmann::json m{
            {"name", meta.at("full_name")},
            {"url", meta.at("html_url")},
            {"description", meta["description"].is_string() ? meta["description"].get<std::string>() : ""},
            {"stars", meta.value("stargazers_count", 0)},
            {"forks", meta.value("forks_count", 0)},
            {"size_kb", meta.value("size", 0)},
            {"language", meta["language"].is_string() ? meta["language"].get<std::string>() : ""},
            {"created_at", meta.at("created_at")},
            {"updated_at", meta.at("updated_at")},
            {"topics", meta.value("topics", std::vector<std::string>{})},
        };
        // Contributor counts need another paginated endpoint; callers supply them in snapshots.
        entry.metadata = repo::repository_from_metadata(m);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError("unexpected repository payload for " + full_name + ": " + e.what());
    }
    auto branch = meta.value("default_branch", std::string("main"));
    auto tree = get_json(base + "/git/trees/" + net::url_encode(branch) + "?recursive=1");
    std::vector<std::string> paths;
    for (const auto& item : tree.value("tree", nlohmann::json::array())) {
        if (item.value("type", "") != "blob") continue;
        auto path = item.value("path", "");
        if (repo::is_source_path(path) || repo::is_manifest_path(path)) paths.push_back(path);
    }
    std::sort(paths.begin(), paths.end());
    if (paths.size() > max_files) paths.resize(max_files);
    for (const auto& path : paths) {
        auto content = get_json(base + "/contents/" + path + "?ref=" + net::url_encode(branch));
        repo::SourceFile file;
        file.path = path;
        file.text = text::decode_utf8_lossy(base64_decode(content.value("content", "")), file.lossy);
        entry.files.push_back(std::move(file));
    }
    return entry;
}

ResolvedDependencies resolve_dependencies(const repo::RepoSnapshotEntry& entry, const repo::ExtractionLimits& limits,
                                          repo::ImportResolver& resolver)
{
    ResolvedDependencies out;
    auto deps = repo::extract_dependencies(entry, limits);
    out.truncated = deps.truncated;
    for (const auto& root : deps.import_roots) {
        ++out.import_roots;
        auto resolution = resolver.resolve(root);
        if (resolution.distribution) {
            out.distributions.insert(*resolution.distribution);
        } else if (resolution.source == repo::ResolutionSource::Stdlib) {
            ++out.stdlib;
        } else {
            out.unresolved.push_back(root);
        }
    }
    out.distributions.insert(deps.manifest_names.begin(), deps.manifest_names.end());
    return out;
}

namespace {

std::vector<repo::RepoSnapshotEntry> load_snapshot_dir(const std::filesystem::path& repos_dir)
{
    std::vector<std::filesystem::path> dirs;
    for (const auto& item : std::filesystem::directory_iterator(repos_dir)) {
        if (item.is_directory() && std::filesystem::exists(item.path() / "metadata.json")) dirs.push_back(item.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<repo::RepoSnapshotEntry> entries;
    for (const auto& dir : dirs) entries.push_back(repo::load_repo_snapshot(dir));
    return entries;
}

}  // namespace

std::map<std::string, std::set<std::string>> dependency_table(const PipelineConfig& config,
                                                              std::shared_ptr<net::Transport> transport)
{
    if (config.repos_dir.empty()) throw Error("dependency_table needs a [repos] source directory");
    libingest::RegistryClient registry(std::move(transport), config.registry_url, retry_policy(config));
    repo::ImportResolver resolver(repo::ResolverTables::load(config.resource_dir),
                                  [&registry](const std::string& name) { return registry.exists(name); });
    std::map<std::string, std::set<std::string>> table;
    for (const auto& entry : load_snapshot_dir(config.repos_dir)) {
        table[entry.metadata.name] = resolve_dependencies(entry, config.limits, resolver).distributions;
    }
    return table;
}

StageReport ingest_repositories(const PipelineConfig& config, kg::GraphStore& store,
                                std::shared_ptr<net::Transport> transport)
{
    StageReport report;
    report.stage = "repos";

    std::vector<repo::RepoSnapshotEntry> entries;
    if (!config.repos_dir.empty()) entries = load_snapshot_dir(config.repos_dir);
    if (!config.github_repos.empty()) {
        GitHubClient client(transport, config.github_api, io::getenv_or("MODELSELECT_GH_TOKEN", ""), retry_policy(config));
        for (const auto& name : config.github_repos) {
            try {
                entries.push_back(client.fetch(name, config.limits.max_files));
            } catch (const Error& e) {
                note(report, "repository " + name + " skipped: " + e.what());
            }
        }
    }
    report.counts["loaded"] = entries.size();
    if (entries.empty()) {
        note(report, "no repositories to ingest");
        return report;
    }

    std::vector<kg::Repository> metadata;
    for (const auto& e : entries) metadata.push_back(e.metadata);
    std::set<kg::EntityId> kept;
    for (const auto& r : repo::filter_repositories(metadata, config.filter)) kept.insert(r.id);
    report.counts["kept"] = kept.size();

    auto taxonomy = io::read_list_file(config.taxonomy_file);
    libingest::RegistryClient registry(transport, config.registry_url, retry_policy(config));
    repo::ImportResolver resolver(repo::ResolverTables::load(config.resource_dir),
                                  [&registry](const std::string& name) { return registry.exists(name); });

    kg::Batch batch;
    std::size_t imports = 0, unresolved = 0, stdlib = 0;
    for (const auto& entry : entries) {
        if (!kept.count(entry.metadata.id)) continue;
        auto repository = entry.metadata;
        repository.categories = repo::categorize_repository(repository, taxonomy);
        auto deps = resolve_dependencies(entry, config.limits, resolver);
        if (deps.truncated) note(report, repository.name + ": dependency scan truncated");
        imports += deps.import_roots;
        stdlib += deps.stdlib;
        unresolved += deps.unresolved.size();
        for (const auto& root : deps.unresolved) note(report, repository.name + ": import '" + root + "' unresolved");
        repository.dependency_names = std::move(deps.distributions);
        batch.entities.emplace_back(std::move(repository));
    }
    report.counts["import_roots"] = imports;
    report.counts["stdlib"] = stdlib;
    report.counts["unresolved"] = unresolved;
    absorb(report, store.apply(batch));
    return report;
}

StageReport ingest_libraries(const PipelineConfig& config, kg::GraphStore& store,
                             std::shared_ptr<net::Transport> transport, const std::filesystem::path& data_dir)
{
    StageReport report;
    report.stage = "libraries";
    auto graph = store.snapshot();

    // Popularity of a library: stars and forks summed over the repositories importing it.
    std::map<std::string, kg::Popularity> wanted;
    for (const auto& [id, r] : graph->repositories()) {
        for (const auto& name : r.dependency_names) {
            auto& p = wanted[name];
            p.stars += r.stars;
            p.forks += r.forks;
        }
    }
    report.counts["distributions"] = wanted.size();

    auto lexicon = libingest::AiLexicon::load(config.resource_dir / "ai_lexicon.toml");
    libingest::RegistryClient registry(transport, config.registry_url, retry_policy(config));
    libingest::VulnerabilityClient osv(transport, config.osv_url, retry_policy(config));
    libingest::Crawler crawler(transport, retry_policy(config));

    kg::Batch batch;  // advisories
    std::vector<kg::Entity> libraries;
    std::string docs;
    std::size_t ai = 0, pages = 0, missing = 0;
    for (const auto& [name, popularity] : wanted) {
        std::optional<libingest::RegistryMetadata> meta;
        try {
            meta = registry.fetch(name);
        } catch (const Error& e) {
            note(report, name + ": registry lookup failed: " + e.what());
            ++missing;
            continue;
        }
        if (!meta) {
            note(report, name + ": not in registry");
            ++missing;
            continue;
        }
        std::optional<std::string> homepage_text;
        if (!meta->homepage.empty()) homepage_text = crawler.fetch_text(meta->homepage);
        auto verdict = libingest::classify_ai_related(*meta, lexicon, homepage_text);

        kg::Library lib;
        lib.distribution_name = kg::normalize_distribution_name(meta->distribution_name.empty() ? name : meta->distribution_name);
        lib.id = kg::ids::library(lib.distribution_name);
        lib.summary = meta->summary;
        lib.homepage = meta->homepage;
        lib.keywords = meta->keywords;
        lib.classifiers = meta->classifiers;
        lib.version = meta->version;
        lib.ai_related = verdict.ai_related;
        lib.ai_score = verdict.score;
        lib.popularity = popularity;
        lib.evidence.push_back({registry.request_url(name), meta->summary.empty() ? lib.distribution_name : meta->summary,
                                config.as_of});

        if (!meta->version.empty()) {
            try {
                for (auto& cve : osv.fetch(lib.distribution_name, meta->version)) {
                    lib.cve_ids.insert(cve.id);
                    batch.entities.emplace_back(std::move(cve));
                }
            } catch (const Error& e) {
                note(report, name + ": advisory lookup failed: " + e.what());
            }
        }
        if (verdict.ai_related) {
            ++ai;
            for (const auto& page : crawler.collect(*meta, config.crawl)) {
                nlohmann::ordered_json line{{"library", lib.distribution_name}, {"url", page.url}, {"text", page.text}};
                docs += kg::dump_line(line) + "\n";
                ++pages;
            }
        }
        libraries.emplace_back(std::move(lib));
    }
    report.counts["libraries"] = wanted.size() - missing;
    report.counts["ai_related"] = ai;
    report.counts["doc_pages"] = pages;
    io::write_file(docs_file(data_dir), docs);
    batch.entities.insert(batch.entities.begin(), libraries.begin(), libraries.end());
    absorb(report, store.apply(batch));
    return report;
}

StageReport extract_models(const PipelineConfig& config, kg::GraphStore& store, provider::Backend& backend,
                           const std::filesystem::path& data_dir)
{
    StageReport report;
    report.stage = "models";
    auto graph = store.snapshot();

    std::vector<extract::LibraryPages> libraries;
    std::map<kg::EntityId, std::size_t> slot;
    auto path = docs_file(data_dir);
    if (!std::filesystem::exists(path)) {
        note(report, "no crawled documentation at " + path.string());
        return report;
    }
    io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
        auto id = kg::ids::library(j.at("library").get<std::string>());
        if (!graph->libraries().count(id)) {
            throw Error("library " + j.at("library").get<std::string>() + " is not in the graph");
        }
        auto [it, fresh] = slot.emplace(id, libraries.size());
        if (fresh) libraries.push_back({id, {}});
        libraries[it->second].pages.emplace_back(j.at("url").get<std::string>(), j.at("text").get<std::string>());
    });

    extract::ExtractionSettings settings{extract::ChunkingConfig::load(config.resource_dir / "chunking.toml"),
                                         extract::BaseLexicon::load(config.resource_dir / "base_lexicon.toml"),
                                         provider_settings(config).votes};
    auto result = extract::extract_models(libraries, backend, settings, config.as_of);
    report.counts["libraries"] = libraries.size();
    report.counts["labeled_phrases"] = result.labeled.size();
    report.counts["feature_links"] = result.links.size();
    absorb(report, store.apply(result.batch));

    auto updated = store.snapshot();
    io::write_file(two_way_index_file(data_dir),
                   extract::two_way_index_jsonl(*updated, extract::build_two_way_index(*updated)));
    return report;
}

StageReport assess_quality(const PipelineConfig& config, kg::GraphStore& store, provider::Backend& backend,
                           std::shared_ptr<net::Transport> transport)
{
    StageReport report;
    report.stage = "quality";
    std::unique_ptr<quality::ReviewSource> source;
    if (config.reviews_file) {
        source = std::make_unique<quality::JsonlReviewSource>(*config.reviews_file);
    } else if (!config.forum_url.empty()) {
        source = std::make_unique<quality::HttpForumSource>(transport, config.forum_url, "forum", retry_policy(config));
    } else {
        note(report, "no review source configured");
        return report;
    }
    auto attributes = quality::load_attribute_definitions(config.resource_dir / "quality_attributes.toml");
    auto result = quality::assess_quality(*store.snapshot(), *source, backend, attributes, provider_settings(config).votes,
                                          config.as_of);
    for (auto& d : result.diagnostics) note(report, std::move(d));
    report.counts["reviews"] = result.reviews;
    report.counts["sentiment_records"] = result.records;
    report.counts["aggregates"] = result.aggregates.size();
    absorb(report, quality::attach_quality(store, result.aggregates));
    return report;
}

kg::KnowledgeGraph load_or_empty(const std::filesystem::path& data_dir)
{
    if (std::filesystem::exists(data_dir / "manifest.json")) {
        return kg::load_snapshot(data_dir);
    }
    return {};
}

std::vector<StageReport> run_all(const PipelineConfig& config, const std::filesystem::path& data_dir,
                                 std::shared_ptr<net::Transport> transport)
{
    kg::GraphStore store(load_or_empty(data_dir));
    if (!transport) transport = make_transport(config);
    auto backend = make_backend(config, transport);
    std::vector<StageReport> reports;
    reports.push_back(ingest_repositories(config, store, transport));
    reports.push_back(ingest_libraries(config, store, transport, data_dir));
    reports.push_back(extract_models(config, store, *backend, data_dir));
    reports.push_back(assess_quality(config, store, *backend, transport));
    kg::save_snapshot(*store.snapshot(), data_dir);
    return reports;
}

nlohmann::json to_json(const StageReport& report)
{
    auto counts = [](const kg::ChangeCounts& c) {
        return nlohmann::json{{"inserted", c.inserted}, {"updated", c.updated}, {"rejected", c.rejected}};
    };
    return {{"stage", report.stage},
            {"entities", counts(report.changes.entities)},
            {"edges", counts(report.changes.edges)},
            {"diagnostics", report.changes.diagnostics},
            {"counts", report.counts},
            {"notes", report.notes}};
}

std::shared_ptr<net::Transport> fixture_web(const std::filesystem::path& web_dir, const PipelineConfig& config)
{
    auto registry_prefix = config.registry_url + "/pypi/";
    auto osv_url = config.osv_url + "/v1/query";
    auto serve = [](const std::filesystem::path& file, const char* type) -> net::HttpResponse {
        if (!std::filesystem::is_regular_file(file)) return {404, "text/plain", "not found"};
        return {200, type, io::read_file(file)};
    };
    return std::make_shared<net::FunctionTransport>([=](const net::HttpRequest& request) -> net::HttpResponse {
        if (request.method == "POST" && request.url == osv_url) {
            auto body = nlohmann::json::parse(request.body, nullptr, false);
            auto name = body.is_discarded() ? std::string() : body["package"].value("name", std::string());
            auto file = web_dir / "osv" / (name + ".json");
            return std::filesystem::is_regular_file(file) ? serve(file, "application/json")
                                                          : net::HttpResponse{200, "application/json", "{}"};
        }
        if (request.method != "GET") return {405, "text/plain", "method not allowed"};
        if (request.url.rfind(registry_prefix, 0) == 0) {
            auto rest = request.url.substr(registry_prefix.size());
            auto slash = rest.find('/');
            if (slash == std::string::npos || rest.substr(slash) != "/json") return {404, "text/plain", "not found"};
            return serve(web_dir / "registry" / (rest.substr(0, slash) + ".json"), "application/json");
        }
        auto url = net::parse_url(request.url);
        auto target = url.target.substr(0, url.target.find('?'));
        if (target.find("..") != std::string::npos) return {404, "text/plain", "not found"};
        if (target.empty() || target.back() == '/') target += "index.html";
        return serve(web_dir / "sites" / url.host / target.substr(1), "text/html");
    });
}

}  // namespace modelselect::pipeline
