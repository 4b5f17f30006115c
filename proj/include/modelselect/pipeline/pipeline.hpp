// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modelselect/common/time.hpp"
#include "modelselect/knowledge/graph.hpp"
#include "modelselect/libingest/crawler.hpp"
#include "modelselect/net/http.hpp"
#include "modelselect/provider/provider.hpp"
#include "modelselect/repo/dependencies.hpp"
#include "modelselect/repo/filter.hpp"
#include "modelselect/repo/resolver.hpp"

namespace modelselect::pipeline {

enum class NetworkMode { Replay, Record, Live };

NetworkMode network_mode_from_string(std::string_view name);

/// pipeline.toml. Relative paths are taken from the file's directory.
///
///   as_of = "2025-06-01T00:00:00Z"
///   [repos]      source = "repos" | github = ["owner/name", ...], taxonomy, use_manifests, max_files, max_bytes_per_file
///   [filter]     FilterPolicy keys (reference_date defaults to as_of)
///   [registry]   base_url        [osv] base_url
///   [crawl]      max_urls, same_site_only
///   [network]    mode = replay|record|live, replay_dir, requests_per_second
///   [provider]   config = "provider.toml" (optional)
///   [reviews]    source = "reviews.jsonl" | base_url
struct PipelineConfig {
    std::filesystem::path base_dir;
    std::filesystem::path resource_dir;
    Timestamp as_of{};

    std::filesystem::path repos_dir;
    std::vector<std::string> github_repos;
    std::string github_api = "https://api.github.com";
    std::filesystem::path taxonomy_file;
    repo::ExtractionLimits limits;
    repo::FilterPolicy filter;

    std::string registry_url = "https://pypi.org";
    std::string osv_url = "https://api.osv.dev";
    libingest::CrawlLimits crawl;

    NetworkMode network = NetworkMode::Replay;
    std::filesystem::path replay_dir;
    double requests_per_second = 2.0;

    std::optional<std::filesystem::path> provider_config;

    std::optional<std::filesystem::path> reviews_file;
    std::string forum_url;

    static PipelineConfig load(const std::filesystem::path& path, const std::filesystem::path& resource_dir);
};

/// Transport per network mode: replay store only, replay store in front of the
/// live client (misses recorded), or the live client alone.
std::shared_ptr<net::Transport> make_transport(const PipelineConfig& config);

/// Retries only make sense against a live upstream; replay misses are final.
net::RetryPolicy retry_policy(const PipelineConfig& config);

/// [provider] settings; the heuristic backend with three votes when absent.
provider::ProviderConfig provider_settings(const PipelineConfig& config);
std::unique_ptr<provider::Backend> make_backend(const PipelineConfig& config,
                                                std::shared_ptr<net::Transport> transport);

struct StageReport {
    std::string stage;
    kg::ChangeSummary changes;
    std::map<std::string, std::size_t> counts;
    std::vector<std::string> notes;
};

/// Work files next to the snapshot: crawled documentation pages and exports.
std::filesystem::path docs_file(const std::filesystem::path& data_dir);
std::filesystem::path two_way_index_file(const std::filesystem::path& data_dir);

/// Minimal hosting-platform client: repository metadata, recursive tree of the
/// default branch and file contents (base64). Token from MODELSELECT_GH_TOKEN.
class GitHubClient {
  public:
    GitHubClient(std::shared_ptr<net::Transport> transport, std::string api_base, std::string token = {},
                 net::RetryPolicy retry = {});

    /// "owner/name". Only source and manifest files are downloaded, at most `max_files`.
    repo::RepoSnapshotEntry fetch(const std::string& full_name, std::size_t max_files);

  private:
    nlohmann::json get_json(const std::string& url);

    std::shared_ptr<net::Transport> transport_;
    std::string api_base_;
    std::string token_;
    net::RetryPolicy retry_;
};

struct ResolvedDependencies {
    std::set<std::string> distributions;  // resolved imports plus manifest names
    std::size_t import_roots = 0;
    std::size_t stdlib = 0;
    std::vector<std::string> unresolved;
    bool truncated = false;
};

/// Import extraction and resolution for one repository.
ResolvedDependencies resolve_dependencies(const repo::RepoSnapshotEntry& entry, const repo::ExtractionLimits& limits,
                                          repo::ImportResolver& resolver);

/// Every repository of the configured snapshot directory, before filtering:
/// repository name -> distributions. Registry probes go through `transport`.
std::map<std::string, std::set<std::string>> dependency_table(const PipelineConfig& config,
                                                              std::shared_ptr<net::Transport> transport);

/// Pipeline 1: load, filter, categorize, extract and resolve dependencies.
/// Repositories are upserted with their resolved distribution names.
StageReport ingest_repositories(const PipelineConfig& config, kg::GraphStore& store,
                                std::shared_ptr<net::Transport> transport);

/// Pipeline 2: registry metadata, AI classification, advisories and the
/// documentation crawl for every distribution a repository depends on. Pages of
/// AI-related libraries are written to docs_file(data_dir).
StageReport ingest_libraries(const PipelineConfig& config, kg::GraphStore& store,
                             std::shared_ptr<net::Transport> transport, const std::filesystem::path& data_dir);

/// Pipeline 3: model, variation and feature extraction from docs_file(data_dir).
StageReport extract_models(const PipelineConfig& config, kg::GraphStore& store, provider::Backend& backend,
                           const std::filesystem::path& data_dir);

/// Pipeline 4: review harvesting, sentence classification and aggregation.
StageReport assess_quality(const PipelineConfig& config, kg::GraphStore& store, provider::Backend& backend,
                           std::shared_ptr<net::Transport> transport);

/// All four pipelines in order into `data_dir`, then save_snapshot there.
/// `transport` replaces the one selected by the network mode.
std::vector<StageReport> run_all(const PipelineConfig& config, const std::filesystem::path& data_dir,
                                 std::shared_ptr<net::Transport> transport = nullptr);

/// Loads the snapshot in `data_dir` when a manifest exists, else an empty graph.
kg::KnowledgeGraph load_or_empty(const std::filesystem::path& data_dir);

nlohmann::json to_json(const StageReport& report);

/// Serves a directory laid out like the fixture corpus web/ tree:
///   GET  {registry}/pypi/{name}/json  -> registry/{name}.json
///   POST {osv}/v1/query               -> osv/{package name}.json, else "{}"
///   GET  https://{host}/{path}        -> sites/{host}/{path} (text/html)
/// Anything else is a 404. Used to (re)record replay stores offline.
std::shared_ptr<net::Transport> fixture_web(const std::filesystem::path& web_dir, const PipelineConfig& config);

}  // namespace modelselect::pipeline
