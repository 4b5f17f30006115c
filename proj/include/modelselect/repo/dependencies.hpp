// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modelselect/knowledge/types.hpp"
#include "modelselect/repo/imports.hpp"

namespace modelselect::repo {

struct SourceFile {
    std::string path;  // relative, '/'-separated
    std::string text;
    bool lossy = false;  // invalid UTF-8 was replaced
};

struct RepoSnapshotEntry {
    kg::Repository metadata;
    std::vector<SourceFile> files;
};

struct ExtractionLimits {
    std::size_t max_files = 500;
    std::size_t max_bytes_per_file = 512 * 1024;
    bool use_manifests = true;
};

struct DependencyResult {
    std::set<std::string> import_roots;    // after local-package exclusion
    std::set<std::string> manifest_names;  // normalized distribution names
    std::vector<ImportRecord> records;
    bool truncated = false;
    std::vector<std::string> notes;

    std::set<std::string> all() const;
};

/// Source files are *.py; manifests are requirements*.txt and pyproject.toml.
bool is_source_path(std::string_view path);
bool is_manifest_path(std::string_view path);

/// Distribution names declared in a requirements file (options, URLs, comments skipped).
std::set<std::string> parse_requirements(std::string_view text);

/// [project].dependencies and [tool.poetry.dependencies] (python itself excluded).
std::set<std::string> parse_pyproject(std::string_view text);

/// Top-level names that belong to the repository itself: directories holding an
/// __init__.py and the stems of .py files.
std::set<std::string> local_roots(const RepoSnapshotEntry& entry);

DependencyResult extract_dependencies(const RepoSnapshotEntry& entry, const ExtractionLimits& limits);

/// Reads <dir>/metadata.json plus every source and manifest file below `dir`.
RepoSnapshotEntry load_repo_snapshot(const std::filesystem::path& dir);

/// Repository metadata from its JSON form (ids derived when absent).
kg::Repository repository_from_metadata(const nlohmann::json& j);

}  // namespace modelselect::repo
