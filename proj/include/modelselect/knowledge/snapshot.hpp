// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "modelselect/knowledge/graph.hpp"

namespace modelselect::kg {

struct ManifestEntry {
    std::string name;
    std::size_t records = 0;
    std::string sha256;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
    std::vector<ManifestEntry> files;
    /// Short digest of the manifest bytes; changes whenever any file changes.
    std::string version;
};

/// The eight record files in manifest order.
const std::vector<std::string>& snapshot_file_names();

/// Writes the record files (sorted by id, one JSON object per line) and then
/// manifest.json. Output is byte-identical for equal graphs.
Manifest save_snapshot(const KnowledgeGraph& graph, const std::filesystem::path& directory);

/// Verifies manifest checksums and record counts before parsing. Errors name
/// the offending file (and line for malformed records).
KnowledgeGraph load_snapshot(const std::filesystem::path& directory);

Manifest read_manifest(const std::filesystem::path& directory);

}  // namespace modelselect::kg
