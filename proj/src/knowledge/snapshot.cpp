// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/knowledge/snapshot.hpp"

#include <algorithm>

#include "modelselect/common/error.hpp"
#include "modelselect/common/hash.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/knowledge/serialize.hpp"

namespace modelselect::kg {

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kFormat = "modelselect-snapshot";
constexpr int kFormatVersion = 1;

template <typename Map>
std::string render_table(const Map& table, std::size_t& count)
{
    std::string out;
    count = 0;
    for (const auto& [id, entity] : table) {
        out += dump_line(to_json(entity));
        out.push_back('\n');
        ++count;
    }
    return out;
}

std::string render_manifest(const std::vector<ManifestEntry>& files)
{
    ordered_json manifest;
    manifest["format"] = kFormat;
    manifest["format_version"] = kFormatVersion;
    auto list = ordered_json::array();
    for (const auto& f : files) {
        ordered_json entry;
        entry["name"] = f.name;
        entry["records"] = f.records;
        entry["sha256"] = f.sha256;
        list.push_back(std::move(entry));
    }
    manifest["files"] = std::move(list);
    return manifest.dump(2) + "\n";
}

}  // namespace

const std::vector<std::string>& snapshot_file_names()
{
    static const std::vector<std::string> names = {
        "base_models.jsonl", "variations.jsonl", "features.jsonl", "libraries.jsonl",
        "repositories.jsonl", "quality.jsonl", "cves.jsonl", "edges.jsonl",
    };
    return names;
}

Manifest save_snapshot(const KnowledgeGraph& graph, const std::filesystem::path& directory)
{
    std::filesystem::create_directories(directory);
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::size_t> counts(snapshot_file_names().size());
    const auto& names = snapshot_file_names();
    files.emplace_back(names[0], render_table(graph.base_models(), counts[0]));
    files.emplace_back(names[1], render_table(graph.variations(), counts[1]));
    files.emplace_back(names[2], render_table(graph.features(), counts[2]));
    files.emplace_back(names[3], render_table(graph.libraries(), counts[3]));
    files.emplace_back(names[4], render_table(graph.repositories(), counts[4]));
    files.emplace_back(names[5], render_table(graph.quality(), counts[5]));
    files.emplace_back(names[6], render_table(graph.cves(), counts[6]));
    files.emplace_back(names[7], render_table(graph.edges(), counts[7]));

    Manifest manifest;
    for (std::size_t i = 0; i < files.size(); ++i) {
        io::write_file(directory / files[i].first, files[i].second);
        manifest.files.push_back({files[i].first, counts[i], sha256_hex(files[i].second)});
    }
    auto manifest_text = render_manifest(manifest.files);
    io::write_file(directory / kManifestName, manifest_text);
    manifest.version = sha256_hex(manifest_text).substr(0, 16);
    return manifest;
}

Manifest read_manifest(const std::filesystem::path& directory)
{
    auto path = directory / kManifestName;
    if (!std::filesystem::exists(path)) {
        throw Error("snapshot manifest missing: " + path.string());
    }
    auto manifest_text = io::read_file(path);
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(manifest_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(kManifestName, 1, e.what());
    }
    Manifest manifest;
    try {
        if (parsed.at("format").get<std::string>() != kFormat || parsed.at("format_version").get<int>() != kFormatVersion) {
            throw Error(std::string(kManifestName) + ": unsupported snapshot format");
        }
        for (const auto& f : parsed.at("files")) {
            manifest.files.push_back(
                {f.at("name").get<std::string>(), f.at("records").get<std::size_t>(), f.at("sha256").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(kManifestName, 1, e.what());
    }
    manifest.version = sha256_hex(manifest_text).substr(0, 16);
    return manifest;
}

KnowledgeGraph load_snapshot(const std::filesystem::path& directory)
{
    auto manifest = read_manifest(directory);
    for (const auto& expected : snapshot_file_names()) {
        auto it = std::find_if(manifest.files.begin(), manifest.files.end(),
                               [&](const ManifestEntry& e) { return e.name == expected; });
        if (it == manifest.files.end()) {
            throw Error("snapshot manifest does not list " + expected);
        }
        auto path = directory / expected;
        if (!std::filesystem::exists(path)) {
            throw Error("snapshot file missing: " + expected);
        }
        auto contents = io::read_file(path);
        if (sha256_hex(contents) != it->sha256) {
            throw Error("snapshot checksum mismatch: " + expected);
        }
        auto lines = static_cast<std::size_t>(std::count(contents.begin(), contents.end(), '\n'));
        if (lines != it->records) {
            throw Error("snapshot record count mismatch: " + expected + " (manifest " +
                        std::to_string(it->records) + ", file " + std::to_string(lines) + ")");
        }
    }

    std::vector<Entity> entities;
    std::vector<Edge> edges;
    const auto& names = snapshot_file_names();
    auto read = [&](std::size_t file_index, auto parse) {
        io::for_each_jsonl(directory / names[file_index],
                           [&](const nlohmann::json& record, std::size_t) { parse(record); });
    };
    read(0, [&](const nlohmann::json& j) { entities.emplace_back(base_model_from_json(j)); });
    read(1, [&](const nlohmann::json& j) { entities.emplace_back(variation_from_json(j)); });
    read(2, [&](const nlohmann::json& j) { entities.emplace_back(feature_from_json(j)); });
    read(3, [&](const nlohmann::json& j) { entities.emplace_back(library_from_json(j)); });
    read(4, [&](const nlohmann::json& j) { entities.emplace_back(repository_from_json(j)); });
    read(5, [&](const nlohmann::json& j) { entities.emplace_back(quality_from_json(j)); });
    read(6, [&](const nlohmann::json& j) { entities.emplace_back(cve_from_json(j)); });
    read(7, [&](const nlohmann::json& j) { edges.push_back(edge_from_json(j)); });
    return KnowledgeGraph::from_tables(std::move(entities), std::move(edges));
}

}  // namespace modelselect::kg
