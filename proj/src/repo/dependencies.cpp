// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/repo/dependencies.hpp"

#include <algorithm>
#include <regex>

#include "modelselect/common/config.hpp"
#include "modelselect/common/error.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"

namespace modelselect::repo {

namespace {

std::string file_name(std::string_view path)
{
    auto slash = path.rfind('/');
    return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

// Leading distribution name of a PEP 508 requirement string.
std::optional<std::string> requirement_name(std::string_view spec)
{
    static const std::regex name_re(R"(^\s*([A-Za-z0-9](?:[A-Za-z0-9._-]*[A-Za-z0-9])?))");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(spec.begin(), spec.end(), m, name_re)) {
        return std::nullopt;
    }
    auto after = spec.substr(static_cast<std::size_t>(m[0].length()));
    auto next = text::trim(after);
    // "name @ url" is fine; "./path" or "git+https://..." never match the regex start.
    if (!next.empty() && next[0] == ':') {
        return std::nullopt;
    }
    return kg::normalize_distribution_name(m[1].str());
}

}  // namespace

std::set<std::string> DependencyResult::all() const
{
    auto out = import_roots;
    out.insert(manifest_names.begin(), manifest_names.end());
    return out;
}

bool is_source_path(std::string_view path) { return path.size() > 3 && path.substr(path.size() - 3) == ".py"; }

bool is_manifest_path(std::string_view path)
{
    auto name = file_name(path);
    if (name == "pyproject.toml") {
        return true;
    }
    return name.rfind("requirements", 0) == 0 && name.size() > 4 && name.substr(name.size() - 4) == ".txt";
}

std::set<std::string> parse_requirements(std::string_view text)
{
    std::set<std::string> names;
    for (auto& raw : text::split(text, '\n')) {
        auto line = text::trim(raw);
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line = text::trim(line.substr(0, hash));
        }
        if (line.empty() || line[0] == '-' ||
            (line.find("://") != std::string::npos && line.find('@') == std::string::npos)) {
            continue;
        }
        if (auto name = requirement_name(line)) {
            names.insert(*name);
        }
    }
    return names;
}

std::set<std::string> parse_pyproject(std::string_view text)
{
    std::set<std::string> names;
    auto doc = config::parse_toml(text, "pyproject.toml");
    if (auto project = doc.find("project"); project != doc.end() && project->contains("dependencies")) {
        for (const auto& dep : (*project)["dependencies"]) {
            if (dep.is_string()) {
                if (auto name = requirement_name(dep.get<std::string>())) names.insert(*name);
            }
        }
    }
    if (auto tool = doc.find("tool"); tool != doc.end() && tool->contains("poetry")) {
        const auto& poetry = (*tool)["poetry"];
        if (poetry.contains("dependencies")) {
            for (const auto& [key, _] : poetry["dependencies"].items()) {
                if (key != "python") names.insert(kg::normalize_distribution_name(key));
            }
        }
    }
    return names;
}

std::set<std::string> local_roots(const RepoSnapshotEntry& entry)
{
    std::set<std::string> roots;
    for (const auto& file : entry.files) {
        if (!is_source_path(file.path)) {
            continue;
        }
        auto parts = text::split(file.path, '/');
        auto stem = parts.back().substr(0, parts.back().size() - 3);
        if (stem != "__init__" && is_identifier(stem)) {
            roots.insert(stem);
        }
        if (parts.back() == "__init__.py" && parts.size() >= 2) {
            for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
                if (is_identifier(parts[i])) roots.insert(parts[i]);
            }
        }
    }
    return roots;
}

DependencyResult extract_dependencies(const RepoSnapshotEntry& entry, const ExtractionLimits& limits)
{
    if (limits.max_files == 0 || limits.max_bytes_per_file == 0) {
        throw Error("extraction limits must be positive");
    }
    DependencyResult result;
    std::vector<const SourceFile*> sources;
    std::vector<const SourceFile*> manifests;
    for (const auto& file : entry.files) {
        if (is_source_path(file.path)) sources.push_back(&file);
        else if (is_manifest_path(file.path)) manifests.push_back(&file);
    }
    auto by_path = [](const SourceFile* a, const SourceFile* b) { return a->path < b->path; };
    std::sort(sources.begin(), sources.end(), by_path);
    std::sort(manifests.begin(), manifests.end(), by_path);

    if (sources.size() > limits.max_files) {
        result.truncated = true;
        result.notes.push_back("scanned " + std::to_string(limits.max_files) + " of " + std::to_string(sources.size()) +
                               " source files");
        sources.resize(limits.max_files);
    }
    auto locals = local_roots(entry);
    for (const auto* file : sources) {
        std::string_view body = file->text;
        if (body.size() > limits.max_bytes_per_file) {
            result.truncated = true;
            result.notes.push_back(file->path + " truncated at " + std::to_string(limits.max_bytes_per_file) + " bytes");
            body = body.substr(0, limits.max_bytes_per_file);
        }
        if (file->lossy) {
            result.notes.push_back(file->path + " contained invalid UTF-8");
        }
        for (auto& record : scan_imports(body, file->path, entry.metadata.id.str())) {
            if (locals.count(record.import_root) != 0) {
                continue;
            }
            result.import_roots.insert(record.import_root);
            result.records.push_back(std::move(record));
        }
    }
    if (limits.use_manifests) {
        for (const auto* file : manifests) {
            try {
                auto names = file_name(file->path) == "pyproject.toml" ? parse_pyproject(file->text)
                                                                       : parse_requirements(file->text);
                result.manifest_names.insert(names.begin(), names.end());
            } catch (const ParseError& e) {
                result.notes.push_back(file->path + ": " + e.what());
            }
        }
    }
    return result;
}

kg::Repository repository_from_metadata(const nlohmann::json& j)
{
    kg::Repository r;
    r.name = j.at("name").get<std::string>();
    r.url = j.value("url", "");
    r.description = j.value("description", "");
    r.stars = j.value("stars", std::int64_t{0});
    r.forks = j.value("forks", std::int64_t{0});
    r.size_kb = j.value("size_kb", std::int64_t{0});
    r.language = j.value("language", "");
    r.contributors = j.value("contributors", std::int64_t{0});
    r.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    r.updated_at = parse_timestamp(j.at("updated_at").get<std::string>());
    r.topics = j.value("topics", std::vector<std::string>{});
    r.id = kg::ids::repository(r.url.empty() ? r.name : r.url);
    return r;
}

RepoSnapshotEntry load_repo_snapshot(const std::filesystem::path& dir)
{
    RepoSnapshotEntry entry;
    auto meta_path = dir / "metadata.json";
    try {
        entry.metadata = repository_from_metadata(nlohmann::json::parse(io::read_file(meta_path)));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(meta_path.string(), 1, e.what());
    }
    std::vector<std::filesystem::path> paths;
    for (const auto& item : std::filesystem::recursive_directory_iterator(dir)) {
        if (item.is_regular_file()) paths.push_back(item.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        auto rel = std::filesystem::relative(path, dir).generic_string();
        if (!is_source_path(rel) && !is_manifest_path(rel)) {
            continue;
        }
        SourceFile file;
        file.path = rel;
        file.text = text::decode_utf8_lossy(io::read_file(path), file.lossy);
        if (file.lossy) {
            logger().warn("{}: invalid UTF-8 replaced", path.string());
        }
        entry.files.push_back(std::move(file));
    }
    return entry;
}

}  // namespace modelselect::repo
