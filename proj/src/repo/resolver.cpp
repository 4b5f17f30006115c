// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/repo/resolver.hpp"

#include "modelselect/common/error.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/knowledge/types.hpp"
#include "modelselect/repo/imports.hpp"

namespace modelselect::repo {

std::map<std::string, std::string> parse_import_map(std::string_view text, std::string_view source_name)
{
    std::map<std::string, std::string> out;
    std::size_t line_number = 0;
    for (const auto& raw : text::split(text, '\n')) {
        ++line_number;
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto parts = text::split(line, '\t');
        if (parts.size() != 2 || text::trim(parts[0]).empty() || text::trim(parts[1]).empty()) {
            throw ParseError(std::string(source_name), line_number, "expected 'import<TAB>distribution'");
        }
        out[text::trim(parts[0])] = kg::normalize_distribution_name(text::trim(parts[1]));
    }
    return out;
}

ResolverTables ResolverTables::load(const std::filesystem::path& dir)
{
    ResolverTables tables;
    tables.import_to_distribution = parse_import_map(io::read_file(dir / "import_to_dist.map"));
    for (auto& name : io::read_list_file(dir / "python_stdlib.txt")) tables.stdlib_modules.insert(name);
    for (auto& name : io::read_list_file(dir / "known_distributions.txt")) {
        tables.known_distributions.insert(kg::normalize_distribution_name(name));
    }
    return tables;
}

std::string_view to_string(ResolutionSource source) noexcept
{
    switch (source) {
    case ResolutionSource::Mapping: return "mapping";
    case ResolutionSource::Registry: return "registry";
    case ResolutionSource::OfflineList: return "offline-list";
    case ResolutionSource::Stdlib: return "stdlib";
    case ResolutionSource::Unresolved: return "unresolved";
    }
    return "unresolved";
}

ImportResolver::ImportResolver(ResolverTables tables, RegistryProbe probe)
    : tables_(std::move(tables)), probe_(std::move(probe))
{}

Resolution ImportResolver::resolve(const std::string& import_root)
{
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(import_root); it != cache_.end()) return it->second;
    }
    // Computed outside the lock so slow registry calls do not serialize callers;
    // two threads racing on one name store the same value.
    auto result = compute(import_root);
    std::lock_guard lock(mutex_);
    cache_[import_root] = result;
    return result;
}

Resolution ImportResolver::compute(const std::string& import_root)
{
    if (!is_identifier(import_root)) {
        return {};
    }
    if (tables_.stdlib_modules.count(import_root) != 0) {
        return {std::nullopt, ResolutionSource::Stdlib};
    }
    if (auto it = tables_.import_to_distribution.find(import_root); it != tables_.import_to_distribution.end()) {
        return {it->second, ResolutionSource::Mapping};
    }
    auto identity = kg::normalize_distribution_name(import_root);
    if (probe_) {
        try {
            if (probe_(identity)) return {identity, ResolutionSource::Registry};
            return {};
        } catch (const TransportError& e) {
            logger().warn("registry unavailable while resolving '{}': {}", import_root, e.what());
        }
    }
    if (tables_.known_distributions.count(identity) != 0) {
        return {identity, ResolutionSource::OfflineList};
    }
    return {};
}

}  // namespace modelselect::repo
