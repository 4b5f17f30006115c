// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace modelselect::repo {

struct ResolverTables {
    std::map<std::string, std::string> import_to_distribution;
    std::set<std::string> stdlib_modules;
    std::set<std::string> known_distributions;  // normalized names

    /// import_to_dist.map, python_stdlib.txt and known_distributions.txt from `dir`.
    static ResolverTables load(const std::filesystem::path& dir);
};

/// Parses "import<TAB>distribution" lines ('#' comments allowed).
std::map<std::string, std::string> parse_import_map(std::string_view text, std::string_view source_name = "import_to_dist.map");

enum class ResolutionSource { Mapping, Registry, OfflineList, Stdlib, Unresolved };

std::string_view to_string(ResolutionSource source) noexcept;

struct Resolution {
    std::optional<std::string> distribution;  // normalized; empty when unresolved
    ResolutionSource source = ResolutionSource::Unresolved;

    friend bool operator==(const Resolution&, const Resolution&) = default;
};

/// Answers whether the registry has a distribution with this exact name.
/// Throws TransportError when the registry cannot be reached.
using RegistryProbe = std::function<bool(const std::string&)>;

/// Order: standard library (never a distribution) -> mapping table -> registry
/// identity check -> offline known-distribution list when the registry is
/// unreachable -> unresolved. Results are cached; safe to share across threads.
class ImportResolver {
  public:
    explicit ImportResolver(ResolverTables tables, RegistryProbe probe = {});

    Resolution resolve(const std::string& import_root);

  private:
    Resolution compute(const std::string& import_root);

    ResolverTables tables_;
    RegistryProbe probe_;
    std::mutex mutex_;
    std::map<std::string, Resolution> cache_;
};

}  // namespace modelselect::repo
