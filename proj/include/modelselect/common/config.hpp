// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

namespace modelselect::config {

/// Parses a TOML document into the equivalent JSON tree (tables become
/// objects, arrays stay arrays, dates become ISO strings). Syntax errors are
/// raised as ParseError with the offending line.
nlohmann::json parse_toml(std::string_view document, std::string_view source_name = "<string>");

nlohmann::json load_toml(const std::filesystem::path& path);

}  // namespace modelselect::config
