// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace modelselect::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Non-empty, non-comment ('#') lines, trimmed.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

/// Calls `on_record(json, line_number)` for each non-blank line. Parse failures
/// are raised as ParseError naming the file and line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& on_record);

std::string getenv_or(const char* name, std::string fallback);

}  // namespace modelselect::io
