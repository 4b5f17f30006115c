// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace modelselect::repo {

struct ImportRecord {
    std::string repo_id;
    std::string import_root;  // first dotted segment
    std::string source_path;
    std::size_t line_number = 0;

    friend bool operator==(const ImportRecord&, const ImportRecord&) = default;
};

/// Line-oriented scan for `import a.b [as c], d` and `from a.b import ...`.
/// Comments, string literals spanning lines and relative imports are ignored.
/// One record per (root, line); records are in line order.
std::vector<ImportRecord> scan_imports(std::string_view source_text, std::string_view source_path = {},
                                       std::string_view repo_id = {});

/// Distinct import roots of `source_text`.
std::set<std::string> parse_imports(std::string_view source_text);

bool is_identifier(std::string_view s);

}  // namespace modelselect::repo
