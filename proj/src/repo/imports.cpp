// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/repo/imports.hpp"

#include <cctype>

#include "modelselect/common/text.hpp"

namespace modelselect::repo {

bool is_identifier(std::string_view s)
{
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) {
        return false;
    }
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

namespace {

std::string root_of(std::string_view dotted)
{
    auto name = text::trim(dotted);
    auto dot = name.find('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

// Strips a trailing '#' comment, respecting simple quoting on the line.
std::string strip_comment(std::string_view line)
{
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote != 0) {
            if (c == '\\') {
                ++i;
            } else if (c == quote) {
                quote = 0;
            }
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == '#') {
            return std::string(line.substr(0, i));
        }
    }
    return std::string(line);
}

bool starts_with_word(std::string_view s, std::string_view word)
{
    return s.substr(0, word.size()) == word && (s.size() == word.size() || std::isspace(static_cast<unsigned char>(s[word.size()])));
}

void scan_statement(std::string_view statement, std::vector<std::string>& roots)
{
    auto stmt = text::trim(statement);
    if (starts_with_word(stmt, "import")) {
        for (auto& part : text::split(std::string_view(stmt).substr(6), ',')) {
            auto name = text::trim(part);
            if (auto as = name.find(" as "); as != std::string::npos) {
                name = text::trim(name.substr(0, as));
            }
            // "import (a, b)" is not valid Python; parentheses only appear in from-imports.
            auto root = root_of(name);
            if (is_identifier(root)) {
                roots.push_back(root);
            }
        }
    } else if (starts_with_word(stmt, "from")) {
        auto rest = text::trim(std::string_view(stmt).substr(4));
        auto space = rest.find_first_of(" \t");
        if (space == std::string::npos) {
            return;
        }
        auto module = rest.substr(0, space);
        auto tail = text::trim(std::string_view(rest).substr(space));
        if (!starts_with_word(tail, "import") || module.empty() || module[0] == '.') {
            return;
        }
        auto root = root_of(module);
        if (is_identifier(root)) {
            roots.push_back(root);
        }
    }
}

}  // namespace

std::vector<ImportRecord> scan_imports(std::string_view source_text, std::string_view source_path, std::string_view repo_id)
{
    std::vector<ImportRecord> records;
    std::string_view open_triple;  // delimiter of a string literal spanning lines
    std::size_t line_number = 0;
    std::size_t start = 0;
    while (start <= source_text.size()) {
        auto end = source_text.find('\n', start);
        if (end == std::string_view::npos) {
            end = source_text.size();
        }
        std::string_view line = source_text.substr(start, end - start);
        ++line_number;
        start = end + 1;

        // Triple-quoted strings: skip everything up to the closing delimiter.
        std::string code;
        std::string_view rest = line;
        while (!rest.empty()) {
            if (!open_triple.empty()) {
                auto close = rest.find(open_triple);
                if (close == std::string_view::npos) {
                    rest = {};
                    break;
                }
                rest = rest.substr(close + 3);
                open_triple = {};
                continue;
            }
            auto dq = rest.find("\"\"\"");
            auto sq = rest.find("'''");
            auto first = std::min(dq, sq);
            if (first == std::string_view::npos) {
                code.append(rest);
                break;
            }
            // A triple quote after a comment marker does not open a string.
            auto before = strip_comment(rest.substr(0, first));
            if (before.size() < first) {
                code.append(before);
                rest = {};
                break;
            }
            code.append(rest.substr(0, first));
            open_triple = first == dq ? std::string_view("\"\"\"") : std::string_view("'''");
            rest = rest.substr(first + 3);
        }

        auto stripped = strip_comment(code);
        std::vector<std::string> roots;
        for (auto& statement : text::split(stripped, ';')) {
            scan_statement(statement, roots);
        }
        for (auto& root : roots) {
            bool seen = false;
            for (auto it = records.rbegin(); it != records.rend() && it->line_number == line_number; ++it) {
                seen = seen || it->import_root == root;
            }
            if (!seen) {
                records.push_back({std::string(repo_id), std::move(root), std::string(source_path), line_number});
            }
        }
        if (end == source_text.size()) {
            break;
        }
    }
    return records;
}

std::set<std::string> parse_imports(std::string_view source_text)
{
    std::set<std::string> roots;
    for (auto& record : scan_imports(source_text)) {
        roots.insert(std::move(record.import_root));
    }
    return roots;
}

}  // namespace modelselect::repo
