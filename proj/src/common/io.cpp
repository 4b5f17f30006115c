// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/common/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "modelselect/common/error.hpp"
#include "modelselect/common/text.hpp"

namespace modelselect::io {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

std::vector<std::string> read_list_file(const std::filesystem::path& path)
{
    std::vector<std::string> lines;
    for (const auto& raw : text::split(read_file(path), '\n')) {
        auto line = text::trim(raw);
        if (!line.empty() && line.front() != '#') {
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& on_record)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (text::trim(line).empty()) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path.filename().string(), line_number, e.what());
        }
        try {
            on_record(record, line_number);
        } catch (const ParseError&) {
            throw;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.filename().string(), line_number, e.what());
        } catch (const Error& e) {
            throw ParseError(path.filename().string(), line_number, e.what());
        }
    }
}

std::string getenv_or(const char* name, std::string fallback)
{
    const char* value = std::getenv(name);
    return value != nullptr && *value != '\0' ? std::string(value) : fallback;
}

}  // namespace modelselect::io
