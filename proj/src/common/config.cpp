// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/common/config.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <sstream>

#include "modelselect/common/error.hpp"
#include "modelselect/common/io.hpp"

namespace modelselect::config {

namespace {

nlohmann::json to_json(const toml::node& node)
{
    if (const auto* table = node.as_table()) {
        auto out = nlohmann::json::object();
        for (const auto& [key, value] : *table) {
            out[std::string(key.str())] = to_json(value);
        }
        return out;
    }
    if (const auto* array = node.as_array()) {
        auto out = nlohmann::json::array();
        for (const auto& value : *array) {
            out.push_back(to_json(value));
        }
        return out;
    }
    if (const auto* s = node.as_string()) {
        return s->get();
    }
    if (const auto* i = node.as_integer()) {
        return i->get();
    }
    if (const auto* f = node.as_floating_point()) {
        return f->get();
    }
    if (const auto* b = node.as_boolean()) {
        return b->get();
    }
    std::ostringstream printed;
    if (const auto* d = node.as_date()) {
        printed << d->get();
    } else if (const auto* t = node.as_time()) {
        printed << t->get();
    } else if (const auto* dt = node.as_date_time()) {
        printed << dt->get();
    }
    return printed.str();
}

}  // namespace

nlohmann::json parse_toml(std::string_view document, std::string_view source_name)
{
    try {
        auto table = toml::parse(document, source_name);
        return to_json(table);
    } catch (const toml::parse_error& e) {
        throw ParseError(std::string(source_name), e.source().begin.line, std::string(e.description()));
    }
}

nlohmann::json load_toml(const std::filesystem::path& path)
{
    return parse_toml(io::read_file(path), path.filename().string());
}

}  // namespace modelselect::config
