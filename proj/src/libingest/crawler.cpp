// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/libingest/crawler.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "modelselect/common/error.hpp"
#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"

namespace modelselect::libingest {

namespace {

struct Tag {
    std::string name;  // lowercase, without '/'
    bool closing = false;
    std::string attributes;
};

// Parses the tag starting at html[pos] == '<'; returns the position after '>'.
std::size_t read_tag(std::string_view html, std::size_t pos, Tag& tag)
{
    auto end = html.find('>', pos);
    if (end == std::string_view::npos) end = html.size();
    auto inner = html.substr(pos + 1, end - pos - 1);
    tag = {};
    if (!inner.empty() && inner[0] == '/') {
        tag.closing = true;
        inner.remove_prefix(1);
    }
    std::size_t i = 0;
    while (i < inner.size() && (std::isalnum(static_cast<unsigned char>(inner[i])) || inner[i] == '-')) ++i;
    tag.name = text::to_lower(inner.substr(0, i));
    tag.attributes = std::string(inner.substr(i));
    return end == html.size() ? end : end + 1;
}

std::string attribute(const std::string& attrs, std::string_view name)
{
    auto lower = text::to_lower(attrs);
    std::size_t pos = 0;
    while ((pos = lower.find(name, pos)) != std::string::npos) {
        bool boundary = pos == 0 || std::isspace(static_cast<unsigned char>(lower[pos - 1]));
        auto eq = pos + name.size();
        while (eq < lower.size() && std::isspace(static_cast<unsigned char>(lower[eq]))) ++eq;
        if (!boundary || eq >= lower.size() || lower[eq] != '=') {
            pos += name.size();
            continue;
        }
        auto v = eq + 1;
        while (v < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[v]))) ++v;
        if (v < attrs.size() && (attrs[v] == '"' || attrs[v] == '\'')) {
            auto close = attrs.find(attrs[v], v + 1);
            return attrs.substr(v + 1, close == std::string::npos ? std::string::npos : close - v - 1);
        }
        auto stop = attrs.find_first_of(" \t\n\r>", v);
        return attrs.substr(v, stop == std::string::npos ? std::string::npos : stop - v);
    }
    return {};
}

void append_utf8(std::string& out, unsigned long cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string decode_entities(std::string_view s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back('&');
            continue;
        }
        auto name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos" || name == "#39") out.push_back('\'');
        else if (name == "nbsp") out.push_back(' ');
        else if (name.size() > 1 && name[0] == '#') {
            try {
                auto cp = name[1] == 'x' || name[1] == 'X' ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                                                           : std::stoul(std::string(name.substr(1)));
                append_utf8(out, cp);
            } catch (const std::exception&) {
                out.append(s.substr(i, semi - i + 1));
            }
        } else {
            out.append(s.substr(i, semi - i + 1));
        }
        i = semi;
    }
    return out;
}

bool is_block(const std::string& name)
{
    static const std::set<std::string> blocks = {"p", "div", "section", "article", "main", "header", "footer",
                                                 "h1", "h2", "h3", "h4", "h5", "h6", "ul", "ol", "table",
                                                 "blockquote", "dl", "aside", "body", "figure", "form"};
    return blocks.count(name) != 0;
}

bool is_line_break(const std::string& name)
{
    return name == "br" || name == "li" || name == "tr" || name == "dt" || name == "dd";
}

bool is_dropped(const std::string& name)
{
    return name == "script" || name == "style" || name == "head" || name == "template" || name == "noscript";
}

// Collapses inline whitespace while keeping the explicit line structure.
std::string tidy(const std::string& raw)
{
    std::string out;
    std::vector<std::string> lines;
    for (auto& line : text::split(raw, '\n')) lines.push_back(text::collapse_whitespace(text::trim(line)));
    int blank_run = 0;
    for (auto& line : lines) {
        if (line.empty()) {
            ++blank_run;
            continue;
        }
        if (!out.empty()) out += blank_run > 0 ? "\n\n" : "\n";
        out += line;
        blank_run = 0;
    }
    return out;
}

}  // namespace

std::string html_to_text(std::string_view html)
{
    std::string out;
    std::size_t i = 0;
    std::string skip_until;  // closing tag name while inside dropped content
    bool in_nav = false;
    std::vector<std::string> nav_items;
    std::string nav_current;
    while (i < html.size()) {
        if (html.compare(i, 4, "<!--") == 0) {
            auto end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        if (html[i] != '<') {
            auto next = html.find('<', i);
            if (next == std::string_view::npos) next = html.size();
            if (skip_until.empty()) {
                auto chunk = decode_entities(html.substr(i, next - i));
                if (in_nav) nav_current += chunk;
                else out += chunk;
            }
            i = next;
            continue;
        }
        Tag tag;
        i = read_tag(html, i, tag);
        if (!skip_until.empty()) {
            if (tag.closing && tag.name == skip_until) skip_until.clear();
            continue;
        }
        if (!tag.closing && is_dropped(tag.name)) {
            skip_until = tag.name;
            continue;
        }
        if (tag.name == "pre") {
            if (tag.closing) continue;
            auto close = html.find("</pre", i);
            if (close == std::string_view::npos) close = html.size();
            std::string body;
            // Inner markup (e.g. <code>, <span>) is stripped, newlines kept.
            for (std::size_t j = i; j < close;) {
                if (html[j] == '<') {
                    auto end = html.find('>', j);
                    j = end == std::string_view::npos ? close : end + 1;
                } else {
                    auto next = std::min(html.find('<', j), close);
                    body += decode_entities(html.substr(j, next - j));
                    j = next;
                }
            }
            out += "\n\n```\n" + body + "\n```\n\n";
            auto end = html.find('>', close);
            i = end == std::string_view::npos ? html.size() : end + 1;
            continue;
        }
        if (tag.name == "nav") {
            if (!tag.closing) {
                in_nav = true;
                nav_items.clear();
                nav_current.clear();
            } else if (in_nav) {
                in_nav = false;
                if (auto label = text::collapse_whitespace(text::trim(nav_current)); !label.empty()) nav_items.push_back(label);
                if (!nav_items.empty()) out += "\n\n" + text::join(nav_items, " | ") + "\n\n";
            }
            continue;
        }
        if (in_nav) {
            if (tag.name == "a" || tag.name == "li" || is_block(tag.name)) {
                if (auto label = text::collapse_whitespace(text::trim(nav_current)); !label.empty()) nav_items.push_back(label);
                nav_current.clear();
            }
            continue;
        }
        if (is_block(tag.name)) {
            out += "\n\n";
        } else if (is_line_break(tag.name) && !tag.closing) {
            out += "\n";
        } else if (tag.name == "td" || tag.name == "th") {
            out += " ";
        }
    }
    return tidy(out);
}

std::vector<std::string> extract_links(std::string_view html, const std::string& base_url)
{
    std::vector<std::string> links;
    std::set<std::string> seen;
    std::size_t i = 0;
    std::string skip_until;
    while ((i = html.find('<', i)) != std::string_view::npos) {
        if (html.compare(i, 4, "<!--") == 0) {
            auto end = html.find("-->", i + 4);
            if (end == std::string_view::npos) break;
            i = end + 3;
            continue;
        }
        Tag tag;
        i = read_tag(html, i, tag);
        if (!skip_until.empty()) {
            if (tag.closing && tag.name == skip_until) skip_until.clear();
            continue;
        }
        if (!tag.closing && (tag.name == "script" || tag.name == "style")) {
            skip_until = tag.name;
            continue;
        }
        if (tag.closing || tag.name != "a") continue;
        auto href = decode_entities(attribute(tag.attributes, "href"));
        if (href.empty()) continue;
        try {
            if (auto resolved = net::resolve_url(base_url, href); resolved && seen.insert(*resolved).second) {
                links.push_back(*resolved);
            }
        } catch (const Error&) {
            // unparseable link target
        }
    }
    return links;
}

std::vector<std::string> crawl_seeds(const RegistryMetadata& meta)
{
    std::vector<std::string> seeds;
    auto add = [&](const std::string& url) {
        if (url.empty()) return;
        try {
            auto resolved = net::resolve_url(url, url);
            if (resolved && std::find(seeds.begin(), seeds.end(), *resolved) == seeds.end()) seeds.push_back(*resolved);
        } catch (const Error&) {
            logger().info("ignoring malformed seed URL '{}'", url);
        }
    };
    add(meta.homepage);
    for (const auto& [key, url] : meta.project_urls) add(url);
    return seeds;
}

Crawler::Crawler(std::shared_ptr<net::Transport> transport, net::RetryPolicy retry)
    : transport_(std::move(transport)), retry_(std::move(retry))
{}

std::optional<std::string> Crawler::fetch_html(const std::string& url)
{
    try {
        net::HttpRequest request;
        request.url = url;
        request.headers["Accept"] = "text/html";
        auto response = net::send_with_retry(*transport_, request, retry_);
        if (response.status != 200) {
            logger().info("skipping {}: HTTP {}", url, response.status);
            return std::nullopt;
        }
        if (!response.content_type.empty() && response.content_type.find("html") == std::string::npos &&
            response.content_type.find("text/plain") == std::string::npos) {
            logger().info("skipping {}: content type {}", url, response.content_type);
            return std::nullopt;
        }
        return response.body;
    } catch (const TransportError& e) {
        logger().info("skipping {}: {}", url, e.what());
        return std::nullopt;
    }
}

std::optional<std::string> Crawler::fetch_text(const std::string& url)
{
    auto html = fetch_html(url);
    if (!html) return std::nullopt;
    return html_to_text(*html);
}

std::vector<FetchedPage> Crawler::collect(const RegistryMetadata& meta, const CrawlLimits& limits)
{
    if (limits.max_urls < 1) {
        throw Error("max_urls must be at least 1");
    }
    auto seeds = crawl_seeds(meta);
    std::set<std::string> hosts;
    for (const auto& seed : seeds) hosts.insert(net::parse_url(seed).host);

    std::deque<std::string> frontier(seeds.begin(), seeds.end());
    std::set<std::string> queued(seeds.begin(), seeds.end());
    std::vector<FetchedPage> pages;
    while (!frontier.empty() && pages.size() < limits.max_urls) {
        auto url = frontier.front();
        frontier.pop_front();
        auto html = fetch_html(url);
        if (!html) continue;
        pages.push_back({url, html_to_text(*html)});
        for (auto& link : extract_links(*html, url)) {
            if (limits.same_site_only && hosts.count(net::parse_url(link).host) == 0) continue;
            if (queued.insert(link).second) frontier.push_back(std::move(link));
        }
    }
    if (pages.empty() && !seeds.empty()) {
        logger().warn("no documentation could be fetched for {}", meta.distribution_name);
    }
    return pages;
}

}  // namespace modelselect::libingest
