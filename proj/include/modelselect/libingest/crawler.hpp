// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "modelselect/libingest/registry.hpp"
#include "modelselect/net/http.hpp"

namespace modelselect::libingest {

/// Markup-free text. Block elements become blank-line separated paragraphs,
/// list items and <br> become line breaks, a <nav> block is rendered as one
/// line of " | "-joined link labels and <pre> keeps its text inside ``` fences.
/// script, style, head and template content is dropped.
std::string html_to_text(std::string_view html);

/// href targets of <a> tags in document order, resolved against `base_url`,
/// fragments dropped, duplicates removed (first occurrence kept).
std::vector<std::string> extract_links(std::string_view html, const std::string& base_url);

struct CrawlLimits {
    std::size_t max_urls = 20;
    bool same_site_only = true;
};

struct FetchedPage {
    std::string url;
    std::string text;

    friend bool operator==(const FetchedPage&, const FetchedPage&) = default;
};

/// Homepage first, then project URLs in key order; duplicates removed.
std::vector<std::string> crawl_seeds(const RegistryMetadata& meta);

class Crawler {
  public:
    explicit Crawler(std::shared_ptr<net::Transport> transport, net::RetryPolicy retry = {});

    /// Breadth-first over seeds, FIFO frontier, links in document order. Failed
    /// fetches are skipped; an empty list means no seed could be fetched.
    std::vector<FetchedPage> collect(const RegistryMetadata& meta, const CrawlLimits& limits);

    /// Single page text, empty on any failure.
    std::optional<std::string> fetch_text(const std::string& url);

  private:
    std::optional<std::string> fetch_html(const std::string& url);

    std::shared_ptr<net::Transport> transport_;
    net::RetryPolicy retry_;
};

}  // namespace modelselect::libingest
