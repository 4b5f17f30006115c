// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// ASCII-oriented text helpers shared by every pipeline. Bytes >= 0x80 are
// treated as word characters so UTF-8 words are never split.
namespace modelselect::text {

bool is_word_char(char c) noexcept;

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

/// Lowercase, trim and collapse internal whitespace.
std::string normalize_phrase(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

/// Lowercased runs of word characters.
std::vector<std::string> tokenize(std::string_view s);

/// Trailing-s plural rule: "networks" -> "network", "libraries" -> "library",
/// "classes" -> "class"; words ending in -ss, -us, -is, -as, -os are left alone.
std::string singularize(std::string_view word);

/// tokenize() followed by singularize() on every token. This is the canonical
/// form used for all term matching (index, queries, lexicons).
std::vector<std::string> match_tokens(std::string_view s);

/// Singularizes the last token of an already-normalized phrase.
std::string singularize_phrase(std::string_view phrase);

/// Number of (possibly overlapping) occurrences of `needle` as a contiguous
/// run inside `haystack`.
std::size_t count_subsequence(const std::vector<std::string>& haystack,
                              const std::vector<std::string>& needle);

bool contains_subsequence(const std::vector<std::string>& haystack,
                          const std::vector<std::string>& needle);

std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - levenshtein / max(len); 1.0 for two empty strings.
double edit_similarity(std::string_view a, std::string_view b);

/// "ridge regression" -> "Ridge Regression". Tokens containing digits are upper-cased ("l2" -> "L2").
std::string title_case(std::string_view phrase);

bool iequals(std::string_view a, std::string_view b) noexcept;
bool icontains(std::string_view haystack, std::string_view needle);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Replaces invalid UTF-8 sequences with U+FFFD. Returns true through `lossy` when anything was replaced.
std::string decode_utf8_lossy(std::string_view bytes, bool& lossy);

}  // namespace modelselect::text
