// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/common/text.hpp"

#include <algorithm>
#include <cctype>

namespace modelselect::text {

bool is_word_char(char c) noexcept
{
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || u >= 0x80;
}

std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s)
{
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return std::string(s);
}

std::string collapse_whitespace(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c)) != 0) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

std::string normalize_phrase(std::string_view s) { return collapse_whitespace(to_lower(s)); }

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            break;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::vector<std::string> tokenize(std::string_view s)
{
    std::vector<std::string> tokens;
    std::string current;
    for (char c : s) {
        if (is_word_char(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string singularize(std::string_view word)
{
    std::string w(word);
    if (w.size() <= 3 || !ends_with(w, "s")) {
        return w;
    }
    for (std::string_view keep : {"ss", "us", "is", "as", "os", "series", "species"}) {
        if (ends_with(w, keep)) {
            return w;
        }
    }
    if (ends_with(w, "ies")) {
        return w.substr(0, w.size() - 3) + "y";
    }
    for (std::string_view es : {"sses", "shes", "ches", "xes"}) {
        if (ends_with(w, es)) {
            return w.substr(0, w.size() - 2);
        }
    }
    return w.substr(0, w.size() - 1);
}

std::vector<std::string> match_tokens(std::string_view s)
{
    auto tokens = tokenize(s);
    for (auto& t : tokens) {
        t = singularize(t);
    }
    return tokens;
}

std::string singularize_phrase(std::string_view phrase)
{
    auto pos = phrase.rfind(' ');
    if (pos == std::string_view::npos) {
        return singularize(phrase);
    }
    return std::string(phrase.substr(0, pos + 1)) + singularize(phrase.substr(pos + 1));
}

std::size_t count_subsequence(const std::vector<std::string>& haystack,
                              const std::vector<std::string>& needle)
{
    if (needle.empty() || needle.size() > haystack.size()) {
        return 0;
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), haystack.begin() + static_cast<std::ptrdiff_t>(i))) {
            ++count;
        }
    }
    return count;
}

bool contains_subsequence(const std::vector<std::string>& haystack,
                          const std::vector<std::string>& needle)
{
    return count_subsequence(haystack, needle) > 0;
}

std::size_t levenshtein(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b)
{
    auto longest = std::max(a.size(), b.size());
    if (longest == 0) {
        return 1.0;
    }
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::string title_case(std::string_view phrase)
{
    std::string out(phrase);
    bool word_start = true;
    std::size_t word_begin = 0;
    auto finish_word = [&](std::size_t end) {
        bool has_digit = std::any_of(out.begin() + static_cast<std::ptrdiff_t>(word_begin),
                                     out.begin() + static_cast<std::ptrdiff_t>(end),
                                     [](unsigned char c) { return std::isdigit(c) != 0; });
        if (has_digit) {
            for (std::size_t k = word_begin; k < end; ++k) {
                out[k] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[k])));
            }
        }
    };
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == ' ') {
            finish_word(i);
            word_start = true;
            continue;
        }
        if (word_start) {
            out[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i])));
            word_start = false;
            word_begin = i;
        }
    }
    if (!out.empty() && !word_start) {
        finish_word(out.size());
    }
    return out;
}

bool iequals(std::string_view a, std::string_view b) noexcept
{
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

bool icontains(std::string_view haystack, std::string_view needle)
{
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out.append(sep);
        }
        out.append(parts[i]);
    }
    return out;
}

std::string decode_utf8_lossy(std::string_view bytes, bool& lossy)
{
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
    lossy = false;
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        auto c = static_cast<unsigned char>(bytes[i]);
        std::size_t len = 0;
        if (c < 0x80) {
            len = 1;
        } else if ((c >> 5) == 0x6 && c >= 0xC2) {
            len = 2;
        } else if ((c >> 4) == 0xE) {
            len = 3;
        } else if ((c >> 3) == 0x1E && c <= 0xF4) {
            len = 4;
        }
        bool ok = len > 0 && i + len <= bytes.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            ok = (static_cast<unsigned char>(bytes[i + k]) >> 6) == 0x2;
        }
        if (ok) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            out.append(kReplacement);
            lossy = true;
            ++i;
        }
    }
    return out;
}

}  // namespace modelselect::text
