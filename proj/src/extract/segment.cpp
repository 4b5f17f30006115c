// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <cctype>

#include "modelselect/common/config.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/extract/extract.hpp"

namespace modelselect::extract {

namespace {

std::set<std::string> lowered_set(const nlohmann::json& j, const char* key)
{
    std::set<std::string> out;
    if (j.contains(key)) {
        for (const auto& item : j.at(key)) out.insert(text::to_lower(item.get<std::string>()));
    }
    return out;
}

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_nav_line(const std::string& line, std::size_t min_items)
{
    auto parts = text::split(line, '|');
    if (parts.size() < min_items) return false;
    for (const auto& p : parts) {
        if (text::trim(p).empty()) return false;
    }
    return true;
}

struct WordToken {
    std::string lowered;
    std::size_t begin;
    std::size_t end;
};

// Words may carry inner hyphens ("k-means", "foonet-xl"). Anything else that
// is not a word character is a phrase boundary, signalled by an empty token.
std::vector<WordToken> word_tokens(std::string_view s)
{
    std::vector<WordToken> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!text::is_word_char(s[i])) {
            if (!std::isspace(static_cast<unsigned char>(s[i])) && (out.empty() || !out.back().lowered.empty())) {
                out.push_back({"", i, i + 1});
            }
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < s.size() &&
               (text::is_word_char(s[i]) || (s[i] == '-' && i + 1 < s.size() && text::is_word_char(s[i + 1]) &&
                                             i > start))) {
            ++i;
        }
        out.push_back({text::to_lower(s.substr(start, i - start)), start, i});
    }
    return out;
}

}  // namespace

ChunkingConfig ChunkingConfig::from_json(const nlohmann::json& j)
{
    ChunkingConfig c;
    if (j.contains("segment")) {
        const auto& s = j.at("segment");
        c.min_chunk_chars = s.value("min_chunk_chars", c.min_chunk_chars);
        c.nav_min_items = s.value("nav_min_items", c.nav_min_items);
    }
    const auto& t = j.contains("tags") ? j.at("tags") : nlohmann::json::object();
    c.max_phrase_tokens = t.value("max_phrase_tokens", c.max_phrase_tokens);
    c.closed_class = lowered_set(t, "closed_class");
    c.verbs = lowered_set(t, "verbs");
    c.adjectives = lowered_set(t, "adjectives");
    c.noun_exceptions = lowered_set(t, "noun_exceptions");
    for (const auto& s : lowered_set(t, "adjective_suffixes")) c.adjective_suffixes.push_back(s);
    if (c.max_phrase_tokens < 1) throw Error("chunking: max_phrase_tokens must be positive");
    return c;
}

ChunkingConfig ChunkingConfig::load(const std::filesystem::path& path) { return from_json(config::load_toml(path)); }

std::vector<DocumentChunk> segment(std::string_view raw_page_text, const kg::EntityId& library_id,
                                   const std::string& source_url, const ChunkingConfig& config)
{
    std::vector<std::string> paragraphs;
    std::string current;
    bool in_fence = false;
    auto flush = [&] {
        auto collapsed = text::collapse_whitespace(current);
        if (collapsed.size() >= config.min_chunk_chars) paragraphs.push_back(std::move(collapsed));
        current.clear();
    };
    for (const auto& line : text::split(raw_page_text, '\n')) {
        auto trimmed = text::trim(line);
        if (trimmed.rfind("```", 0) == 0) {
            in_fence = !in_fence;
            flush();
            continue;
        }
        if (in_fence) continue;
        if (trimmed.empty()) {
            flush();
            continue;
        }
        if (is_nav_line(trimmed, config.nav_min_items)) continue;
        current += trimmed;
        current.push_back(' ');
    }
    flush();

    std::vector<DocumentChunk> out;
    for (auto& p : paragraphs) {
        out.push_back({library_id, source_url, std::move(p), static_cast<int>(out.size())});
    }
    return out;
}

Tag tag_word(std::string_view lowered, const ChunkingConfig& config)
{
    std::string w(lowered);
    if (config.closed_class.count(w) != 0 || config.verbs.count(w) != 0) return Tag::Break;
    bool has_alpha = false;
    for (char c : w) has_alpha = has_alpha || std::isalpha(static_cast<unsigned char>(c)) != 0;
    if (!has_alpha) return Tag::Break;
    if (config.noun_exceptions.count(w) != 0) return Tag::Noun;
    if (ends_with(w, "ly")) return Tag::Break;
    if (config.adjectives.count(w) != 0) return Tag::Adjective;
    for (const auto& suffix : config.adjective_suffixes) {
        if (ends_with(w, suffix)) return Tag::Adjective;
    }
    return Tag::Noun;
}

std::vector<NounPhraseCandidate> extract_noun_phrases(const DocumentChunk& chunk, const ChunkingConfig& config)
{
    std::vector<NounPhraseCandidate> out;
    std::set<std::string> seen;
    std::vector<const WordToken*> run;
    std::vector<Tag> tags;
    auto tokens = word_tokens(chunk.text);

    auto close_run = [&] {
        while (!tags.empty() && tags.back() != Tag::Noun) {
            tags.pop_back();
            run.pop_back();
        }
        if (!run.empty()) {
            std::size_t first = run.size() > config.max_phrase_tokens ? run.size() - config.max_phrase_tokens : 0;
            std::vector<std::string> words;
            for (std::size_t k = first; k < run.size(); ++k) words.push_back(run[k]->lowered);
            auto phrase = text::singularize_phrase(text::join(words, " "));
            if (seen.insert(phrase).second) {
                out.push_back({phrase, chunk.source_url, chunk.position, run[first]->begin, run.back()->end});
            }
        }
        run.clear();
        tags.clear();
    };

    for (const auto& token : tokens) {
        if (token.lowered.empty()) {
            close_run();
            continue;
        }
        auto tag = tag_word(token.lowered, config);
        if (tag == Tag::Break) {
            close_run();
            continue;
        }
        // An adjective after a noun starts a new phrase ("regression robust to outliers").
        if (tag == Tag::Adjective && !tags.empty() && tags.back() == Tag::Noun) close_run();
        run.push_back(&token);
        tags.push_back(tag);
    }
    close_run();
    return out;
}

}  // namespace modelselect::extract
