// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <algorithm>
#include <cctype>

#include "modelselect/common/io.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/inference/inference.hpp"

namespace modelselect::inference {

namespace {

struct Word {
    std::string lowered;
    std::size_t begin;
};

std::vector<Word> words_of(std::string_view s)
{
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!text::is_word_char(s[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < s.size() && (text::is_word_char(s[i]) ||
                                (s[i] == '-' && i + 1 < s.size() && text::is_word_char(s[i + 1])))) {
            ++i;
        }
        out.push_back({text::to_lower(s.substr(start, i - start)), start});
    }
    return out;
}

bool all_stopwords(const std::string& term, const std::set<std::string>& stoplist)
{
    if (stoplist.count(term) != 0) return true;
    auto tokens = text::split(term, ' ');
    return std::all_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return stoplist.count(t) != 0; });
}

}  // namespace

std::string_view to_string(TermOrigin origin) noexcept
{
    return origin == TermOrigin::User ? "user" : "synonym";
}

SynonymTable parse_synonyms(std::string_view tsv, double default_weight)
{
    SynonymTable table;
    std::size_t line_no = 0;
    for (const auto& line : text::split(tsv, '\n')) {
        ++line_no;
        auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        auto cols = text::split(trimmed, '\t');
        if (cols.size() < 2 || cols.size() > 3) {
            throw ParseError("synonyms.tsv", line_no, "expected term<TAB>expansion[<TAB>weight]");
        }
        Synonym s{text::normalize_phrase(cols[1]), default_weight};
        if (cols.size() == 3) {
            try {
                s.weight = std::stod(cols[2]);
            } catch (const std::exception&) {
                throw ParseError("synonyms.tsv", line_no, "weight '" + cols[2] + "' is not a number");
            }
        }
        if (!(s.weight > 0.0 && s.weight <= 1.0)) throw ParseError("synonyms.tsv", line_no, "weight outside (0,1]");
        table[text::normalize_phrase(cols[0])].push_back(std::move(s));
    }
    return table;
}

IntentResources IntentResources::load(const std::filesystem::path& resource_dir)
{
    IntentResources r;
    for (const auto& w : io::read_list_file(resource_dir / "stoplist.txt")) r.stoplist.insert(text::normalize_phrase(w));
    r.synonyms = parse_synonyms(io::read_file(resource_dir / "synonyms.tsv"));
    r.chunking = extract::ChunkingConfig::load(resource_dir / "chunking.toml");
    return r;
}

KeywordSet interpret_intent(std::string_view intent, const IntentResources& resources, const TokenFrequency& frequency,
                            std::size_t rarity_floor)
{
    if (text::trim(intent).empty()) throw UnintelligibleIntent("the intent is empty; describe what the model should do");

    extract::DocumentChunk chunk{{}, "", std::string(intent), 0};
    auto phrases = extract::extract_noun_phrases(chunk, resources.chunking);

    std::vector<std::pair<std::size_t, std::string>> located;
    for (const auto& p : phrases) located.emplace_back(p.begin, p.phrase);
    for (const auto& w : words_of(intent)) {
        bool covered = std::any_of(phrases.begin(), phrases.end(),
                                   [&](const auto& p) { return w.begin >= p.begin && w.begin < p.end; });
        if (covered || resources.chunking.closed_class.count(w.lowered) != 0) continue;
        if (std::none_of(w.lowered.begin(), w.lowered.end(), [](unsigned char c) { return std::isalpha(c) != 0; })) {
            continue;
        }
        located.emplace_back(w.begin, text::singularize(w.lowered));
    }
    std::stable_sort(located.begin(), located.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    KeywordSet out;
    std::set<std::string> seen;
    for (auto& [pos, term] : located) {
        if (seen.insert(term).second) out.raw.push_back(term);
    }

    std::vector<std::string> meaningful;
    for (const auto& term : out.raw) {
        if (all_stopwords(term, resources.stoplist)) continue;
        meaningful.push_back(term);
        if (frequency && rarity_floor > 0) {
            std::size_t best = 0;
            for (const auto& token : text::match_tokens(term)) best = std::max(best, frequency(token));
            if (best < rarity_floor) continue;
        }
        out.pruned.push_back(term);
    }

    std::map<std::string, std::size_t> slot;
    for (const auto& term : out.pruned) {
        slot[term] = out.enriched.size();
        out.enriched.push_back({term, 1.0, TermOrigin::User});
    }
    for (const auto& term : meaningful) {
        auto it = resources.synonyms.find(term);
        if (it == resources.synonyms.end()) continue;
        for (const auto& syn : it->second) {
            double weight = std::min(syn.weight, 1.0);
            auto existing = slot.find(syn.expansion);
            if (existing == slot.end()) {
                slot[syn.expansion] = out.enriched.size();
                out.enriched.push_back({syn.expansion, weight, TermOrigin::Synonym});
            } else if (out.enriched[existing->second].origin == TermOrigin::Synonym) {
                auto& held = out.enriched[existing->second].weight;
                held = std::max(held, weight);
            }
        }
    }
    if (out.enriched.empty()) {
        throw UnintelligibleIntent(
            "no usable keywords remain in the intent; rephrase it with the task, data and constraints in plain words");
    }
    return out;
}

}  // namespace modelselect::inference
