// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/eval/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "modelselect/common/config.hpp"
#include "modelselect/common/error.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/common/text.hpp"

namespace modelselect::eval {

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* key, const std::string& file,
                                     std::size_t line, bool required)
{
    std::vector<std::string> out;
    if (!j.contains(key)) {
        if (required) {
            throw ParseError(file, line, std::string("missing field '") + key + "'");
        }
        return out;
    }
    const auto& arr = j.at(key);
    if (!arr.is_array()) {
        throw ParseError(file, line, std::string("'") + key + "' must be an array of strings");
    }
    for (const auto& item : arr) {
        if (!item.is_string()) {
            throw ParseError(file, line, std::string("'") + key + "' must be an array of strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::string string_field(const nlohmann::json& j, const char* key, const std::string& file, std::size_t line,
                         bool required = true)
{
    if (!j.contains(key)) {
        if (required) {
            throw ParseError(file, line, std::string("missing field '") + key + "'");
        }
        return {};
    }
    const auto& v = j.at(key);
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer()) {
        return std::to_string(v.get<long long>());
    }
    throw ParseError(file, line, std::string("'") + key + "' must be a string");
}

/// Canonical forms, first occurrence kept.
std::vector<std::string> canonical_set(const std::vector<std::string>& names, const NameMatcher& matcher)
{
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& n : names) {
        auto c = matcher.canonical(n);
        if (!c.empty() && seen.insert(c).second) {
            out.push_back(std::move(c));
        }
    }
    return out;
}

bool any_match(const std::string& canonical, const std::vector<std::string>& others, const NameMatcher& matcher)
{
    return std::any_of(others.begin(), others.end(),
                       [&](const std::string& o) { return matcher.matches(canonical, o); });
}

std::string fixed(double v, int digits)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string pad(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string render_rows(const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += i + 1 == row.size() ? row[i] : pad(row[i], widths[i]) + "  ";
        }
        out += line + "\n";
    }
    return out;
}

}  // namespace

std::vector<CaseStudy> load_cases(const std::filesystem::path& path)
{
    std::vector<CaseStudy> cases;
    std::set<std::string> ids;
    const auto file = path.string();
    io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
        CaseStudy c;
        c.case_id = string_field(j, "case_id", file, line);
        c.domain = string_field(j, "domain", file, line, false);
        c.rationale = string_field(j, "rationale", file, line);
        c.gold_models = string_list(j, "gold_models", file, line, true);
        c.gold_libraries = string_list(j, "gold_libraries", file, line, false);
        c.source_ref = string_field(j, "source_ref", file, line, false);
        if (text::trim(c.rationale).empty()) {
            throw ParseError(file, line, "rationale must not be empty");
        }
        if (c.gold_models.empty()) {
            throw ParseError(file, line, "gold_models must not be empty");
        }
        if (!ids.insert(c.case_id).second) {
            throw ParseError(file, line, "duplicate case_id '" + c.case_id + "'");
        }
        cases.push_back(std::move(c));
    });
    return cases;
}

BaselineRecs load_baseline(const std::filesystem::path& path)
{
    BaselineRecs recs;
    const auto file = path.string();
    io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
        auto case_id = string_field(j, "case_id", file, line);
        auto system = string_field(j, "system", file, line);
        auto& models = recs.models[system];
        if (models.count(case_id)) {
            throw ParseError(file, line, "duplicate entry for " + system + "/" + case_id);
        }
        models[case_id] = string_list(j, "models", file, line, true);
        recs.libraries[system][case_id] = string_list(j, "libraries", file, line, false);
    });
    return recs;
}

NameMatcher NameMatcher::load(const std::filesystem::path& aliases_tsv, double fuzzy_threshold)
{
    NameMatcher m(fuzzy_threshold);
    std::istringstream in(io::read_file(aliases_tsv));
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        auto parts = text::split(line, '\t');
        if (parts.size() != 2 || text::trim(parts[0]).empty() || text::trim(parts[1]).empty()) {
            throw ParseError(aliases_tsv.string(), number, "expected alias<TAB>canonical");
        }
        m.add_alias(parts[0], parts[1]);
    }
    return m;
}

NameMatcher NameMatcher::exact()
{
    NameMatcher m(1.0);
    m.fuzzy_ = false;
    return m;
}

void NameMatcher::add_alias(std::string_view alias, std::string_view canonical)
{
    auto from = normalize(alias);
    auto to = normalize(canonical);
    if (from.empty() || to.empty()) {
        throw Error("alias and canonical name must contain letters or digits");
    }
    if (from != to) {
        aliases_[from] = to;
    }
}

std::string NameMatcher::normalize(std::string_view name)
{
    std::string spaced;
    for (char c : name) {
        spaced += text::is_word_char(c) ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : ' ';
    }
    std::vector<std::string> words;
    for (const auto& w : text::split(text::collapse_whitespace(spaced), ' ')) {
        if (!w.empty()) {
            words.push_back(text::singularize(w));
        }
    }
    return text::join(words, " ");
}

std::string NameMatcher::canonical(std::string_view name) const
{
    auto n = normalize(name);
    // Alias chains are followed a bounded number of steps so cycles cannot hang.
    for (int step = 0; step < 8; ++step) {
        auto it = aliases_.find(n);
        if (it == aliases_.end()) {
            break;
        }
        n = it->second;
    }
    return n;
}

bool NameMatcher::matches(std::string_view a, std::string_view b) const
{
    auto ca = canonical(a);
    auto cb = canonical(b);
    if (ca.empty() || cb.empty()) {
        return false;
    }
    if (ca == cb) {
        return true;
    }
    return fuzzy_ && text::edit_similarity(ca, cb) >= threshold_;
}

MetricReport coverage_at_k(const CaseRecs& system, const std::vector<CaseStudy>& gold, std::size_t k,
                           const NameMatcher& matcher)
{
    if (k < 1) {
        throw Error("coverage_at_k needs k >= 1");
    }
    MetricReport report;
    report.metric = "coverage@" + std::to_string(k);
    std::size_t hits = 0;
    for (const auto& c : gold) {
        CaseDetail detail{c.case_id, 0.0, {}};
        auto recs = system.find(c.case_id);
        if (recs == system.end() || recs->second.empty()) {
            detail.note = "no recommendations";
        } else {
            auto top = std::min(k, recs->second.size());
            for (std::size_t i = 0; i < top && detail.value == 0.0; ++i) {
                for (const auto& g : c.gold_models) {
                    if (matcher.matches(recs->second[i], g)) {
                        detail.value = 1.0;
                        detail.note = "rank " + std::to_string(i + 1) + ": " + recs->second[i];
                        break;
                    }
                }
            }
        }
        hits += detail.value == 1.0 ? 1 : 0;
        report.per_case.push_back(std::move(detail));
    }
    std::sort(report.per_case.begin(), report.per_case.end(),
              [](const CaseDetail& a, const CaseDetail& b) { return a.case_id < b.case_id; });
    report.numerator = hits;
    report.denominator = gold.size();
    report.value = gold.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(gold.size());
    if (gold.empty()) {
        report.notices.push_back("no cases");
    }
    return report;
}

MetricReport overlap_percent(const CaseRecs& baseline, const CaseRecs& system, const NameMatcher& matcher)
{
    MetricReport report;
    report.metric = "overlap";
    double sum = 0.0;
    std::size_t aligned = 0;
    for (const auto& [case_id, names] : baseline) {
        auto sys = system.find(case_id);
        if (sys == system.end()) {
            report.notices.push_back("case " + case_id + " has no system recommendations; excluded");
            continue;
        }
        auto base = canonical_set(names, matcher);
        if (base.empty()) {
            report.notices.push_back("case " + case_id + " has an empty baseline; excluded");
            continue;
        }
        auto other = canonical_set(sys->second, matcher);
        std::size_t shared = 0;
        for (const auto& b : base) {
            shared += any_match(b, other, matcher) ? 1 : 0;
        }
        double value = static_cast<double>(shared) / static_cast<double>(base.size());
        report.per_case.push_back({case_id, value, std::to_string(shared) + "/" + std::to_string(base.size())});
        sum += value;
        ++aligned;
    }
    for (const auto& [case_id, names] : system) {
        if (!baseline.count(case_id)) {
            report.notices.push_back("case " + case_id + " has no baseline; excluded");
        }
    }
    if (aligned == 0) {
        throw Error("overlap_percent: no aligned cases");
    }
    report.value = sum / static_cast<double>(aligned);
    report.denominator = aligned;
    return report;
}

double harmonic_mean(double p, double r) noexcept
{
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

namespace {

void finish(Prf1& s)
{
    s.precision_undefined = s.predicted == 0;
    s.precision = s.predicted == 0 ? 0.0 : static_cast<double>(s.predicted_correct) / static_cast<double>(s.predicted);
    s.recall = s.gold == 0 ? 0.0 : static_cast<double>(s.gold_found) / static_cast<double>(s.gold);
    s.f1 = harmonic_mean(s.precision, s.recall);
}

void accumulate(Prf1& s, const std::vector<std::string>& predicted, const std::vector<std::string>& gold,
                const NameMatcher& matcher)
{
    auto p = canonical_set(predicted, matcher);
    auto g = canonical_set(gold, matcher);
    s.predicted += p.size();
    s.gold += g.size();
    for (const auto& x : p) {
        s.predicted_correct += any_match(x, g, matcher) ? 1 : 0;
    }
    for (const auto& x : g) {
        s.gold_found += any_match(x, p, matcher) ? 1 : 0;
    }
}

}  // namespace

Prf1 prf1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold, const NameMatcher& matcher)
{
    Prf1 s;
    accumulate(s, predicted, gold, matcher);
    if (s.gold == 0) {
        throw Error("prf1 needs a non-empty gold set");
    }
    finish(s);
    return s;
}

Prf1 prf1_rows(const std::map<std::string, std::vector<std::string>>& predicted,
               const std::map<std::string, std::vector<std::string>>& gold, const NameMatcher& matcher)
{
    static const std::vector<std::string> none;
    Prf1 s;
    for (const auto& [row, items] : gold) {
        auto p = predicted.find(row);
        accumulate(s, p == predicted.end() ? none : p->second, items, matcher);
    }
    if (s.gold == 0) {
        throw Error("prf1 needs a non-empty gold set");
    }
    finish(s);
    return s;
}

double round4(double value) noexcept
{
    return std::round(value * 10000.0) / 10000.0;
}

CorpusStats corpus_stats(const kg::KnowledgeGraph& graph)
{
    CorpusStats stats;
    std::map<kg::EntityId, std::set<kg::EntityId>> supporting;  // base -> libraries
    std::map<kg::EntityId, std::size_t> variation_count;
    for (const auto& [id, base] : graph.base_models()) {
        supporting[id];
        variation_count[id] = 0;
    }
    for (const auto& [id, v] : graph.variations()) {
        ++variation_count[v.base_id];
    }
    for (const auto& [id, lib] : graph.libraries()) {
        for (const auto& vid : lib.supported_variation_ids) {
            auto v = graph.variations().find(vid);
            if (v != graph.variations().end()) {
                supporting[v->second.base_id].insert(id);
            }
        }
        stats.library_models.push_back({lib.distribution_name, lib.supported_variation_ids.size()});
    }
    auto base_name = [&](const kg::EntityId& id) {
        auto it = graph.base_models().find(id);
        return it == graph.base_models().end() ? id.str() : it->second.name;
    };
    for (const auto& [id, libs] : supporting) {
        stats.base_support.push_back({base_name(id), libs.size()});
    }
    for (const auto& [id, n] : variation_count) {
        stats.base_variations.push_back({base_name(id), n});
    }
    auto order = [](const RankedCount& a, const RankedCount& b) {
        return a.count != b.count ? a.count > b.count : a.name < b.name;
    };
    std::sort(stats.base_support.begin(), stats.base_support.end(), order);
    std::sort(stats.base_variations.begin(), stats.base_variations.end(), order);
    std::sort(stats.library_models.begin(), stats.library_models.end(), order);

    stats.totals = {
        {"base_models", graph.base_models().size()}, {"variations", graph.variations().size()},
        {"features", graph.features().size()},       {"libraries", graph.libraries().size()},
        {"repositories", graph.repositories().size()}, {"quality_aggregates", graph.quality().size()},
        {"cves", graph.cves().size()},               {"edges", graph.edges().size()},
    };
    return stats;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path)
{
    auto doc = config::load_toml(path);
    auto dir = path.parent_path();
    auto file = path.string();
    ExperimentConfig c;
    try {
        c.task = doc.at("task").get<std::string>();
        for (const auto& p : doc.at("predictions")) {
            c.prediction_files.push_back(dir / p.get<std::string>());
        }
        c.gold_file = dir / doc.at("gold").get<std::string>();
        if (doc.contains("fusion")) {
            c.fusion = provider::fuse_policy_from_string(doc.at("fusion").get<std::string>());
        }
        c.fuzzy_threshold = doc.value("fuzzy_threshold", 0.9);
        if (doc.contains("aliases")) {
            c.aliases = dir / doc.at("aliases").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(file, 0, std::string("bad experiment config: ") + e.what());
    }
    if (c.prediction_files.empty()) {
        throw ParseError(file, 0, "at least one predictions file is required");
    }
    if (c.fuzzy_threshold <= 0.0 || c.fuzzy_threshold > 1.0) {
        throw ParseError(file, 0, "fuzzy_threshold must be in (0, 1]");
    }
    return c;
}

ExperimentTable run_experiment(const ExperimentConfig& config)
{
    auto matcher = config.aliases ? NameMatcher::load(*config.aliases, config.fuzzy_threshold)
                                  : NameMatcher(config.fuzzy_threshold);

    std::map<std::string, std::vector<std::string>> gold;
    {
        auto file = config.gold_file.string();
        io::for_each_jsonl(config.gold_file, [&](const nlohmann::json& j, std::size_t line) {
            auto row = string_field(j, "row_id", file, line);
            if (gold.count(row)) {
                throw ParseError(file, line, "duplicate row_id '" + row + "'");
            }
            gold[row] = string_list(j, "items", file, line, true);
        });
    }

    std::vector<std::string> order;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> systems;
    for (const auto& path : config.prediction_files) {
        auto file = path.string();
        std::map<std::string, std::string> labels;  // system field -> label for this file
        io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
            auto row = string_field(j, "row_id", file, line);
            auto name = string_field(j, "system", file, line);
            auto items = string_list(j, "items", file, line, true);
            if (!gold.count(row)) {
                throw ParseError(file, line, "row_id '" + row + "' not in gold");
            }
            auto label = labels.find(name);
            if (label == labels.end()) {
                std::string candidate = name;
                for (int n = 2; systems.count(candidate); ++n) {
                    candidate = name + "#" + std::to_string(n);
                }
                label = labels.emplace(name, candidate).first;
                order.push_back(candidate);
                systems[candidate];
            }
            auto& rows = systems[label->second];
            if (rows.count(row)) {
                throw ParseError(file, line, "duplicate row_id '" + row + "' for system " + name);
            }
            rows[row] = std::move(items);
        });
    }

    ExperimentTable table;
    table.task = config.task;
    for (const auto& name : order) {
        table.rows.push_back({name, prf1_rows(systems.at(name), gold, matcher)});
    }
    if (config.fusion && order.size() >= 2) {
        std::map<std::string, std::vector<std::string>> fused;
        for (const auto& [row, items] : gold) {
            std::vector<std::set<std::string>> per_system;
            for (const auto& name : order) {
                std::set<std::string> s;
                auto it = systems.at(name).find(row);
                if (it != systems.at(name).end()) {
                    for (const auto& item : it->second) {
                        s.insert(matcher.canonical(item));
                    }
                }
                per_system.push_back(std::move(s));
            }
            auto merged = provider::fuse(per_system, *config.fusion);
            fused[row] = {merged.begin(), merged.end()};
        }
        table.rows.push_back({"fused-" + std::string(provider::to_string(*config.fusion)),
                              prf1_rows(fused, gold, matcher)});
    }
    return table;
}

nlohmann::json to_json(const MetricReport& report)
{
    nlohmann::json j{{"metric", report.metric}, {"value", report.value}};
    j["numerator"] = report.numerator ? nlohmann::json(*report.numerator) : nlohmann::json(nullptr);
    j["denominator"] = report.denominator ? nlohmann::json(*report.denominator) : nlohmann::json(nullptr);
    j["per_case"] = nlohmann::json::array();
    for (const auto& d : report.per_case) {
        j["per_case"].push_back({{"case_id", d.case_id}, {"value", d.value}, {"note", d.note}});
    }
    j["notices"] = report.notices;
    return j;
}

nlohmann::json to_json(const Prf1& s)
{
    return {{"precision", round4(s.precision)},
            {"recall", round4(s.recall)},
            {"f1", round4(s.f1)},
            {"precision_undefined", s.precision_undefined},
            {"predicted", s.predicted},
            {"predicted_correct", s.predicted_correct},
            {"gold", s.gold},
            {"gold_found", s.gold_found}};
}

nlohmann::json to_json(const CorpusStats& stats)
{
    auto list = [](const std::vector<RankedCount>& v) {
        auto arr = nlohmann::json::array();
        for (const auto& r : v) {
            arr.push_back({{"name", r.name}, {"count", r.count}});
        }
        return arr;
    };
    return {{"base_support", list(stats.base_support)},
            {"base_variations", list(stats.base_variations)},
            {"library_models", list(stats.library_models)},
            {"totals", stats.totals}};
}

nlohmann::json to_json(const ExperimentTable& table)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
        auto j = to_json(r.scores);
        j["system"] = r.system;
        rows.push_back(std::move(j));
    }
    return {{"task", table.task}, {"rows", rows}};
}

std::string render_table(const ExperimentTable& table)
{
    std::vector<std::vector<std::string>> rows{{"task", "system", "precision", "recall", "f1"}};
    for (const auto& r : table.rows) {
        rows.push_back({table.task, r.system,
                        r.scores.precision_undefined ? "n/a" : fixed(r.scores.precision, 4),
                        fixed(r.scores.recall, 4), fixed(r.scores.f1, 4)});
    }
    return render_rows(rows);
}

std::string render_table(const MetricReport& report)
{
    std::string head = report.metric + " = " + fixed(report.value * 100.0, 2) + "%";
    if (report.numerator && report.denominator) {
        head += " (" + std::to_string(*report.numerator) + "/" + std::to_string(*report.denominator) + ")";
    } else if (report.denominator) {
        head += " (mean over " + std::to_string(*report.denominator) + " cases)";
    }
    std::vector<std::vector<std::string>> rows{{"case", "value", "note"}};
    for (const auto& d : report.per_case) {
        rows.push_back({d.case_id, fixed(d.value, 4), d.note});
    }
    std::string out = head + "\n" + render_rows(rows);
    for (const auto& n : report.notices) {
        out += "note: " + n + "\n";
    }
    return out;
}

std::string render_table(const CorpusStats& stats, std::size_t top)
{
    std::string out;
    auto section = [&](const char* title, const std::vector<RankedCount>& v) {
        out += std::string(title) + "\n";
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < v.size() && i < top; ++i) {
            rows.push_back({"  " + v[i].name, std::to_string(v[i].count)});
        }
        out += render_rows(rows);
    };
    section("libraries supporting each base model", stats.base_support);
    section("variations per base model", stats.base_variations);
    section("models per library", stats.library_models);
    out += "totals\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, v] : stats.totals) {
        rows.push_back({"  " + k, std::to_string(v)});
    }
    return out + render_rows(rows);
}

}  // namespace modelselect::eval
