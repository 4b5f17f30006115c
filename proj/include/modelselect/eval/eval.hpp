// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modelselect/knowledge/graph.hpp"
#include "modelselect/provider/provider.hpp"

namespace modelselect::eval {

struct CaseStudy {
    std::string case_id;
    std::string domain;
    std::string rationale;
    std::vector<std::string> gold_models;
    std::vector<std::string> gold_libraries;
    std::string source_ref;
};

/// cases.jsonl; empty rationale or gold_models is a ParseError on that line.
std::vector<CaseStudy> load_cases(const std::filesystem::path& path);

/// Ranked names per case id.
using CaseRecs = std::map<std::string, std::vector<std::string>>;

struct BaselineRecs {
    std::map<std::string, CaseRecs> models;     // system -> case -> models
    std::map<std::string, CaseRecs> libraries;  // system -> case -> libraries
};

/// baseline_recs.jsonl: {case_id, system, models[], libraries[]}.
BaselineRecs load_baseline(const std::filesystem::path& path);

/// Gold and system names rarely agree textually ("SVM" vs "Support Vector
/// Machines"). Names are normalized (lowercase, punctuation to spaces, plural
/// stripped per token), mapped through the alias table, then compared exactly
/// or by edit similarity at the threshold.
class NameMatcher {
  public:
    explicit NameMatcher(double fuzzy_threshold = 0.9) : threshold_(fuzzy_threshold) {}

    /// Tab-separated "alias<TAB>canonical" lines; '#' comments.
    static NameMatcher load(const std::filesystem::path& aliases_tsv, double fuzzy_threshold = 0.9);
    /// Exact comparison after normalization only. Used where set identities matter.
    static NameMatcher exact();

    void add_alias(std::string_view alias, std::string_view canonical);

    static std::string normalize(std::string_view name);
    std::string canonical(std::string_view name) const;
    bool matches(std::string_view a, std::string_view b) const;

    double threshold() const noexcept { return threshold_; }

  private:
    double threshold_;
    bool fuzzy_ = true;
    std::map<std::string, std::string> aliases_;
};

struct CaseDetail {
    std::string case_id;
    double value = 0.0;
    std::string note;
};

struct MetricReport {
    std::string metric;
    double value = 0.0;
    std::optional<std::size_t> numerator;
    std::optional<std::size_t> denominator;
    std::vector<CaseDetail> per_case;  // sorted by case id
    std::vector<std::string> notices;
};

/// Share of gold cases whose top-k system list matches any gold model.
/// A case without recommendations is a miss. Throws for k < 1.
MetricReport coverage_at_k(const CaseRecs& system, const std::vector<CaseStudy>& gold, std::size_t k,
                           const NameMatcher& matcher);

/// Mean over aligned cases of |baseline matched by system| / |baseline|.
/// Baseline names are deduplicated by canonical form. Cases with an empty
/// baseline are excluded with a notice; no aligned case is an error.
MetricReport overlap_percent(const CaseRecs& baseline, const CaseRecs& system, const NameMatcher& matcher);

struct Prf1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;  // nothing predicted; precision reported as 0
    std::size_t predicted = 0;
    std::size_t predicted_correct = 0;
    std::size_t gold = 0;
    std::size_t gold_found = 0;
};

double harmonic_mean(double p, double r) noexcept;

/// Precision counts predicted names matching some gold name, recall counts gold
/// names matched by some prediction. Both sets are deduplicated by canonical form.
/// Throws when gold is empty.
Prf1 prf1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold, const NameMatcher& matcher);

/// Pools counts over rows (micro average). Gold rows without a prediction count as empty predictions.
Prf1 prf1_rows(const std::map<std::string, std::vector<std::string>>& predicted,
               const std::map<std::string, std::vector<std::string>>& gold, const NameMatcher& matcher);

/// Rounds half away from zero to four decimals, the reporting precision.
double round4(double value) noexcept;

struct RankedCount {
    std::string name;
    std::size_t count = 0;
    friend bool operator==(const RankedCount&, const RankedCount&) = default;
};

struct CorpusStats {
    std::vector<RankedCount> base_support;        // libraries supporting >= 1 variation of the base
    std::vector<RankedCount> base_variations;     // variations per base
    std::vector<RankedCount> library_models;      // supported variations per library
    std::map<std::string, std::size_t> totals;    // entity and edge counts
};

/// Every list sorted by count descending, then name.
CorpusStats corpus_stats(const kg::KnowledgeGraph& graph);

struct ExperimentConfig {
    std::string task;
    std::vector<std::filesystem::path> prediction_files;
    std::filesystem::path gold_file;
    std::optional<provider::FusePolicy> fusion;
    double fuzzy_threshold = 0.9;
    std::optional<std::filesystem::path> aliases;

    /// experiment.toml: task, predictions = [...], gold, fusion (optional),
    /// fuzzy_threshold, aliases. Paths are relative to the file.
    static ExperimentConfig load(const std::filesystem::path& path);
};

struct ExperimentRow {
    std::string system;
    Prf1 scores;
};

struct ExperimentTable {
    std::string task;
    std::vector<ExperimentRow> rows;  // systems by first appearance, fused row last
};

/// Systems are keyed by the `system` field; a label seen again in a later file
/// gets a "#2", "#3" suffix so identical files stay distinct systems.
ExperimentTable run_experiment(const ExperimentConfig& config);

nlohmann::json to_json(const MetricReport& report);
nlohmann::json to_json(const Prf1& scores);
nlohmann::json to_json(const CorpusStats& stats);
nlohmann::json to_json(const ExperimentTable& table);

/// Aligned-column text renderings.
std::string render_table(const ExperimentTable& table);
std::string render_table(const MetricReport& report);
std::string render_table(const CorpusStats& stats, std::size_t top = 10);

}  // namespace modelselect::eval
