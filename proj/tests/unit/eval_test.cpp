// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "modelselect/common/error.hpp"
#include "modelselect/eval/eval.hpp"
#include "test_support.hpp"

namespace ev = modelselect::eval;
using modelselect::testing::TempDir;

namespace {

ev::CaseStudy make_case(std::string id, std::vector<std::string> gold)
{
    return {std::move(id), "vision", "because it works", std::move(gold), {}, "doi:10.0/x"};
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines)
{
    std::ofstream out(p);
    for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TEST(NameMatcher, NormalizationAliasesAndFuzz)
{
    ev::NameMatcher m(0.9);
    m.add_alias("SVM", "Support Vector Machine");
    EXPECT_EQ(ev::NameMatcher::normalize("Support-Vector Machines!"), "support vector machine");
    EXPECT_TRUE(m.matches("SVM", "support vector machines"));
    EXPECT_TRUE(m.matches("ResNet-50", "resnet 50"));
    EXPECT_TRUE(m.matches("Random Forests", "random forest"));
    EXPECT_TRUE(m.matches("EfficientNetB0", "EfficientNet-B0") == m.matches("EfficientNet-B0", "EfficientNetB0"));
    EXPECT_TRUE(m.matches("transformer", "transformers"));
    EXPECT_FALSE(m.matches("BERT", "GPT"));
    EXPECT_FALSE(m.matches("ResNet-50", "ResNet-18"));
    EXPECT_FALSE(m.matches("", ""));
}

TEST(NameMatcher, ReflexiveAndSymmetricOnRandomNames)
{
    ev::NameMatcher m(0.9);
    m.add_alias("cnn", "convolutional neural network");
    std::mt19937 rng(9);
    const std::string alphabet = "abcdeN- 0";
    for (int i = 0; i < 2000; ++i) {
        std::string a, b;
        for (int n = 1 + static_cast<int>(rng() % 12); n > 0; --n) a += alphabet[rng() % alphabet.size()];
        b = a;
        if (rng() % 2) b[rng() % b.size()] = alphabet[rng() % alphabet.size()];
        if (!ev::NameMatcher::normalize(a).empty()) {
            ASSERT_TRUE(m.matches(a, a)) << a;
        }
        ASSERT_EQ(m.matches(a, b), m.matches(b, a)) << a << " / " << b;
    }
}

TEST(Coverage, HandPlacedGolds)
{
    std::vector<ev::CaseStudy> gold{make_case("c1", {"gold"}), make_case("c2", {"gold"}), make_case("c3", {"gold"})};
    auto ranked_with_gold_at = [](std::size_t rank) {
        std::vector<std::string> v;
        for (std::size_t i = 1; i <= 12; ++i) v.push_back(i == rank ? "gold" : "filler" + std::to_string(i) + "x");
        return v;
    };
    ev::CaseRecs sys{{"c1", ranked_with_gold_at(1)}, {"c2", ranked_with_gold_at(11)}, {"c3", ranked_with_gold_at(4)}};
    auto r = ev::coverage_at_k(sys, gold, 10, ev::NameMatcher::exact());
    EXPECT_EQ(*r.numerator, 2u);
    EXPECT_EQ(*r.denominator, 3u);
    EXPECT_DOUBLE_EQ(r.value, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(ev::coverage_at_k(sys, gold, 11, ev::NameMatcher::exact()).value, 1.0);
    EXPECT_THROW(ev::coverage_at_k(sys, gold, 0, ev::NameMatcher::exact()), modelselect::Error);
}

TEST(Coverage, MissingRecommendationsAreMisses)
{
    std::vector<ev::CaseStudy> gold{make_case("a", {"x"}), make_case("b", {"y"})};
    auto r = ev::coverage_at_k({{"a", {"x"}}}, gold, 10, ev::NameMatcher::exact());
    EXPECT_DOUBLE_EQ(r.value, 0.5);
    EXPECT_EQ(r.per_case[1].note, "no recommendations");
}

TEST(Coverage, EightyOfNinetyTwo)
{
    std::vector<ev::CaseStudy> gold;
    ev::CaseRecs sys;
    for (int i = 0; i < 92; ++i) {
        auto id = "case" + std::to_string(i);
        gold.push_back(make_case(id, {"model" + std::to_string(i)}));
        sys[id] = {i < 80 ? "model" + std::to_string(i) : "other"};
    }
    auto r = ev::coverage_at_k(sys, gold, 10, ev::NameMatcher::exact());
    EXPECT_NEAR(r.value * 100.0, 86.96, 0.01);
}

TEST(Overlap, SetArithmeticAndExclusions)
{
    auto m = ev::NameMatcher::exact();
    auto r = ev::overlap_percent({{"c", {"A", "B"}}}, {{"c", {"B", "C"}}}, m);
    EXPECT_DOUBLE_EQ(r.value, 0.5);
    auto with_empty = ev::overlap_percent({{"c", {"A", "B"}}, {"d", {}}}, {{"c", {"A", "B", "C"}}, {"d", {"x"}}}, m);
    EXPECT_DOUBLE_EQ(with_empty.value, 1.0);
    EXPECT_EQ(with_empty.notices.size(), 1u);
    EXPECT_THROW(ev::overlap_percent({{"c", {"A"}}}, {{"z", {"A"}}}, m), modelselect::Error);
}

TEST(Prf1, Examples)
{
    auto m = ev::NameMatcher::exact();
    auto s = ev::prf1({"A", "B", "C"}, {"A", "D"}, m);
    EXPECT_DOUBLE_EQ(s.precision, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.recall, 0.5);
    EXPECT_NEAR(s.f1, 0.4, 1e-15);
    auto same = ev::prf1({"A", "B"}, {"B", "A"}, m);
    EXPECT_EQ(same.f1, 1.0);
    auto none = ev::prf1({}, {"A"}, m);
    EXPECT_TRUE(none.precision_undefined);
    EXPECT_EQ(none.precision, 0.0);
    EXPECT_THROW(ev::prf1({"A"}, {}, m), modelselect::Error);
    EXPECT_NEAR(ev::round4(ev::harmonic_mean(0.82, 0.96)), 0.8845, 1e-12);
}

TEST(Prf1, SwapSymmetryUnderExactMatching)
{
    auto m = ev::NameMatcher::exact();
    std::mt19937 rng(5);
    for (int i = 0; i < 500; ++i) {
        std::vector<std::string> a, b;
        for (int n = 1 + static_cast<int>(rng() % 6); n > 0; --n) a.push_back(std::string(1, static_cast<char>('a' + rng() % 8)));
        for (int n = 1 + static_cast<int>(rng() % 6); n > 0; --n) b.push_back(std::string(1, static_cast<char>('a' + rng() % 8)));
        ASSERT_DOUBLE_EQ(ev::prf1(a, b, m).precision, ev::prf1(b, a, m).recall);
    }
}

TEST(CorpusStats, Fig4AndEmpty)
{
    auto stats = ev::corpus_stats(modelselect::testing::fig4_graph());
    ASSERT_FALSE(stats.base_support.empty());
    EXPECT_EQ(stats.base_support[0], (ev::RankedCount{"Regression", 1}));
    EXPECT_EQ(stats.base_variations[0], (ev::RankedCount{"Regression", 2}));
    EXPECT_EQ(stats.library_models, (std::vector<ev::RankedCount>{{"scikit-learn", 2}}));

    auto empty = ev::corpus_stats(modelselect::kg::KnowledgeGraph{});
    EXPECT_TRUE(empty.base_support.empty());
    EXPECT_TRUE(empty.library_models.empty());
    for (const auto& [k, v] : empty.totals) EXPECT_EQ(v, 0u) << k;
}

TEST(Experiment, TwoSystemsPlusFusedUnion)
{
    TempDir dir;
    write_lines(dir.path() / "gold.jsonl", {R"({"row_id":"r1","items":["numpy","pandas"]})",
                                            R"({"row_id":"r2","items":["torch"]})"});
    write_lines(dir.path() / "a.jsonl", {R"({"row_id":"r1","system":"A","items":["numpy"]})",
                                         R"({"row_id":"r2","system":"A","items":["torch","flask"]})"});
    write_lines(dir.path() / "b.jsonl", {R"({"row_id":"r1","system":"B","items":["pandas"]})"});
    ev::ExperimentConfig c{"dependencies", {dir.path() / "a.jsonl", dir.path() / "b.jsonl"}, dir.path() / "gold.jsonl",
                           modelselect::provider::FusePolicy::Union, 0.9, std::nullopt};
    auto t = ev::run_experiment(c);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].system, "A");
    EXPECT_EQ(t.rows[2].system, "fused-union");
    EXPECT_DOUBLE_EQ(t.rows[0].scores.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(t.rows[0].scores.recall, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(t.rows[1].scores.recall, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(t.rows[2].scores.recall, 1.0);
    EXPECT_NE(ev::render_table(t).find("fused-union"), std::string::npos);

    c.prediction_files = {dir.path() / "a.jsonl", dir.path() / "a.jsonl"};
    auto same = ev::run_experiment(c);
    ASSERT_EQ(same.rows.size(), 3u);
    EXPECT_EQ(same.rows[1].system, "A#2");
    EXPECT_EQ(ev::to_json(same.rows[2].scores), ev::to_json(same.rows[0].scores));
}

TEST(Experiment, SchemaErrorsNameFileAndLine)
{
    TempDir dir;
    write_lines(dir.path() / "gold.jsonl", {R"({"row_id":"r1","items":["x"]})"});
    write_lines(dir.path() / "p.jsonl", {R"({"row_id":"r1","system":"A","items":["x"]})",
                                         R"({"row_id":"r1","system":"A","items":"x"})"});
    ev::ExperimentConfig c{"t", {dir.path() / "p.jsonl"}, dir.path() / "gold.jsonl", std::nullopt, 0.9, std::nullopt};
    try {
        ev::run_experiment(c);
        FAIL() << "expected ParseError";
    } catch (const modelselect::ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("p.jsonl"), std::string::npos);
    }
}

TEST(Cases, LoadRejectsEmptyRationale)
{
    TempDir dir;
    write_lines(dir.path() / "cases.jsonl",
                {R"({"case_id":"1","domain":"d","rationale":"r","gold_models":["m"],"gold_libraries":[],"source_ref":"u"})",
                 R"({"case_id":"2","domain":"d","rationale":" ","gold_models":["m"]})"});
    EXPECT_THROW(ev::load_cases(dir.path() / "cases.jsonl"), modelselect::ParseError);
}

// Randomized identities: coverage monotone in k, overlap(X, X) = 1, fused union
// recall dominates, reordering cases changes nothing.
TEST(EvalProperties, RandomizedIdentities)
{
    std::mt19937_64 rng(77);
    ev::NameMatcher m(0.9);
    auto name = [&] { return "model " + std::string(1, static_cast<char>('a' + rng() % 12)); };
    for (int round = 0; round < 200; ++round) {
        std::vector<ev::CaseStudy> gold;
        ev::CaseRecs sys;
        for (int c = 0, n = 1 + static_cast<int>(rng() % 8); c < n; ++c) {
            auto id = "c" + std::to_string(c);
            gold.push_back(make_case(id, {name()}));
            for (int i = 0, r = static_cast<int>(rng() % 15); i < r; ++i) sys[id].push_back(name());
        }
        double prev = -1.0;
        for (std::size_t k = 1; k <= 15; ++k) {
            auto v = ev::coverage_at_k(sys, gold, k, m).value;
            ASSERT_GE(v, prev);
            prev = v;
        }
        auto shuffled = gold;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        ASSERT_EQ(ev::to_json(ev::coverage_at_k(sys, gold, 5, m)), ev::to_json(ev::coverage_at_k(sys, shuffled, 5, m)));
        ev::CaseRecs nonempty;
        for (const auto& [id, v] : sys) if (!v.empty()) nonempty[id] = v;
        if (!nonempty.empty()) {
            ASSERT_DOUBLE_EQ(ev::overlap_percent(nonempty, nonempty, m).value, 1.0);
        }
    }
}
