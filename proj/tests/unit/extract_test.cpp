// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <gtest/gtest.h>

#include <random>

#include "modelselect/common/text.hpp"
#include "modelselect/common/time.hpp"
#include "modelselect/extract/extract.hpp"
#include "test_support.hpp"

namespace ex = modelselect::extract;
namespace kg = modelselect::kg;
namespace mp = modelselect::provider;
namespace text = modelselect::text;
using modelselect::testing::resource_dir;

namespace {

const ex::ChunkingConfig& chunking()
{
    static const auto c = ex::ChunkingConfig::load(resource_dir() / "chunking.toml");
    return c;
}

const ex::BaseLexicon& lexicon()
{
    static const auto l = ex::BaseLexicon::load(resource_dir() / "base_lexicon.toml");
    return l;
}

mp::HeuristicBackend heuristic()
{
    return mp::HeuristicBackend(mp::HeuristicRules::load(resource_dir() / "heuristic_rules.toml"));
}

ex::DocumentChunk chunk(std::string body, int position = 0)
{
    return {kg::ids::library("scikit-learn"), "https://scikit-learn.org/stable/modules/linear_model.html",
            std::move(body), position};
}

std::set<std::string> phrases(const std::vector<ex::NounPhraseCandidate>& cands)
{
    std::set<std::string> out;
    for (const auto& c : cands) out.insert(c.phrase);
    return out;
}

modelselect::Timestamp as_of() { return modelselect::parse_timestamp("2025-06-01T00:00:00Z"); }

const char* kLinearModelPage =
    "Home | Modules | API | Install\n"
    "\n"
    "Linear Models\n"
    "\n"
    "Ridge regression adds an L2 penalty to ordinary least squares. The regularization strength\n"
    "controls how much the coefficients shrink.\n"
    "\n"
    "```\n"
    "from sklearn.linear_model import Ridge\n"
    "```\n"
    "\n"
    "Robust multivariate regression uses a Huber loss for outlier resistance.\n"
    "\n"
    "See the installation guide for platform notes and wheels.\n";

}  // namespace

TEST(Segment, DropsNavigationCodeAndShortParagraphs)
{
    auto chunks = ex::segment(kLinearModelPage, kg::ids::library("scikit-learn"), "https://x.test/lm", chunking());
    ASSERT_EQ(chunks.size(), 3u);
    EXPECT_EQ(chunks[0].text,
              "Ridge regression adds an L2 penalty to ordinary least squares. The regularization strength controls "
              "how much the coefficients shrink.");
    EXPECT_EQ(chunks[1].text, "Robust multivariate regression uses a Huber loss for outlier resistance.");
    for (int i = 0; i < 3; ++i) EXPECT_EQ(chunks[static_cast<std::size_t>(i)].position, i);
}

TEST(Segment, EmptyAndFenceOnlyPages)
{
    EXPECT_TRUE(ex::segment("", kg::EntityId("lib-x"), "https://x.test/", chunking()).empty());
    EXPECT_TRUE(ex::segment("```\nimport numpy as np\nprint(np.arange(100))\n```\n", kg::EntityId("lib-x"),
                            "https://x.test/", chunking())
                    .empty());
}

TEST(NounPhrases, PatternExamples)
{
    EXPECT_EQ(phrases(ex::extract_noun_phrases(chunk("Ridge regression adds an L2 penalty"), chunking())),
              (std::set<std::string>{"ridge regression", "l2 penalty"}));
    EXPECT_EQ(phrases(ex::extract_noun_phrases(chunk("supports convolutional neural networks"), chunking())),
              (std::set<std::string>{"convolutional neural network"}));
    EXPECT_TRUE(ex::extract_noun_phrases(chunk(""), chunking()).empty());
    EXPECT_EQ(phrases(ex::extract_noun_phrases(chunk("Robust multivariate regression uses a Huber loss."), chunking())),
              (std::set<std::string>{"robust multivariate regression", "huber loss"}));
}

TEST(NounPhrases, DuplicatesKeepFirstSpan)
{
    auto c = chunk("Lasso regression is sparse. Lasso regressions are popular.");
    auto cands = ex::extract_noun_phrases(c, chunking());
    ASSERT_EQ(cands.size(), 1u);
    EXPECT_EQ(cands[0].phrase, "lasso regression");
    EXPECT_EQ(c.text.substr(cands[0].begin, cands[0].end - cands[0].begin), "Lasso regression");
}

TEST(NounPhrases, SpansAndLengthsOnRandomText)
{
    std::vector<std::string> words = {"deep",  "neural", "network", "adds",  "the",  "l2",     "penalty",
                                      "huber", "loss",   "of",      "fast",  ",",    "robust", "models",
                                      "with",  "k-means", "trees",  "layer", "very", "."};
    std::mt19937 rng(7);
    for (int round = 0; round < 300; ++round) {
        std::string body;
        auto n = rng() % 30;
        for (std::size_t i = 0; i < n; ++i) {
            if (!body.empty()) body += ' ';
            body += words[rng() % words.size()];
        }
        auto c = chunk(body);
        std::set<std::string> seen;
        for (const auto& cand : ex::extract_noun_phrases(c, chunking())) {
            ASSERT_LT(cand.begin, cand.end);
            ASSERT_LE(cand.end, c.text.size());
            auto span_words = text::tokenize(c.text.substr(cand.begin, cand.end - cand.begin));
            auto phrase_words = text::split(cand.phrase, ' ');
            ASSERT_GE(phrase_words.size(), 1u);
            ASSERT_LE(phrase_words.size(), 8u);
            ASSERT_EQ(text::singularize_phrase(text::normalize_phrase(c.text.substr(cand.begin, cand.end - cand.begin))),
                      cand.phrase);
            ASSERT_TRUE(seen.insert(cand.phrase).second);
        }
    }
}

TEST(NounPhrases, LongRunsKeepTheHeadEnd)
{
    auto cands = ex::extract_noun_phrases(
        chunk("alpha beta gamma delta epsilon zeta theta iota kappa network"), chunking());
    ASSERT_EQ(cands.size(), 1u);
    EXPECT_EQ(cands[0].phrase, "gamma delta epsilon zeta theta iota kappa network");
}

TEST(LabelAndDefine, ModelFeatureNeither)
{
    auto backend = heuristic();
    auto c = chunk(
        "Linear models are everywhere. Ridge regression adds an L2 penalty to ordinary least squares. "
        "See the installation guide.");
    auto cands = ex::extract_noun_phrases(c, chunking());
    std::map<std::string, ex::LabeledCandidate> by_phrase;
    for (const auto& cand : cands) by_phrase.emplace(cand.phrase, ex::label_and_define(cand, c, backend, 3, as_of()));

    const auto& ridge = by_phrase.at("ridge regression");
    EXPECT_EQ(ridge.label, ex::PhraseLabel::Model);
    EXPECT_EQ(ridge.definition, "Ridge regression adds an L2 penalty to ordinary least squares.");
    EXPECT_EQ(ridge.evidence.source_url, c.source_url);
    EXPECT_EQ(ridge.evidence.fragment, "Ridge regression adds an L2 penalty to ordinary least squares.");
    EXPECT_NE(c.text.find(ridge.evidence.fragment), std::string::npos);

    EXPECT_EQ(by_phrase.at("l2 penalty").label, ex::PhraseLabel::Feature);
    EXPECT_FALSE(by_phrase.at("l2 penalty").definition.has_value());
    EXPECT_EQ(by_phrase.at("installation guide").label, ex::PhraseLabel::Neither);
}

TEST(MapFeatures, CoOccurrenceCounts)
{
    auto lbl = [](std::string phrase, ex::PhraseLabel l) {
        ex::LabeledCandidate out;
        out.candidate.phrase = std::move(phrase);
        out.label = l;
        return out;
    };
    std::vector<ex::LabeledCandidate> labeled = {lbl("ridge regression", ex::PhraseLabel::Model),
                                                 lbl("l2 penalty", ex::PhraseLabel::Feature),
                                                 lbl("huber loss", ex::PhraseLabel::Feature),
                                                 lbl("lasso", ex::PhraseLabel::Model)};
    std::vector<ex::DocumentChunk> chunks = {
        chunk("Ridge regression adds an L2 penalty.", 0),
        chunk("The L2 penalties of ridge regression shrink weights.", 1),
        chunk("Ridge regression with an l2 penalty is stable.", 2),
        chunk("A Huber loss resists outliers.", 3),
        chunk("Lasso is sparse.", 4),
    };
    auto links = ex::map_model_features(chunks, labeled, as_of());
    ASSERT_EQ(links.size(), 1u);
    EXPECT_EQ(links[0].variation_phrase, "ridge regression");
    EXPECT_EQ(links[0].feature_phrase, "l2 penalty");
    EXPECT_EQ(links[0].weight, 3);
    EXPECT_EQ(links[0].evidence.size(), 3u);

    auto single = ex::map_model_features({chunks[0]}, labeled, as_of());
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].weight, 1);
}

TEST(Cluster, Examples)
{
    auto out = ex::cluster_variations({"ridge regression", "vision transformer", "foonet-xl",
                                       "robust multivariate regression", "convolutional neural network",
                                       "transformr"},
                                      lexicon(), 0.85);
    EXPECT_EQ(out.at("ridge regression"), "Regression");
    EXPECT_EQ(out.at("vision transformer"), "Transformer");
    EXPECT_EQ(out.at("foonet-xl"), "Miscellaneous");
    EXPECT_EQ(out.at("robust multivariate regression"), "Regression");
    EXPECT_EQ(out.at("convolutional neural network"), "CNN");
    EXPECT_EQ(out.at("transformr"), "Transformer");  // fuzzy stage
}

TEST(Cluster, TieBreakPrefersLongerThenSmallerName)
{
    ex::BaseLexicon lex;
    lex.bases = {{"Zeta", {"net"}, ""}, {"Alpha", {"net"}, ""}, {"Longer", {"net"}, ""}, {"Miscellaneous", {}, ""}};
    EXPECT_EQ(ex::cluster_variations({"super net"}, lex, 0.85).at("super net"), "Longer");
    lex.bases = {{"Zeta", {"net"}, ""}, {"Alph", {"net"}, ""}, {"Miscellaneous", {}, ""}};
    EXPECT_EQ(ex::cluster_variations({"super net"}, lex, 0.85).at("super net"), "Alph");
}

TEST(Cluster, LexiconWithoutFallbackRejected)
{
    EXPECT_THROW(ex::BaseLexicon::from_json(nlohmann::json::parse(R"({"base":[{"name":"CNN"}]})")),
                 modelselect::Error);
}

TEST(Cluster, TotalIdempotentAndStricterThresholdNeverLeavesFallback)
{
    std::vector<std::string> pieces = {"regression", "transformr", "net",  "boost", "deep",   "forest",
                                       "xyz",        "gan",        "svm",  "tree",  "ridge",  "lasso",
                                       "language",   "model",      "cnnn", "vit",   "convnet", "qq"};
    std::mt19937 rng(31);
    for (int round = 0; round < 300; ++round) {
        std::vector<std::string> phrases;
        for (int i = 0; i < 5; ++i) {
            std::string p = pieces[rng() % pieces.size()];
            if (rng() % 2) p += " " + pieces[rng() % pieces.size()];
            phrases.push_back(p);
        }
        double low = static_cast<double>(rng() % 100) / 100.0;
        double high = low + (1.0 - low) * static_cast<double>(rng() % 100) / 100.0;
        auto a = ex::cluster_variations(phrases, lexicon(), low);
        auto b = ex::cluster_variations(phrases, lexicon(), high);
        ASSERT_EQ(a, ex::cluster_variations(phrases, lexicon(), low));
        for (const auto& p : phrases) {
            ASSERT_EQ(a.count(p), 1u);
            ASSERT_NE(lexicon().find(a.at(p)), nullptr);
            if (a.at(p) == "Miscellaneous") {
                ASSERT_EQ(b.at(p), "Miscellaneous") << p;
            }
        }
    }
}

TEST(TwoWayIndex, Fig4)
{
    auto graph = modelselect::testing::fig4_graph();
    auto index = ex::build_two_way_index(graph);
    auto sklearn = kg::ids::library("scikit-learn");
    auto regression = kg::ids::base_model("Regression");
    std::set<kg::EntityId> both = {kg::ids::variation(regression, "Ridge Regression"),
                                   kg::ids::variation(regression, "Robust Multivariate Regression")};
    EXPECT_EQ(index.library_to_variations.at(sklearn), both);
    for (const auto& v : both) EXPECT_EQ(index.variation_to_libraries.at(v), std::set<kg::EntityId>{sklearn});
    EXPECT_TRUE(index.is_transpose());
    EXPECT_EQ(ex::two_way_index_jsonl(graph, index),
              "{\"library\":\"scikit-learn\",\"variations\":[\"Ridge Regression\",\"Robust Multivariate "
              "Regression\"]}\n");
}

TEST(TwoWayIndex, EmptyGraph)
{
    auto index = ex::build_two_way_index(kg::KnowledgeGraph{});
    EXPECT_TRUE(index.library_to_variations.empty());
    EXPECT_TRUE(index.variation_to_libraries.empty());
}

TEST(TwoWayIndex, TransposeAndOutDegreeOnRandomGraphs)
{
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 300; ++round) {
        kg::KnowledgeGraph graph;
        graph.upsert(modelselect::testing::random_batch(rng, 40));
        auto index = ex::build_two_way_index(graph);
        ASSERT_TRUE(index.is_transpose());
        for (const auto& [id, lib] : graph.libraries()) {
            std::size_t degree = 0;
            for (const auto& [key, e] : graph.edges()) degree += key.kind == kg::EdgeKind::LibraryVariation && key.from == id;
            auto it = index.library_to_variations.find(id);
            ASSERT_EQ(it == index.library_to_variations.end() ? 0 : it->second.size(), degree);
        }
    }
}

TEST(Pipeline, DocumentationToGraph)
{
    auto backend = heuristic();
    ex::ExtractionSettings settings{chunking(), lexicon(), 3};
    auto sklearn = kg::ids::library("scikit-learn");
    std::vector<ex::LibraryPages> pages = {{sklearn, {{"https://scikit-learn.org/stable/modules/linear_model.html",
                                                       kLinearModelPage}}}};
    auto result = ex::extract_models(pages, backend, settings, as_of());

    kg::KnowledgeGraph graph;
    kg::Library lib;
    lib.distribution_name = "scikit-learn";
    graph.upsert({{lib}, {}});
    auto summary = graph.upsert(result.batch);
    EXPECT_EQ(summary.rejected(), 0u) << (summary.diagnostics.empty() ? "" : summary.diagnostics.front());
    EXPECT_TRUE(kg::validate(graph).empty());

    auto regression = kg::ids::base_model("Regression");
    auto ridge = kg::ids::variation(regression, "Ridge Regression");
    auto robust = kg::ids::variation(regression, "Robust Multivariate Regression");
    ASSERT_TRUE(graph.variations().count(ridge));
    ASSERT_TRUE(graph.variations().count(robust));
    EXPECT_EQ(graph.variations().at(ridge).name, "Ridge Regression");
    EXPECT_TRUE(graph.variations().at(ridge).feature_ids.count(kg::ids::feature("l2 penalty")));
    EXPECT_TRUE(graph.variations().at(robust).feature_ids.count(kg::ids::feature("huber loss")));
    EXPECT_EQ(graph.libraries().at(sklearn).supported_variation_ids, (std::set<kg::EntityId>{ridge, robust}));
    for (const auto& [id, v] : graph.variations()) EXPECT_FALSE(v.evidence.empty()) << v.name;
    for (const auto& e : result.batch.edges) EXPECT_FALSE(e.evidence.empty());

    auto again = ex::extract_models(pages, backend, settings, as_of());
    kg::KnowledgeGraph second;
    second.upsert({{lib}, {}});
    second.upsert(again.batch);
    EXPECT_EQ(graph, second);
}
