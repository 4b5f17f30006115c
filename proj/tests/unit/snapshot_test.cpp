// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <gtest/gtest.h>

#include "modelselect/common/error.hpp"
#include "modelselect/common/hash.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/knowledge/snapshot.hpp"
#include "test_support.hpp"

namespace {

using namespace modelselect;
using namespace modelselect::kg;
using modelselect::testing::TempDir;

std::string read_all(const std::filesystem::path& dir)
{
    std::string out;
    for (const auto& name : snapshot_file_names()) out += io::read_file(dir / name);
    return out + io::read_file(dir / "manifest.json");
}

void rewrite_manifest_checksum(const std::filesystem::path& dir, const std::string& file)
{
    auto manifest = nlohmann::ordered_json::parse(io::read_file(dir / "manifest.json"));
    for (auto& entry : manifest["files"]) {
        if (entry["name"] == file) entry["sha256"] = sha256_hex(io::read_file(dir / file));
    }
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

TEST(Snapshot, Fig4WritesEightFilesAndReloadsIdentically)
{
    TempDir dir;
    auto g = modelselect::testing::fig4_graph();
    auto manifest = save_snapshot(g, dir.path());
    ASSERT_EQ(manifest.files.size(), 8U);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "manifest.json"));
    EXPECT_EQ(manifest.files[0].records, 1U);
    EXPECT_EQ(manifest.files[1].records, 2U);
    EXPECT_EQ(manifest.files[2].records, 6U);
    EXPECT_EQ(manifest.files[7].records, g.edges().size());
    auto loaded = load_snapshot(dir.path());
    EXPECT_EQ(loaded, g);
    EXPECT_EQ(loaded.index(), g.index());
    EXPECT_EQ(read_manifest(dir.path()).version, manifest.version);
}

TEST(Snapshot, EmptyGraphHasZeroRecordFiles)
{
    TempDir dir;
    auto manifest = save_snapshot(KnowledgeGraph{}, dir.path());
    for (const auto& f : manifest.files) {
        EXPECT_EQ(f.records, 0U);
        EXPECT_EQ(std::filesystem::file_size(dir.path() / f.name), 0U);
    }
    EXPECT_EQ(load_snapshot(dir.path()), KnowledgeGraph{});
}

TEST(Snapshot, ChecksumMismatchNamesTheFile)
{
    TempDir dir;
    save_snapshot(modelselect::testing::fig4_graph(), dir.path());
    auto text = io::read_file(dir.path() / "features.jsonl");
    text[10] = text[10] == 'a' ? 'b' : 'a';
    io::write_file(dir.path() / "features.jsonl", text);
    try {
        load_snapshot(dir.path());
        FAIL() << "corrupt snapshot loaded";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("features.jsonl"), std::string::npos);
    }
}

TEST(Snapshot, MissingFileIsRejected)
{
    TempDir dir;
    save_snapshot(modelselect::testing::fig4_graph(), dir.path());
    std::filesystem::remove(dir.path() / "edges.jsonl");
    EXPECT_THROW(load_snapshot(dir.path()), Error);
}

TEST(Snapshot, MalformedRecordReportsFileAndLine)
{
    TempDir dir;
    save_snapshot(modelselect::testing::fig4_graph(), dir.path());
    auto lines = io::read_file(dir.path() / "variations.jsonl");
    auto first_end = lines.find('\n');
    lines = lines.substr(0, first_end + 1) + "{\"id\": broken}\n";
    io::write_file(dir.path() / "variations.jsonl", lines);
    rewrite_manifest_checksum(dir.path(), "variations.jsonl");
    try {
        load_snapshot(dir.path());
        FAIL() << "malformed snapshot loaded";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.file(), "variations.jsonl");
        EXPECT_EQ(e.line(), 2U);
    }
}

TEST(Snapshot, RecordMissingAFieldReportsFileAndLine)
{
    TempDir dir;
    save_snapshot(modelselect::testing::fig4_graph(), dir.path());
    io::write_file(dir.path() / "base_models.jsonl", "{\"id\":\"base-x\"}\n");
    rewrite_manifest_checksum(dir.path(), "base_models.jsonl");
    try {
        load_snapshot(dir.path());
        FAIL() << "incomplete record loaded";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.file(), "base_models.jsonl");
        EXPECT_EQ(e.line(), 1U);
    }
}

TEST(Snapshot, SavingTwiceIsByteIdentical)
{
    TempDir a("snap-a");
    TempDir b("snap-b");
    auto g = modelselect::testing::fig4_graph();
    save_snapshot(g, a.path());
    save_snapshot(load_snapshot(a.path()), b.path());
    EXPECT_EQ(read_all(a.path()), read_all(b.path()));
}

TEST(Snapshot, RoundTripAndIdempotenceOnRandomGraphs)
{
    std::mt19937_64 rng(2026);
    TempDir dir;
    for (int trial = 0; trial < 500; ++trial) {
        KnowledgeGraph g;
        auto batch = modelselect::testing::random_batch(rng, 100);
        g.upsert(batch);
        auto once = g;
        auto summary = g.upsert(batch);
        ASSERT_TRUE(summary.unchanged()) << "trial " << trial;
        ASSERT_EQ(g, once);
        auto manifest = save_snapshot(g, dir.path());
        auto loaded = load_snapshot(dir.path());
        ASSERT_EQ(loaded, g) << "trial " << trial;
        ASSERT_EQ(loaded.index(), g.index());
        ASSERT_EQ(read_manifest(dir.path()).version, manifest.version);
    }
}

}  // namespace
