// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "modelselect/common/error.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/repo/dependencies.hpp"
#include "modelselect/repo/filter.hpp"
#include "modelselect/repo/imports.hpp"
#include "modelselect/repo/resolver.hpp"
#include "test_support.hpp"

namespace {

using namespace modelselect;
using namespace modelselect::repo;
using Roots = std::set<std::string>;

TEST(ParseImports, PlainAndFromImports)
{
    EXPECT_EQ(parse_imports("import numpy as np\nfrom sklearn.linear_model import Ridge"), (Roots{"numpy", "sklearn"}));
}

TEST(ParseImports, EmptyText) { EXPECT_TRUE(parse_imports("").empty()); }

TEST(ParseImports, CommentsAndRelativeImportsAreIgnored)
{
    EXPECT_EQ(parse_imports("# import fake\nfrom . import util\nimport torch.nn"), (Roots{"torch"}));
}

TEST(ParseImports, GrammarCorners)
{
    const char* source = R"(import os, sys as system, xml.etree.ElementTree as ET
    from ..pkg.mod import thing
def f():
        import scipy.sparse  # lazy import
x = 1; import yaml; from requests import get
"""
import not_code
"""
s = "import nope"
from   jax   import   numpy as jnp
from typing import (
    List,
)
importlib_thing = 3
from_here = 4
)";
    EXPECT_EQ(parse_imports(source), (Roots{"os", "sys", "xml", "scipy", "yaml", "requests", "jax", "typing"}));
}

TEST(ParseImports, RecordsPointAtTheirLines)
{
    std::string source = "'''doc\nimport hidden\n'''\nimport a\n\n  from b.c import d\nimport e, a\n";
    auto lines = text::split(source, '\n');
    auto records = scan_imports(source, "pkg/m.py", "repo-1");
    ASSERT_EQ(records.size(), 4U);
    for (const auto& r : records) {
        ASSERT_GE(r.line_number, 1U);
        EXPECT_NE(lines[r.line_number - 1].find(r.import_root), std::string::npos);
        EXPECT_EQ(r.source_path, "pkg/m.py");
        EXPECT_EQ(r.repo_id, "repo-1");
    }
    EXPECT_EQ(records[0].line_number, 4U);
    EXPECT_EQ(records[1].line_number, 6U);
}

RepoSnapshotEntry sample_repo(std::vector<SourceFile> files)
{
    RepoSnapshotEntry entry;
    entry.metadata.name = "org/sample";
    entry.files = std::move(files);
    return entry;
}

TEST(ExtractDependencies, UnionOfImportsAndRequirements)
{
    auto entry = sample_repo({{"train.py", "import numpy as np\nimport torch\n", false},
                              {"model/net.py", "import torch.nn as nn\n", false},
                              {"model/__init__.py", "from .net import Net\n", false},
                              {"requirements.txt", "pandas>=1.0\n", false}});
    auto result = extract_dependencies(entry, {});
    EXPECT_EQ(result.all(), (Roots{"numpy", "torch", "pandas"}));
    EXPECT_EQ(result.import_roots, (Roots{"numpy", "torch"}));
    EXPECT_EQ(result.manifest_names, (Roots{"pandas"}));
    EXPECT_FALSE(result.truncated);
}

TEST(ExtractDependencies, SelfImportsAreExcluded)
{
    auto entry = sample_repo({{"mylib/__init__.py", "", false},
                              {"mylib/core.py", "import mylib.util\n", false},
                              {"scripts/run.py", "from mylib import core\nimport core\n", false}});
    EXPECT_TRUE(extract_dependencies(entry, {}).all().empty());
}

TEST(ExtractDependencies, FileLimitTruncatesAndFlags)
{
    auto entry = sample_repo({{"a.py", "import numpy\n", false}, {"b.py", "import torch\n", false}});
    ExtractionLimits limits;
    limits.max_files = 1;
    auto result = extract_dependencies(entry, limits);
    EXPECT_TRUE(result.truncated);
    EXPECT_EQ(result.import_roots, (Roots{"numpy"}));
}

TEST(ExtractDependencies, ByteLimitTruncatesAndFlags)
{
    auto entry = sample_repo({{"a.py", "import numpy\nimport torch\n", false}});
    ExtractionLimits limits;
    limits.max_bytes_per_file = 13;
    auto result = extract_dependencies(entry, limits);
    EXPECT_TRUE(result.truncated);
    EXPECT_EQ(result.import_roots, (Roots{"numpy"}));
}

TEST(ExtractDependencies, ManifestsCanBeDisabled)
{
    auto entry = sample_repo({{"a.py", "import numpy\n", false}, {"requirements-dev.txt", "pytest\n", false}});
    ExtractionLimits limits;
    limits.use_manifests = false;
    EXPECT_EQ(extract_dependencies(entry, limits).all(), (Roots{"numpy"}));
}

TEST(ExtractDependencies, FileOrderDoesNotMatter)
{
    std::mt19937_64 rng(7);
    std::vector<std::string> libs = {"numpy", "torch", "pandas", "jax", "sklearn", "cv2"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SourceFile> files;
        int n = std::uniform_int_distribution<int>(1, 6)(rng);
        for (int i = 0; i < n; ++i) {
            std::string body;
            for (int k = 0; k < 3; ++k) body += "import " + libs[rng() % libs.size()] + "\n";
            files.push_back({"f" + std::to_string(i) + ".py", body, false});
        }
        auto expected = extract_dependencies(sample_repo(files), {}).all();
        std::shuffle(files.begin(), files.end(), rng);
        ASSERT_EQ(extract_dependencies(sample_repo(files), {}).all(), expected);
    }
}

TEST(Manifests, RequirementsAndPyproject)
{
    EXPECT_EQ(parse_requirements("# tools\n-r base.txt\nScikit_Learn[all]==1.5 ; python_version>'3'\n"
                                 "torch @ https://download.test/torch.whl\ngit+https://x.test/repo.git\n\nnumpy\n"),
              (Roots{"scikit-learn", "torch", "numpy"}));
    EXPECT_EQ(parse_pyproject("[project]\nname='x'\ndependencies=['transformers>=4', 'Pillow']\n"
                              "[tool.poetry.dependencies]\npython='^3.10'\nxgboost='*'\n"),
              (Roots{"transformers", "pillow", "xgboost"}));
}

kg::Repository repo(std::string name, std::int64_t stars, std::int64_t forks, std::int64_t contributors,
                    const char* updated, std::int64_t size_kb = 100)
{
    kg::Repository r;
    r.name = std::move(name);
    r.stars = stars;
    r.forks = forks;
    r.contributors = contributors;
    r.size_kb = size_kb;
    r.created_at = parse_timestamp("2018-01-01");
    r.updated_at = parse_timestamp(updated);
    return r;
}

std::vector<std::string> names(const std::vector<kg::Repository>& repos)
{
    std::vector<std::string> out;
    for (const auto& r : repos) out.push_back(r.name);
    return out;
}

TEST(Filter, SingleFieldMedian)
{
    FilterPolicy policy;
    policy.popularity_fields = {PopularityField::Stars};
    policy.min_fields_at_median = 1;
    policy.reference_date = parse_timestamp("2025-06-01");
    auto kept = filter_repositories({repo("a", 1, 0, 0, "2025-01-01"), repo("b", 5, 0, 0, "2025-01-01"),
                                     repo("c", 10, 0, 0, "2025-01-01")},
                                    policy);
    EXPECT_EQ(names(kept), (std::vector<std::string>{"b", "c"}));
}

TEST(Filter, EmptyInputIsAnError) { EXPECT_THROW(filter_repositories({}, FilterPolicy{}), Error); }

TEST(Filter, InconsistentPolicyIsAnError)
{
    FilterPolicy policy;
    policy.min_fields_at_median = 4;
    EXPECT_THROW(filter_repositories({repo("a", 1, 1, 1, "2025-01-01")}, policy), Error);
}

// Medians over these eleven: stars 30, forks 10, contributors 4.
TEST(Filter, ElevenRepoFixtureKeepsFour)
{
    std::vector<kg::Repository> repos = {
        repo("r1", 100, 20, 10, "2025-01-10"), repo("r2", 5, 1, 1, "2025-01-10"),
        repo("r3", 50, 10, 5, "2021-01-10"),   repo("r4", 80, 2, 8, "2024-03-01"),
        repo("r5", 10, 30, 2, "2024-03-01"),   repo("r6", 60, 15, 1, "2023-05-01"),
        repo("r7", 20, 5, 3, "2024-03-01"),    repo("r8", 30, 8, 4, "2024-03-01"),
        repo("r9", 40, 12, 6, "2022-01-01"),   repo("r10", 1, 40, 9, "2019-07-01"),
        repo("r11", 15, 3, 2, "2025-02-01"),
    };
    FilterPolicy policy;
    policy.reference_date = parse_timestamp("2025-06-01");
    EXPECT_EQ(names(filter_repositories(repos, policy)), (std::vector<std::string>{"r1", "r4", "r6", "r8"}));
}

TEST(Filter, SizeBounds)
{
    FilterPolicy policy;
    policy.popularity_fields = {PopularityField::Stars};
    policy.min_fields_at_median = 1;
    policy.reference_date = parse_timestamp("2025-06-01");
    policy.max_size_kb = 500;
    auto kept = filter_repositories({repo("small", 9, 0, 0, "2025-01-01", 100), repo("big", 9, 0, 0, "2025-01-01", 900)},
                                    policy);
    EXPECT_EQ(names(kept), (std::vector<std::string>{"small"}));
}

TEST(Filter, SubsetPermutationAndStrictnessProperties)
{
    std::mt19937_64 rng(99);
    auto reference = parse_timestamp("2025-06-01");
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<kg::Repository> repos;
        int n = std::uniform_int_distribution<int>(1, 25)(rng);
        for (int i = 0; i < n; ++i) {
            auto r = repo("r" + std::to_string(i), rng() % 50, rng() % 20, rng() % 8, "2020-01-01");
            r.updated_at = reference - std::chrono::hours(24 * static_cast<int>(rng() % 1800));
            repos.push_back(r);
        }
        FilterPolicy loose;
        loose.reference_date = reference;
        loose.min_fields_at_median = 1;
        auto kept1 = names(filter_repositories(repos, loose));
        auto all = names(repos);
        std::set<std::string> universe(all.begin(), all.end());
        for (const auto& k : kept1) ASSERT_TRUE(universe.count(k));

        auto shuffled = repos;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto kept_shuffled = names(filter_repositories(shuffled, loose));
        ASSERT_EQ(std::set<std::string>(kept1.begin(), kept1.end()),
                  std::set<std::string>(kept_shuffled.begin(), kept_shuffled.end()));

        std::size_t previous = kept1.size();
        for (int strict = 2; strict <= 3; ++strict) {
            auto policy = loose;
            policy.min_fields_at_median = strict;
            auto kept = filter_repositories(repos, policy);
            ASSERT_LE(kept.size(), previous);
            previous = kept.size();
        }
    }
}

TEST(Categorize, WholeWordMatchesRankedByCount)
{
    kg::Repository r;
    r.name = "seg";
    r.description = "deep learning for image segmentation";
    EXPECT_EQ(categorize_repository(r, {"deep learning", "image segmentation", "robotics"}),
              (std::vector<std::string>{"deep learning", "image segmentation"}));
    r.description = "";
    EXPECT_TRUE(categorize_repository(r, {"deep learning"}).empty());
    r.description = "transfer-learning toolkit";
    EXPECT_EQ(categorize_repository(r, {"learning", "earn"}), (std::vector<std::string>{"learning"}));
    r.description = "Robotics and robotics simulation, deep learning";
    r.topics = {"robotics"};
    EXPECT_EQ(categorize_repository(r, {"deep learning", "robotics"}),
              (std::vector<std::string>{"robotics", "deep learning"}));
    EXPECT_THROW(categorize_repository(r, {}), Error);
}

ResolverTables tables()
{
    ResolverTables t;
    t.import_to_distribution = parse_import_map("sklearn\tscikit-learn\ncv2\topencv-python\n# comment\n");
    t.stdlib_modules = {"os", "json"};
    t.known_distributions = {"numpy", "torch"};
    return t;
}

TEST(Resolver, MappingIdentityAndUnresolved)
{
    std::vector<std::string> probed;
    ImportResolver resolver(tables(), [&](const std::string& name) {
        probed.push_back(name);
        return name == "torch" || name == "my-pkg";
    });
    EXPECT_EQ(resolver.resolve("sklearn"), (Resolution{"scikit-learn", ResolutionSource::Mapping}));
    EXPECT_EQ(resolver.resolve("cv2"), (Resolution{"opencv-python", ResolutionSource::Mapping}));
    EXPECT_EQ(resolver.resolve("torch"), (Resolution{"torch", ResolutionSource::Registry}));
    EXPECT_EQ(resolver.resolve("my_pkg"), (Resolution{"my-pkg", ResolutionSource::Registry}));
    EXPECT_EQ(resolver.resolve("os"), (Resolution{std::nullopt, ResolutionSource::Stdlib}));
    EXPECT_EQ(resolver.resolve("internal_helpers"), Resolution{});
    resolver.resolve("torch");
    EXPECT_EQ(std::count(probed.begin(), probed.end(), "torch"), 1);
}

TEST(Resolver, OfflineListWhenRegistryIsDown)
{
    ImportResolver resolver(tables(), [](const std::string&) -> bool { throw TransportError("offline"); });
    EXPECT_EQ(resolver.resolve("numpy"), (Resolution{"numpy", ResolutionSource::OfflineList}));
    EXPECT_EQ(resolver.resolve("mystery"), Resolution{});
    ImportResolver no_probe(tables());
    EXPECT_EQ(no_probe.resolve("torch"), (Resolution{"torch", ResolutionSource::OfflineList}));
}

TEST(Resolver, MalformedMapReportsLine)
{
    try {
        parse_import_map("a\tb\nbroken line\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2U);
    }
}

}  // namespace
