// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <random>
#include <string>

#include "modelselect/knowledge/graph.hpp"

namespace modelselect::kg {
inline void PrintTo(const EntityId& id, std::ostream* os) { *os << id.str(); }
}  // namespace modelselect::kg

namespace modelselect::testing {

/// Regression base, Ridge / Robust Multivariate Regression, scikit-learn.
kg::Batch fig4_core_batch();

/// The core batch plus three features per variation (10 nodes in total).
kg::Batch fig4_batch();
kg::KnowledgeGraph fig4_graph();

kg::EvidenceRef sample_evidence(std::string fragment, std::string url = "https://scikit-learn.org/stable/modules/linear_model.html");

/// Random batch with at most `max_nodes` entities, drawn from small vocabularies
/// so ids collide and merges happen. Mostly valid; some references dangle.
kg::Batch random_batch(std::mt19937_64& rng, std::size_t max_nodes);

/// Fresh empty directory under the system temp dir; removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag = "modelselect");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

  private:
    std::filesystem::path path_;
};

std::filesystem::path resource_dir();
std::filesystem::path fixture_dir();

}  // namespace modelselect::testing
