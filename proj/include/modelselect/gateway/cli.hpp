// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "modelselect/eval/eval.hpp"
#include "modelselect/gateway/service.hpp"

namespace modelselect::gateway {

enum ExitCode : int { kExitOk = 0, kExitOperational = 1, kExitUsage = 2 };

/// Subcommands: ingest repos|libraries, extract models, assess quality,
/// run-all, build-index, query, serve, eval, stats. Global options:
/// --data-dir (MODELSELECT_DATA_DIR), --resources, --format json|table, -v.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SystemRecs {
    eval::CaseRecs models;     // variation names, rank order, top k
    eval::CaseRecs libraries;  // distribution names, rank order, top k, first occurrence kept
    std::vector<std::string> notices;
};

/// Runs every case rationale through recommend() with the given k.
/// A rationale with nothing usable yields an empty list and a notice.
SystemRecs system_recommendations(const std::vector<eval::CaseStudy>& cases, const kg::KnowledgeGraph& graph,
                                  const QueryResources& resources, int k);

}  // namespace modelselect::gateway
