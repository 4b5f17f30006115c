// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

// Rebuilds a fixture corpus replay store from its web/ tree, then reruns the
// pipelines against the fresh store into the given output directory.

#include <CLI11.hpp>

#include <iostream>

#include "modelselect/common/error.hpp"
#include "modelselect/pipeline/pipeline.hpp"

namespace mp = modelselect::pipeline;

int main(int argc, char** argv)
{
    CLI::App app{"Record a replay store for an offline fixture corpus"};
    std::string corpus;
    std::string out;
    std::string resources = MODELSELECT_RESOURCE_DIR;
    app.add_option("corpus", corpus, "Corpus directory holding pipeline.toml and web/")->required();
    app.add_option("--out", out, "Snapshot directory written after recording")->required();
    app.add_option("--resources", resources, "Bundled resource directory");
    CLI11_PARSE(app, argc, argv);

    try {
        auto config = mp::PipelineConfig::load(std::filesystem::path(corpus) / "pipeline.toml", resources);
        std::filesystem::remove_all(config.replay_dir);
        std::filesystem::remove_all(out);
        auto store = std::make_shared<modelselect::net::ReplayStore>(config.replay_dir);
        auto recorder = std::make_shared<modelselect::net::ReplayTransport>(
            store, modelselect::net::ReplayMode::Record, mp::fixture_web(std::filesystem::path(corpus) / "web", config));
        // Probes for repositories the filter drops are recorded too, so the
        // unfiltered dependency table replays offline.
        mp::dependency_table(config, recorder);
        for (const auto& report : mp::run_all(config, out, recorder)) {
            std::cout << mp::to_json(report).dump() << "\n";
        }
    } catch (const modelselect::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
