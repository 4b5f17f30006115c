// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/gateway/cli.hpp"

#include <csignal>
#include <iomanip>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <pthread.h>

#include "modelselect/common/io.hpp"
#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"
#include "modelselect/extract/extract.hpp"
#include "modelselect/gateway/server.hpp"
#include "modelselect/knowledge/snapshot.hpp"
#include "modelselect/pipeline/pipeline.hpp"

namespace modelselect::gateway {

using nlohmann::json;
namespace fs = std::filesystem;
using text::join;
using text::trim;

SystemRecs system_recommendations(const std::vector<eval::CaseStudy>& cases, const kg::KnowledgeGraph& graph,
                                  const QueryResources& resources, int k)
{
    SystemRecs out;
    for (const auto& c : cases) {
        auto& models = out.models[c.case_id];
        auto& libraries = out.libraries[c.case_id];
        inference::Recommendation rec;
        try {
            rec = inference::recommend({c.rationale, k, {}, {}}, graph, resources.intent, resources.ranking);
        } catch (const inference::UnintelligibleIntent&) {
            out.notices.push_back(c.case_id + ": rationale has no usable terms");
            continue;
        }
        for (const auto& r : rec.results) {
            const auto& name = graph.variations().at(r.variation_id).name;
            if (std::find(models.begin(), models.end(), name) == models.end()) models.push_back(name);
            const auto& lib = graph.libraries().at(r.library_id).distribution_name;
            if (std::find(libraries.begin(), libraries.end(), lib) == libraries.end()) libraries.push_back(lib);
        }
    }
    return out;
}

namespace {

struct Globals {
    std::string data_dir = "modelselect-data";
    std::string resources = MODELSELECT_RESOURCE_DIR;
    std::string format = "table";
    bool verbose = false;

    bool json() const { return format == "json"; }
};

/// Left-aligned columns, two spaces apart.
std::string columns(const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        width.resize(std::max(width.size(), row.size()));
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
        }
        out << line << '\n';
    }
    return out.str();
}

std::string fixed(double value, int digits = 4)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << value;
    return s.str();
}

void print_reports(const Globals& g, const std::vector<pipeline::StageReport>& reports, std::ostream& out)
{
    if (g.json()) {
        json all = json::array();
        for (const auto& r : reports) all.push_back(pipeline::to_json(r));
        out << all.dump(2) << '\n';
        return;
    }
    for (const auto& r : reports) {
        out << r.stage << ": " << r.changes.entities.inserted << " entities inserted, " << r.changes.entities.updated
            << " updated, " << r.changes.rejected() << " rejected; " << r.changes.edges.inserted
            << " edges inserted\n";
        for (const auto& [name, count] : r.counts) out << "  " << name << " = " << count << '\n';
        for (const auto& note : r.notes) out << "  note: " << note << '\n';
        for (const auto& d : r.changes.diagnostics) out << "  rejected: " << d << '\n';
    }
}

enum class Stage { Repos, Libraries, Models, Quality, All };

void run_stage(const Globals& g, Stage stage, const std::string& config_path, std::ostream& out)
{
    auto config = pipeline::PipelineConfig::load(config_path, g.resources);
    fs::path data_dir = g.data_dir;
    std::vector<pipeline::StageReport> reports;
    if (stage == Stage::All) {
        reports = pipeline::run_all(config, data_dir);
    } else {
        kg::GraphStore store(pipeline::load_or_empty(data_dir));
        auto transport = pipeline::make_transport(config);
        switch (stage) {
            case Stage::Repos:
                reports.push_back(pipeline::ingest_repositories(config, store, transport));
                break;
            case Stage::Libraries:
                reports.push_back(pipeline::ingest_libraries(config, store, transport, data_dir));
                break;
            case Stage::Models: {
                auto backend = pipeline::make_backend(config, transport);
                reports.push_back(pipeline::extract_models(config, store, *backend, data_dir));
                break;
            }
            case Stage::Quality: {
                auto backend = pipeline::make_backend(config, transport);
                reports.push_back(pipeline::assess_quality(config, store, *backend, transport));
                break;
            }
            case Stage::All:
                break;
        }
        kg::save_snapshot(*store.snapshot(), data_dir);
    }
    print_reports(g, reports, out);
}

int build_index(const Globals& g, std::ostream& out)
{
    auto graph = kg::load_snapshot(g.data_dir);
    auto violations = kg::validate(graph);
    auto two_way = extract::build_two_way_index(graph);
    io::write_file(pipeline::two_way_index_file(g.data_dir), extract::two_way_index_jsonl(graph, two_way));

    json report = {{"entities", graph.entity_count()},
                   {"edges", graph.edges().size()},
                   {"index_documents", graph.index().size()},
                   {"two_way_libraries", two_way.library_to_variations.size()},
                   {"violations", json::array()}};
    for (const auto& v : violations) {
        report["violations"].push_back({{"entity", v.entity.str()}, {"rule", v.rule}, {"message", v.message}});
    }
    if (g.json()) {
        out << report.dump(2) << '\n';
    } else {
        out << "entities " << report["entities"] << ", edges " << report["edges"] << ", index documents "
            << report["index_documents"] << '\n';
        out << "two-way index written to " << pipeline::two_way_index_file(g.data_dir).string() << '\n';
        for (const auto& v : violations) out << "violation " << v.rule << " " << v.entity.str() << ": " << v.message << '\n';
        if (violations.empty()) out << "validation: ok\n";
    }
    return violations.empty() ? kExitOk : kExitOperational;
}

std::map<std::string, double> parse_weights(const std::vector<std::string>& specs)
{
    std::map<std::string, double> weights;
    for (const auto& spec : specs) {
        auto eq = spec.rfind('=');
        if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--weight", "expected attribute=value: " + spec);
        try {
            std::size_t used = 0;
            auto text = spec.substr(eq + 1);
            double w = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            weights[trim(spec.substr(0, eq))] = w;
        } catch (const std::logic_error&) {
            throw CLI::ValidationError("--weight", "not a number: " + spec);
        }
    }
    return weights;
}

void query(const Globals& g, const inference::IntentQuery& q, std::ostream& out)
{
    auto graph = kg::load_snapshot(g.data_dir);
    auto resources = QueryResources::load(g.resources);
    auto result = recommend_json(q, graph, resources);
    if (g.json()) {
        out << canonical_json(result) << '\n';
        return;
    }
    std::vector<std::vector<std::string>> rows = {{"rank", "variation", "base", "library", "score", "relevance", "quality"}};
    for (const auto& r : result["results"]) {
        rows.push_back({std::to_string(r["rank"].get<int>()), r["variation"]["name"].get<std::string>(),
                        r["variation"]["base"].get<std::string>(), r["library"]["name"].get<std::string>(),
                        fixed(r["final_score"].get<double>()), fixed(r["relevance"].get<double>()),
                        fixed(r["quality_bonus"].get<double>())});
    }
    out << columns(rows);
    std::vector<std::string> terms;
    for (const auto& t : result["keywords"]["enriched"]) terms.push_back(t["term"].get<std::string>());
    out << "keywords: " << join(terms, ", ") << '\n';
}

int serve(const Globals& g, ServerOptions options)
{
    ApiService service(QueryResources::load(g.resources));
    if (fs::exists(fs::path(g.data_dir) / "manifest.json")) {
        service.load(g.data_dir);
    } else {
        logger().warn("no snapshot in {}; recommend and read endpoints answer 503", g.data_dir);
    }
    HttpServer server(service, std::move(options));
    server.bind();

    // SIGINT/SIGTERM stop the server, SIGHUP reloads the snapshot in place.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGHUP);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread watcher([&] {
        for (;;) {
            int sig = 0;
            if (sigwait(&signals, &sig) != 0) continue;
            if (sig != SIGHUP) break;
            try {
                service.load(g.data_dir);
                logger().info("snapshot reloaded: {}", service.snapshot_version());
            } catch (const std::exception& e) {
                logger().error("reload failed, keeping {}: {}", service.snapshot_version(), e.what());
            }
        }
        server.stop();
    });
    server.listen();
    watcher.join();
    return kExitOk;
}

int run_eval(const Globals& g, const std::string& cases_file, const std::string& baseline_file, int k,
             const std::string& target, const std::string& aliases, double threshold, std::ostream& out)
{
    auto matcher = eval::NameMatcher::load(aliases.empty() ? fs::path(g.resources) / "name_aliases.tsv" : fs::path(aliases),
                                           threshold);
    auto cases = eval::load_cases(cases_file);
    auto graph = kg::load_snapshot(g.data_dir);
    auto recs = system_recommendations(cases, graph, QueryResources::load(g.resources), k);
    bool libraries = target == "libraries";

    std::vector<eval::CaseStudy> gold = cases;
    if (libraries) {
        // Coverage over libraries uses gold_libraries; cases without any are skipped.
        gold.clear();
        for (auto c : cases) {
            if (c.gold_libraries.empty()) continue;
            c.gold_models = c.gold_libraries;
            gold.push_back(std::move(c));
        }
        if (gold.empty()) throw Error("no case lists gold libraries");
    }
    const auto& system = libraries ? recs.libraries : recs.models;
    auto coverage = eval::coverage_at_k(system, gold, static_cast<std::size_t>(k), matcher);
    coverage.notices.insert(coverage.notices.end(), recs.notices.begin(), recs.notices.end());

    std::map<std::string, eval::MetricReport> overlaps;
    if (!baseline_file.empty()) {
        auto baseline = eval::load_baseline(baseline_file);
        for (const auto& [name, per_case] : libraries ? baseline.libraries : baseline.models) {
            overlaps.emplace(name, eval::overlap_percent(per_case, system, matcher));
        }
    }

    if (g.json()) {
        json report = {{"target", target}, {"k", k}, {"cases", cases.size()}, {"coverage", eval::to_json(coverage)}};
        if (!overlaps.empty()) {
            report["overlap"] = json::object();
            for (const auto& [name, r] : overlaps) report["overlap"][name] = eval::to_json(r);
        }
        out << report.dump(2) << '\n';
    } else {
        out << eval::render_table(coverage);
        for (const auto& [name, r] : overlaps) {
            out << "\noverlap with " << name << '\n' << eval::render_table(r);
        }
    }
    return kExitOk;
}

int stats(const Globals& g, std::size_t top, std::ostream& out)
{
    auto s = eval::corpus_stats(kg::load_snapshot(g.data_dir));
    if (g.json()) {
        out << eval::to_json(s).dump(2) << '\n';
    } else {
        out << eval::render_table(s, top);
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Globals g;
    CLI::App app{"ModelSelect: evidence-driven AI model and library recommendations", "modelselect"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    app.add_option("--data-dir", g.data_dir, "Snapshot directory")->envname("MODELSELECT_DATA_DIR");
    app.add_option("--resources", g.resources, "Directory with lexicons, ranking.toml and prompts")
        ->envname("MODELSELECT_RESOURCES");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "table"}));
    app.add_flag("-v,--verbose", g.verbose, "Debug logging");

    std::string config_path;
    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "pipeline.toml")->required()->check(CLI::ExistingFile);
    };
    std::optional<Stage> stage;

    auto* ingest = app.add_subcommand("ingest", "Run an ingestion pipeline");
    ingest->require_subcommand(1);
    auto* ingest_repos = ingest->add_subcommand("repos", "Repository mining and dependency extraction");
    auto* ingest_libs = ingest->add_subcommand("libraries", "Registry metadata, advisories and documentation crawl");
    add_config(ingest_repos);
    add_config(ingest_libs);
    ingest_repos->callback([&] { stage = Stage::Repos; });
    ingest_libs->callback([&] { stage = Stage::Libraries; });

    auto* extract_cmd = app.add_subcommand("extract", "Extract models from crawled documentation");
    extract_cmd->require_subcommand(1);
    auto* extract_models = extract_cmd->add_subcommand("models", "Models, variations and features");
    add_config(extract_models);
    extract_models->callback([&] { stage = Stage::Models; });

    auto* assess = app.add_subcommand("assess", "Assess quality from community reviews");
    assess->require_subcommand(1);
    auto* assess_quality = assess->add_subcommand("quality", "Review harvesting and aggregation");
    add_config(assess_quality);
    assess_quality->callback([&] { stage = Stage::Quality; });

    auto* run_all = app.add_subcommand("run-all", "All four pipelines in order");
    add_config(run_all);
    run_all->callback([&] { stage = Stage::All; });

    auto* build = app.add_subcommand("build-index", "Validate the snapshot and export the two-way index");

    inference::IntentQuery q;
    std::vector<std::string> required;
    std::vector<std::string> weights;
    auto* query_cmd = app.add_subcommand("query", "Recommend models and libraries for an intent paragraph");
    query_cmd->add_option("intent", q.text, "Intent paragraph")->required();
    query_cmd->add_option("-k", q.k, "Number of results")->check(CLI::Range(1, 1000));
    query_cmd->add_option("--require", required, "Required feature phrase (repeatable)");
    query_cmd->add_option("--weight", weights, "Quality weight attribute=value (repeatable)");

    ServerOptions server_options;
    int port = -1;
    std::string ui_dir;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    serve_cmd->add_option("--host", server_options.host, "Bind address");
    serve_cmd->add_option("--port", port, "Port (default MODELSELECT_PORT or 8080)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--cors-origin", server_options.cors_origin, "Allowed UI origin");
    serve_cmd->add_option("--ui-dir", ui_dir, "Static UI assets served under /ui/")->check(CLI::ExistingDirectory);

    std::string cases_file;
    std::string baseline_file;
    std::string experiment_file;
    std::string target = "models";
    std::string aliases;
    double threshold = 0.9;
    int eval_k = 10;
    auto* eval_cmd = app.add_subcommand("eval", "Coverage and overlap on case studies, or a pipeline experiment");
    auto* cases_opt = eval_cmd->add_option("--cases", cases_file, "cases.jsonl")->check(CLI::ExistingFile);
    eval_cmd->add_option("--baseline", baseline_file, "baseline_recs.jsonl")->check(CLI::ExistingFile)->needs(cases_opt);
    eval_cmd->add_option("--experiment", experiment_file, "experiment.toml")
        ->check(CLI::ExistingFile)
        ->excludes(cases_opt);
    eval_cmd->add_option("-k", eval_k, "Top-k cut-off")->check(CLI::Range(1, 1000));
    eval_cmd->add_option("--target", target, "models or libraries")->check(CLI::IsMember({"models", "libraries"}));
    eval_cmd->add_option("--aliases", aliases, "Alias table (default: bundled name_aliases.tsv)")->check(CLI::ExistingFile);
    eval_cmd->add_option("--fuzzy-threshold", threshold, "Edit-similarity threshold")->check(CLI::Range(0.0, 1.0));

    std::size_t top = 10;
    auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
    stats_cmd->add_option("--top", top, "Rows per ranking in table output");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        if (args.empty()) {
            err << app.help();
            return kExitUsage;
        }
        app.parse(argv_rev);
        if (eval_cmd->parsed() && cases_file.empty() && experiment_file.empty()) {
            throw CLI::RequiredError("eval needs --cases or --experiment");
        }
        if (query_cmd->parsed()) q.quality_weights = parse_weights(weights);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    set_log_level(g.verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (stage) {
            run_stage(g, *stage, config_path, out);
            return kExitOk;
        }
        if (build->parsed()) return build_index(g, out);
        if (query_cmd->parsed()) {
            q.required_features.insert(required.begin(), required.end());
            query(g, q, out);
            return kExitOk;
        }
        if (serve_cmd->parsed()) {
            server_options.port = port >= 0 ? port : port_from_environment();
            if (!ui_dir.empty()) server_options.ui_dir = ui_dir;
            return serve(g, server_options);
        }
        if (eval_cmd->parsed()) {
            if (!experiment_file.empty()) {
                auto table = eval::run_experiment(eval::ExperimentConfig::load(experiment_file));
                out << (g.json() ? eval::to_json(table).dump(2) + "\n" : eval::render_table(table));
                return kExitOk;
            }
            return run_eval(g, cases_file, baseline_file, eval_k, target, aliases, threshold, out);
        }
        if (stats_cmd->parsed()) return stats(g, top, out);
    } catch (const inference::UnintelligibleIntent& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitOperational;
    }
    return kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, out, err);
}

}  // namespace modelselect::gateway
