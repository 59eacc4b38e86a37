// Command-line front end: run scenarios, inspect communication graphs, run
// the brute-force cross-checks.

#include "rids/harness/render.hpp"
#include "rids/harness/trace.hpp"
#include "rids/oracle.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace rids;
using namespace rids::harness;

namespace {

int cmd_run(const std::string& path, const std::string& outDir, std::optional<std::uint64_t> seed, bool frames,
            std::optional<int> horizon) {
    ScenarioConfig cfg = load_scenario(path);
    if (seed) cfg.seed = *seed;
    if (horizon) {
        cfg.horizon = *horizon;
        validate(cfg);
    }
    std::filesystem::create_directories(outDir);
    const auto tracePath = std::filesystem::path(outDir) / (cfg.name + ".jsonl");
    std::ofstream trace(tracePath);
    if (!trace) throw std::runtime_error("cannot write " + tracePath.string());

    std::vector<PeriodRecord> kept;
    const RunSummary s = run(cfg, trace, frames ? &kept : nullptr);
    std::cout << cfg.name << ": " << s.periods << " periods, trace " << tracePath.string() << '\n';
    for (const auto& [target, v] : s.verdicts) {
        std::cout << "  target " << target << ": " << monitor::verdict_name(v) << '\n';
    }
    if (s.neighborhoodWarnings > 0) {
        std::cout << "  note: " << s.neighborhoodWarnings << " agent steps saw only part of their own neighborhood\n";
    }
    if (frames) {
        const int n = render_frames(kept, (std::filesystem::path(outDir) / "frames").string());
        std::cout << "  " << n << " frames written\n";
    }
    std::cout << (s.misbehaviorDetected ? "misbehavior detected" : "no misbehavior detected") << '\n';
    return s.exit_code();
}

int cmd_graph(const std::string& path) {
    const ScenarioConfig cfg = load_scenario(path);
    std::map<int, std::vector<int>> byTarget;
    for (const MonitorSpec& m : cfg.monitors) byTarget[m.target].push_back(m.monitor);
    for (auto& [target, nodes] : byTarget) {
        consensus::CommGraph g{nodes, {}};
        if (cfg.commGraph) {
            g = consensus::induced({nodes, *cfg.commGraph}, nodes);
        } else {
            for (std::size_t a = 0; a < nodes.size(); ++a) {
                for (std::size_t b = a + 1; b < nodes.size(); ++b) g.edges.push_back({nodes[a], nodes[b]});
            }
        }
        std::cout << "target " << target << ":\n";
        for (const auto& comp : consensus::components(g)) {
            std::cout << "  component {";
            for (std::size_t i = 0; i < comp.size(); ++i) std::cout << (i ? ", " : "") << comp[i];
            std::cout << "} diameter " << consensus::graph_diam(consensus::induced(g, comp)) << '\n';
        }
    }
    return 0;
}

int cmd_oracle(std::uint64_t seed, int graphs) {
    int bad = 0;
    scenarios::WarehouseParams wp;
    const ProtocolSpec wh = scenarios::build_warehouse(wp);
    const auto we = oracle::check_event_estimator(wh, {{AgentConfig{}, Latch{}}});
    std::cout << "event estimator (warehouse): " << we.cases << " cases, " << we.mismatches << " mismatches\n";
    bad += we.mismatches;

    scenarios::HighwayParams hp;
    const ProtocolSpec hw = scenarios::build_highway(hp, 30.0);
    std::vector<std::pair<AgentConfig, Latch>> ctx;
    for (int lane = 0; lane < hp.lanes; ++lane) {
        const double y = (lane + 0.5) * hp.laneWidth;
        for (int anchor = -1; anchor < hp.lanes; ++anchor) {
            Latch l;
            if (anchor >= 0) l.anchor = anchor;
            ctx.push_back({AgentConfig{0.0, y, 0.0, 25.0}, l});
        }
    }
    const auto he = oracle::check_event_estimator(hw, ctx);
    std::cout << "event estimator (highway): " << he.cases << " cases, " << he.mismatches << " mismatches\n";
    bad += he.mismatches;

    const auto cc = oracle::check_consensus(graphs, seed);
    std::cout << "consensus: " << cc.graphs << " graphs, " << cc.failures << " failures, max rounds "
              << cc.maxRoundsUsed << '\n';
    if (!cc.firstFailure.empty()) std::cout << "  first failure: " << cc.firstFailure << '\n';
    bad += cc.failures;
    return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set-valued intrusion detection for cooperative multi-agent systems"};
    app.require_subcommand(1);

    std::string config;
    std::string outDir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> horizon;
    bool frames = false;
    auto* run = app.add_subcommand("run", "simulate a scenario and write its trace");
    run->add_option("config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", outDir, "output directory");
    run->add_option("--seed", seed, "override the noise seed");
    run->add_option("--horizon", horizon, "override the number of periods");
    run->add_flag("--frames", frames, "render one SVG per period and monitor");

    auto* graph = app.add_subcommand("graph", "print monitor communication components and diameters");
    graph->add_option("config", config, "scenario JSON")->required()->check(CLI::ExistingFile);

    std::uint64_t oracleSeed = 7;
    int graphs = 200;
    auto* orc = app.add_subcommand("oracle", "cross-check estimator and consensus against brute force");
    orc->add_option("--seed", oracleSeed, "random seed");
    orc->add_option("--graphs", graphs, "number of random graphs");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config, outDir, seed, frames, horizon);
        if (*graph) return cmd_graph(config);
        return cmd_oracle(oracleSeed, graphs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
