/**
 * @file runner.hpp
 * @brief Period loop: world simulation, local monitors and consensus.
 */
#pragma once

#include "rids/consensus.hpp"
#include "rids/harness/config.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <random>

namespace rids::harness {

using monitor::Verdict;

struct AgentRecord {
    int id = 0;
    AgentConfig q;
    std::string sigma;
    std::string behavior;
};

/// One monitor's explanation of the period that just ended.
struct MonitorRecord {
    int monitor = 0;
    int target = 0;
    AgentConfig qBar;  // target as measured at the start of the period
    Bits v;
    Bits sPrior;
    EventSet eventsHat;
    StateSet sigmaPrior;
    StateSet sigmaPosterior;
    std::vector<Bits> sPosterior;
    std::vector<monitor::BitSet> pHat;
    bool detection = false;
    monitor::OccupancyEstimate estimate;
    Verdict verdict = Verdict::Cooperative;
    std::vector<geo::Region> eta;
    geo::Region Vh;
    std::vector<int> visibleIds;
};

struct ConsensusRecord {
    int target = 0;
    std::vector<std::vector<int>> components;
    int rounds = 0;  // largest component diameter
    /// node -> state after each round, index 0 being the local estimate
    std::map<int, std::vector<monitor::OccupancyEstimate>> history;
    std::map<int, monitor::OccupancyEstimate> centralizedByNode;
    bool agreesWithCentralized = true;
    Verdict verdict = Verdict::Cooperative;
};

struct PeriodRecord {
    int period = 0;
    double time = 0.0;          // end of the period (update time)
    double estimateTime = 0.0;  // start of the period, which the estimates describe
    std::vector<AgentRecord> agents;  // truth at estimateTime
    std::vector<StepInfo> steps;      // what each agent did at estimateTime
    std::vector<MonitorRecord> monitors;
    std::vector<ConsensusRecord> consensus;
    std::map<int, Verdict> verdicts;  // sticky per-target verdicts
};

struct RunSummary {
    int periods = 0;
    std::map<int, Verdict> verdicts;
    bool misbehaviorDetected = false;
    int neighborhoodWarnings = 0;  // agent steps whose own view missed part of its neighborhood

    int exit_code() const { return misbehaviorDetected ? 2 : 0; }
};

class Simulation {
public:
    explicit Simulation(ScenarioConfig cfg);

    bool done() const { return period_ >= cfg_.horizon; }
    /// Advances one period and reports it.
    PeriodRecord step();

    const ScenarioConfig& config() const { return cfg_; }
    const WorldState& world() const { return world_; }
    const ProtocolSpec& spec_of(int agentId) const;
    RunSummary summary() const { return summary_; }

private:
    struct MonitorSlot {
        MonitorSpec spec;
        monitor::MonitorState state;
    };

    std::size_t index_of(int agentId) const;
    AgentConfig measure(const AgentConfig& truth);
    void observe(MonitorSlot& slot, std::vector<int>* visibleIds);
    void advance_world();

    ScenarioConfig cfg_;
    std::vector<std::shared_ptr<const ProtocolSpec>> specs_;
    WorldState world_;
    std::vector<MonitorSlot> monitors_;
    std::mt19937_64 rng_;
    int period_ = 0;
    std::vector<AgentRecord> pendingAgents_;
    std::vector<StepInfo> pendingSteps_;
    std::map<std::pair<int, int>, std::vector<int>> pendingVisible_;
    RunSummary summary_;
};

/// Runs the whole horizon, writing one JSON line per period to `trace`.
RunSummary run(const ScenarioConfig& cfg, std::ostream& trace, std::vector<PeriodRecord>* keep = nullptr);

}  // namespace rids::harness
