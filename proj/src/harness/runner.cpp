#include "rids/harness/runner.hpp"
#include "rids/harness/trace.hpp"

#include <algorithm>
#include <ostream>

namespace rids::harness {

namespace {

double noise(std::mt19937_64& rng, double bound) {
    if (bound <= 0.0) return 0.0;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return bound * (2.0 * u - 1.0);
}

Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

}  // namespace

Simulation::Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    validate(cfg_);
    std::shared_ptr<const ProtocolSpec> warehouse;
    if (cfg_.kind == ScenarioKind::Warehouse) {
        warehouse = std::make_shared<const ProtocolSpec>(scenarios::build_warehouse(cfg_.warehouse));
    }
    for (std::size_t i = 0; i < cfg_.agents.size(); ++i) {
        const AgentSpec& a = cfg_.agents[i];
        auto spec = warehouse ? warehouse
                              : std::make_shared<const ProtocolSpec>(scenarios::build_highway(cfg_.highway, i));
        specs_.push_back(spec);

        AgentState s;
        s.id = a.id;
        s.q = a.q;
        s.sigma = spec->initialState;
        if (a.sigma) {
            try {
                s.sigma = spec->state_id(*a.sigma);
            } catch (const std::exception&) {
                throw ConfigError("agents[" + std::to_string(i) + "].sigma: unknown state '" + *a.sigma + "'");
            }
        }
        if (spec->latchUpdate) s.latch = spec->latchUpdate(Latch{}, -1, s.sigma, s.q);
        if (a.behavior == "corrupted-encoder") s.behavior = scenarios::corrupted_encoder(a.ghost);
        else if (a.behavior == "corrupted-decoder") s.behavior = scenarios::corrupted_decoder(cfg_.warehouse, a.alpha);
        world_.agents.push_back(std::move(s));
    }

    for (const MonitorSpec& m : cfg_.monitors) {
        monitor::MonitorParams p;
        p.epsilon = m.epsilon;
        p.epsilonMin = m.epsilonMin;
        p.weights = cfg_.weights;
        const AgentConfig q0 = measure(world_.agents[index_of(m.target)].q);
        monitors_.push_back({m, monitor::make_monitor(spec_of(m.target), m.target, q0, 0.0, p)});
    }
    for (MonitorSlot& slot : monitors_) observe(slot, &pendingVisible_[{slot.spec.monitor, slot.spec.target}]);
    advance_world();
}

std::size_t Simulation::index_of(int agentId) const {
    for (std::size_t i = 0; i < world_.agents.size(); ++i) {
        if (world_.agents[i].id == agentId) return i;
    }
    throw std::out_of_range("unknown agent " + std::to_string(agentId));
}

const ProtocolSpec& Simulation::spec_of(int agentId) const { return *specs_[index_of(agentId)]; }

AgentConfig Simulation::measure(const AgentConfig& truth) {
    const double b = cfg_.noiseBound;
    AgentConfig q = truth;
    q.x += noise(rng_, b);
    q.y += noise(rng_, b);
    q.theta = wrap_angle(q.theta + noise(rng_, b));
    q.v = std::max(0.0, q.v + noise(rng_, b));
    return q;
}

void Simulation::observe(MonitorSlot& slot, std::vector<int>* visibleIds) {
    const std::size_t hi = index_of(slot.spec.monitor);
    const AgentState& h = world_.agents[hi];
    const ProtocolSpec& own = *specs_[hi];

    std::vector<AgentConfig> othersOfH;
    for (const AgentState& a : world_.agents) {
        if (a.id != h.id) othersOfH.push_back(a.q);
    }
    const geo::Region Vh = own.visibility(h.q, othersOfH);

    std::vector<AgentConfig> visible;
    for (const AgentState& a : world_.agents) {
        if (a.id == slot.spec.target) continue;
        bool seen = a.id == h.id;
        if (!seen && cfg_.kind == ScenarioKind::Highway) {
            std::vector<AgentConfig> blockers;
            for (const AgentState& b : world_.agents) {
                if (b.id != h.id && b.id != a.id) blockers.push_back(b.q);
            }
            seen = scenarios::car_visible(cfg_.highway, h.q, a.q, blockers);
        } else if (!seen) {
            seen = geo::contains_point(Vh, a.q.pos());
        }
        if (!seen) continue;
        visible.push_back(a.id == h.id ? a.q : measure(a.q));
        if (visibleIds) visibleIds->push_back(a.id);
    }
    slot.state = monitor::predict(spec_of(slot.spec.target), slot.state, visible, Vh, cfg_.period);
}

void Simulation::advance_world() {
    pendingAgents_.clear();
    for (std::size_t i = 0; i < world_.agents.size(); ++i) {
        const AgentState& a = world_.agents[i];
        pendingAgents_.push_back({a.id, a.q, specs_[i]->stateNames[a.sigma], behavior_name(a.behavior)});
    }
    std::vector<const ProtocolSpec*> specs;
    for (const auto& s : specs_) specs.push_back(s.get());
    WorldStepResult r = world_step(world_, specs, cfg_.period);
    world_ = std::move(r.world);
    pendingSteps_ = std::move(r.info);
    for (const StepInfo& s : pendingSteps_) {
        if (!s.neighborhoodVisible) ++summary_.neighborhoodWarnings;
    }
}

PeriodRecord Simulation::step() {
    if (done()) throw std::logic_error("simulation already reached its horizon");
    ++period_;
    PeriodRecord rec;
    rec.period = period_;
    rec.time = world_.time;
    rec.estimateTime = world_.time - cfg_.period;
    rec.agents = pendingAgents_;
    rec.steps = pendingSteps_;

    std::map<int, consensus::NodeStates> byTarget;
    for (MonitorSlot& slot : monitors_) {
        const ProtocolSpec& spec = spec_of(slot.spec.target);
        const monitor::MonitorState before = slot.state;
        const AgentConfig qNext = measure(world_.agents[index_of(slot.spec.target)].q);
        monitor::UpdateOutcome out = monitor::update(spec, before, qNext, world_.time);

        MonitorRecord m;
        m.monitor = slot.spec.monitor;
        m.target = slot.spec.target;
        m.qBar = before.qBar;
        m.v = before.v;
        m.sPrior = before.sHatPrior;
        m.eventsHat = before.eventsHat;
        m.sigmaPrior = before.sigmaHat;
        m.sigmaPosterior = out.result.posterior;
        m.sPosterior = out.result.sPosterior;
        m.detection = out.state.detected;
        m.eta = before.eta;
        m.Vh = before.Vh;
        m.visibleIds = pendingVisible_[{m.monitor, m.target}];
        m.estimate.kappa = spec.kappa;
        if (!out.result.detection) {
            m.pHat = monitor::hidden_presence_all(before.sHatPrior, out.result.sPosterior);
            const geo::Region inflated =
                monitor::inflate(before.visible, monitor::inflation_half_width(before.params));
            m.estimate = monitor::occupancy_estimate(spec, before.qBar, inflated, before.Vh, m.pHat,
                                                     before.params.areaTol);
        }
        m.verdict = monitor::classify(m.estimate, m.detection);
        byTarget[m.target][m.monitor] = m.estimate;
        slot.state = std::move(out.state);
        rec.monitors.push_back(std::move(m));
    }

    for (const auto& [target, states] : byTarget) {
        consensus::CommGraph g;
        for (const auto& [node, est] : states) g.nodes.push_back(node);
        if (cfg_.commGraph) {
            g = consensus::induced(consensus::CommGraph{g.nodes, *cfg_.commGraph}, g.nodes);
        } else {
            for (std::size_t a = 0; a < g.nodes.size(); ++a) {
                for (std::size_t b = a + 1; b < g.nodes.size(); ++b) g.edges.push_back({g.nodes[a], g.nodes[b]});
            }
        }

        ConsensusRecord c;
        c.target = target;
        bool detected = false;
        for (const MonitorRecord& m : rec.monitors) {
            if (m.target == target) detected = detected || m.detection;
        }
        c.verdict = Verdict::Cooperative;
        for (const std::vector<int>& comp : consensus::components(g)) {
            const consensus::CommGraph sub = consensus::induced(g, comp);
            consensus::NodeStates init;
            for (int n : comp) init[n] = states.at(n);
            const consensus::ConsensusRun run = consensus::run_consensus(sub, init, consensus::graph_diam(sub));
            c.components.push_back(comp);
            c.rounds = std::max(c.rounds, run.diam);
            c.agreesWithCentralized = c.agreesWithCentralized && run.agreesWithCentralized;
            for (int n : comp) {
                for (const consensus::NodeStates& r : run.rounds) c.history[n].push_back(r.at(n));
                c.centralizedByNode[n] = run.centralizedState;
            }
            c.verdict = worst(c.verdict, monitor::classify(run.centralizedState, detected));
        }
        // Shorter components have converged already; repeat their last state.
        for (auto& [n, h] : c.history) {
            while (static_cast<int>(h.size()) < c.rounds + 1) h.push_back(h.back());
        }
        Verdict& sticky = summary_.verdicts[target];
        sticky = sticky == Verdict::Uncooperative ? sticky : c.verdict;
        if (sticky == Verdict::Uncooperative) summary_.misbehaviorDetected = true;
        rec.consensus.push_back(std::move(c));
    }
    rec.verdicts = summary_.verdicts;
    summary_.periods = period_;

    if (!done()) {
        pendingVisible_.clear();
        for (MonitorSlot& slot : monitors_) observe(slot, &pendingVisible_[{slot.spec.monitor, slot.spec.target}]);
        advance_world();
    }
    return rec;
}

RunSummary run(const ScenarioConfig& cfg, std::ostream& trace, std::vector<PeriodRecord>* keep) {
    Simulation sim(cfg);
    while (!sim.done()) {
        PeriodRecord rec = sim.step();
        trace << record_to_json(rec, sim).dump() << '\n';
        if (keep) keep->push_back(std::move(rec));
    }
    return sim.summary();
}

}  // namespace rids::harness
