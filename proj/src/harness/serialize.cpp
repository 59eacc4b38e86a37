#include "rids/harness/trace.hpp"

#include <stdexcept>

namespace rids::harness {

using nlohmann::json;

json region_to_json(const geo::Region& r) {
    json parts = json::array();
    for (const geo::Polygon& p : r.parts) {
        json poly = json::array();
        for (const geo::Vec2& v : p) poly.push_back({v.x, v.y});
        parts.push_back(std::move(poly));
    }
    return parts;
}

geo::Region region_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("region: expected an array of polygons");
    geo::Region r;
    for (const json& poly : j) {
        if (!poly.is_array()) throw std::invalid_argument("region: expected a polygon");
        geo::Polygon p;
        for (const json& v : poly) {
            if (!v.is_array() || v.size() != 2) throw std::invalid_argument("region: expected [x, y]");
            p.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        r.parts.push_back(std::move(p));
    }
    geo::validate(r);
    return r;
}

json estimate_to_json(const monitor::OccupancyEstimate& e) {
    json hyps = json::array();
    for (const monitor::OccupancyHypothesis& h : e.hypotheses) {
        json tops = json::array();
        for (const monitor::TopologyOccupancy& t : h.perTopology) {
            tops.push_back({{"required", t.presenceRequired}, {"region", region_to_json(t.region)}});
        }
        hyps.push_back(std::move(tops));
    }
    return {{"kappa", e.kappa}, {"hypotheses", std::move(hyps)}};
}

monitor::OccupancyEstimate estimate_from_json(const json& j) {
    monitor::OccupancyEstimate e;
    e.kappa = j.at("kappa").get<int>();
    for (const json& tops : j.at("hypotheses")) {
        monitor::OccupancyHypothesis h;
        for (const json& t : tops) h.perTopology.push_back({region_from_json(t.at("region")), t.at("required").get<bool>()});
        if (static_cast<int>(h.perTopology.size()) != e.kappa) {
            throw std::invalid_argument("estimate: hypothesis size differs from kappa");
        }
        e.hypotheses.push_back(std::move(h));
    }
    return e;
}

namespace {

std::string bits(const Bits& b) {
    std::string s;
    for (bool x : b) s += x ? '1' : '0';
    return s;
}

json events(const EventSet& ev) {
    json out = json::array();
    for (EventId e : ev) out.push_back("e" + std::to_string(e + 1));
    return out;
}

json states(const ProtocolSpec& spec, const StateSet& set) {
    json out = json::array();
    for (StateId s : set) out.push_back(spec.stateNames[s]);
    return out;
}

json config(const AgentConfig& q) { return {q.x, q.y, q.theta, q.v}; }

}  // namespace

json record_to_json(const PeriodRecord& rec, const Simulation& sim) {
    json j;
    j["period"] = rec.period;
    j["time"] = rec.time;
    j["estimateTime"] = rec.estimateTime;

    json agents = json::array();
    for (const AgentRecord& a : rec.agents) {
        agents.push_back({{"id", a.id}, {"q", config(a.q)}, {"sigma", a.sigma}, {"behavior", a.behavior}});
    }
    j["agents"] = std::move(agents);

    json steps = json::array();
    for (const StepInfo& s : rec.steps) {
        const ProtocolSpec& spec = sim.spec_of(s.id);
        steps.push_back({{"id", s.id},
                         {"s", bits(s.s)},
                         {"events", events(s.events)},
                         {"from", spec.stateNames[s.sigmaBefore]},
                         {"to", spec.stateNames[s.sigmaAfter]},
                         {"neighborhoodVisible", s.neighborhoodVisible}});
    }
    j["steps"] = std::move(steps);

    json monitors = json::array();
    for (const MonitorRecord& m : rec.monitors) {
        const ProtocolSpec& spec = sim.spec_of(m.target);
        json post = json::array();
        for (const Bits& b : m.sPosterior) post.push_back(bits(b));
        json pHat = json::array();
        for (const monitor::BitSet& p : m.pHat) pHat.push_back(json(std::vector<int>(p.begin(), p.end())));
        monitors.push_back({{"monitor", m.monitor},
                            {"target", m.target},
                            {"qBar", config(m.qBar)},
                            {"v", bits(m.v)},
                            {"sPrior", bits(m.sPrior)},
                            {"eventsHat", events(m.eventsHat)},
                            {"sigmaPrior", states(spec, m.sigmaPrior)},
                            {"sigmaPosterior", states(spec, m.sigmaPosterior)},
                            {"sPosterior", std::move(post)},
                            {"pHat", std::move(pHat)},
                            {"detection", m.detection},
                            {"visible", m.visibleIds},
                            {"verdict", monitor::verdict_name(m.verdict)},
                            {"estimate", estimate_to_json(m.estimate)}});
    }
    j["monitors"] = std::move(monitors);

    json cons = json::array();
    for (const ConsensusRecord& c : rec.consensus) {
        json history = json::object();
        for (const auto& [node, h] : c.history) {
            json rounds = json::array();
            for (const auto& e : h) rounds.push_back(estimate_to_json(e));
            history[std::to_string(node)] = std::move(rounds);
        }
        cons.push_back({{"target", c.target},
                        {"components", c.components},
                        {"rounds", c.rounds},
                        {"agreesWithCentralized", c.agreesWithCentralized},
                        {"verdict", monitor::verdict_name(c.verdict)},
                        {"history", std::move(history)}});
    }
    j["consensus"] = std::move(cons);

    json verdicts = json::object();
    for (const auto& [target, v] : rec.verdicts) verdicts[std::to_string(target)] = monitor::verdict_name(v);
    j["verdicts"] = std::move(verdicts);
    return j;
}

}  // namespace rids::harness
