#include "rids/harness/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rids::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); }

double num(const json& j, const std::string& key, const std::string& field, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(field + key, "expected a number");
    return j[key].get<double>();
}

AgentConfig parse_q(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 4) fail(field, "expected [x, y, theta, v]");
    for (const auto& e : j) {
        if (!e.is_number()) fail(field, "expected numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), wrap_angle(j[2].get<double>()), j[3].get<double>()};
}

GhostSchedule parse_ghost(const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array of intervals");
    GhostSchedule g;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "].";
        GhostEntry e;
        e.from = num(j[i], "from", f, 0.0);
        if (j[i].contains("to") && !j[i]["to"].is_null()) e.to = num(j[i], "to", f, 0.0);
        if (j[i].contains("offset") && !j[i]["offset"].is_null()) {
            const json& o = j[i]["offset"];
            if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number()) {
                fail(f + "offset", "expected [dx, dy]");
            }
            e.offset = geo::Vec2{o[0].get<double>(), o[1].get<double>()};
        }
        if (e.to && *e.to <= e.from) fail(f + "to", "must exceed from");
        g.entries.push_back(e);
    }
    return g;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
    if (!(cfg.period > 0.0)) fail("period", "must be positive");
    if (cfg.horizon < 1) fail("horizon", "must be at least 1");
    if (!(cfg.noiseBound >= 0.0)) fail("noiseBound", "must be non-negative");
    if (!(cfg.weights.theta >= 0.0) || !(cfg.weights.v >= 0.0)) fail("norm", "weights must be non-negative");
    try {
        if (cfg.kind == ScenarioKind::Warehouse) scenarios::validate(cfg.warehouse);
        else scenarios::validate(cfg.highway);
    } catch (const std::invalid_argument& e) {
        fail("params", e.what());
    }
    if (cfg.agents.empty()) fail("agents", "at least one agent is required");

    std::set<int> ids;
    for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
        const AgentSpec& a = cfg.agents[i];
        const std::string f = "agents[" + std::to_string(i) + "].";
        if (!ids.insert(a.id).second) fail(f + "id", "duplicate agent id " + std::to_string(a.id));
        for (double c : {a.q.x, a.q.y, a.q.theta, a.q.v}) {
            if (!std::isfinite(c)) fail(f + "q", "must be finite");
        }
        if (a.q.v < 0.0) fail(f + "q", "speed must be non-negative");
        if (a.behavior == "corrupted-decoder") {
            if (cfg.kind != ScenarioKind::Warehouse) fail(f + "behavior", "decoder attack is defined for the warehouse only");
            if (!(a.alpha >= 0.0 && a.alpha <= 1.0)) fail(f + "behavior.alpha", "must lie in [0, 1]");
        } else if (a.behavior != "nominal" && a.behavior != "corrupted-encoder") {
            fail(f + "behavior.kind", "unknown behavior '" + a.behavior + "'");
        }
        if (cfg.kind == ScenarioKind::Highway && !(a.vMax > 0.0)) fail(f + "vMax", "must be positive");
    }

    std::set<std::pair<int, int>> pairs;
    std::set<int> monitorIds;
    for (std::size_t i = 0; i < cfg.monitors.size(); ++i) {
        const MonitorSpec& m = cfg.monitors[i];
        const std::string f = "monitors[" + std::to_string(i) + "].";
        if (!ids.contains(m.monitor)) fail(f + "monitor", "unknown agent " + std::to_string(m.monitor));
        if (!ids.contains(m.target)) fail(f + "target", "unknown agent " + std::to_string(m.target));
        if (m.monitor == m.target) fail(f + "target", "an agent cannot monitor itself");
        if (!pairs.insert({m.monitor, m.target}).second) fail(f + "target", "duplicate monitor/target pair");
        if (!(m.epsilonMin >= 0.0)) fail(f + "epsilonMin", "must be non-negative");
        if (m.epsilon < m.epsilonMin) fail(f + "epsilon", "must be at least epsilonMin");
        if (m.epsilon < cfg.noiseBound + kIntegrationBudget) {
            std::ostringstream os;
            os << "must be at least noiseBound + " << kIntegrationBudget;
            fail(f + "epsilon", os.str());
        }
        monitorIds.insert(m.monitor);
    }
    if (cfg.commGraph) {
        for (std::size_t i = 0; i < cfg.commGraph->size(); ++i) {
            const auto& [a, b] = (*cfg.commGraph)[i];
            const std::string f = "commGraph[" + std::to_string(i) + "]";
            if (!monitorIds.contains(a) || !monitorIds.contains(b)) fail(f, "edges must join monitoring agents");
        }
    }
}

ScenarioConfig parse_scenario(const std::string& jsonText) {
    json j;
    try {
        j = json::parse(jsonText);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");

    ScenarioConfig cfg;
    cfg.name = j.value("name", cfg.name);
    const std::string scenario = j.value("scenario", "");
    if (scenario == "warehouse") cfg.kind = ScenarioKind::Warehouse;
    else if (scenario == "highway") cfg.kind = ScenarioKind::Highway;
    else fail("scenario", "expected 'warehouse' or 'highway'");

    cfg.period = num(j, "period", "", cfg.period);
    if (j.contains("horizon")) {
        if (!j["horizon"].is_number_integer()) fail("horizon", "expected an integer");
        cfg.horizon = j["horizon"].get<int>();
    }
    cfg.noiseBound = num(j, "noiseBound", "", cfg.noiseBound);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    cfg.occlusion = j.value("occlusion", false);
    if (j.contains("norm")) {
        cfg.weights.theta = num(j["norm"], "wTheta", "norm.", cfg.weights.theta);
        cfg.weights.v = num(j["norm"], "wV", "norm.", cfg.weights.v);
    }

    const json params = j.value("params", json::object());
    if (cfg.kind == ScenarioKind::Warehouse) {
        auto& w = cfg.warehouse;
        w.d = num(params, "d", "params.", w.d);
        w.R = num(params, "R", "params.", w.R);
        w.vMax = num(params, "vMax", "params.", w.vMax);
        w.mu = num(params, "mu", "params.", w.mu);
        w.arcSegments = params.value("arcSegments", w.arcSegments);
        w.T = cfg.period;
    } else {
        auto& h = cfg.highway;
        h.lanes = params.value("lanes", h.lanes);
        h.laneWidth = num(params, "laneWidth", "params.", h.laneWidth);
        h.dF = num(params, "dF", "params.", h.dF);
        h.dB = num(params, "dB", "params.", h.dB);
        h.aBar = num(params, "aBar", "params.", h.aBar);
        h.omegaBar = num(params, "omegaBar", "params.", h.omegaBar);
        h.thetaMax = num(params, "thetaMax", "params.", h.thetaMax);
        h.mu = num(params, "mu", "params.", h.mu);
        h.R = num(params, "R", "params.", h.R);
        h.carLength = num(params, "carLength", "params.", h.carLength);
        h.carWidth = num(params, "carWidth", "params.", h.carWidth);
        h.arcSegments = params.value("arcSegments", h.arcSegments);
        h.occlusion = cfg.occlusion;
    }

    if (!j.contains("agents") || !j["agents"].is_array()) fail("agents", "expected an array");
    for (std::size_t i = 0; i < j["agents"].size(); ++i) {
        const json& a = j["agents"][i];
        const std::string f = "agents[" + std::to_string(i) + "].";
        AgentSpec s;
        if (!a.contains("id") || !a["id"].is_number_integer()) fail(f + "id", "expected an integer");
        s.id = a["id"].get<int>();
        if (!a.contains("q")) fail(f + "q", "missing");
        s.q = parse_q(a["q"], f + "q");
        if (a.contains("sigma")) s.sigma = a["sigma"].get<std::string>();
        s.vMax = num(a, "vMax", f, 0.0);
        if (a.contains("behavior")) {
            const json& b = a["behavior"];
            s.behavior = b.value("kind", "nominal");
            if (s.behavior == "corrupted-encoder") s.ghost = parse_ghost(b.value("ghost", json::array()), f + "behavior.ghost");
            if (s.behavior == "corrupted-decoder") s.alpha = num(b, "alpha", f + "behavior.", -1.0);
        }
        cfg.agents.push_back(std::move(s));
        if (cfg.kind == ScenarioKind::Highway) cfg.highway.vMaxPerAgent.push_back(cfg.agents.back().vMax);
    }

    for (std::size_t i = 0; i < j.value("monitors", json::array()).size(); ++i) {
        const json& m = j["monitors"][i];
        const std::string f = "monitors[" + std::to_string(i) + "].";
        MonitorSpec s;
        if (!m.contains("monitor") || !m["monitor"].is_number_integer()) fail(f + "monitor", "expected an integer");
        if (!m.contains("target") || !m["target"].is_number_integer()) fail(f + "target", "expected an integer");
        s.monitor = m["monitor"].get<int>();
        s.target = m["target"].get<int>();
        s.epsilon = num(m, "epsilon", f, s.epsilon);
        s.epsilonMin = num(m, "epsilonMin", f, s.epsilonMin);
        cfg.monitors.push_back(s);
    }

    if (j.contains("commGraph")) {
        std::vector<std::pair<int, int>> edges;
        for (std::size_t i = 0; i < j["commGraph"].size(); ++i) {
            const json& e = j["commGraph"][i];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
                fail("commGraph[" + std::to_string(i) + "]", "expected [a, b]");
            }
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        cfg.commGraph = std::move(edges);
    }

    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace rids::harness
