#include "rids/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rids {

namespace {

constexpr double kTimeTol = 1e-9;

AgentConfig axpy(const AgentConfig& q, double h, const AgentConfig& d) {
    return {q.x + h * d.x, q.y + h * d.y, q.theta + h * d.theta, q.v + h * d.v};
}

}  // namespace

double wrap_angle(double a) {
    const double twoPi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, twoPi);
    if (r <= -std::numbers::pi) r += twoPi;
    if (r > std::numbers::pi) r -= twoPi;
    return r;
}

StateId ProtocolSpec::state_id(const std::string& n) const {
    for (std::size_t i = 0; i < stateNames.size(); ++i) {
        if (stateNames[i] == n) return static_cast<StateId>(i);
    }
    throw std::invalid_argument("unknown discrete state '" + n + "' for protocol " + name);
}

StateSet ProtocolSpec::all_states() const {
    StateSet all;
    for (int i = 0; i < state_count(); ++i) all.insert(i);
    return all;
}

Bits encode(const ProtocolSpec& spec, const AgentConfig& q, const std::vector<AgentConfig>& neighbors) {
    Bits s(spec.kappa, false);
    if (neighbors.empty()) return s;
    const std::vector<geo::Region> eta = spec.topologies(q);
    for (int k = 0; k < spec.kappa; ++k) {
        for (const AgentConfig& n : neighbors) {
            if (geo::contains_point(eta[k], n.pos())) {
                s[k] = true;
                break;
            }
        }
    }
    return s;
}

bool condition_holds(const ProtocolSpec& spec, const DetectorCondition& c, const Bits& s, const AgentConfig& q,
                     const Latch& latch) {
    for (int k : c.gamma) {
        if (!s[k]) return false;
    }
    for (int k : c.rho) {
        if (s[k]) return false;
    }
    for (int k : c.mu) {
        if (!spec.lambda(k, q, latch)) return false;
    }
    for (int k : c.nu) {
        if (spec.lambda(k, q, latch)) return false;
    }
    return true;
}

EventSet detect_events(const ProtocolSpec& spec, const Bits& s, const AgentConfig& q, const Latch& latch,
                       std::optional<StateId> enabledAt) {
    if (static_cast<int>(s.size()) != spec.kappa) throw std::invalid_argument("encoder vector has wrong length");
    EventSet out;
    for (EventId j = 0; j < spec.event_count(); ++j) {
        if (enabledAt && !spec.transitions.contains({*enabledAt, j})) continue;
        if (condition_holds(spec, spec.events[j], s, q, latch)) out.insert(j);
    }
    return out;
}

StateSet successors(const ProtocolSpec& spec, StateId sigma, const EventSet& events) {
    StateSet out;
    for (EventId e : events) {
        auto it = spec.transitions.find({sigma, e});
        if (it != spec.transitions.end()) out.insert(it->second);
    }
    return out;
}

StateId automaton_step(const ProtocolSpec& spec, StateId sigma, const EventSet& events) {
    const StateSet next = successors(spec, sigma, events);
    if (next.empty()) {
        throw ProtocolError(spec.name + ": no enabled event at state " + spec.stateNames.at(sigma));
    }
    if (next.size() > 1) {
        throw ProtocolError(spec.name + ": conflicting events at state " + spec.stateNames.at(sigma));
    }
    return *next.begin();
}

AgentConfig vector_field(const ProtocolSpec& spec, const AgentConfig& q, StateId sigma) {
    const Control u = spec.decoder(q, sigma);
    // Speed is floored at zero: no reversing, no braking below standstill.
    const double v = std::max(q.v, 0.0);
    const double a = q.v <= 0.0 ? std::max(u.a, 0.0) : u.a;
    return {v * std::cos(q.theta), v * std::sin(q.theta), u.omega, a};
}

AgentConfig integrate_rk4(const ProtocolSpec& spec, const AgentConfig& q0, StateId sigma, double dt, int substeps) {
    AgentConfig q = q0;
    if (dt <= 0.0) return q;
    const double h = dt / substeps;
    for (int i = 0; i < substeps; ++i) {
        const AgentConfig k1 = vector_field(spec, q, sigma);
        const AgentConfig k2 = vector_field(spec, axpy(q, h / 2, k1), sigma);
        const AgentConfig k3 = vector_field(spec, axpy(q, h / 2, k2), sigma);
        const AgentConfig k4 = vector_field(spec, axpy(q, h, k3), sigma);
        q.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
        q.y += h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
        q.theta += h / 6 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta);
        q.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
        if (q.v < 0.0) q.v = 0.0;
    }
    q.theta = wrap_angle(q.theta);
    return q;
}

AgentConfig flow(const ProtocolSpec& spec, const AgentConfig& q, StateId sigma, double dt) {
    if (dt < 0.0) throw std::invalid_argument("flow requires dt >= 0");
    if (dt == 0.0) return q;
    if (spec.closedForm) return spec.closedForm(q, sigma, dt);
    return integrate_rk4(spec, q, sigma, dt, kRk4Substeps);
}

std::optional<std::vector<AgentConfig>> GhostSchedule::active(double t, const AgentConfig& self) const {
    for (const GhostEntry& g : entries) {
        if (t + kTimeTol < g.from) continue;
        if (g.to && t + kTimeTol >= *g.to) continue;
        std::vector<AgentConfig> fab;
        if (g.offset) {
            AgentConfig q = self;
            q.x += g.offset->x;
            q.y += g.offset->y;
            fab.push_back(q);
        }
        return fab;
    }
    return std::nullopt;
}

std::string behavior_name(const Behavior& b) {
    if (std::holds_alternative<CorruptedEncoder>(b)) return "corrupted-encoder";
    if (std::holds_alternative<CorruptedDecoder>(b)) return "corrupted-decoder";
    return "nominal";
}

WorldStepResult world_step(const WorldState& world, const std::vector<const ProtocolSpec*>& specs, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("world_step requires T > 0");
    if (specs.size() != world.agents.size()) throw std::invalid_argument("one protocol per agent required");

    WorldStepResult r;
    r.world.time = world.time + T;
    r.world.agents.reserve(world.agents.size());

    std::vector<AgentConfig> all;
    all.reserve(world.agents.size());
    for (const AgentState& a : world.agents) all.push_back(a.q);

    for (std::size_t i = 0; i < world.agents.size(); ++i) {
        const AgentState& a = world.agents[i];
        const ProtocolSpec& spec = *specs[i];

        std::vector<AgentConfig> others;
        others.reserve(all.size());
        for (std::size_t j = 0; j < all.size(); ++j) {
            if (j != i) others.push_back(all[j]);
        }

        std::vector<AgentConfig> neighbors = others;
        if (const auto* enc = std::get_if<CorruptedEncoder>(&a.behavior)) {
            if (auto fab = enc->ghost.active(world.time, a.q)) neighbors = std::move(*fab);
        }

        StepInfo info;
        info.id = a.id;
        info.sigmaBefore = a.sigma;
        info.latchBefore = a.latch;
        info.s = encode(spec, a.q, neighbors);
        info.events = detect_events(spec, info.s, a.q, a.latch, a.sigma);
        try {
            info.sigmaAfter = automaton_step(spec, a.sigma, info.events);
        } catch (const ProtocolError& e) {
            throw ProtocolError("agent " + std::to_string(a.id) + " at t=" + std::to_string(world.time) + ": " +
                                e.what());
        }
        if (spec.visibility) {
            const std::vector<geo::Region> eta = spec.topologies(a.q);
            geo::Region hood;
            for (const geo::Region& r : eta) hood = geo::unite(hood, r);
            info.neighborhoodVisible = geo::is_subset(hood, spec.visibility(a.q, others));
        }

        AgentState next = a;
        next.sigma = info.sigmaAfter;
        if (spec.latchUpdate) next.latch = spec.latchUpdate(a.latch, a.sigma, info.sigmaAfter, a.q);
        const ProtocolSpec* dyn = &spec;
        if (const auto* dec = std::get_if<CorruptedDecoder>(&a.behavior); dec && dec->flowSpec) {
            dyn = dec->flowSpec.get();
        }
        next.q = flow(*dyn, a.q, next.sigma, T);
        r.world.agents.push_back(std::move(next));
        r.info.push_back(std::move(info));
    }
    return r;
}

}  // namespace rids
