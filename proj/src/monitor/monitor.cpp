#include "rids/monitor.hpp"

#include <algorithm>
#include <cmath>

namespace rids::monitor {

double config_distance(const AgentConfig& a, const AgentConfig& b, const NormWeights& w) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dth = w.theta * wrap_angle(a.theta - b.theta);
    const double dv = w.v * (a.v - b.v);
    return std::sqrt(dx * dx + dy * dy + dth * dth + dv * dv);
}

double inflation_half_width(const MonitorParams& p) { return std::max(p.epsilonMin, 1e-3); }

MonitorState make_monitor(const ProtocolSpec& spec, int targetId, const AgentConfig& qBar0, double t0,
                          const MonitorParams& params) {
    if (params.epsilon < params.epsilonMin || params.epsilonMin < 0.0) {
        throw std::invalid_argument("monitor requires epsilon >= epsilonMin >= 0");
    }
    MonitorState m;
    m.targetId = targetId;
    m.params = params;
    m.tk = t0;
    m.qBar = qBar0;
    m.preSet = spec.all_states();
    return m;
}

namespace {

Bits check_against(const std::vector<geo::Region>& eta, const geo::Region& Vh, double areaTol) {
    Bits v(eta.size(), false);
    for (std::size_t k = 0; k < eta.size(); ++k) v[k] = geo::is_subset(eta[k], Vh, areaTol);
    return v;
}

Bits occupied(const std::vector<geo::Region>& eta, const std::vector<AgentConfig>& visible) {
    Bits s(eta.size(), false);
    for (std::size_t k = 0; k < eta.size(); ++k) {
        for (const AgentConfig& n : visible) {
            if (geo::contains_point(eta[k], n.pos())) {
                s[k] = true;
                break;
            }
        }
    }
    return s;
}

}  // namespace

Bits topology_check(const ProtocolSpec& spec, const AgentConfig& qBar, const geo::Region& Vh, double areaTol) {
    return check_against(spec.topologies(qBar), Vh, areaTol);
}

Bits restricted_encoder(const ProtocolSpec& spec, const AgentConfig& qBar, const std::vector<AgentConfig>& visible) {
    return occupied(spec.topologies(qBar), visible);
}

EventSet event_estimate(const ProtocolSpec& spec, const Bits& sTilde, const Bits& v, const AgentConfig& qBar,
                        const Latch& latch) {
    if (static_cast<int>(sTilde.size()) != spec.kappa || static_cast<int>(v.size()) != spec.kappa) {
        throw std::invalid_argument("event_estimate: vectors must have length kappa");
    }
    EventSet out;
    for (EventId j = 0; j < spec.event_count(); ++j) {
        const DetectorCondition& c = spec.events[j];
        bool holds = true;
        for (int k : c.gamma) holds = holds && (!v[k] || sTilde[k]);
        for (int k : c.rho) holds = holds && !sTilde[k];
        for (int k : c.mu) holds = holds && spec.lambda(k, qBar, latch);
        for (int k : c.nu) holds = holds && !spec.lambda(k, qBar, latch);
        if (holds) out.insert(j);
    }
    return out;
}

StateSet nondet_automaton_step(const ProtocolSpec& spec, const StateSet& sigmaHat, const EventSet& eventsHat) {
    if (sigmaHat.empty()) throw std::invalid_argument("nondet_automaton_step: empty state set");
    if (eventsHat.empty()) throw ProtocolError(spec.name + ": event estimate is empty");
    StateSet out;
    for (StateId s : sigmaHat) {
        for (StateId t : successors(spec, s, eventsHat)) out.insert(t);
    }
    return out;
}

MonitorState predict(const ProtocolSpec& spec, const MonitorState& state, const std::vector<AgentConfig>& visible,
                     const geo::Region& Vh, double T) {
    MonitorState m = state;
    m.eta = spec.topologies(m.qBar);
    m.Vh = Vh;
    m.visible = visible;
    m.v = check_against(m.eta, Vh, m.params.areaTol);
    m.sHatPrior = occupied(m.eta, visible);
    m.latch = spec.monitorLatch ? spec.monitorLatch(m.qPrev.value_or(m.qBar)) : Latch{};
    m.eventsHat = event_estimate(spec, m.sHatPrior, m.v, m.qBar, m.latch);
    m.sigmaHat = nondet_automaton_step(spec, m.preSet, m.eventsHat);
    m.ledger.clear();
    for (StateId s : m.sigmaHat) m.ledger.push_back({flow(spec, m.qBar, s, T), s});
    m.predicted = true;
    return m;
}

UpdateOutcome update(const ProtocolSpec& spec, const MonitorState& state, const AgentConfig& qBarNext, double tNext) {
    if (!state.predicted) throw std::logic_error("update called before predict");
    UpdateOutcome out{state, {}};
    UpdateResult& r = out.result;
    for (const LedgerEntry& e : state.ledger) {
        if (config_distance(e.endpoint, qBarNext, state.params.weights) <= state.params.epsilon) {
            r.posterior.insert(e.sigma);
        }
    }
    r.detection = r.posterior.empty();

    if (!r.detection) {
        // Encoder completions: never below what was seen, and fixed where the
        // whole topology was visible.
        const int kappa = spec.kappa;
        for (unsigned mask = 0; mask < (1u << kappa); ++mask) {
            Bits s(kappa, false);
            bool admissible = true;
            for (int k = 0; k < kappa && admissible; ++k) {
                s[k] = (mask >> k) & 1u;
                if (state.sHatPrior[k] && !s[k]) admissible = false;
                if (state.v[k] && s[k] != state.sHatPrior[k]) admissible = false;
            }
            if (!admissible) continue;
            const EventSet ev = detect_events(spec, s, state.qBar, state.latch);
            bool explains = false;
            for (StateId from : state.preSet) {
                for (StateId to : successors(spec, from, ev)) {
                    if (r.posterior.contains(to)) explains = true;
                }
            }
            if (explains) r.sPosterior.push_back(std::move(s));
        }
    }

    MonitorState& m = out.state;
    m.preSet = r.detection ? spec.all_states() : r.posterior;
    m.detected = state.detected || r.detection;
    m.qPrev = state.qBar;
    m.qBar = qBarNext;
    m.tk = tNext;
    m.predicted = false;
    m.ledger.clear();
    return out;
}

BitSet hidden_presence(int prior, const BitSet& post) {
    if (post.empty()) throw std::invalid_argument("hidden_presence: empty posterior bit set");
    const bool has0 = post.contains(0);
    const bool has1 = post.contains(1);
    if (prior == 0) {
        if (has0 && has1) return {0, 1};
        return has1 ? BitSet{1} : BitSet{0};
    }
    if (has0) throw InconsistencyError("hidden_presence: posterior encoder bit below a-priori bit");
    return {0, 1};
}

std::vector<BitSet> hidden_presence_all(const Bits& sPrior, const std::vector<Bits>& sPosterior) {
    std::vector<BitSet> out;
    for (std::size_t k = 0; k < sPrior.size(); ++k) {
        BitSet post;
        for (const Bits& s : sPosterior) post.insert(s[k] ? 1 : 0);
        out.push_back(hidden_presence(sPrior[k] ? 1 : 0, post));
    }
    return out;
}

bool contradictory(const OccupancyHypothesis& h, double areaTol) {
    for (const TopologyOccupancy& t : h.perTopology) {
        if (t.presenceRequired && geo::is_empty(t.region, areaTol)) return true;
    }
    return false;
}

bool subsumed_by(const OccupancyHypothesis& h, const OccupancyHypothesis& g, double areaTol) {
    for (std::size_t k = 0; k < h.perTopology.size(); ++k) {
        if (g.perTopology[k].presenceRequired && !h.perTopology[k].presenceRequired) return false;
    }
    for (std::size_t k = 0; k < h.perTopology.size(); ++k) {
        if (!geo::is_subset(h.perTopology[k].region, g.perTopology[k].region, areaTol)) return false;
    }
    return true;
}

OccupancyEstimate normalize(OccupancyEstimate est, double areaTol) {
    struct Entry {
        OccupancyHypothesis h;
        std::vector<double> areas;
    };
    std::vector<Entry> entries;
    for (OccupancyHypothesis& h : est.hypotheses) {
        if (contradictory(h, areaTol)) continue;
        Entry e{std::move(h), {}};
        for (const TopologyOccupancy& t : e.h.perTopology) e.areas.push_back(geo::area(t.region));
        entries.push_back(std::move(e));
    }
    // Cheap necessary condition for subsumption before the polygon test.
    auto maybeBelow = [](const Entry& a, const Entry& b) {
        for (std::size_t k = 0; k < a.areas.size(); ++k) {
            if (a.areas[k] > b.areas[k] + 1e-6) return false;
            if (b.h.perTopology[k].presenceRequired && !a.h.perTopology[k].presenceRequired) return false;
        }
        return true;
    };
    std::vector<bool> dropped(entries.size(), false);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (dropped[i]) continue;
        for (std::size_t j = 0; j < entries.size() && !dropped[i]; ++j) {
            if (i == j || dropped[j]) continue;
            if (!maybeBelow(entries[i], entries[j]) || !subsumed_by(entries[i].h, entries[j].h, areaTol)) continue;
            // Equal hypotheses: keep the first one.
            if (j > i && maybeBelow(entries[j], entries[i]) && subsumed_by(entries[j].h, entries[i].h, areaTol)) {
                dropped[j] = true;
            } else {
                dropped[i] = true;
            }
        }
    }
    OccupancyEstimate out;
    out.kappa = est.kappa;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!dropped[i]) out.hypotheses.push_back(std::move(entries[i].h));
    }
    return out;
}

bool hypothesis_equal(const OccupancyHypothesis& a, const OccupancyHypothesis& b, double areaTol) {
    if (a.perTopology.size() != b.perTopology.size()) return false;
    for (std::size_t k = 0; k < a.perTopology.size(); ++k) {
        if (a.perTopology[k].presenceRequired != b.perTopology[k].presenceRequired) return false;
        if (!geo::region_equal(a.perTopology[k].region, b.perTopology[k].region, areaTol)) return false;
    }
    return true;
}

bool estimate_equal(const OccupancyEstimate& a, const OccupancyEstimate& b, double areaTol) {
    auto covered = [areaTol](const OccupancyEstimate& x, const OccupancyEstimate& y) {
        for (const OccupancyHypothesis& h : x.hypotheses) {
            bool found = false;
            for (const OccupancyHypothesis& g : y.hypotheses) {
                if (hypothesis_equal(h, g, areaTol)) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    };
    return covered(a, b) && covered(b, a);
}

geo::Region inflate(const std::vector<AgentConfig>& visible, double h) {
    geo::Region r;
    for (const AgentConfig& q : visible) r = geo::unite(r, geo::region_square(q.pos(), h));
    return r;
}

OccupancyEstimate occupancy_estimate(const ProtocolSpec& spec, const AgentConfig& qBar,
                                     const geo::Region& visibleInflated, const geo::Region& Vh,
                                     const std::vector<BitSet>& pHat, double areaTol) {
    if (static_cast<int>(pHat.size()) != spec.kappa) throw std::invalid_argument("pHat must have kappa entries");
    const std::vector<geo::Region> eta = spec.topologies(qBar);
    std::vector<geo::Region> seen(spec.kappa);
    std::vector<geo::Region> hidden(spec.kappa);
    for (int k = 0; k < spec.kappa; ++k) {
        if (pHat[k].empty()) throw std::invalid_argument("pHat components must be nonempty");
        seen[k] = geo::intersect(visibleInflated, eta[k]);
        hidden[k] = geo::difference(eta[k], Vh);
    }
    OccupancyEstimate est;
    est.kappa = spec.kappa;
    std::vector<OccupancyHypothesis> partial(1);
    for (int k = 0; k < spec.kappa; ++k) {
        std::vector<OccupancyHypothesis> next;
        for (const OccupancyHypothesis& h : partial) {
            for (int p : pHat[k]) {
                OccupancyHypothesis g = h;
                TopologyOccupancy t;
                t.region = p ? geo::unite(seen[k], hidden[k]) : seen[k];
                t.presenceRequired = p != 0;
                g.perTopology.push_back(std::move(t));
                next.push_back(std::move(g));
            }
        }
        partial = std::move(next);
    }
    est.hypotheses = std::move(partial);
    return normalize(std::move(est), areaTol);
}

bool world_consistent(const OccupancyHypothesis& h, const std::vector<geo::Region>& eta,
                      const std::vector<AgentConfig>& neighbors) {
    for (std::size_t k = 0; k < eta.size(); ++k) {
        const TopologyOccupancy& t = h.perTopology[k];
        bool present = false;
        for (const AgentConfig& n : neighbors) {
            if (!geo::contains_point(eta[k], n.pos())) continue;
            if (!geo::contains_point(t.region, n.pos())) return false;
            present = true;
        }
        if (t.presenceRequired && !present) return false;
    }
    return true;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Cooperative: return "cooperative";
        case Verdict::Uncertain: return "uncertain";
        case Verdict::Uncooperative: return "uncooperative";
    }
    return "unknown";
}

Verdict classify(const OccupancyEstimate& est, bool detection) {
    if (detection || est.hypotheses.empty()) return Verdict::Uncooperative;
    for (const OccupancyHypothesis& h : est.hypotheses) {
        for (const TopologyOccupancy& t : h.perTopology) {
            if (t.presenceRequired) return Verdict::Uncertain;
        }
    }
    return Verdict::Cooperative;
}

}  // namespace rids::monitor
