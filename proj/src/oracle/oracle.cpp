#include "rids/oracle.hpp"

#include <algorithm>
#include <sstream>

namespace rids::oracle {

using monitor::OccupancyEstimate;
using monitor::OccupancyHypothesis;
using monitor::TopologyOccupancy;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::string bits_str(const Bits& b) {
    std::string s;
    for (bool x : b) s += x ? '1' : '0';
    return s;
}

}  // namespace

EventSet completion_events(const ProtocolSpec& spec, const Bits& sTilde, const Bits& v, const AgentConfig& qBar,
                           const Latch& latch) {
    EventSet out;
    const int kappa = spec.kappa;
    for (unsigned mask = 0; mask < (1u << kappa); ++mask) {
        Bits s = sTilde;
        bool allowed = true;
        for (int k = 0; k < kappa; ++k) {
            const bool p = (mask >> k) & 1u;
            if (p && v[k]) allowed = false;
            s[k] = s[k] || p;
        }
        if (!allowed) continue;
        for (EventId j = 0; j < spec.event_count(); ++j) {
            if (condition_holds(spec, spec.events[j], s, qBar, latch)) out.insert(j);
        }
    }
    return out;
}

EstimatorCheck check_event_estimator(const ProtocolSpec& spec,
                                     const std::vector<std::pair<AgentConfig, Latch>>& contexts) {
    EstimatorCheck r;
    const int kappa = spec.kappa;
    for (const auto& [q, latch] : contexts) {
        for (unsigned sm = 0; sm < (1u << kappa); ++sm) {
            for (unsigned vm = 0; vm < (1u << kappa); ++vm) {
                Bits s(kappa), v(kappa);
                for (int k = 0; k < kappa; ++k) {
                    s[k] = (sm >> k) & 1u;
                    v[k] = (vm >> k) & 1u;
                }
                ++r.cases;
                const EventSet got = monitor::event_estimate(spec, s, v, q, latch);
                const EventSet want = completion_events(spec, s, v, q, latch);
                if (got != want) {
                    ++r.mismatches;
                    if (r.firstMismatch.empty()) {
                        r.firstMismatch = spec.name + " s=" + bits_str(s) + " v=" + bits_str(v);
                    }
                }
            }
        }
    }
    return r;
}

OccupancyEstimate product_meet(const std::vector<OccupancyEstimate>& states, double areaTol) {
    if (states.empty()) throw std::invalid_argument("product_meet: no estimates");
    const int kappa = states.front().kappa;
    std::vector<OccupancyHypothesis> partial = states.front().hypotheses;
    std::erase_if(partial, [&](const OccupancyHypothesis& h) { return monitor::contradictory(h, areaTol); });
    for (std::size_t i = 1; i < states.size(); ++i) {
        std::vector<OccupancyHypothesis> next;
        for (const OccupancyHypothesis& a : partial) {
            for (const OccupancyHypothesis& b : states[i].hypotheses) {
                OccupancyHypothesis h;
                for (int k = 0; k < kappa; ++k) {
                    h.perTopology.push_back({geo::intersect(a.perTopology[k].region, b.perTopology[k].region),
                                             a.perTopology[k].presenceRequired || b.perTopology[k].presenceRequired});
                }
                if (!monitor::contradictory(h, areaTol)) next.push_back(std::move(h));
            }
        }
        partial = std::move(next);
    }
    return monitor::normalize(OccupancyEstimate{kappa, std::move(partial)}, areaTol);
}

consensus::CommGraph random_connected_graph(int n, std::mt19937_64& rng) {
    consensus::CommGraph g;
    for (int i = 0; i < n; ++i) g.nodes.push_back(i);
    std::vector<int> order = g.nodes;
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_int(rng, 0, i)]);
    for (int i = 1; i < n; ++i) g.edges.push_back({order[i], order[uniform_int(rng, 0, i - 1)]});
    const int extra = uniform_int(rng, 0, n);
    for (int e = 0; e < extra; ++e) {
        const int a = uniform_int(rng, 0, n - 1);
        const int b = uniform_int(rng, 0, n - 1);
        if (a != b) g.edges.push_back({a, b});
    }
    return g;
}

OccupancyEstimate random_rect_estimate(int kappa, std::mt19937_64& rng) {
    OccupancyEstimate est;
    est.kappa = kappa;
    const int count = uniform_int(rng, 1, 3);
    for (int h = 0; h < count; ++h) {
        OccupancyHypothesis hyp;
        for (int k = 0; k < kappa; ++k) {
            TopologyOccupancy t;
            const int rects = uniform_int(rng, 1, 2);
            for (int r = 0; r < rects; ++r) {
                const double x0 = uniform(rng, 0.0, 7.0);
                const double y0 = uniform(rng, 0.0, 7.0);
                t.region = geo::unite(t.region, geo::region_from_rect(x0, x0 + uniform(rng, 1.0, 5.0), y0,
                                                                       y0 + uniform(rng, 1.0, 5.0)));
            }
            t.presenceRequired = uniform(rng, 0.0, 1.0) < 0.4;
            hyp.perTopology.push_back(std::move(t));
        }
        est.hypotheses.push_back(std::move(hyp));
    }
    return est;
}

ConsensusCheck check_consensus(int graphs, std::uint64_t seed) {
    ConsensusCheck r;
    std::mt19937_64 rng(seed);
    for (int gi = 0; gi < graphs; ++gi) {
        const int n = uniform_int(rng, 2, 8);
        const consensus::CommGraph g = random_connected_graph(n, rng);
        consensus::NodeStates init;
        std::vector<OccupancyEstimate> all;
        for (int node : g.nodes) {
            init[node] = random_rect_estimate(2, rng);
            all.push_back(init[node]);
        }
        ++r.graphs;
        const consensus::ConsensusRun run = consensus::run_consensus(g, init, n);
        r.maxRoundsUsed = std::max(r.maxRoundsUsed, static_cast<int>(run.rounds.size()) - 1);

        std::vector<OccupancyEstimate> permuted = all;
        for (int i = n - 1; i > 0; --i) std::swap(permuted[i], permuted[uniform_int(rng, 0, i)]);
        const OccupancyEstimate refold = consensus::centralized(permuted);
        const OccupancyEstimate brute = product_meet(all);

        std::string why;
        if (!run.agreesWithCentralized) why = "node state differs from centralized fold";
        else if (!monitor::estimate_equal(run.centralizedState, brute)) why = "fold differs from product meet";
        else if (!monitor::estimate_equal(run.centralizedState, refold)) why = "permuted fold differs";
        if (!why.empty()) {
            ++r.failures;
            if (r.firstFailure.empty()) {
                std::ostringstream os;
                os << "graph " << gi << " (n=" << n << "): " << why;
                r.firstFailure = os.str();
            }
        }
    }
    return r;
}

}  // namespace rids::oracle
