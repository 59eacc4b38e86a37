#include "rids/monitor.hpp"
#include "rids/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rids;
using namespace rids::monitor;
using scenarios::ACC;
using scenarios::DEC;

namespace {

constexpr double kPi = std::numbers::pi;

// Every event some completion of the hidden bits could fire.
EventSet brute_force_events(const ProtocolSpec& spec, const Bits& sTilde, const Bits& v, const AgentConfig& q,
                            const Latch& latch) {
    EventSet out;
    const int n = spec.kappa;
    for (unsigned p = 0; p < (1u << n); ++p) {
        Bits s = sTilde;
        bool ok = true;
        for (int k = 0; k < n; ++k) {
            if ((p >> k) & 1u) {
                if (v[k]) ok = false;
                s[k] = true;
            }
        }
        if (!ok) continue;
        for (EventId e : detect_events(spec, s, q, latch)) out.insert(e);
    }
    return out;
}

Bits bits_of(unsigned m, int n) {
    Bits b(n);
    for (int k = 0; k < n; ++k) b[k] = (m >> k) & 1u;
    return b;
}

OccupancyHypothesis hyp(std::vector<std::pair<geo::Region, bool>> parts) {
    OccupancyHypothesis h;
    for (auto& [r, req] : parts) h.perTopology.push_back({std::move(r), req});
    return h;
}

geo::Region rect(double x0, double x1, double y0, double y1) { return geo::region_from_rect(x0, x1, y0, y1); }

}  // namespace

TEST(Monitor, ConfigDistanceWrapsHeading) {
    const NormWeights w{2.0, 0.5};
    const AgentConfig a{0, 0, kPi - 0.1, 1.0};
    const AgentConfig b{3, 4, -kPi + 0.1, 3.0};
    EXPECT_NEAR(config_distance(a, b, w), std::sqrt(9 + 16 + 0.16 + 1.0), 1e-12);
    EXPECT_DOUBLE_EQ(config_distance(a, a, w), 0.0);
}

TEST(Monitor, EventEstimateMatchesCompletionBruteForce) {
    const ProtocolSpec wh = scenarios::build_warehouse({});
    for (unsigned sm = 0; sm < 2; ++sm) {
        for (unsigned vm = 0; vm < 2; ++vm) {
            const Bits s = bits_of(sm, 1), v = bits_of(vm, 1);
            EXPECT_EQ(event_estimate(wh, s, v, {}, {}), brute_force_events(wh, s, v, {}, {}));
        }
    }
    const ProtocolSpec hw = scenarios::build_highway({}, 30.0);
    for (int lane = 0; lane < 3; ++lane) {
        for (int anchor = -1; anchor < 3; ++anchor) {
            const AgentConfig q{0, (lane + 0.5) * 3.5, 0, 20};
            Latch latch;
            if (anchor >= 0) latch.anchor = anchor;
            for (unsigned sm = 0; sm < 16; ++sm) {
                for (unsigned vm = 0; vm < 16; ++vm) {
                    const Bits s = bits_of(sm, 4), v = bits_of(vm, 4);
                    ASSERT_EQ(event_estimate(hw, s, v, q, latch), brute_force_events(hw, s, v, q, latch));
                }
            }
        }
    }
}

TEST(Monitor, EventEstimateShrinksWithVisibility) {
    const ProtocolSpec hw = scenarios::build_highway({}, 30.0);
    const AgentConfig q{0, 5.25, 0, 20};
    for (unsigned sm = 0; sm < 16; ++sm) {
        for (unsigned vm = 0; vm < 16; ++vm) {
            for (int k = 0; k < 4; ++k) {
                if ((vm >> k) & 1u) continue;
                const EventSet less = event_estimate(hw, bits_of(sm, 4), bits_of(vm, 4), q, {});
                const EventSet more = event_estimate(hw, bits_of(sm, 4), bits_of(vm | (1u << k), 4), q, {});
                for (EventId e : more) ASSERT_TRUE(less.contains(e));
            }
        }
    }
}

TEST(Monitor, EventEstimateWarehouseCases) {
    const ProtocolSpec wh = scenarios::build_warehouse({});
    EXPECT_EQ(event_estimate(wh, {false}, {true}, {}, {}), EventSet{0});
    EXPECT_EQ(event_estimate(wh, {true}, {true}, {}, {}), EventSet{1});
    EXPECT_EQ(event_estimate(wh, {false}, {false}, {}, {}), (EventSet{0, 1}));
    EXPECT_EQ(event_estimate(wh, {true}, {false}, {}, {}), EventSet{1});
    EXPECT_THROW(event_estimate(wh, {true, false}, {false}, {}, {}), std::invalid_argument);
}

TEST(Monitor, NondeterministicStep) {
    const ProtocolSpec wh = scenarios::build_warehouse({});
    EXPECT_EQ(nondet_automaton_step(wh, {ACC, DEC}, {0}), StateSet{ACC});
    EXPECT_EQ(nondet_automaton_step(wh, {DEC}, {0, 1}), (StateSet{ACC, DEC}));
    EXPECT_THROW(nondet_automaton_step(wh, {}, {0}), std::invalid_argument);
    EXPECT_THROW(nondet_automaton_step(wh, {ACC}, {}), ProtocolError);
}

TEST(Monitor, HiddenPresenceTable) {
    EXPECT_EQ(hidden_presence(0, {0}), BitSet{0});
    EXPECT_EQ(hidden_presence(0, {1}), BitSet{1});
    EXPECT_EQ(hidden_presence(0, {0, 1}), (BitSet{0, 1}));
    EXPECT_EQ(hidden_presence(1, {1}), (BitSet{0, 1}));
    EXPECT_THROW(hidden_presence(1, {0}), InconsistencyError);
    EXPECT_THROW(hidden_presence(1, {0, 1}), InconsistencyError);
    EXPECT_THROW(hidden_presence(0, {}), std::invalid_argument);
    const auto all = hidden_presence_all({false, true}, {{true, true}, {false, true}});
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0], (BitSet{0, 1}));
    EXPECT_EQ(all[1], (BitSet{0, 1}));
}

TEST(Monitor, TopologyCheckAndRestrictedEncoder) {
    const ProtocolSpec wh = scenarios::build_warehouse({});
    const AgentConfig q{0, 0, 0, 1};
    EXPECT_EQ(topology_check(wh, q, rect(-5, 5, -5, 5)), Bits{true});
    EXPECT_EQ(topology_check(wh, q, rect(-5, 2, -5, 5)), Bits{false});
    EXPECT_EQ(restricted_encoder(wh, q, {{1, 0, 0, 0}}), Bits{true});
    EXPECT_EQ(restricted_encoder(wh, q, {{-1, 0, 0, 0}}), Bits{false});
}

// The forklift replay: a ghost ahead from 2T, seen by a monitor that never
// sees the whole front sector.
TEST(Monitor, GhostReplayThroughPredictUpdate) {
    scenarios::WarehouseParams p;
    const ProtocolSpec wh = scenarios::build_warehouse(p);
    const double T = p.T;
    const AgentConfig q0{3.2, 4.1, kPi / 4, p.vMax};
    // Partial view: a disc that covers only the rear part of the sector.
    auto viewFor = [&](const AgentConfig& q) {
        geo::SectorSpec d{{q.x - 6 * std::cos(kPi / 4), q.y - 6 * std::sin(kPi / 4)}, p.R, 0, -kPi, kPi, 32};
        return geo::region_from_sector(d);
    };
    MonitorParams mp;
    MonitorState m = make_monitor(wh, 1, q0, 0.0, mp);
    EXPECT_EQ(m.preSet, (StateSet{ACC, DEC}));

    AgentConfig truth = q0;
    StateId sigma = ACC;
    std::vector<StateSet> posteriors;
    std::vector<std::vector<Bits>> encoders;
    for (int k = 0; k < 3; ++k) {
        m = predict(wh, m, {}, viewFor(truth), T);
        EXPECT_EQ(m.v, Bits{false});
        sigma = k >= 2 ? DEC : ACC;  // ghost appears at 2T
        truth = flow(wh, truth, sigma, T);
        const UpdateOutcome out = update(wh, m, truth, (k + 1) * T);
        posteriors.push_back(out.result.posterior);
        encoders.push_back(out.result.sPosterior);
        EXPECT_FALSE(out.result.detection);
        if (k == 2) {
            const auto pHat = hidden_presence_all(m.sHatPrior, out.result.sPosterior);
            EXPECT_EQ(pHat[0], BitSet{1});
            const OccupancyEstimate est =
                occupancy_estimate(wh, m.qBar, inflate(m.visible, inflation_half_width(mp)), m.Vh, pHat);
            ASSERT_EQ(est.hypotheses.size(), 1u);
            const TopologyOccupancy& t = est.hypotheses[0].perTopology[0];
            EXPECT_TRUE(t.presenceRequired);
            EXPECT_TRUE(geo::region_equal(t.region, geo::difference(m.eta[0], m.Vh)));
            EXPECT_EQ(classify(est, false), Verdict::Uncertain);
        }
        m = out.state;
    }
    EXPECT_EQ(posteriors[0], StateSet{ACC});
    EXPECT_EQ(encoders[0], std::vector<Bits>{Bits{false}});
    EXPECT_EQ(posteriors[2], StateSet{DEC});
    EXPECT_EQ(encoders[2], std::vector<Bits>{Bits{true}});
}

TEST(Monitor, DetectionResetsAndSticks) {
    scenarios::WarehouseParams p;
    const ProtocolSpec wh = scenarios::build_warehouse(p);
    MonitorState m = make_monitor(wh, 1, {0, 0, 0, 1.0}, 0.0, {});
    m = predict(wh, m, {}, rect(-20, 20, -20, 20), p.T);
    const UpdateOutcome bad = update(wh, m, {5, 5, 1, 0}, p.T);
    EXPECT_TRUE(bad.result.detection);
    EXPECT_TRUE(bad.result.posterior.empty());
    EXPECT_TRUE(bad.result.sPosterior.empty());
    EXPECT_TRUE(bad.state.detected);
    EXPECT_EQ(bad.state.preSet, (StateSet{ACC, DEC}));
    MonitorState again = predict(wh, bad.state, {}, rect(-20, 20, -20, 20), p.T);
    const UpdateOutcome ok = update(wh, again, flow(wh, bad.state.qBar, ACC, p.T), 2 * p.T);
    EXPECT_FALSE(ok.result.detection);
    EXPECT_TRUE(ok.state.detected);
}

TEST(Monitor, UpdateRequiresPredict) {
    const ProtocolSpec wh = scenarios::build_warehouse({});
    const MonitorState m = make_monitor(wh, 1, {}, 0.0, {});
    EXPECT_THROW(update(wh, m, {}, 0.5), std::logic_error);
    MonitorParams bad;
    bad.epsilon = 0.01;
    bad.epsilonMin = 0.02;
    EXPECT_THROW(make_monitor(wh, 1, {}, 0.0, bad), std::invalid_argument);
}

TEST(Monitor, NominalTargetNeverPruned) {
    scenarios::WarehouseParams p;
    const ProtocolSpec wh = scenarios::build_warehouse(p);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MonitorParams mp;
    mp.epsilon = 0.01;
    for (int run = 0; run < 50; ++run) {
        AgentConfig q{20 * u(rng), 20 * u(rng), wrap_angle(7 * u(rng)), p.vMax * u(rng)};
        MonitorState m = make_monitor(wh, 1, q, 0.0, mp);
        for (int k = 0; k < 10; ++k) {
            // A neighbor that pops in and out of the front sector.
            const bool ahead = u(rng) < 0.5;
            const AgentConfig other{q.x + 1.5 * std::cos(q.theta), q.y + 1.5 * std::sin(q.theta), 0, 0};
            const std::vector<AgentConfig> seen = ahead && u(rng) < 0.5 ? std::vector<AgentConfig>{other}
                                                                        : std::vector<AgentConfig>{};
            const geo::Region view = seen.empty() && ahead ? rect(q.x - 0.5, q.x + 0.5, q.y - 0.5, q.y + 0.5)
                                                           : rect(q.x - 10, q.x + 10, q.y - 10, q.y + 10);
            m = predict(wh, m, seen, view, p.T);
            const StateId sigma = ahead ? DEC : ACC;
            q = flow(wh, q, sigma, p.T);
            const UpdateOutcome out = update(wh, m, q, (k + 1) * p.T);
            ASSERT_TRUE(out.result.posterior.contains(sigma)) << "run " << run << " step " << k;
            m = out.state;
        }
    }
}

TEST(Occupancy, RegionsPerPresenceValue) {
    const ProtocolSpec wh = scenarios::build_warehouse({});
    const AgentConfig q{0, 0, 0, 1};
    const geo::Region eta = wh.topologies(q)[0];
    const geo::Region Vh = rect(-10, 1.5, -10, 10);
    const geo::Region seen = inflate({{1.0, 0.0, 0, 0}}, 0.1);

    const OccupancyEstimate free = occupancy_estimate(wh, q, seen, Vh, {{0}});
    ASSERT_EQ(free.hypotheses.size(), 1u);
    EXPECT_FALSE(free.hypotheses[0].perTopology[0].presenceRequired);
    EXPECT_TRUE(geo::region_equal(free.hypotheses[0].perTopology[0].region, geo::intersect(seen, eta)));

    const OccupancyEstimate req = occupancy_estimate(wh, q, seen, Vh, {{1}});
    ASSERT_EQ(req.hypotheses.size(), 1u);
    EXPECT_TRUE(req.hypotheses[0].perTopology[0].presenceRequired);
    EXPECT_TRUE(geo::region_equal(req.hypotheses[0].perTopology[0].region,
                                  geo::unite(geo::intersect(seen, eta), geo::difference(eta, Vh))));

    EXPECT_EQ(occupancy_estimate(wh, q, seen, Vh, {{0, 1}}).hypotheses.size(), 2u);
}

TEST(Occupancy, FullyVisibleRequiredTopologyIsContradictory) {
    const ProtocolSpec wh = scenarios::build_warehouse({});
    const OccupancyEstimate est = occupancy_estimate(wh, {}, {}, rect(-9, 9, -9, 9), {{1}});
    EXPECT_TRUE(est.hypotheses.empty());
    EXPECT_EQ(classify(est, false), Verdict::Uncooperative);
}

TEST(Occupancy, NormalizeKeepsMaximalHypotheses) {
    const geo::Region a = rect(0, 2, 0, 2), b = rect(0, 1, 0, 1);
    OccupancyEstimate est{1, {hyp({{b, false}}), hyp({{a, false}}), hyp({{a, false}}), hyp({{geo::Region{}, true}})}};
    const OccupancyEstimate n = normalize(est);
    ASSERT_EQ(n.hypotheses.size(), 1u);
    EXPECT_TRUE(geo::region_equal(n.hypotheses[0].perTopology[0].region, a));

    // A required presence is a stronger claim, so it does not absorb a free hypothesis.
    OccupancyEstimate mixed{1, {hyp({{a, true}}), hyp({{a, false}})}};
    EXPECT_EQ(normalize(mixed).hypotheses.size(), 1u);
    EXPECT_FALSE(normalize(mixed).hypotheses[0].perTopology[0].presenceRequired);
    OccupancyEstimate incomparable{1, {hyp({{a, true}}), hyp({{b, false}})}};
    EXPECT_EQ(normalize(incomparable).hypotheses.size(), 2u);
}

TEST(Occupancy, SubsumptionAndEquality) {
    const OccupancyHypothesis small = hyp({{rect(0, 1, 0, 1), true}});
    const OccupancyHypothesis big = hyp({{rect(0, 2, 0, 2), false}});
    EXPECT_TRUE(subsumed_by(small, big));
    EXPECT_FALSE(subsumed_by(big, small));
    EXPECT_TRUE(contradictory(hyp({{geo::Region{}, true}})));
    EXPECT_FALSE(contradictory(hyp({{geo::Region{}, false}})));
    const OccupancyEstimate x{1, {small, big}};
    const OccupancyEstimate y{1, {big, small}};
    EXPECT_TRUE(estimate_equal(x, y));
    EXPECT_FALSE(estimate_equal(x, OccupancyEstimate{1, {small}}));
}

TEST(Occupancy, WorldConsistency) {
    const std::vector<geo::Region> eta{rect(0, 10, 0, 2)};
    const OccupancyHypothesis needs = hyp({{rect(5, 10, 0, 2), true}});
    EXPECT_TRUE(world_consistent(needs, eta, {{6, 1, 0, 0}}));
    EXPECT_FALSE(world_consistent(needs, eta, {}));
    EXPECT_FALSE(world_consistent(needs, eta, {{2, 1, 0, 0}}));
    EXPECT_TRUE(world_consistent(needs, eta, {{6, 1, 0, 0}, {20, 1, 0, 0}}));
    const OccupancyHypothesis empty = hyp({{geo::Region{}, false}});
    EXPECT_TRUE(world_consistent(empty, eta, {}));
    EXPECT_FALSE(world_consistent(empty, eta, {{1, 1, 0, 0}}));
}

TEST(Occupancy, Verdicts) {
    EXPECT_EQ(classify(OccupancyEstimate{1, {}}, false), Verdict::Uncooperative);
    EXPECT_EQ(classify(OccupancyEstimate{1, {hyp({{rect(0, 1, 0, 1), false}})}}, false), Verdict::Cooperative);
    EXPECT_EQ(classify(OccupancyEstimate{1, {hyp({{rect(0, 1, 0, 1), true}})}}, false), Verdict::Uncertain);
    EXPECT_EQ(classify(OccupancyEstimate{1, {hyp({{rect(0, 1, 0, 1), false}})}}, true), Verdict::Uncooperative);
    EXPECT_STREQ(verdict_name(Verdict::Uncertain), "uncertain");
}
