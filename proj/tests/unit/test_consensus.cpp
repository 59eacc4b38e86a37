#include "rids/consensus.hpp"
#include "rids/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace rids;
using namespace rids::consensus;
using monitor::OccupancyHypothesis;

namespace {

geo::Region rect(double x0, double x1, double y0, double y1) { return geo::region_from_rect(x0, x1, y0, y1); }

OccupancyHypothesis hyp(const geo::Region& r, bool req) {
    OccupancyHypothesis h;
    h.perTopology.push_back({r, req});
    return h;
}

OccupancyEstimate est(std::vector<OccupancyHypothesis> hs) { return OccupancyEstimate{1, std::move(hs)}; }

// Four monitors on a path 4 - 3 - 2 - 5.
CommGraph path_graph() { return CommGraph{{2, 3, 4, 5}, {{2, 3}, {2, 5}, {3, 4}}}; }

}  // namespace

TEST(Graph, DistancesAndDiameter) {
    const CommGraph g = path_graph();
    EXPECT_EQ(graph_dist(g, 4, 5), 3);
    EXPECT_EQ(graph_dist(g, 2, 2), 0);
    EXPECT_EQ(graph_dist(g, 3, 5), 2);
    EXPECT_EQ(graph_diam(g), 3);
    EXPECT_EQ(graph_diam(CommGraph{{1}, {}}), 0);
    const CommGraph k4{{0, 1, 2, 3}, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    EXPECT_EQ(graph_diam(k4), 1);
}

TEST(Graph, DisconnectedGraphs) {
    const CommGraph g{{1, 2, 3, 4}, {{1, 2}, {3, 4}}};
    EXPECT_FALSE(is_connected(g));
    EXPECT_EQ(graph_dist(g, 1, 3), kUnreachable);
    EXPECT_THROW(graph_diam(g), std::invalid_argument);
    const auto comps = components(g);
    ASSERT_EQ(comps.size(), 2u);
    EXPECT_EQ(comps[0], (std::vector<int>{1, 2}));
    EXPECT_EQ(comps[1], (std::vector<int>{3, 4}));
    const CommGraph sub = induced(path_graph(), {4, 5});
    EXPECT_EQ(components(sub).size(), 2u);
    EXPECT_THROW(run_consensus(g, {}, 5), std::invalid_argument);
}

TEST(Merge, SharedHypothesisSurvives) {
    const OccupancyHypothesis hA = hyp(rect(0, 1, 0, 1), true);
    const OccupancyHypothesis hB = hyp(rect(3, 5, 3, 5), false);
    const OccupancyHypothesis hC = hyp(rect(7, 8, 0, 1), true);
    const OccupancyEstimate m = merge(est({hA, hB}), est({hB, hC}));
    ASSERT_EQ(m.hypotheses.size(), 1u);
    EXPECT_TRUE(monitor::estimate_equal(m, est({hB})));
}

TEST(Merge, RequiredPresenceAgainstDisjointFreeRegionIsDropped) {
    const OccupancyEstimate m = merge(est({hyp(rect(0, 1, 0, 1), true)}), est({hyp(rect(2, 3, 0, 1), false)}));
    EXPECT_TRUE(m.hypotheses.empty());
    // Two free claims that do not overlap still leave the empty-but-free hypothesis.
    const OccupancyEstimate f = merge(est({hyp(rect(0, 1, 0, 1), false)}), est({hyp(rect(2, 3, 0, 1), false)}));
    ASSERT_EQ(f.hypotheses.size(), 1u);
    EXPECT_TRUE(geo::is_empty(f.hypotheses[0].perTopology[0].region));
}

TEST(Merge, Errors) {
    EXPECT_THROW(merge(OccupancyEstimate{1, {}}, OccupancyEstimate{2, {}}), std::invalid_argument);
    EXPECT_THROW(centralized({}), std::invalid_argument);
}

TEST(Merge, LatticeLaws) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 60; ++t) {
        const OccupancyEstimate a = oracle::random_rect_estimate(2, rng);
        const OccupancyEstimate b = oracle::random_rect_estimate(2, rng);
        const OccupancyEstimate c = oracle::random_rect_estimate(2, rng);
        ASSERT_TRUE(monitor::estimate_equal(merge(a, a), monitor::normalize(a))) << t;
        ASSERT_TRUE(monitor::estimate_equal(merge(a, b), merge(b, a))) << t;
        ASSERT_TRUE(monitor::estimate_equal(merge(merge(a, b), c), merge(a, merge(b, c)))) << t;
        ASSERT_TRUE(monitor::estimate_equal(merge(a, b), oracle::product_meet({a, b}))) << t;
    }
}

TEST(Merge, RefinesBothOperands) {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 60; ++t) {
        const OccupancyEstimate a = oracle::random_rect_estimate(1, rng);
        const OccupancyEstimate b = oracle::random_rect_estimate(1, rng);
        for (const OccupancyHypothesis& h : merge(a, b).hypotheses) {
            bool underA = false, underB = false;
            for (const OccupancyHypothesis& g : a.hypotheses) underA = underA || monitor::subsumed_by(h, g);
            for (const OccupancyHypothesis& g : b.hypotheses) underB = underB || monitor::subsumed_by(h, g);
            ASSERT_TRUE(underA && underB);
        }
    }
}

TEST(Rounds, StarRoundFoldsNeighbors) {
    const CommGraph g = path_graph();
    std::mt19937_64 rng(5);
    NodeStates s;
    for (int n : g.nodes) s[n] = oracle::random_rect_estimate(1, rng);
    const NodeStates next = round_step(g, s);
    EXPECT_TRUE(monitor::estimate_equal(next.at(4), merge(s.at(4), s.at(3))));
    EXPECT_TRUE(monitor::estimate_equal(next.at(2), merge(merge(s.at(2), s.at(3)), s.at(5))));
}

TEST(Rounds, ConvergeToCentralizedInDiameterRounds) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 40; ++t) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const CommGraph g = oracle::random_connected_graph(n, rng);
        NodeStates init;
        std::vector<OccupancyEstimate> all;
        for (int v : g.nodes) {
            init[v] = oracle::random_rect_estimate(1, rng);
            all.push_back(init[v]);
        }
        const ConsensusRun run = run_consensus(g, init, n);
        ASSERT_EQ(static_cast<int>(run.rounds.size()), run.diam + 1);
        ASSERT_TRUE(run.agreesWithCentralized);

        std::vector<OccupancyEstimate> shuffled = all;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        ASSERT_TRUE(monitor::estimate_equal(centralized(shuffled), run.centralizedState));
        ASSERT_TRUE(monitor::estimate_equal(oracle::product_meet(all), run.centralizedState));

        // Each round refines every node's previous state.
        for (std::size_t r = 1; r < run.rounds.size(); ++r) {
            for (int v : g.nodes) {
                for (const OccupancyHypothesis& h : run.rounds[r].at(v).hypotheses) {
                    bool under = false;
                    for (const OccupancyHypothesis& p : run.rounds[r - 1].at(v).hypotheses) {
                        under = under || monitor::subsumed_by(h, p);
                    }
                    ASSERT_TRUE(under);
                }
            }
        }
    }
}

TEST(Rounds, EmptyInputPropagatesAlongPath) {
    const CommGraph g = path_graph();
    NodeStates s;
    for (int n : g.nodes) s[n] = est({hyp(rect(0, 5, 0, 5), false)});
    s[4] = est({});
    const ConsensusRun run = run_consensus(g, s, 3);
    EXPECT_TRUE(run.rounds[1].at(3).hypotheses.empty());
    EXPECT_FALSE(run.rounds[1].at(5).hypotheses.empty());
    EXPECT_TRUE(run.rounds[2].at(2).hypotheses.empty());
    EXPECT_FALSE(run.rounds[2].at(5).hypotheses.empty());
    for (const auto& [node, x] : run.final_states()) EXPECT_TRUE(x.hypotheses.empty()) << node;
    EXPECT_THROW(run_consensus(g, s, 2), std::invalid_argument);
}

TEST(Oracle, ConsensusCheckPasses) {
    const oracle::ConsensusCheck c = oracle::check_consensus(50, 11);
    EXPECT_EQ(c.graphs, 50);
    EXPECT_EQ(c.failures, 0) << c.firstFailure;
}
