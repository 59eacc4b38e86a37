/**
 * @file oracle.hpp
 * @brief Brute-force reference computations used to cross-check the monitor
 * and consensus layers.
 */
#pragma once

#include "rids/consensus.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace rids::oracle {

/// Events realized by some completion p of the hidden bits (p_k = 0 where v_k = 1).
EventSet completion_events(const ProtocolSpec& spec, const Bits& sTilde, const Bits& v, const AgentConfig& qBar,
                           const Latch& latch);

struct EstimatorCheck {
    int cases = 0;
    int mismatches = 0;
    std::string firstMismatch;
};

/// Compares event_estimate with completion_events over every (sTilde, v) pair
/// and every lambda context in `contexts`.
EstimatorCheck check_event_estimator(const ProtocolSpec& spec,
                                     const std::vector<std::pair<AgentConfig, Latch>>& contexts);

/// Meet over the full Cartesian product of hypotheses, then maximal elements.
monitor::OccupancyEstimate product_meet(const std::vector<monitor::OccupancyEstimate>& states,
                                        double areaTol = geo::kDefaultAreaTol);

/// Random connected graph on nodes 0..n-1: a random spanning tree plus extra edges.
consensus::CommGraph random_connected_graph(int n, std::mt19937_64& rng);

/// Random estimate whose hypotheses use axis-aligned rectangles inside [0, 10]^2.
monitor::OccupancyEstimate random_rect_estimate(int kappa, std::mt19937_64& rng);

struct ConsensusCheck {
    int graphs = 0;
    int failures = 0;
    int maxRoundsUsed = 0;
    std::string firstFailure;
};

/// Random graphs with n in [2, 8]: every node equals the centralized fold after
/// diam rounds, the fold equals product_meet, and a permuted fold agrees.
ConsensusCheck check_consensus(int graphs, std::uint64_t seed);

/// Uniform double in [lo, hi) from a 64-bit engine, independent of the
/// standard library's distribution implementation.
double uniform(std::mt19937_64& rng, double lo, double hi);

}  // namespace rids::oracle
