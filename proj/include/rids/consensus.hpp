/**
 * @file consensus.hpp
 * @brief Set-valued consensus over a communication graph of monitors.
 */
#pragma once

#include "rids/monitor.hpp"

#include <map>
#include <utility>
#include <vector>

namespace rids::consensus {

using monitor::OccupancyEstimate;

inline constexpr int kUnreachable = -1;

/// Undirected graph; self-loops are implied.
struct CommGraph {
    std::vector<int> nodes;
    std::vector<std::pair<int, int>> edges;

    std::vector<int> neighbors(int node) const;
    bool has_node(int node) const;
};

/// Hop distance, or kUnreachable.
int graph_dist(const CommGraph& g, int a, int b);
bool is_connected(const CommGraph& g);
/// Throws std::invalid_argument on a disconnected graph.
int graph_diam(const CommGraph& g);

/// Subgraph induced on `keep`.
CommGraph induced(const CommGraph& g, const std::vector<int>& keep);
/// Node sets of the connected components, in node order.
std::vector<std::vector<int>> components(const CommGraph& g);

/// Pairwise componentwise intersection of hypotheses, contradictions dropped.
OccupancyEstimate merge(const OccupancyEstimate& x1, const OccupancyEstimate& x2,
                        double areaTol = geo::kDefaultAreaTol);

using NodeStates = std::map<int, OccupancyEstimate>;

/// Every node folds its own state with its one-hop neighbors' states.
NodeStates round_step(const CommGraph& g, const NodeStates& states, double areaTol = geo::kDefaultAreaTol);

/// Left fold of merge over all estimates.
OccupancyEstimate centralized(const std::vector<OccupancyEstimate>& states, double areaTol = geo::kDefaultAreaTol);

struct ConsensusRun {
    std::vector<NodeStates> rounds;  // rounds[0] holds the initial states
    int diam = 0;
    OccupancyEstimate centralizedState;
    bool agreesWithCentralized = false;

    const NodeStates& final_states() const { return rounds.back(); }
};

/// Runs diam(g) rounds (at most maxRounds) and compares every node with the centralized fold.
ConsensusRun run_consensus(const CommGraph& g, const NodeStates& initial, int maxRounds,
                           double areaTol = geo::kDefaultAreaTol);

}  // namespace rids::consensus
