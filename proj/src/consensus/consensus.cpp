#include "rids/consensus.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace rids::consensus {

using monitor::OccupancyHypothesis;
using monitor::TopologyOccupancy;

std::vector<int> CommGraph::neighbors(int node) const {
    std::vector<int> out;
    for (const auto& [a, b] : edges) {
        if (a == node && b != node) out.push_back(b);
        if (b == node && a != node) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool CommGraph::has_node(int node) const { return std::find(nodes.begin(), nodes.end(), node) != nodes.end(); }

namespace {

std::map<int, int> bfs(const CommGraph& g, int src) {
    std::map<int, int> dist{{src, 0}};
    std::deque<int> queue{src};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int w : g.neighbors(u)) {
            if (dist.contains(w)) continue;
            dist[w] = dist[u] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

}  // namespace

int graph_dist(const CommGraph& g, int a, int b) {
    if (!g.has_node(a) || !g.has_node(b)) throw std::invalid_argument("graph_dist: unknown node");
    const auto d = bfs(g, a);
    auto it = d.find(b);
    return it == d.end() ? kUnreachable : it->second;
}

bool is_connected(const CommGraph& g) {
    if (g.nodes.empty()) return true;
    return bfs(g, g.nodes.front()).size() == std::set<int>(g.nodes.begin(), g.nodes.end()).size();
}

int graph_diam(const CommGraph& g) {
    if (!is_connected(g)) throw std::invalid_argument("graph_diam: graph is disconnected");
    int diam = 0;
    for (int n : g.nodes) {
        for (const auto& [node, d] : bfs(g, n)) diam = std::max(diam, d);
    }
    return diam;
}

CommGraph induced(const CommGraph& g, const std::vector<int>& keep) {
    CommGraph out;
    out.nodes = keep;
    auto in = [&](int n) { return std::find(keep.begin(), keep.end(), n) != keep.end(); };
    for (const auto& e : g.edges) {
        if (in(e.first) && in(e.second)) out.edges.push_back(e);
    }
    return out;
}

std::vector<std::vector<int>> components(const CommGraph& g) {
    std::vector<std::vector<int>> out;
    std::set<int> seen;
    for (int n : g.nodes) {
        if (seen.contains(n)) continue;
        std::vector<int> comp;
        for (const auto& [node, d] : bfs(g, n)) {
            comp.push_back(node);
            seen.insert(node);
        }
        out.push_back(std::move(comp));
    }
    return out;
}

OccupancyEstimate merge(const OccupancyEstimate& x1, const OccupancyEstimate& x2, double areaTol) {
    if (x1.kappa != x2.kappa) throw std::invalid_argument("merge: estimates have different kappa");
    OccupancyEstimate out;
    out.kappa = x1.kappa;
    for (const OccupancyHypothesis& a : x1.hypotheses) {
        for (const OccupancyHypothesis& b : x2.hypotheses) {
            OccupancyHypothesis h;
            bool dead = false;
            for (int k = 0; k < x1.kappa && !dead; ++k) {
                TopologyOccupancy t;
                t.presenceRequired = a.perTopology[k].presenceRequired || b.perTopology[k].presenceRequired;
                t.region = geo::intersect(a.perTopology[k].region, b.perTopology[k].region);
                dead = t.presenceRequired && geo::is_empty(t.region, areaTol);
                h.perTopology.push_back(std::move(t));
            }
            if (!dead) out.hypotheses.push_back(std::move(h));
        }
    }
    return monitor::normalize(std::move(out), areaTol);
}

NodeStates round_step(const CommGraph& g, const NodeStates& states, double areaTol) {
    NodeStates next;
    for (int n : g.nodes) {
        OccupancyEstimate x = states.at(n);
        for (int w : g.neighbors(n)) x = merge(x, states.at(w), areaTol);
        next[n] = std::move(x);
    }
    return next;
}

OccupancyEstimate centralized(const std::vector<OccupancyEstimate>& states, double areaTol) {
    if (states.empty()) throw std::invalid_argument("centralized: no estimates");
    OccupancyEstimate x = monitor::normalize(states.front(), areaTol);
    for (std::size_t i = 1; i < states.size(); ++i) x = merge(x, states[i], areaTol);
    return x;
}

ConsensusRun run_consensus(const CommGraph& g, const NodeStates& initial, int maxRounds, double areaTol) {
    if (!is_connected(g)) throw std::invalid_argument("run_consensus: graph is disconnected");
    ConsensusRun run;
    run.diam = graph_diam(g);
    if (maxRounds < run.diam) throw std::invalid_argument("run_consensus: maxRounds below graph diameter");
    for (int n : g.nodes) {
        if (!initial.contains(n)) throw std::invalid_argument("run_consensus: missing initial state");
    }
    run.rounds.push_back(initial);
    for (int k = 0; k < run.diam; ++k) run.rounds.push_back(round_step(g, run.rounds.back(), areaTol));

    std::vector<OccupancyEstimate> all;
    for (int n : g.nodes) all.push_back(initial.at(n));
    run.centralizedState = centralized(all, areaTol);
    run.agreesWithCentralized = true;
    for (const auto& [node, x] : run.final_states()) {
        if (!monitor::estimate_equal(x, run.centralizedState, areaTol)) run.agreesWithCentralized = false;
    }
    return run;
}

}  // namespace rids::consensus
