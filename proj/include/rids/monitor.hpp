/**
 * @file monitor.hpp
 * @brief Local set-valued monitor of one target agent.
 *
 * A monitor alternates predict (at t_k, from what it sees) and update (at
 * t_{k+1}, from the new measurement of the target). Each update yields the
 * set of discrete states that explain the observed motion, the encoder values
 * compatible with them, and an occupancy estimate of the hidden part of the
 * target's neighborhood.
 */
#pragma once

#include "rids/protocol.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace rids::monitor {

using BitSet = std::set<int>;  // subset of {0, 1}

/// Raised for hidden-presence inputs where the posterior lies below the prior.
class InconsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct NormWeights {
    double theta = 1.0;  // m/rad
    double v = 1.0;      // s
};

/// Weighted Euclidean distance over (x, y, theta, v), theta difference wrapped.
double config_distance(const AgentConfig& a, const AgentConfig& b, const NormWeights& w);

struct MonitorParams {
    double epsilon = 0.05;
    double epsilonMin = 0.0;
    NormWeights weights;
    double areaTol = geo::kDefaultAreaTol;
};

/// Half-width of the square used to inflate a visible neighbor's position.
double inflation_half_width(const MonitorParams& p);

struct LedgerEntry {
    AgentConfig endpoint;  // predicted configuration at t_{k+1}
    StateId sigma = 0;
};

struct MonitorState {
    int targetId = 0;
    MonitorParams params;
    double tk = 0.0;
    AgentConfig qBar;                  // measured at t_k
    std::optional<AgentConfig> qPrev;  // measured at t_{k-1}
    StateSet preSet;                   // posterior of the previous period; all states at start
    bool detected = false;             // sticky

    // Filled by predict.
    bool predicted = false;
    Latch latch;
    Bits v;
    Bits sHatPrior;
    EventSet eventsHat;
    StateSet sigmaHat;
    std::vector<LedgerEntry> ledger;
    std::vector<geo::Region> eta;
    geo::Region Vh;
    std::vector<AgentConfig> visible;
};

MonitorState make_monitor(const ProtocolSpec& spec, int targetId, const AgentConfig& qBar0, double t0,
                          const MonitorParams& params);

Bits topology_check(const ProtocolSpec& spec, const AgentConfig& qBar, const geo::Region& Vh,
                    double areaTol = geo::kDefaultAreaTol);

Bits restricted_encoder(const ProtocolSpec& spec, const AgentConfig& qBar, const std::vector<AgentConfig>& visible);

/// Smallest event set compatible with the visible part of the neighborhood.
EventSet event_estimate(const ProtocolSpec& spec, const Bits& sTilde, const Bits& v, const AgentConfig& qBar,
                        const Latch& latch);

StateSet nondet_automaton_step(const ProtocolSpec& spec, const StateSet& sigmaHat, const EventSet& eventsHat);

MonitorState predict(const ProtocolSpec& spec, const MonitorState& state, const std::vector<AgentConfig>& visible,
                     const geo::Region& Vh, double T);

struct UpdateResult {
    StateSet posterior;
    std::vector<Bits> sPosterior;
    bool detection = false;
};

struct UpdateOutcome {
    MonitorState state;
    UpdateResult result;
};

UpdateOutcome update(const ProtocolSpec& spec, const MonitorState& state, const AgentConfig& qBarNext, double tNext);

BitSet hidden_presence(int sPriorBit, const BitSet& sPosteriorBits);

/// Per-topology hidden-presence sets from the a-priori bits and the posterior encoder set.
std::vector<BitSet> hidden_presence_all(const Bits& sPrior, const std::vector<Bits>& sPosterior);

struct TopologyOccupancy {
    geo::Region region;
    bool presenceRequired = false;
};

struct OccupancyHypothesis {
    std::vector<TopologyOccupancy> perTopology;
};

struct OccupancyEstimate {
    int kappa = 0;
    std::vector<OccupancyHypothesis> hypotheses;
};

bool contradictory(const OccupancyHypothesis& h, double areaTol = geo::kDefaultAreaTol);

/// h describes no more worlds than g: every region of h lies in g's, and g's
/// required presences are required by h too.
bool subsumed_by(const OccupancyHypothesis& h, const OccupancyHypothesis& g, double areaTol = geo::kDefaultAreaTol);

/// Drops contradictory hypotheses and keeps only maximal ones (one per equality class).
OccupancyEstimate normalize(OccupancyEstimate est, double areaTol = geo::kDefaultAreaTol);

bool hypothesis_equal(const OccupancyHypothesis& a, const OccupancyHypothesis& b,
                      double areaTol = geo::kDefaultAreaTol);
bool estimate_equal(const OccupancyEstimate& a, const OccupancyEstimate& b, double areaTol = geo::kDefaultAreaTol);

/// Union of squares of half-width h around each position.
geo::Region inflate(const std::vector<AgentConfig>& visible, double h);

OccupancyEstimate occupancy_estimate(const ProtocolSpec& spec, const AgentConfig& qBar,
                                     const geo::Region& visibleInflated, const geo::Region& Vh,
                                     const std::vector<BitSet>& pHat, double areaTol = geo::kDefaultAreaTol);

/// True iff the given neighbor positions form a world the hypothesis admits.
bool world_consistent(const OccupancyHypothesis& h, const std::vector<geo::Region>& eta,
                      const std::vector<AgentConfig>& neighbors);

enum class Verdict { Cooperative, Uncertain, Uncooperative };

const char* verdict_name(Verdict v);

Verdict classify(const OccupancyEstimate& est, bool detection);

}  // namespace rids::monitor
