/**
 * @file protocol.hpp
 * @brief Cooperation-protocol data model and the sampled hybrid simulation loop.
 */
#pragma once

#include "rids/geometry.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rids {

using StateId = int;
using EventId = int;  // zero-based; event e^{j+1} has id j
using Bits = std::vector<bool>;
using EventSet = std::set<EventId>;
using StateSet = std::set<StateId>;

/// Raised when a protocol's conditions fail to select a unique next state.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AgentConfig {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // wrapped to (-pi, pi]
    double v = 0.0;

    geo::Vec2 pos() const { return {x, y}; }
};

double wrap_angle(double a);

/// Detector condition as zero-based index sets over encoder bits and lambda predicates.
struct DetectorCondition {
    std::vector<int> gamma;
    std::vector<int> rho;
    std::vector<int> mu;
    std::vector<int> nu;
};

/// Lane context for lambda predicates that refer to the lane at maneuver start.
/// With no mode set (monitor side) every anchored predicate is evaluated.
struct Latch {
    std::optional<int> anchor;
    std::optional<StateId> mode;

    bool operator==(const Latch&) const = default;
};

struct Control {
    double a = 0.0;
    double omega = 0.0;
};

struct ProtocolSpec {
    std::string name;
    int kappa = 0;
    int lambdaCount = 0;
    std::vector<std::string> stateNames;
    std::vector<DetectorCondition> events;
    /// Partial table: the events enabled at a state are those with an entry.
    std::map<std::pair<StateId, EventId>, StateId> transitions;
    StateId initialState = 0;

    std::function<std::vector<geo::Region>(const AgentConfig&)> topologies;
    std::function<bool(int, const AgentConfig&, const Latch&)> lambda;
    std::function<Control(const AgentConfig&, StateId)> decoder;
    /// Optional exact solution of the controlled dynamics; RK4 is used otherwise.
    std::function<AgentConfig(const AgentConfig&, StateId, double)> closedForm;
    std::function<geo::Region(const AgentConfig&, const std::vector<AgentConfig>&)> visibility;
    /// Latch kept by the agent itself after moving from one state to another.
    std::function<Latch(const Latch&, StateId, StateId, const AgentConfig&)> latchUpdate;
    /// Latch a monitor reconstructs from the target's previous measured configuration.
    std::function<Latch(const AgentConfig&)> monitorLatch;

    int state_count() const { return static_cast<int>(stateNames.size()); }
    int event_count() const { return static_cast<int>(events.size()); }
    StateId state_id(const std::string& name) const;
    StateSet all_states() const;
};

/// Bit k is set iff some neighbor lies in topology k of q.
Bits encode(const ProtocolSpec& spec, const AgentConfig& q, const std::vector<AgentConfig>& neighbors);

bool condition_holds(const ProtocolSpec& spec, const DetectorCondition& c, const Bits& s, const AgentConfig& q,
                     const Latch& latch);

/// All events whose condition holds; restricted to the events enabled at
/// `enabledAt` when given.
EventSet detect_events(const ProtocolSpec& spec, const Bits& s, const AgentConfig& q, const Latch& latch,
                       std::optional<StateId> enabledAt = std::nullopt);

/// Targets reachable from sigma under any event of the set that has a table entry.
StateSet successors(const ProtocolSpec& spec, StateId sigma, const EventSet& events);

/// Deterministic step. Events without a table entry at sigma are ignored; the
/// remaining ones must exist and agree on a single target.
StateId automaton_step(const ProtocolSpec& spec, StateId sigma, const EventSet& events);

/// Unicycle vector field (v cos th, v sin th, omega, a) under the decoder of sigma;
/// speed is floored at zero.
AgentConfig vector_field(const ProtocolSpec& spec, const AgentConfig& q, StateId sigma);

/// Fixed-step RK4 with the given number of substeps, speed clamped at zero.
AgentConfig integrate_rk4(const ProtocolSpec& spec, const AgentConfig& q, StateId sigma, double dt, int substeps);

inline constexpr int kRk4Substeps = 64;

AgentConfig flow(const ProtocolSpec& spec, const AgentConfig& q, StateId sigma, double dt);

/// One ghost interval: while active, the agent's neighbor set is replaced by a
/// single fabricated neighbor at `offset` from itself, or by nothing.
struct GhostEntry {
    double from = 0.0;
    std::optional<double> to;
    std::optional<geo::Vec2> offset;
};

struct GhostSchedule {
    std::vector<GhostEntry> entries;

    /// Fabricated neighbor set at time t, or nullopt when no entry is active.
    std::optional<std::vector<AgentConfig>> active(double t, const AgentConfig& self) const;
};

struct NominalBehavior {};
struct CorruptedEncoder {
    GhostSchedule ghost;
};
struct CorruptedDecoder {
    double alpha = 0.0;
    std::shared_ptr<const ProtocolSpec> flowSpec;  // dynamics used in place of the nominal ones
};
using Behavior = std::variant<NominalBehavior, CorruptedEncoder, CorruptedDecoder>;

std::string behavior_name(const Behavior& b);

struct AgentState {
    int id = 0;
    AgentConfig q;
    StateId sigma = 0;
    Latch latch;
    Behavior behavior;
};

struct WorldState {
    double time = 0.0;
    std::vector<AgentState> agents;
};

/// What one agent did at a period boundary.
struct StepInfo {
    int id = 0;
    Bits s;
    EventSet events;  // enabled events that fired
    StateId sigmaBefore = 0;
    StateId sigmaAfter = 0;
    Latch latchBefore;
    bool neighborhoodVisible = true;  // own visibility covers own neighborhood
};

struct WorldStepResult {
    WorldState world;
    std::vector<StepInfo> info;
};

/// Synchronous step: discrete update at world.time, then flow over [time, time + T].
/// `specs[i]` is the protocol of `world.agents[i]`.
WorldStepResult world_step(const WorldState& world, const std::vector<const ProtocolSpec*>& specs, double T);

}  // namespace rids
