/**
 * @file scenarios.hpp
 * @brief Warehouse and highway protocol builders and the two attack models.
 */
#pragma once

#include "rids/protocol.hpp"

namespace rids::scenarios {

// Warehouse forklifts ---------------------------------------------------------

enum WarehouseState : StateId { ACC = 0, DEC = 1 };

struct WarehouseParams {
    double d = 3.0;      // safety distance (m)
    double R = 8.0;      // camera range (m)
    double vMax = 1.5;   // m/s
    double mu = 0.5;     // speed-loop gain (1/s)
    double T = 0.5;      // observation period (s)
    int arcSegments = geo::kDefaultArcSegments;
};

void validate(const WarehouseParams& p);

ProtocolSpec build_warehouse(const WarehouseParams& p);

/// Exact solution of the forklift dynamics. `accGain` replaces mu under ACC.
AgentConfig warehouse_flow(const AgentConfig& q, StateId sigma, double dt, double accGain, double decGain,
                           double vMax);

// Highway cars ---------------------------------------------------------------

enum HighwayState : StateId { FAST = 0, SLOW = 1, LEFT = 2, RIGHT = 3 };

struct HighwayParams {
    int lanes = 3;
    double laneWidth = 3.5;
    double dF = 25.0;
    double dB = 15.0;
    double aBar = 2.0;
    double omegaBar = 0.3;
    double thetaMax = 0.3;
    double mu = 2.0;
    double R = 60.0;
    std::vector<double> vMaxPerAgent;
    bool occlusion = false;
    double carLength = 4.5;
    double carWidth = 1.8;
    int arcSegments = geo::kDefaultArcSegments;
};

void validate(const HighwayParams& p);

/// Protocol of the car with speed limit vMax.
ProtocolSpec build_highway(const HighwayParams& p, double vMax);

/// Protocol of agent `agentIndex`, using its entry of vMaxPerAgent.
ProtocolSpec build_highway(const HighwayParams& p, std::size_t agentIndex);

int lane_of(double y, double laneWidth);

/// sin(theta)/theta, continuous through zero.
double sinc(double theta);

/// Lane-centering turn rate ((y* - y) sin(th)/th - mu th) v.
double centering_rate(double yStar, double y, double theta, double v, double mu);

/// Conservative shadow cast by a car footprint, seen from `observer`, out to range R.
geo::Region car_shadow(geo::Vec2 observer, const AgentConfig& car, double length, double width, double R);

/// Car point visibility: inside the range disc and outside every other car's shadow.
bool car_visible(const HighwayParams& p, const AgentConfig& observer, const AgentConfig& target,
                 const std::vector<AgentConfig>& others);

// Attack models ----------------------------------------------------------------

Behavior corrupted_encoder(GhostSchedule ghost);

/// ACC gain scaled by (1 - alpha); DEC unchanged.
Behavior corrupted_decoder(const WarehouseParams& p, double alpha);

struct EpsilonBound {
    double acc = 0.0;  // gap to the nominal ACC branch, mu |v - vMax| T alpha
    double dec = 0.0;  // gap to the DEC branch, mu T vMax - mu |v - vMax| T alpha

    double limit() const { return acc < dec ? acc : dec; }
};

EpsilonBound epsilon_bound(double alpha, double vTk, const WarehouseParams& p);

}  // namespace rids::scenarios
