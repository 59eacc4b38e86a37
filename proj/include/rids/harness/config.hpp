/**
 * @file config.hpp
 * @brief Scenario configuration: schema, defaults and validation.
 */
#pragma once

#include "rids/monitor.hpp"
#include "rids/scenarios.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rids::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Warehouse, Highway };

struct AgentSpec {
    int id = 0;
    AgentConfig q;
    std::optional<std::string> sigma;  // protocol initial state when absent
    std::string behavior = "nominal";  // nominal | corrupted-encoder | corrupted-decoder
    GhostSchedule ghost;
    double alpha = 0.0;
    double vMax = 0.0;  // highway only
};

struct MonitorSpec {
    int monitor = 0;
    int target = 0;
    double epsilon = 0.05;
    double epsilonMin = 0.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioKind kind = ScenarioKind::Warehouse;
    scenarios::WarehouseParams warehouse;
    scenarios::HighwayParams highway;
    std::vector<AgentSpec> agents;
    std::vector<MonitorSpec> monitors;
    /// Monitor communication edges; absent means every pair of monitors talks.
    std::optional<std::vector<std::pair<int, int>>> commGraph;
    double period = 0.5;
    int horizon = 10;
    double noiseBound = 0.0;
    std::uint64_t seed = 1;
    bool occlusion = false;
    monitor::NormWeights weights;
};

/// Slack added to the noise bound when checking monitor tolerances.
inline constexpr double kIntegrationBudget = 1e-6;

/// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& cfg);

ScenarioConfig parse_scenario(const std::string& jsonText);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace rids::harness
