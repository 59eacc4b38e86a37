/**
 * @file trace.hpp
 * @brief JSON encoding of regions, estimates and per-period trace records.
 */
#pragma once

#include "rids/harness/runner.hpp"

#include <json.hpp>

namespace rids::harness {

nlohmann::json region_to_json(const geo::Region& r);
geo::Region region_from_json(const nlohmann::json& j);

nlohmann::json estimate_to_json(const monitor::OccupancyEstimate& e);
monitor::OccupancyEstimate estimate_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const PeriodRecord& rec, const Simulation& sim);

}  // namespace rids::harness
