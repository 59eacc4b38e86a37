/**
 * @file render.hpp
 * @brief SVG frames of monitor estimates.
 */
#pragma once

#include "rids/harness/runner.hpp"

#include <string>

namespace rids::harness {

/// One frame: agents, the target's neighborhood, required (red) and known-free
/// hidden (green) areas per hypothesis, and a verdict-colored ring on the target.
std::string render_monitor_svg(const PeriodRecord& rec, const MonitorRecord& mon);

/// Writes one SVG per period per monitor; returns the number of files written.
int render_frames(const std::vector<PeriodRecord>& trace, const std::string& outDir);

}  // namespace rids::harness
