#pragma once

#include "pqlab/model.hpp"

#include <string>
#include <vector>

namespace pqlab::figures {

/// Three classes with lambda = (1/3, 1/3, 1/3 - epsilon) and b = (3, 2, 1).
inline constexpr double kEpsilon = 1e-3;
inline constexpr double kHorizon = 1e6;
inline constexpr double kSampleInterval = 100.0;

/// Surge-and-switch run: light-traffic AP for the first quarter, heavy-traffic
/// AP for the second, static priority for the second half.
inline constexpr double kSwitchHorizon = 4e6;
inline constexpr double kSwitchSampleInterval = 400.0;
inline constexpr double kLightTrafficGap = 0.3; // lambda_3 = 1/3 - 0.3 in phase one

SystemSpec heavy_traffic_system(double epsilon = kEpsilon);

ScenarioSpec accumulating_heavy_traffic();
ScenarioSpec static_heavy_traffic();
/// b_i = c_i / epsilon on classes 1-2 with c = (3, 2); class 3 keeps b_3 = 1.
ScenarioSpec scaled_heavy_traffic();
ScenarioSpec policy_switch();

struct CannedFigure {
    std::string name; // output subdirectory
    std::string title;
    ScenarioSpec scenario;
};

std::vector<CannedFigure> canned();

} // namespace pqlab::figures
