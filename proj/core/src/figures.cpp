#include "pqlab/figures.hpp"

namespace pqlab::figures {

SystemSpec heavy_traffic_system(double epsilon) {
    SystemSpec s;
    s.classes = {{1.0 / 3.0, 3.0}, {1.0 / 3.0, 2.0}, {1.0 / 3.0 - epsilon, 1.0}};
    return s;
}

namespace {

ScenarioSpec base(PolicySpec p, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.system = heavy_traffic_system();
    spec.policy_schedule = {{0.0, std::move(p)}};
    spec.horizon = kHorizon;
    spec.seed = seed;
    spec.sample_interval = kSampleInterval;
    return spec;
}

} // namespace

ScenarioSpec accumulating_heavy_traffic() { return base(policy::Accumulating{}, 20200101); }

ScenarioSpec static_heavy_traffic() { return base(policy::Static{}, 20200102); }

ScenarioSpec scaled_heavy_traffic() {
    return base(policy::ScaledAccumulating{kEpsilon, {3.0, 2.0}, 1}, 20200103);
}

ScenarioSpec policy_switch() {
    ScenarioSpec spec;
    spec.system = heavy_traffic_system();
    const double third = 1.0 / 3.0;
    const double quarter = kSwitchHorizon / 4.0;
    spec.rate_schedule = {{0.0, {third, third, third - kLightTrafficGap}},
                          {quarter, {third, third, third - kEpsilon}}};
    spec.policy_schedule = {{0.0, policy::Accumulating{}}, {2.0 * quarter, policy::Static{}}};
    spec.horizon = kSwitchHorizon;
    spec.seed = 20200104;
    spec.sample_interval = kSwitchSampleInterval;
    return spec;
}

std::vector<CannedFigure> canned() {
    return {
        {"fig1_accumulating", "accumulating priority, epsilon = 0.001", accumulating_heavy_traffic()},
        {"fig2_static", "static priority, epsilon = 0.001", static_heavy_traffic()},
        {"fig3_scaled", "accumulation rates c_i / epsilon with static tail, epsilon = 0.001",
         scaled_heavy_traffic()},
        {"fig4_switch", "light AP, heavy AP, then static priority", policy_switch()},
    };
}

} // namespace pqlab::figures
