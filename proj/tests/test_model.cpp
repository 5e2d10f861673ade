#include "pqlab/figures.hpp"
#include "pqlab/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

using namespace pqlab;

namespace {

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
    return std::any_of(errors.begin(), errors.end(),
                       [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

} // namespace

TEST(Validate, AcceptsHeavyTrafficThreeClassSystem) {
    ScenarioSpec spec = figures::accumulating_heavy_traffic();
    EXPECT_TRUE(validate(spec).empty());
    EXPECT_DOUBLE_EQ(spec.system.classes[2].arrival_rate, 1.0 / 3.0 - 0.001);
}

TEST(Validate, RejectsEqualAccumulationRates) {
    ScenarioSpec spec = figures::accumulating_heavy_traffic();
    spec.system.classes = {{0.2, 1.0}, {0.2, 1.0}};
    EXPECT_TRUE(mentions(validate(spec), "accumulation rates not strictly decreasing"));
}

TEST(Validate, RejectsDuplicateScheduleTimes) {
    ScenarioSpec spec = figures::accumulating_heavy_traffic();
    spec.policy_schedule = {{0.0, policy::Accumulating{}}, {5.0, policy::Static{}},
                            {5.0, policy::Accumulating{}}};
    EXPECT_TRUE(mentions(validate(spec), "schedule times not strictly increasing"));
}

TEST(Validate, RejectsScheduleNotStartingAtZero) {
    ScenarioSpec spec = figures::policy_switch();
    spec.rate_schedule.front().start = 1.0;
    EXPECT_TRUE(mentions(validate(spec), "start at time 0"));
}

TEST(Validate, CannedScenariosAreValid) {
    for (const auto& fig : figures::canned()) EXPECT_TRUE(validate(fig.scenario).empty()) << fig.name;
}

// Corrupting any single field of a valid scenario outside its domain must be
// reported.
TEST(Validate, SingleFieldCorruptionIsAlwaysRejected) {
    using Mutation = std::function<void(ScenarioSpec&)>;
    const double nan = std::nan("");
    const std::vector<Mutation> mutations = {
        [](ScenarioSpec& s) { s.system.classes[0].arrival_rate = -0.1; },
        [&](ScenarioSpec& s) { s.system.classes[1].arrival_rate = nan; },
        [](ScenarioSpec& s) { s.system.classes[2].accumulation_rate = 0.0; },
        [](ScenarioSpec& s) { s.system.classes[1].accumulation_rate = 5.0; },
        [](ScenarioSpec& s) { s.system.service_rate = 0.0; },
        [](ScenarioSpec& s) { s.horizon = -1.0; },
        [](ScenarioSpec& s) { s.sample_interval = 0.0; },
        [](ScenarioSpec& s) { s.policy_schedule.clear(); },
        [](ScenarioSpec& s) { s.policy_schedule.front().start = 2.0; },
        [](ScenarioSpec& s) { s.policy_schedule.back().start = s.horizon; },
        [](ScenarioSpec& s) { s.rate_schedule.back().arrival_rates.pop_back(); },
        [](ScenarioSpec& s) { s.rate_schedule.back().arrival_rates[0] = -1.0; },
        [](ScenarioSpec& s) { s.rate_schedule.back().start = -1.0; },
        [](ScenarioSpec& s) { s.system.classes.clear(); },
        [](ScenarioSpec& s) {
            s.policy_schedule.front().policy = policy::ScaledAccumulating{0.0, {3.0, 2.0}, 1};
        },
        [](ScenarioSpec& s) {
            s.policy_schedule.front().policy = policy::ScaledAccumulating{0.1, {3.0, -2.0}, 1};
        },
        [](ScenarioSpec& s) {
            s.policy_schedule.front().policy = policy::ScaledAccumulating{0.1, {3.0, 2.0}, 0};
        },
        [](ScenarioSpec& s) { s.policy_schedule.front().policy = policy::HybridLex{4}; },
    };
    std::vector<ScenarioSpec> bases;
    for (const auto& fig : figures::canned()) bases.push_back(fig.scenario);
    bases.push_back(figures::policy_switch());
    for (const auto& base : bases) {
        ASSERT_TRUE(validate(base).empty());
        for (std::size_t m = 0; m < mutations.size(); ++m) {
            ScenarioSpec s = base;
            if (s.rate_schedule.empty()) s.rate_schedule = {{0.0, s.system.arrival_rates()}};
            ASSERT_TRUE(validate(s).empty());
            mutations[m](s);
            EXPECT_FALSE(validate(s).empty()) << "mutation " << m << " accepted";
        }
    }
}

TEST(SystemSpec, LoadIsSumOfRatesOverServiceRate) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        SystemSpec s;
        s.service_rate = 0.5 + u(gen);
        double total = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double l = u(gen);
            total += l;
            s.classes.push_back({l, 4.0 - i});
        }
        EXPECT_EQ(s.load(), total / s.service_rate);
    }
}

TEST(Policy, ScaledRatesDivideLeadingClassesByEpsilon) {
    const SystemSpec s = figures::heavy_traffic_system();
    const auto rates = effective_rates(s, policy::ScaledAccumulating{0.001, {3.0, 2.0}, 1});
    ASSERT_EQ(rates.size(), 3u);
    EXPECT_DOUBLE_EQ(rates[0], 3000.0);
    EXPECT_DOUBLE_EQ(rates[1], 2000.0);
    EXPECT_DOUBLE_EQ(rates[2], 1.0);

    const auto two_tail = effective_rates(s, policy::ScaledAccumulating{0.5, {3.0, 2.0, 1.0}, 2});
    EXPECT_DOUBLE_EQ(two_tail[0], 6.0);
    EXPECT_DOUBLE_EQ(two_tail[1], 2.0);
    EXPECT_DOUBLE_EQ(two_tail[2], 1.0);
}

TEST(Schedule, StepFunctionsAreRightContinuous) {
    const ScenarioSpec spec = figures::policy_switch();
    const double quarter = spec.horizon / 4;
    EXPECT_DOUBLE_EQ(spec.rates_at(quarter - 1e-9)[2], 1.0 / 3.0 - 0.3);
    EXPECT_DOUBLE_EQ(spec.rates_at(quarter)[2], 1.0 / 3.0 - 0.001);
    EXPECT_TRUE(std::holds_alternative<policy::Accumulating>(spec.policy_at(2 * quarter - 1.0)));
    EXPECT_TRUE(std::holds_alternative<policy::Static>(spec.policy_at(2 * quarter)));
}
