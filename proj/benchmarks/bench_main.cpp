#include "pqlab/analytic.hpp"
#include "pqlab/des.hpp"
#include "pqlab/figures.hpp"
#include "pqlab/fluid.hpp"

#include <benchmark/benchmark.h>

using namespace pqlab;

namespace {

ScenarioSpec heavy(PolicySpec p, double horizon) {
    ScenarioSpec s;
    s.system = figures::heavy_traffic_system(0.01);
    s.policy_schedule = {{0.0, std::move(p)}};
    s.horizon = horizon;
    s.seed = 1;
    s.sample_interval = 100;
    return s;
}

void BM_SimulateStatic(benchmark::State& state) {
    const auto spec = heavy(policy::Static{}, static_cast<double>(state.range(0)));
    std::uint64_t events = 0;
    for (auto _ : state) {
        const auto stats = des::run(spec);
        for (const auto& c : stats.classes) events += c.arrivals + c.departures;
        benchmark::DoNotOptimize(stats.classes.data());
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateStatic)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_SimulateAccumulating(benchmark::State& state) {
    const auto spec = heavy(policy::Accumulating{}, static_cast<double>(state.range(0)));
    std::uint64_t events = 0;
    for (auto _ : state) {
        const auto stats = des::run(spec);
        for (const auto& c : stats.classes) events += c.arrivals + c.departures;
        benchmark::DoNotOptimize(stats.classes.data());
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateAccumulating)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_FluidAccumulating(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    SystemSpec s;
    std::vector<double> levels(n);
    // Overloaded, but removing any one class leaves a stable system.
    const double rho = 1.0 + 0.5 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.classes.push_back({rho / static_cast<double>(n), static_cast<double>(n - i)});
        levels[i] = static_cast<double>(i % 3);
    }
    for (auto _ : state) benchmark::DoNotOptimize(fluid::ap_fluid_trajectory(s, levels, 100).breakpoints.size());
}
BENCHMARK(BM_FluidAccumulating)->Arg(3)->Arg(10)->Arg(50);

void BM_Kleinrock(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    SystemSpec s;
    for (std::size_t i = 0; i < n; ++i) s.classes.push_back({0.9 / static_cast<double>(n), static_cast<double>(n - i)});
    for (auto _ : state) benchmark::DoNotOptimize(analytic::ap_expected_waits(s).expected_delay.data());
}
BENCHMARK(BM_Kleinrock)->Arg(3)->Arg(100);

} // namespace
BENCHMARK_MAIN();
