#pragma once

#include "pqlab/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pqlab::des {

struct Customer {
    std::size_t class_index = 1; // 1-based
    std::uint64_t id = 0;
    double arrival_time = 0.0;
    std::optional<double> service_start;
    std::optional<double> departure_time;
};

enum class EventKind { Arrival, ServiceStart, Departure };

const char* to_string(EventKind kind) noexcept;

struct TraceEvent {
    double time = 0.0;
    EventKind kind = EventKind::Arrival;
    std::size_t class_index = 1; // 1-based
    std::uint64_t customer_id = 0;

    bool operator==(const TraceEvent&) const = default;
};

/// Point estimate with the half-width of a 95% confidence interval.
struct Estimate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double half_width = std::numeric_limits<double>::infinity();
    std::uint64_t observations = 0;
};

struct ClassStats {
    Estimate delay;   // waiting room only
    Estimate sojourn; // delay + service
    /// Time-average waiting-room population over the post-warm-up window.
    double mean_queue = 0.0;
    std::uint64_t arrivals = 0;
    std::uint64_t service_starts = 0;
    std::uint64_t departures = 0;
    std::uint64_t in_system_at_horizon = 0;
};

/// Steady-state estimators use batch means (32 batches) on the window after the
/// first 10% of the horizon. The sampled series is raw, from time 0.
struct SimStats {
    std::vector<ClassStats> classes;
    double warmup_end = 0.0;
    double horizon = 0.0;
    std::uint64_t seed = 0;

    /// Number of customers of each class in the system (waiting or in
    /// service) at each sample time; series[k][i] is class i+1 at sample_times[k].
    std::vector<double> sample_times;
    std::vector<std::vector<std::uint32_t>> series;

    std::uint64_t busy_periods = 0;
    double mean_busy_period = 0.0;

    std::vector<TraceEvent> trace;
};

struct RunOptions {
    bool record_trace = false;
    bool record_series = true;
};

inline constexpr std::size_t kBatchCount = 32;
inline constexpr double kWarmupFraction = 0.1;
/// Runs whose expected event count exceeds this are refused.
inline constexpr double kMaxExpectedEvents = 1e9;

/// One replication of the scenario. Deterministic in (spec, spec.seed).
/// Throws ValidationError for an invalid scenario and ResourceError when the
/// expected number of events exceeds kMaxExpectedEvents.
SimStats run(const ScenarioSpec& spec, const RunOptions& options = {});

/// Expected arrival plus departure events implied by the rate schedule.
double expected_events(const ScenarioSpec& spec);

struct ReplicatedEstimate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::infinity();
    double half_width = std::numeric_limits<double>::infinity(); // 95%, Student t
};

struct ReplicatedClassStats {
    ReplicatedEstimate delay;
    ReplicatedEstimate sojourn;
    ReplicatedEstimate queue;
};

struct ReplicatedStats {
    std::size_t replications = 0;
    std::vector<ReplicatedClassStats> classes;
};

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t index) noexcept;

/// Independent replications with seeds derived from spec.seed; estimates are
/// across-replication means and standard errors. `threads` = 0 uses the
/// hardware concurrency. Requires n_reps >= 2.
ReplicatedStats replicate(const ScenarioSpec& spec, std::size_t n_reps, unsigned threads = 0);

struct SweepRow {
    double epsilon = 0.0;
    std::vector<double> scaled_delay;    // epsilon * mean delay
    std::vector<double> scaled_delay_se; // epsilon * standard error
    std::vector<double> limit;           // heavy-traffic limit of epsilon * W
};

/// Heavy-traffic sweep of an accumulating-priority scenario: for each epsilon the
/// last class's rate becomes 1 - (lambda_1 + ... + lambda_N) - epsilon and the
/// scenario is replicated n_reps times.
std::vector<SweepRow> epsilon_sweep(const ScenarioSpec& base, const std::vector<double>& epsilons,
                                    std::size_t n_reps, unsigned threads = 0);

void write_summary_csv(std::ostream& out, const SimStats& stats);
void write_series_csv(std::ostream& out, const SimStats& stats);
void write_trace_csv(std::ostream& out, const SimStats& stats);
void write_replicated_csv(std::ostream& out, const ReplicatedStats& stats);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace pqlab::des
