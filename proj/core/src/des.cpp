#include "pqlab/des.hpp"

#include "pqlab/analytic.hpp"
#include "pqlab/csv.hpp"
#include "pqlab/error.hpp"
#include "pqlab/random.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

namespace pqlab::des {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double t_quantile_975(std::size_t dof) {
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

class BatchMeans {
public:
    BatchMeans(double start, double end) : start_(start), width_((end - start) / kBatchCount) {}

    void add(double at, double value) {
        if (at < start_) return;
        auto k = static_cast<std::size_t>((at - start_) / width_);
        k = std::min(k, kBatchCount - 1);
        sums_[k] += value;
        ++counts_[k];
    }

    Estimate estimate() const {
        Estimate e;
        double total = 0.0;
        std::uint64_t count = 0;
        std::vector<double> means;
        for (std::size_t k = 0; k < kBatchCount; ++k) {
            total += sums_[k];
            count += counts_[k];
            if (counts_[k] > 0) means.push_back(sums_[k] / static_cast<double>(counts_[k]));
        }
        e.observations = count;
        if (count == 0) return e;
        e.mean = total / static_cast<double>(count);
        if (means.size() < 2) return e;
        const double m = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
        double ss = 0.0;
        for (double x : means) ss += (x - m) * (x - m);
        const double sd = std::sqrt(ss / (means.size() - 1));
        e.half_width = t_quantile_975(means.size() - 1) * sd / std::sqrt(double(means.size()));
        return e;
    }

private:
    double start_;
    double width_;
    std::array<double, kBatchCount> sums_{};
    std::array<std::uint64_t, kBatchCount> counts_{};
};

struct Waiting {
    double arrival_time;
    std::uint64_t id;
};

enum class Rule { Static, Accumulating, Hybrid };

struct ActivePolicy {
    Rule rule = Rule::Static;
    std::vector<double> rates;
    std::size_t static_prefix = 0;
};

ActivePolicy compile(const SystemSpec& system, const PolicySpec& p) {
    ActivePolicy out;
    out.rates = effective_rates(system, p);
    if (std::holds_alternative<policy::Static>(p)) {
        out.rule = Rule::Static;
    } else if (const auto* h = std::get_if<policy::HybridLex>(&p)) {
        out.rule = Rule::Hybrid;
        out.static_prefix = h->static_prefix;
    } else {
        out.rule = Rule::Accumulating;
    }
    return out;
}

/// Class whose head-of-line customer the server takes next, or npos when the
/// waiting room is empty. Within a class accumulated priority follows arrival
/// order, so only queue heads need comparing.
std::size_t select_next(const ActivePolicy& policy, const std::vector<std::deque<Waiting>>& queues,
                        double now) {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    const std::size_t n = queues.size();
    std::size_t first_ap = 0;
    if (policy.rule == Rule::Static || policy.rule == Rule::Hybrid) {
        const std::size_t limit = policy.rule == Rule::Static ? n : policy.static_prefix;
        for (std::size_t i = 0; i < limit; ++i)
            if (!queues[i].empty()) return i;
        if (policy.rule == Rule::Static) return npos;
        first_ap = policy.static_prefix;
    }
    std::size_t best = npos;
    double best_priority = -kInf;
    double best_arrival = kInf;
    for (std::size_t i = first_ap; i < n; ++i) {
        if (queues[i].empty()) continue;
        const double arrival = queues[i].front().arrival_time;
        const double priority = policy.rates[i] * (now - arrival);
        if (priority > best_priority || (priority == best_priority && arrival < best_arrival)) {
            best = i;
            best_priority = priority;
            best_arrival = arrival;
        }
    }
    return best;
}

} // namespace

const char* to_string(EventKind kind) noexcept {
    switch (kind) {
    case EventKind::Arrival: return "arrival";
    case EventKind::ServiceStart: return "service_start";
    case EventKind::Departure: return "departure";
    }
    return "unknown";
}

double expected_events(const ScenarioSpec& spec) {
    double arrivals = 0.0;
    if (spec.rate_schedule.empty()) {
        for (const auto& c : spec.system.classes) arrivals += c.arrival_rate * spec.horizon;
    } else {
        for (std::size_t k = 0; k < spec.rate_schedule.size(); ++k) {
            const double end =
                k + 1 < spec.rate_schedule.size() ? spec.rate_schedule[k + 1].start : spec.horizon;
            const auto& r = spec.rate_schedule[k].arrival_rates;
            arrivals += std::accumulate(r.begin(), r.end(), 0.0) * (end - spec.rate_schedule[k].start);
        }
    }
    return 2.0 * arrivals;
}

SimStats run(const ScenarioSpec& spec, const RunOptions& options) {
    if (auto errs = validate(spec); !errs.empty()) throw ValidationError(errs);
    if (spec.system.service_rate != 1.0)
        throw ValidationError("simulation requires service_rate = 1");
    if (const double events = expected_events(spec); events > kMaxExpectedEvents)
        throw ResourceError("scenario implies about " + std::to_string(events) +
                            " events, above the limit of 1e9; shorten the horizon");

    const std::size_t n = spec.system.class_count();
    const double horizon = spec.horizon;

    SimStats stats;
    stats.horizon = horizon;
    stats.seed = spec.seed;
    stats.warmup_end = kWarmupFraction * horizon;
    stats.classes.resize(n);

    std::vector<BatchMeans> delay_batches(n, BatchMeans(stats.warmup_end, horizon));
    std::vector<BatchMeans> sojourn_batches(n, BatchMeans(stats.warmup_end, horizon));
    std::vector<double> queue_area(n, 0.0);

    rng::ExpStream service_rng(rng::substream(spec.seed, rng::kServiceStream));
    std::vector<rng::ExpStream> arrival_rng;
    arrival_rng.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        arrival_rng.emplace_back(rng::substream(spec.seed, rng::arrival_stream(i)));

    std::vector<ActivePolicy> policies;
    for (const auto& phase : spec.policy_schedule) policies.push_back(compile(spec.system, phase.policy));
    std::size_t policy_phase = 0;
    std::size_t rate_phase = 0;

    std::vector<double> rates = spec.rates_at(0.0);
    std::vector<double> next_arrival(n, kInf);
    auto schedule_arrival = [&](std::size_t i, double from) {
        next_arrival[i] = rates[i] > 0.0 ? from + arrival_rng[i].next(rates[i]) : kInf;
    };
    for (std::size_t i = 0; i < n; ++i) schedule_arrival(i, 0.0);

    std::vector<std::deque<Waiting>> queues(n);
    bool busy = false;
    std::size_t serving_class = 0;
    Customer in_service;
    double departure = kInf;
    double busy_start = 0.0;
    double busy_total = 0.0;
    std::uint64_t next_id = 0;

    const double dt_sample = spec.sample_interval;
    std::size_t next_sample = 0;
    auto emit_samples_before = [&](double t, bool inclusive) {
        if (!options.record_series) return;
        while (true) {
            const double g = static_cast<double>(next_sample) * dt_sample;
            if (g > horizon || g > t || (!inclusive && g == t)) break;
            std::vector<std::uint32_t> row(n);
            for (std::size_t i = 0; i < n; ++i)
                row[i] = static_cast<std::uint32_t>(queues[i].size()) +
                         (busy && serving_class == i ? 1u : 0u);
            stats.sample_times.push_back(g);
            stats.series.push_back(std::move(row));
            ++next_sample;
        }
    };

    auto trace = [&](double t, EventKind kind, std::size_t cls, std::uint64_t id) {
        if (options.record_trace) stats.trace.push_back({t, kind, cls + 1, id});
    };

    auto start_service = [&](std::size_t cls, Waiting w, double now) {
        busy = true;
        serving_class = cls;
        in_service = Customer{cls + 1, w.id, w.arrival_time, now, std::nullopt};
        const double service = service_rng.next(1.0);
        departure = now + service;
        in_service.departure_time = departure;
        auto& cs = stats.classes[cls];
        ++cs.service_starts;
        delay_batches[cls].add(now, now - w.arrival_time);
        trace(now, EventKind::ServiceStart, cls, w.id);
    };

    double now = 0.0;
    while (true) {
        const double t_rate = rate_phase + 1 < spec.rate_schedule.size()
                                  ? spec.rate_schedule[rate_phase + 1].start
                                  : kInf;
        const double t_policy = policy_phase + 1 < spec.policy_schedule.size()
                                    ? spec.policy_schedule[policy_phase + 1].start
                                    : kInf;
        std::size_t arr_class = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (next_arrival[i] < next_arrival[arr_class]) arr_class = i;
        const double t_arrival = next_arrival[arr_class];
        const double t_next = std::min({t_rate, t_policy, departure, t_arrival});
        if (t_next >= horizon) break;

        emit_samples_before(t_next, false);
        const double lo = std::max(now, stats.warmup_end);
        if (t_next > lo)
            for (std::size_t i = 0; i < n; ++i)
                queue_area[i] += static_cast<double>(queues[i].size()) * (t_next - lo);
        now = t_next;

        if (t_rate == now) {
            ++rate_phase;
            rates = spec.rate_schedule[rate_phase].arrival_rates;
            // Memoryless inter-arrival times: pending arrivals are redrawn.
            for (std::size_t i = 0; i < n; ++i) schedule_arrival(i, now);
        } else if (t_policy == now) {
            ++policy_phase;
        } else if (departure == now) {
            auto& cs = stats.classes[serving_class];
            ++cs.departures;
            sojourn_batches[serving_class].add(now, now - in_service.arrival_time);
            trace(now, EventKind::Departure, serving_class, in_service.id);
            busy = false;
            departure = kInf;
            const std::size_t next = select_next(policies[policy_phase], queues, now);
            if (next < n) {
                const Waiting w = queues[next].front();
                queues[next].pop_front();
                start_service(next, w, now);
            } else {
                ++stats.busy_periods;
                busy_total += now - busy_start;
            }
        } else {
            const std::size_t i = arr_class;
            const Waiting w{now, next_id++};
            ++stats.classes[i].arrivals;
            trace(now, EventKind::Arrival, i, w.id);
            if (!busy) {
                busy_start = now;
                start_service(i, w, now);
            } else {
                queues[i].push_back(w);
            }
            schedule_arrival(i, now);
        }
        assert(busy || std::all_of(queues.begin(), queues.end(), [](const auto& q) { return q.empty(); }));
    }

    emit_samples_before(horizon, true);
    const double lo = std::max(now, stats.warmup_end);
    for (std::size_t i = 0; i < n; ++i) {
        if (horizon > lo) queue_area[i] += static_cast<double>(queues[i].size()) * (horizon - lo);
        auto& cs = stats.classes[i];
        cs.delay = delay_batches[i].estimate();
        cs.sojourn = sojourn_batches[i].estimate();
        cs.mean_queue = queue_area[i] / (horizon - stats.warmup_end);
        cs.in_system_at_horizon = queues[i].size() + (busy && serving_class == i ? 1 : 0);
    }
    stats.mean_busy_period =
        stats.busy_periods > 0 ? busy_total / static_cast<double>(stats.busy_periods) : 0.0;
    return stats;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t index) noexcept {
    return rng::mix64(base_seed ^ rng::mix64(0x5265706c69636174ULL + index));
}

namespace {

ReplicatedEstimate across(const std::vector<double>& values) {
    ReplicatedEstimate e;
    std::vector<double> v;
    for (double x : values)
        if (std::isfinite(x)) v.push_back(x);
    if (v.empty()) return e;
    e.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    if (v.size() < 2) return e;
    double ss = 0.0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / (v.size() - 1)) / std::sqrt(double(v.size()));
    e.half_width = t_quantile_975(v.size() - 1) * e.std_error;
    return e;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

ReplicatedStats replicate(const ScenarioSpec& spec, std::size_t n_reps, unsigned threads) {
    if (n_reps < 2) throw ValidationError("replicate: at least 2 replications required");
    if (auto errs = validate(spec); !errs.empty()) throw ValidationError(errs);

    std::vector<SimStats> runs(n_reps);
    RunOptions options;
    options.record_series = false;
    parallel_for(n_reps, threads, [&](std::size_t r) {
        ScenarioSpec s = spec;
        s.seed = replication_seed(spec.seed, r);
        runs[r] = run(s, options);
    });

    const std::size_t n = spec.system.class_count();
    ReplicatedStats out;
    out.replications = n_reps;
    out.classes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> d, s, q;
        for (const auto& r : runs) {
            d.push_back(r.classes[i].delay.mean);
            s.push_back(r.classes[i].sojourn.mean);
            q.push_back(r.classes[i].mean_queue);
        }
        out.classes[i] = {across(d), across(s), across(q)};
    }
    return out;
}

std::vector<SweepRow> epsilon_sweep(const ScenarioSpec& base, const std::vector<double>& epsilons,
                                    std::size_t n_reps, unsigned threads) {
    if (auto errs = validate(base); !errs.empty()) throw ValidationError(errs);
    for (const auto& phase : base.policy_schedule)
        if (!std::holds_alternative<policy::Accumulating>(phase.policy))
            throw ValidationError("epsilon_sweep: base scenario must use accumulating priority");

    const std::size_t n = base.system.class_count();
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) head += base.system.classes[i].arrival_rate;

    std::vector<double> limit_rates = base.system.arrival_rates();
    limit_rates.back() = 1.0 - head;
    for (double eps : epsilons) {
        if (!(eps > 0.0)) throw ValidationError("epsilon_sweep: epsilon must be positive");
        if (1.0 - head - eps < 0.0)
            throw ValidationError("epsilon_sweep: epsilon " + csv::number(eps) +
                                  " makes the last class's arrival rate negative");
    }
    if (epsilons.empty()) return {};
    const std::vector<double> limits =
        analytic::ap_heavy_traffic_limits(limit_rates, base.system.accumulation_rates());

    std::vector<SweepRow> rows;
    for (double eps : epsilons) {
        ScenarioSpec s = base;
        s.rate_schedule.clear();
        s.system.classes.back().arrival_rate = 1.0 - head - eps;
        const ReplicatedStats rep = replicate(s, n_reps, threads);
        SweepRow row;
        row.epsilon = eps;
        row.limit = limits;
        for (const auto& c : rep.classes) {
            row.scaled_delay.push_back(eps * c.delay.mean);
            row.scaled_delay_se.push_back(eps * c.delay.std_error);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_summary_csv(std::ostream& out, const SimStats& stats) {
    out << "class,mean_delay,delay_ci,mean_sojourn,sojourn_ci,mean_queue,count\n";
    for (std::size_t i = 0; i < stats.classes.size(); ++i) {
        const auto& c = stats.classes[i];
        out << i + 1 << ',' << csv::number(c.delay.mean) << ',' << csv::number(c.delay.half_width)
            << ',' << csv::number(c.sojourn.mean) << ',' << csv::number(c.sojourn.half_width) << ','
            << csv::number(c.mean_queue) << ',' << c.arrivals << '\n';
    }
}

void write_series_csv(std::ostream& out, const SimStats& stats) {
    out << "time";
    for (std::size_t i = 1; i <= stats.classes.size(); ++i) out << ",Q_" << i;
    out << '\n';
    for (std::size_t k = 0; k < stats.sample_times.size(); ++k) {
        out << csv::number(stats.sample_times[k]);
        for (auto q : stats.series[k]) out << ',' << q;
        out << '\n';
    }
}

void write_trace_csv(std::ostream& out, const SimStats& stats) {
    out << "time,event_kind,class_index,customer_id\n";
    for (const auto& e : stats.trace)
        out << csv::number(e.time) << ',' << to_string(e.kind) << ',' << e.class_index << ','
            << e.customer_id << '\n';
}

void write_replicated_csv(std::ostream& out, const ReplicatedStats& stats) {
    out << "class,mean_delay,delay_se,mean_sojourn,sojourn_se,mean_queue,queue_se,replications\n";
    for (std::size_t i = 0; i < stats.classes.size(); ++i) {
        const auto& c = stats.classes[i];
        out << i + 1 << ',' << csv::number(c.delay.mean) << ',' << csv::number(c.delay.std_error)
            << ',' << csv::number(c.sojourn.mean) << ',' << csv::number(c.sojourn.std_error) << ','
            << csv::number(c.queue.mean) << ',' << csv::number(c.queue.std_error) << ','
            << stats.replications << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "epsilon,class,scaled_delay,scaled_delay_se,limit\n";
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.scaled_delay.size(); ++i)
            out << csv::number(r.epsilon) << ',' << i + 1 << ',' << csv::number(r.scaled_delay[i])
                << ',' << csv::number(r.scaled_delay_se[i]) << ',' << csv::number(r.limit[i]) << '\n';
}

} // namespace pqlab::des
