#include "pqlab/fluid.hpp"

#include "pqlab/csv.hpp"
#include "pqlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace pqlab::fluid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative tolerance for treating two event times or priorities as equal.
constexpr double kTieTol = 1e-12;

struct Segment {
    std::vector<double> slopes;
    std::vector<std::size_t> active; // 1-based
    double duration = kInf;          // kInf: nothing changes after this point
    std::vector<double> end_levels;  // levels at the next breakpoint
};

struct Model {
    std::vector<double> lambda;
    std::vector<double> b;
    double rho = 0.0;
    std::size_t n = 0;
};

Model prepare(const SystemSpec& system, const std::vector<double>& initial_levels,
              double horizon, bool accumulating) {
    const std::string who = accumulating ? "ap_fluid_trajectory" : "sp_fluid_trajectory";
    auto fail = [&](const std::string& msg) { throw ValidationError(who + ": " + msg); };

    if (auto errs = validate(system); !errs.empty()) throw ValidationError(errs);
    if (system.service_rate != 1.0) fail("requires service_rate = 1");
    if (initial_levels.size() != system.class_count())
        fail("initial levels must have one entry per class");
    for (double l : initial_levels)
        if (!std::isfinite(l) || l < 0.0) fail("initial levels must be finite and non-negative");
    if (!std::isfinite(horizon) || !(horizon > 0.0)) fail("horizon must be positive");

    Model m{system.arrival_rates(), system.accumulation_rates(), system.load(), system.class_count()};
    for (std::size_t i = 0; i < m.n; ++i) {
        if (!(m.rho - m.lambda[i] < 1.0))
            fail("removing class " + std::to_string(i + 1) + " must leave a stable system");
        if (accumulating && !(m.lambda[i] > 0.0))
            fail("every class needs a positive arrival rate");
    }
    return m;
}

std::vector<double> priorities_of(const Model& m, const std::vector<double>& levels) {
    std::vector<double> p(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i)
        if (m.lambda[i] > 0.0) p[i] = m.b[i] * levels[i] / m.lambda[i];
    return p;
}

/// Runs segment by segment until a terminal segment, then trims to the horizon.
template <class NextSegment>
FluidTrajectory drive(const Model& m, std::vector<double> levels, double horizon,
                      NextSegment&& next_segment) {
    const std::size_t max_breakpoints = 2 * m.n * m.n;

    std::vector<FluidState> states;
    std::vector<std::vector<double>> slopes;
    double t = 0.0;
    while (true) {
        if (states.size() >= max_breakpoints + 1)
            throw ResourceError("fluid event loop did not converge within " +
                                std::to_string(max_breakpoints) + " breakpoints");
        Segment seg = next_segment(levels);
        states.push_back({t, levels, priorities_of(m, levels), seg.active});
        slopes.push_back(std::move(seg.slopes));
        if (seg.duration == kInf) break;
        t += seg.duration;
        levels = std::move(seg.end_levels);
    }

    FluidTrajectory out;
    out.terminal_growth_rates = slopes.back();
    for (std::size_t k = 0; k < states.size() && states[k].time <= horizon; ++k) {
        out.breakpoints.push_back(states[k]);
        out.slopes.push_back(slopes[k]);
    }
    if (out.breakpoints.back().time < horizon) {
        FluidState tail = out.breakpoints.back();
        tail.levels = out.levels_at(horizon);
        tail.priorities = priorities_of(m, tail.levels);
        tail.time = horizon;
        out.breakpoints.push_back(std::move(tail));
        out.slopes.push_back(out.slopes.back());
    }
    return out;
}

std::vector<double> advance(const std::vector<double>& levels, const std::vector<double>& slopes,
                            double dt) {
    std::vector<double> out(levels.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, levels[i] + slopes[i] * dt);
    return out;
}

} // namespace

std::vector<double> FluidTrajectory::levels_at(double t) const {
    if (breakpoints.empty()) return {};
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                               [](double v, const FluidState& s) { return v < s.time; });
    const std::size_t k = it == breakpoints.begin()
                              ? 0
                              : static_cast<std::size_t>(std::prev(it) - breakpoints.begin());
    const FluidState& s = breakpoints[k];
    return advance(s.levels, slopes[k], std::max(0.0, t - s.time));
}

FluidTrajectory sp_fluid_trajectory(const SystemSpec& system,
                                    const std::vector<double>& initial_levels, double horizon) {
    const Model m = prepare(system, initial_levels, horizon, false);

    auto next_segment = [&m](const std::vector<double>& levels) {
        Segment seg;
        seg.slopes = m.lambda;
        const auto first = std::find_if(levels.begin(), levels.end(), [](double l) { return l > 0.0; });

        if (first == levels.end()) {
            // All empty: classes are held at zero in order until capacity runs out.
            double sigma = 0.0;
            for (std::size_t i = 0; i < m.n; ++i) {
                sigma += m.lambda[i];
                if (sigma > 1.0) {
                    seg.slopes[i] = sigma - 1.0;
                    seg.active = {i + 1};
                    return seg;
                }
                seg.slopes[i] = 0.0;
            }
            return seg;
        }

        const auto k = static_cast<std::size_t>(first - levels.begin());
        double capacity = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            seg.slopes[j] = 0.0;
            capacity -= m.lambda[j];
        }
        seg.slopes[k] = m.lambda[k] - capacity;
        seg.active = {k + 1};
        if (seg.slopes[k] >= 0.0) return seg;

        seg.duration = levels[k] / -seg.slopes[k];
        seg.end_levels = advance(levels, seg.slopes, seg.duration);
        seg.end_levels[k] = 0.0;
        return seg;
    };
    return drive(m, initial_levels, horizon, next_segment);
}

FluidTrajectory ap_fluid_trajectory(const SystemSpec& system,
                                    const std::vector<double>& initial_levels, double horizon) {
    const Model m = prepare(system, initial_levels, horizon, true);
    const std::size_t n = m.n;

    auto level_for = [&m](std::size_t i, double p) { return m.lambda[i] * p / m.b[i]; };

    // Members of the maximal set are kept on a common priority; near-ties in the
    // initial state are snapped together.
    std::vector<double> start = initial_levels;
    {
        const auto p = priorities_of(m, start);
        const double pmax = *std::max_element(p.begin(), p.end());
        for (std::size_t i = 0; i < n; ++i)
            if (pmax > 0.0 && p[i] >= pmax * (1.0 - kTieTol)) start[i] = level_for(i, pmax);
    }

    auto next_segment = [&](const std::vector<double>& levels) {
        Segment seg;
        seg.slopes = m.lambda;
        const auto p = priorities_of(m, levels);
        const double pmax = *std::max_element(p.begin(), p.end());

        if (!(pmax > 0.0)) {
            if (m.rho > 1.0) {
                seg.slopes = ap_growth_rates(system);
                for (std::size_t i = 0; i < n; ++i) seg.active.push_back(i + 1);
            } else {
                std::fill(seg.slopes.begin(), seg.slopes.end(), 0.0);
            }
            return seg;
        }

        std::vector<bool> member(n, false);
        double lambda_sum = 0.0;
        double weight_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (p[i] >= pmax * (1.0 - kTieTol)) {
                member[i] = true;
                seg.active.push_back(i + 1);
                lambda_sum += m.lambda[i];
                weight_sum += m.lambda[i] / m.b[i];
            }
        }
        // Shared priority slope that keeps the members equal with total service 1.
        const double c = (lambda_sum - 1.0) / weight_sum;
        for (std::size_t i = 0; i < n; ++i)
            if (member[i]) seg.slopes[i] = m.lambda[i] * c / m.b[i];

        if (seg.active.size() == n) {
            if (m.rho > 1.0) {
                // Same closed form as ap_growth_rates, so the terminal slopes match bitwise.
                seg.slopes = ap_growth_rates(system);
                return seg;
            }
            if (c >= 0.0) return seg;
            seg.duration = pmax / -c;
            seg.end_levels.assign(n, 0.0);
            return seg;
        }

        if (!(c < 0.0))
            throw std::logic_error("ap_fluid_trajectory: partial maximal set with non-negative drift");

        double dt = kInf;
        std::vector<double> catch_up(n, kInf);
        for (std::size_t k = 0; k < n; ++k) {
            if (member[k]) continue;
            catch_up[k] = (pmax - p[k]) / (m.b[k] - c);
            dt = std::min(dt, catch_up[k]);
        }
        if (!(dt < pmax / -c))
            throw std::logic_error("ap_fluid_trajectory: maximal set emptied before coalescing");

        seg.duration = dt;
        const double shared = std::max(0.0, pmax + c * dt);
        seg.end_levels = advance(levels, seg.slopes, dt);
        for (std::size_t i = 0; i < n; ++i)
            if (member[i] || catch_up[i] <= dt + kTieTol * std::max(1.0, dt))
                seg.end_levels[i] = level_for(i, shared);
        return seg;
    };

    return drive(m, std::move(start), horizon, next_segment);
}

std::vector<double> ap_growth_rates(const SystemSpec& system) {
    const double rho = system.load();
    if (!(rho > 1.0)) throw ValidationError("ap_growth_rates: requires load > 1");
    double weight_sum = 0.0;
    for (const auto& c : system.classes) weight_sum += c.arrival_rate / c.accumulation_rate;
    std::vector<double> out;
    out.reserve(system.class_count());
    for (const auto& c : system.classes)
        out.push_back((rho - 1.0) * (c.arrival_rate / c.accumulation_rate) / weight_sum);
    return out;
}

void write_csv(std::ostream& out, const FluidTrajectory& trajectory, const SystemSpec& system,
               double sample_interval) {
    const std::size_t n = system.class_count();
    out << "time";
    for (std::size_t i = 1; i <= n; ++i) out << ",L_" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",P_" << i;
    out << ",active_set\n";
    if (trajectory.breakpoints.empty()) return;

    std::vector<double> times;
    for (const auto& s : trajectory.breakpoints) times.push_back(s.time);
    const double end = trajectory.breakpoints.back().time;
    if (sample_interval > 0.0)
        for (std::size_t k = 0; static_cast<double>(k) * sample_interval <= end; ++k)
            times.push_back(static_cast<double>(k) * sample_interval);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    std::size_t seg = 0;
    for (double t : times) {
        while (seg + 1 < trajectory.breakpoints.size() && trajectory.breakpoints[seg + 1].time <= t)
            ++seg;
        const FluidState& s = trajectory.breakpoints[seg];
        std::vector<double> levels;
        std::vector<double> prio;
        if (s.time == t) {
            levels = s.levels;
            prio = s.priorities;
        } else {
            levels = trajectory.levels_at(t);
            prio.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& c = system.classes[i];
                if (c.arrival_rate > 0.0) prio[i] = c.accumulation_rate * levels[i] / c.arrival_rate;
            }
        }
        out << csv::number(t);
        for (double v : levels) out << ',' << csv::number(v);
        for (double v : prio) out << ',' << csv::number(v);
        out << ',';
        for (std::size_t j = 0; j < s.active_set.size(); ++j) out << (j ? ";" : "") << s.active_set[j];
        out << '\n';
    }
}

} // namespace pqlab::fluid
