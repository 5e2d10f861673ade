// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "pqlab/analytic.hpp"
#include "pqlab/des.hpp"
#include "pqlab/figures.hpp"
#include "pqlab/fluid.hpp"

#include "../fluid_oracle.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pqlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

ScenarioSpec heavy_traffic(PolicySpec p, double horizon, std::uint64_t seed) {
    ScenarioSpec s;
    s.system = figures::heavy_traffic_system(0.001);
    s.policy_schedule = {{0.0, std::move(p)}};
    s.horizon = horizon;
    s.seed = seed;
    s.sample_interval = horizon;
    return s;
}

Outcome cobham_agreement() {
    const auto spec = heavy_traffic(policy::Static{}, 2e6, 1);
    const auto rep = des::replicate(spec, 10);
    const double expected[] = {2.4985, 5.4955, 2998.0};
    Outcome o{true, {}};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& e = rep.classes[i].sojourn;
        const bool ok = std::abs(e.mean - expected[i]) <= 3 * e.std_error;
        o.pass = o.pass && ok;
        o.detail += fmt("class %zu %.4f (se %.4f, target %.4f)%s ", i + 1, e.mean, e.std_error,
                        expected[i], ok ? "" : " OUT");
    }
    return o;
}

Outcome kleinrock_agreement() {
    const auto spec = heavy_traffic(policy::Accumulating{}, 1e7, 1);
    const auto rep = des::replicate(spec, 10);
    const double expected[] = {545.8967386363636, 818.2831704545455, 1634.7272727272727};
    Outcome o{true, {}};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& e = rep.classes[i].delay;
        const double err = std::abs(e.mean - expected[i]);
        const bool in_ci = err <= 3 * e.std_error;
        const bool in_rel = err <= 0.05 * expected[i];
        o.pass = o.pass && (in_ci || in_rel);
        o.detail += fmt("class %zu %.1f (se %.1f, target %.1f, %s) ", i + 1, e.mean, e.std_error,
                        expected[i], in_ci ? "3se" : in_rel ? "5%" : "OUT");
    }
    return o;
}

Outcome heavy_traffic_limits() {
    const auto base = heavy_traffic(policy::Accumulating{}, 2e6, 1);
    const std::vector<double> eps = {0.1, 0.05, 0.02, 0.01};
    const auto rows = des::epsilon_sweep(base, eps, 10);
    const double limits[] = {6.0 / 11, 9.0 / 11, 18.0 / 11};
    Outcome o{true, {}};
    for (std::size_t i = 0; i < 3; ++i) {
        if (std::abs(rows[0].limit[i] - limits[i]) > 1e-12) o.pass = false;
        bool approaching = true;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            const double prev = std::abs(rows[k - 1].scaled_delay[i] - limits[i]);
            const double cur = std::abs(rows[k].scaled_delay[i] - limits[i]);
            const double slack = 3 * std::hypot(rows[k - 1].scaled_delay_se[i], rows[k].scaled_delay_se[i]);
            approaching = approaching && cur <= prev + slack;
        }
        const double rel = std::abs(rows.back().scaled_delay[i] - limits[i]) / limits[i];
        o.pass = o.pass && approaching && rel < 0.10;
        o.detail += fmt("class %zu:", i + 1);
        for (const auto& r : rows) o.detail += fmt(" %.4f", r.scaled_delay[i]);
        o.detail += fmt(" -> %.4f (rel %.3f%s) ", limits[i], rel, approaching ? "" : ", not monotone");
    }
    return o;
}

Outcome conservation() {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const double rho = 0.05 + 0.94 * u(gen);
        SystemSpec s;
        double total = 0.0, b = 10.0;
        for (std::size_t i = 0; i < n; ++i) {
            s.classes.push_back({0.05 + u(gen), b});
            total += s.classes.back().arrival_rate;
            b *= 0.2 + 0.75 * u(gen);
        }
        for (auto& c : s.classes) c.arrival_rate *= rho / total;
        const auto sp = analytic::sp_expected_waits(s);
        const auto ap = analytic::ap_expected_waits(s);
        double a = 0.0, c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            a += s.classes[i].arrival_rate * sp.expected_delay[i];
            c += s.classes[i].arrival_rate * ap.expected_delay[i];
        }
        const double r = s.load();
        worst = std::max({worst, std::abs(a - c), std::abs(a - r * r / (1 - r))});
    }
    return {worst <= 1e-9, fmt("max |SP - AP| over 100 systems = %.3g", worst)};
}

Outcome fluid_exactness() {
    std::mt19937_64 gen(555);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_path = 0.0, worst_slope = 0.0, worst_share = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 4;
        std::vector<double> lambda(n), b(n), levels(n);
        double rho = 0, total = 0;
        do {
            rho = 1.0 + 0.5 * u(gen);
            total = 0;
            for (auto& l : lambda) total += (l = 0.2 + u(gen));
            for (auto& l : lambda) l *= rho / total;
        } while (std::any_of(lambda.begin(), lambda.end(), [&](double l) { return rho - l >= 1; }));
        double rate = 1 + 4 * u(gen);
        for (auto& x : b) {
            x = rate;
            rate *= 0.2 + 0.7 * u(gen);
        }
        for (auto& l : levels) l = u(gen) < 0.3 ? 0.0 : 3 * u(gen);
        SystemSpec s;
        for (std::size_t i = 0; i < n; ++i) s.classes.push_back({lambda[i], b[i]});

        const auto traj = fluid::ap_fluid_trajectory(s, levels, 20);
        const auto euler = test::euler_fluid(lambda, b, levels, 20, 1e-4, test::EulerRule::Accumulating, 0.01);
        for (std::size_t k = 0; k < euler.times.size(); ++k) {
            const auto exact = traj.levels_at(euler.times[k]);
            for (std::size_t i = 0; i < n; ++i)
                worst_path = std::max(worst_path, std::abs(exact[i] - euler.levels[k][i]));
        }
        const auto g = fluid::ap_growth_rates(s);
        const auto f = analytic::ap_queue_fractions(
            [&] {
                std::vector<double> v = lambda;
                for (auto& x : v) x /= rho;
                return v;
            }(),
            b);
        double sum = 0;
        for (double r : traj.terminal_growth_rates) sum += r;
        for (std::size_t i = 0; i < n; ++i) {
            worst_slope = std::max(worst_slope, std::abs(traj.terminal_growth_rates[i] - g[i]));
            worst_share = std::max(worst_share, std::abs(traj.terminal_growth_rates[i] / sum - f[i]));
        }
    }
    return {worst_path < 1e-2 && worst_slope <= 1e-12 && worst_share <= 1e-12,
            fmt("sup|exact - euler| = %.2e, slope err = %.2e, share err = %.2e", worst_path, worst_slope,
                worst_share)};
}

Outcome fluid_drain_times() {
    SystemSpec s;
    s.classes = {{0.4, 3}, {0.4, 2}, {0.4, 1}};
    const auto t = fluid::sp_fluid_trajectory(s, {1, 0, 0}, 10);
    if (t.breakpoints.size() < 3) return {false, "fewer than two drain events"};
    const double t1 = t.breakpoints[1].time, t2 = t.breakpoints[2].time;
    const double slope = t.terminal_growth_rates[2];
    const double l3 = t.breakpoints[2].levels[2];
    const bool ok = std::abs(t1 - 5.0 / 3) <= 1e-12 && std::abs(t2 - 5.0) <= 1e-12 &&
                    std::abs(slope - 0.2) <= 1e-12 && std::abs(l3 - 2.0) <= 1e-12 &&
                    t.terminal_growth_rates[0] == 0 && t.terminal_growth_rates[1] == 0;
    return {ok, fmt("T1 = %.17g, T2 = %.17g, class-3 slope %.17g from level %.17g", t1, t2, slope, l3)};
}

std::uint32_t max_of(const des::SimStats& st, std::size_t cls, double from = 0, double to = INFINITY) {
    std::uint32_t m = 0;
    for (std::size_t k = 0; k < st.sample_times.size(); ++k)
        if (st.sample_times[k] >= from && st.sample_times[k] < to) m = std::max(m, st.series[k][cls]);
    return m;
}

Outcome figure_shapes() {
    const auto figs = figures::canned();
    Outcome o{true, {}};
    auto check = [&](bool ok, const std::string& what) {
        o.pass = o.pass && ok;
        o.detail += what + (ok ? "" : " FAIL") + "; ";
    };

    const auto f1 = des::run(figs[0].scenario);
    check(max_of(f1, 0) > 100 && max_of(f1, 1) > 100 && max_of(f1, 2) > 100,
          fmt("fig1 max (%u, %u, %u) > 100", max_of(f1, 0), max_of(f1, 1), max_of(f1, 2)));
    for (int k : {1, 2}) {
        const auto f = des::run(figs[k].scenario);
        check(max_of(f, 0) < 50 && max_of(f, 1) < 50 && max_of(f, 2) > 200,
              fmt("fig%d max (%u, %u) < 50, %u > 200", k + 1, max_of(f, 0), max_of(f, 1), max_of(f, 2)));
    }

    const auto& sw = figs[3].scenario;
    const double t_heavy = sw.rate_schedule[1].start, t_static = sw.policy_schedule[1].start;
    const auto f4 = des::run(sw);
    const auto p2_1 = max_of(f4, 0, t_heavy, t_static), p2_2 = max_of(f4, 1, t_heavy, t_static);
    // Time after which classes 1 and 2 stay below 50 for the rest of the run.
    double settle = sw.horizon;
    for (std::size_t k = f4.sample_times.size(); k-- > 0;) {
        if (f4.sample_times[k] < t_static || f4.series[k][0] >= 50 || f4.series[k][1] >= 50) break;
        settle = f4.sample_times[k];
    }
    check(p2_1 > 100 && p2_2 > 100 && settle < sw.horizon,
          fmt("fig4 phase-2 max (%u, %u) > 100, below 50 from t = %.0f (switch at %.0f)", p2_1, p2_2, settle,
              t_static));
    return o;
}

Outcome equilibrium() {
    Outcome o{true, {}};
    const auto a = analytic::joining_equilibrium(2, 1, 1, 5);
    const auto b = analytic::joining_equilibrium(0.5, 1, 1, 5);
    const auto c = analytic::joining_equilibrium(1, 1, 2, 1);
    const bool ex = std::abs(a.join_probability - 0.4) < 1e-15 && std::abs(a.effective_rate - 0.8) < 1e-15 &&
                    a.equilibrium_wait == 5.0 && b.join_probability == 1.0 && b.equilibrium_wait == 2.0 &&
                    c.join_probability == 0.0;
    o.pass = ex;
    o.detail = fmt("examples p = (%.17g, %g, %g), W = (%g, %g); ", a.join_probability, b.join_probability,
                   c.join_probability, a.equilibrium_wait, b.equilibrium_wait);
    double worst_cap = 0, max_w = 0;
    for (int k = 1; k <= 3000; ++k) {
        const double lambda = k * 1e-3;
        const auto r = analytic::joining_equilibrium(lambda, 1, 1, 5);
        max_w = std::max(max_w, r.equilibrium_wait);
        if (lambda >= 0.8) worst_cap = std::max(worst_cap, std::abs(r.equilibrium_wait - 5.0));
    }
    const bool scan = worst_cap == 0.0 && max_w <= 5.0;
    o.pass = o.pass && scan;
    o.detail += fmt("scan max W = %g, max |W - 5| for lambda >= 0.8 = %g", max_w, worst_cap);
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "pqlab_acceptance_figures";
    fs::remove_all(root);
    for (const char* run : {"a", "b"}) {
        const std::string cmd = std::string(PQLAB_CLI_PATH) + " figures --quiet --out " + (root / run).string();
        const int status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "figures verb failed"};
    }
    std::size_t files = 0;
    bool same = true;
    for (const auto& fig : figures::canned())
        for (const char* f : {"series.csv", "summary.csv", "scenario.json"}) {
            const auto x = slurp(root / "a" / fig.name / f);
            same = same && !x.empty() && x == slurp(root / "b" / fig.name / f);
            ++files;
        }
    fs::remove_all(root);
    return {same, fmt("%zu files compared byte for byte", files)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"AC1 static priority simulation vs Cobham", cobham_agreement},
        {"AC2 accumulating priority simulation vs Kleinrock", kleinrock_agreement},
        {"AC3 heavy-traffic limits of epsilon * delay", heavy_traffic_limits},
        {"AC4 conservation law SP vs AP", conservation},
        {"AC5 exact AP fluid vs Euler and growth rates", fluid_exactness},
        {"AC6 SP fluid drain times", fluid_drain_times},
        {"AC7 figure scenario shapes", figure_shapes},
        {"AC8 joining equilibrium", equilibrium},
        {"AC9 figure outputs deterministic", determinism},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %s  [%.1fs]  %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
