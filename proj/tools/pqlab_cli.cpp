// pqlab: command-line front end for the priority-queue laboratory.
//
// Exit codes: 0 success, 2 validation failure, 3 runtime or resource guard,
// 4 I/O failure.

#include "pqlab/analytic.hpp"
#include "pqlab/csv.hpp"
#include "pqlab/des.hpp"
#include "pqlab/error.hpp"
#include "pqlab/figures.hpp"
#include "pqlab/fluid.hpp"
#include "pqlab/scenario_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace pqlab;

namespace {

enum ExitCode : int { kOk = 0, kValidation = 2, kRuntime = 3, kIo = 4 };

struct Options {
    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::vector<double> epsilons;
    std::size_t reps = 0;
    bool quiet = false;
    bool trace = false;
    std::string levels;
    double lambda = 0.0, mu = 1.0, cost = 0.0, reward = 0.0;
};

void log(const Options& o, const std::string& msg) {
    if (!o.quiet) std::cerr << msg << '\n';
}

ScenarioSpec load(const Options& o) {
    if (o.scenario_path.empty()) throw ValidationError("--scenario is required");
    ScenarioSpec spec = io::load_scenario(o.scenario_path);
    if (o.seed) spec.seed = *o.seed;
    if (o.horizon) spec.horizon = *o.horizon;
    if (auto errs = validate(spec); !errs.empty()) {
        std::string msg = o.scenario_path + ": invalid scenario";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return spec;
}

/// Applies a single --epsilon override as lambda_{N+1} = 1 - sum_{k<=N} lambda_k - epsilon.
void apply_epsilon(ScenarioSpec& spec, const Options& o) {
    if (o.epsilons.empty()) return;
    if (o.epsilons.size() > 1) throw ValidationError("--epsilon given more than once");
    const double eps = o.epsilons.front();
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < spec.system.classes.size(); ++i)
        head += spec.system.classes[i].arrival_rate;
    const double last = 1.0 - head - eps;
    if (!(eps > 0.0) || last < 0.0)
        throw ValidationError("--epsilon " + csv::number(eps) + " gives a negative last-class rate");
    spec.system.classes.back().arrival_rate = last;
    spec.rate_schedule.clear();
}

/// Writes to <out>/<name>, or to stdout when no output directory was given.
void emit(const Options& o, const std::string& name, const std::string& content) {
    if (o.out_dir.empty()) {
        std::cout << content;
        return;
    }
    const fs::path path = fs::path(o.out_dir) / name;
    csv::write_atomic(path, content);
    log(o, "wrote " + path.string());
}

std::string provenance(const ScenarioSpec& spec) {
    return "# seed=" + std::to_string(spec.seed) + " horizon=" + csv::number(spec.horizon) + '\n';
}

int cmd_analyze(const Options& o) {
    ScenarioSpec spec = load(o);
    apply_epsilon(spec, o);
    const PolicySpec& pol = spec.policy_schedule.front().policy;
    if (std::holds_alternative<policy::HybridLex>(pol))
        throw ValidationError("analyze: no closed form for hybrid_lex; use simulate");

    const bool static_policy = std::holds_alternative<policy::Static>(pol);
    SystemSpec system = spec.system;
    const std::vector<double> rates = effective_rates(system, pol);
    for (std::size_t i = 0; i < rates.size(); ++i) system.classes[i].accumulation_rate = rates[i];

    analytic::WaitReport report;
    std::vector<double> limits(system.class_count(), std::nan(""));
    std::vector<double> fractions(system.class_count(), std::nan(""));
    if (static_policy) {
        report = analytic::sp_expected_waits(system);
    } else {
        if (!(system.load() < 1.0))
            throw ValidationError("unstable: load " + csv::number(system.load()) +
                                  " >= 1 has no accumulating-priority steady state; "
                                  "use the fluid verb for overload");
        report = analytic::ap_expected_waits(system);
        std::vector<double> lim = system.arrival_rates();
        double head = 0.0;
        for (std::size_t i = 0; i + 1 < lim.size(); ++i) head += lim[i];
        lim.back() = 1.0 - head;
        bool decreasing = true;
        for (std::size_t i = 1; i < rates.size(); ++i) decreasing = decreasing && rates[i] < rates[i - 1];
        if (lim.back() >= 0.0 && decreasing) {
            limits = analytic::ap_heavy_traffic_limits(lim, rates);
            fractions = analytic::ap_queue_fractions(lim, rates);
        }
    }

    std::ostringstream out;
    out << "class,arrival_rate,accumulation_rate,expected_delay,expected_sojourn,expected_queue,"
           "ht_limit_scaled_wait,ht_queue_fraction\n";
    for (std::size_t i = 0; i < system.class_count(); ++i)
        out << i + 1 << ',' << csv::number(system.classes[i].arrival_rate) << ','
            << csv::number(rates[i]) << ',' << csv::number(report.expected_delay[i]) << ','
            << csv::number(report.expected_sojourn[i]) << ',' << csv::number(report.expected_queue[i])
            << ',' << csv::number(limits[i]) << ',' << csv::number(fractions[i]) << '\n';
    emit(o, "summary.csv", out.str());
    return kOk;
}

std::vector<double> parse_levels(const std::string& text, std::size_t n) {
    std::vector<double> out;
    if (text.empty()) return std::vector<double>(n, 0.0);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("--levels: '" + item + "' is not a number");
        }
    }
    if (out.size() != n)
        throw ValidationError("--levels: expected " + std::to_string(n) + " comma-separated values");
    return out;
}

int cmd_fluid(const Options& o) {
    const ScenarioSpec spec = load(o);
    if (o.out_dir.empty()) throw ValidationError("fluid: --out is required");
    const auto levels = parse_levels(o.levels, spec.system.class_count());
    const PolicySpec& pol = spec.policy_schedule.front().policy;

    fluid::FluidTrajectory traj;
    if (std::holds_alternative<policy::Static>(pol))
        traj = fluid::sp_fluid_trajectory(spec.system, levels, spec.horizon);
    else if (std::holds_alternative<policy::Accumulating>(pol))
        traj = fluid::ap_fluid_trajectory(spec.system, levels, spec.horizon);
    else
        throw ValidationError("fluid: only static and accumulating policies have a fluid solver");

    std::ostringstream out;
    fluid::write_csv(out, traj, spec.system, spec.sample_interval);
    emit(o, "fluid.csv", out.str());

    std::ostringstream rates;
    rates << "class,terminal_growth_rate\n";
    for (std::size_t i = 0; i < traj.terminal_growth_rates.size(); ++i)
        rates << i + 1 << ',' << csv::number(traj.terminal_growth_rates[i]) << '\n';
    emit(o, "growth_rates.csv", rates.str());
    return kOk;
}

int cmd_simulate(const Options& o) {
    ScenarioSpec spec = load(o);
    apply_epsilon(spec, o);
    if (o.out_dir.empty()) throw ValidationError("simulate: --out is required");

    if (o.reps >= 2) {
        const auto stats = des::replicate(spec, o.reps);
        std::ostringstream out;
        out << provenance(spec);
        des::write_replicated_csv(out, stats);
        emit(o, "replicated.csv", out.str());
        return kOk;
    }

    des::RunOptions options;
    options.record_trace = o.trace;
    const auto stats = des::run(spec, options);
    std::ostringstream summary, series;
    summary << provenance(spec);
    des::write_summary_csv(summary, stats);
    series << provenance(spec);
    des::write_series_csv(series, stats);
    emit(o, "summary.csv", summary.str());
    emit(o, "series.csv", series.str());
    if (o.trace) {
        std::ostringstream trace;
        trace << provenance(spec);
        des::write_trace_csv(trace, stats);
        emit(o, "trace.csv", trace.str());
    }
    return kOk;
}

int cmd_sweep(const Options& o) {
    const ScenarioSpec spec = load(o);
    const auto rows = des::epsilon_sweep(spec, o.epsilons, o.reps == 0 ? 4 : o.reps);
    std::ostringstream out;
    out << provenance(spec);
    des::write_sweep_csv(out, rows);
    emit(o, "sweep.csv", out.str());
    return kOk;
}

int cmd_equilibrium(const Options& o) {
    const auto r = analytic::joining_equilibrium(o.lambda, o.mu, o.cost, o.reward);
    std::ostringstream out;
    out << "lambda,mu,cost,reward,join_probability,effective_rate,equilibrium_wait,counterfactual\n"
        << csv::number(o.lambda) << ',' << csv::number(o.mu) << ',' << csv::number(o.cost) << ','
        << csv::number(o.reward) << ',' << csv::number(r.join_probability) << ','
        << csv::number(r.effective_rate) << ',' << csv::number(r.equilibrium_wait) << ','
        << (r.counterfactual_wait ? "true" : "false") << '\n';
    emit(o, "equilibrium.csv", out.str());
    return kOk;
}

int cmd_figures(const Options& o) {
    if (o.out_dir.empty()) throw ValidationError("figures: --out is required");
    const auto figs = figures::canned();
    std::vector<std::string> series(figs.size()), summaries(figs.size());
    std::vector<std::exception_ptr> errors(figs.size());
    {
        std::vector<std::jthread> workers;
        for (std::size_t k = 0; k < figs.size(); ++k)
            workers.emplace_back([&, k] {
                try {
                    const auto stats = des::run(figs[k].scenario);
                    std::ostringstream s, m;
                    s << provenance(figs[k].scenario) << "# " << figs[k].title << '\n';
                    des::write_series_csv(s, stats);
                    m << provenance(figs[k].scenario);
                    des::write_summary_csv(m, stats);
                    series[k] = s.str();
                    summaries[k] = m.str();
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (std::size_t k = 0; k < figs.size(); ++k) {
        const fs::path dir = fs::path(o.out_dir) / figs[k].name;
        csv::write_atomic(dir / "series.csv", series[k]);
        csv::write_atomic(dir / "summary.csv", summaries[k]);
        csv::write_atomic(dir / "scenario.json", io::to_json(figs[k].scenario).dump(2) + '\n');
        log(o, "wrote " + dir.string());
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pqlab: multi-class priority queues in heavy traffic and overload"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", o.out_dir, "Output directory");
        sub->add_flag("--quiet", o.quiet, "Suppress progress messages");
    };
    auto add_scenario = [&](CLI::App* sub) {
        sub->add_option("--scenario", o.scenario_path, "Scenario JSON file")->required();
        sub->add_option("--seed", o.seed, "Override the scenario seed");
        sub->add_option("--horizon", o.horizon, "Override the scenario horizon");
    };

    auto* analyze = app.add_subcommand("analyze", "Closed-form expected waits for the scenario's first policy");
    add_scenario(analyze);
    add_common(analyze);
    analyze->add_option("--epsilon", o.epsilons, "Set the last class rate to 1 - sum(others) - epsilon");

    auto* fluid_cmd = app.add_subcommand("fluid", "Exact fluid trajectory (static or accumulating)");
    add_scenario(fluid_cmd);
    add_common(fluid_cmd);
    fluid_cmd->add_option("--levels", o.levels, "Initial fluid levels, comma separated");

    auto* simulate = app.add_subcommand("simulate", "Discrete-event simulation");
    add_scenario(simulate);
    add_common(simulate);
    simulate->add_option("--epsilon", o.epsilons, "Set the last class rate to 1 - sum(others) - epsilon");
    simulate->add_option("--reps", o.reps, "Independent replications (>= 2 aggregates)");
    simulate->add_flag("--trace", o.trace, "Also write the event trace");

    auto* sweep = app.add_subcommand("sweep", "Heavy-traffic epsilon sweep under accumulating priority");
    add_scenario(sweep);
    add_common(sweep);
    sweep->add_option("--epsilon", o.epsilons, "Sweep point (repeatable)")->required();
    sweep->add_option("--reps", o.reps, "Replications per point (default 4)");

    auto* equilibrium = app.add_subcommand("equilibrium", "Joining equilibrium of an unobservable M/M/1 queue");
    add_common(equilibrium);
    equilibrium->add_option("--lambda", o.lambda, "Potential arrival rate")->required();
    equilibrium->add_option("--mu", o.mu, "Service rate")->capture_default_str();
    equilibrium->add_option("--cost", o.cost, "Waiting cost per unit time (C)")->required();
    equilibrium->add_option("--reward", o.reward, "Service value (R)")->required();

    auto* figures_cmd = app.add_subcommand("figures", "Run the four canned heavy-traffic scenarios");
    add_common(figures_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*analyze) return cmd_analyze(o);
        if (*fluid_cmd) return cmd_fluid(o);
        if (*simulate) return cmd_simulate(o);
        if (*sweep) return cmd_sweep(o);
        if (*equilibrium) return cmd_equilibrium(o);
        if (*figures_cmd) return cmd_figures(o);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
