#include "pqlab/analytic.hpp"

#include "pqlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pqlab::analytic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit_service(const SystemSpec& system, const char* who) {
    if (system.service_rate != 1.0)
        throw ValidationError(std::string(who) + ": requires service_rate = 1");
    if (system.classes.empty()) throw ValidationError(std::string(who) + ": no classes");
    for (const auto& c : system.classes)
        if (!(c.arrival_rate >= 0.0) || !std::isfinite(c.arrival_rate))
            throw ValidationError(std::string(who) + ": arrival rates must be non-negative");
}

WaitReport from_delays(const SystemSpec& system, std::vector<double> delay) {
    WaitReport r;
    r.expected_sojourn.resize(delay.size());
    r.expected_queue.resize(delay.size());
    for (std::size_t i = 0; i < delay.size(); ++i) {
        r.expected_sojourn[i] = delay[i] + 1.0;
        const double lambda = system.classes[i].arrival_rate;
        r.expected_queue[i] = lambda == 0.0 && std::isinf(delay[i]) ? 0.0 : lambda * delay[i];
    }
    r.expected_delay = std::move(delay);
    return r;
}

double weighted_inverse_sum(const std::vector<double>& lambda, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) s += lambda[k] / b[k];
    return s;
}

void check_limit_inputs(const std::vector<double>& lambda, const std::vector<double>& b) {
    if (lambda.empty() || lambda.size() != b.size())
        throw ValidationError("limit rates and accumulation rates must be non-empty and equal length");
    const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("limit arrival rates must sum to 1 (got " + std::to_string(total) + ")");
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (!(lambda[k] >= 0.0)) throw ValidationError("limit arrival rates must be non-negative");
        if (!(b[k] > 0.0)) throw ValidationError("accumulation rates must be positive");
        if (k > 0 && !(b[k] < b[k - 1]))
            throw ValidationError("accumulation rates not strictly decreasing");
    }
}

} // namespace

WaitReport sp_expected_waits(const SystemSpec& system) {
    require_unit_service(system, "sp_expected_waits");
    const double residual = std::min(system.load(), 1.0);

    std::vector<double> delay(system.class_count());
    double sigma_prev = 0.0;
    for (std::size_t i = 0; i < delay.size(); ++i) {
        const double sigma = sigma_prev + system.classes[i].arrival_rate;
        if (sigma == 1.0)
            throw ValidationError("sp_expected_waits: cumulative load of class " +
                                  std::to_string(i + 1) + " is exactly 1");
        delay[i] = sigma < 1.0 ? residual / ((1.0 - sigma_prev) * (1.0 - sigma)) : kInf;
        sigma_prev = sigma;
    }
    return from_delays(system, std::move(delay));
}

WaitReport ap_expected_waits(const SystemSpec& system) {
    require_unit_service(system, "ap_expected_waits");
    const double rho = system.load();
    if (!(rho < 1.0))
        throw ValidationError("unstable: Kleinrock recursion undefined for load >= 1");

    const std::vector<double> lambda = system.arrival_rates();
    const std::vector<double> b = system.accumulation_rates();
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (!(b[k] > 0.0)) throw ValidationError("ap_expected_waits: rates must be positive");
        if (k > 0 && b[k] > b[k - 1])
            throw ValidationError("ap_expected_waits: rates must be non-increasing in class index");
    }

    const std::size_t n = lambda.size();
    const double head = rho / (1.0 - rho);
    std::vector<double> delay(n);
    for (std::size_t i = n; i-- > 0;) {
        double numerator = head;
        for (std::size_t k = i + 1; k < n; ++k)
            numerator -= lambda[k] * (1.0 - b[k] / b[i]) * delay[k];
        double denominator = 1.0;
        for (std::size_t k = 0; k <= i; ++k) denominator -= lambda[k] * (1.0 - b[i] / b[k]);
        delay[i] = numerator / denominator;
    }
    return from_delays(system, std::move(delay));
}

std::vector<double> ap_heavy_traffic_limits(const std::vector<double>& limit_rates,
                                            const std::vector<double>& accumulation_rates) {
    check_limit_inputs(limit_rates, accumulation_rates);
    const double s = weighted_inverse_sum(limit_rates, accumulation_rates);
    std::vector<double> out(limit_rates.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 / accumulation_rates[i]) / s;
    return out;
}

std::vector<double> ap_queue_fractions(const std::vector<double>& limit_rates,
                                       const std::vector<double>& accumulation_rates) {
    check_limit_inputs(limit_rates, accumulation_rates);
    const double s = weighted_inverse_sum(limit_rates, accumulation_rates);
    std::vector<double> out(limit_rates.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (limit_rates[i] / accumulation_rates[i]) / s;
    return out;
}

double total_queue_heavy_traffic(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ValidationError("total_queue_heavy_traffic: epsilon must lie in (0, 1)");
    return (1.0 - epsilon) / epsilon;
}

EquilibriumResult joining_equilibrium(double arrival_rate, double service_rate, double cost,
                                      double reward) {
    for (double v : {arrival_rate, service_rate, cost, reward})
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("joining_equilibrium: all inputs must be positive and finite");

    EquilibriumResult r;
    if (service_rate > arrival_rate && reward > cost / (service_rate - arrival_rate)) {
        r.join_probability = 1.0;
        r.effective_rate = arrival_rate;
        r.equilibrium_wait = 1.0 / (service_rate - arrival_rate);
    } else if (reward < cost / service_rate) {
        r.join_probability = 0.0;
        r.effective_rate = 0.0;
        r.equilibrium_wait = 1.0 / service_rate;
        r.counterfactual_wait = true;
    } else {
        // Indifference: R = C / (mu - p lambda).
        const double p = std::clamp((service_rate - cost / reward) / arrival_rate, 0.0, 1.0);
        r.join_probability = p;
        r.effective_rate = p * arrival_rate;
        r.equilibrium_wait = reward / cost;
    }
    return r;
}

} // namespace pqlab::analytic
