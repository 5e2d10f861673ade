#pragma once

#include "pqlab/model.hpp"

#include <vector>

namespace pqlab::analytic {

/// Per-class steady-state means. Delay is time spent in the waiting room;
/// sojourn adds the unit-mean service time; queue is the mean waiting-room
/// population by Little's law. Unstable classes report +infinity.
struct WaitReport {
    std::vector<double> expected_delay;
    std::vector<double> expected_sojourn;
    std::vector<double> expected_queue;
};

/// Non-preemptive static priority (Cobham). Class i has a finite wait iff
/// sigma_i = lambda_1 + ... + lambda_i < 1, so the top classes of an overloaded
/// system still get finite values. The mean residual work seen by an arrival is
/// min(rho, 1): once rho > 1 the server never idles.
///
/// Throws ValidationError when service_rate != 1 or some sigma_i == 1 exactly.
WaitReport sp_expected_waits(const SystemSpec& system);

/// Non-preemptive accumulating priority, by Kleinrock's backward recursion
/// from the lowest class. Rates must be non-increasing in class index.
///
/// Throws ValidationError when rho >= 1 or service_rate != 1.
WaitReport ap_expected_waits(const SystemSpec& system);

/// Heavy-traffic limit of epsilon * W_i for an AP queue whose limiting rates
/// sum to one: (1/b_i) / sum_k lambda_k / b_k.
std::vector<double> ap_heavy_traffic_limits(const std::vector<double>& limit_rates,
                                            const std::vector<double>& accumulation_rates);

/// Limiting share of the total queue held by each class:
/// (lambda_i / b_i) / sum_k lambda_k / b_k.
std::vector<double> ap_queue_fractions(const std::vector<double>& limit_rates,
                                       const std::vector<double>& accumulation_rates);

/// Mean number in system of an M/M/1 queue at load 1 - epsilon; independent of
/// the (work-conserving) discipline.
double total_queue_heavy_traffic(double epsilon);

struct EquilibriumResult {
    double join_probability = 0.0;
    double effective_rate = 0.0;
    double equilibrium_wait = 0.0;
    /// Set when nobody joins; equilibrium_wait is then the sojourn a lone joiner
    /// would see (1/mu), not an observed quantity.
    bool counterfactual_wait = false;
};

/// Symmetric Nash joining strategy for an unobservable M/M/1 queue with waiting
/// cost C per unit time and service value R. Boundary ties resolve to the
/// interior indifference solution, which makes p_e continuous in lambda.
EquilibriumResult joining_equilibrium(double arrival_rate, double service_rate, double cost,
                                      double reward);

} // namespace pqlab::analytic
